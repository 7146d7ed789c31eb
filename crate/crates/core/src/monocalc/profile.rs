use super::step::{ExtReal, StepFunction};

/// Orlicz functions derived from a spectral decay `F`.
///
/// * `G(λ) = Σ_{λ_i ≤ λ} w_i/λ_i`
/// * `H(y) = y·G⁻¹(y)`
/// * `L̂(t) = Σ w_i e^{-λ_i t}`, `M̂(t) = Σ (w_i/λ_i) e^{-λ_i t}`
/// * `N(y) = y / M̂⁻¹(y)` with `M̂⁻¹(y) = inf{t ≥ 0 : M̂(t) ≤ y}`
///
/// `L̂` and `M̂` are the Laplace transforms of `dF` and `dG`; they bound the
/// operator quantities `L`, `M` from above and coincide with them for scalar
/// invariant operators.
#[derive(Clone, Debug)]
pub struct OrliczProfile {
    base: StepFunction,
    g: StepFunction,
    tolerance: f64,
}

impl OrliczProfile {
    pub fn new(base: StepFunction) -> Self {
        Self::with_tolerance(base, 1e-15)
    }

    /// `tolerance` is the relative accuracy targeted when inverting `M̂`.
    pub fn with_tolerance(base: StepFunction, tolerance: f64) -> Self {
        let g = base.g_transform();
        OrliczProfile { base, g, tolerance }
    }

    pub fn f(&self) -> &StepFunction {
        &self.base
    }

    pub fn g(&self) -> &StepFunction {
        &self.g
    }

    pub fn h(&self, y: f64) -> ExtReal {
        if y <= 0.0 {
            return ExtReal::Finite(0.0);
        }
        self.g.right_inverse(y).scale(y)
    }

    pub fn l_hat(&self, t: f64) -> f64 {
        self.base.laplace(t)
    }

    pub fn m_hat(&self, t: f64) -> f64 {
        self.g.laplace(t)
    }

    /// `(L̂(t), M̂(t))`.
    pub fn heat(&self, t: f64) -> (f64, f64) {
        (self.l_hat(t), self.m_hat(t))
    }

    /// `inf{t ≥ 0 : M̂(t) ≤ y}`; `+∞` for `y ≤ 0` when the spectrum is nonempty.
    pub fn m_inverse(&self, y: f64) -> ExtReal {
        let m0 = self.g.total_mass();
        if y >= m0 {
            return ExtReal::Finite(0.0);
        }
        if y <= 0.0 {
            return ExtReal::PosInf;
        }
        // M̂ is convex and strictly decreasing, so Newton iterates started left
        // of the root increase monotonically towards it.
        let mut t = 0.0f64;
        for _ in 0..1000 {
            let (l, m) = self.heat(t);
            let excess = m - y;
            if excess <= self.tolerance * y || l <= 0.0 {
                break;
            }
            let step = excess / l;
            t += step;
            if step <= self.tolerance * t {
                break;
            }
        }
        ExtReal::Finite(t)
    }

    pub fn n(&self, y: f64) -> ExtReal {
        if y <= 0.0 {
            return ExtReal::Finite(0.0);
        }
        match self.m_inverse(y) {
            ExtReal::Finite(t) if t > 0.0 => ExtReal::Finite(y / t),
            ExtReal::Finite(_) => ExtReal::PosInf,
            ExtReal::PosInf => ExtReal::Finite(0.0),
        }
    }
}

pub fn h_profile(p: &OrliczProfile, y: f64) -> ExtReal {
    p.h(y)
}

pub fn heat_profiles(p: &OrliczProfile, t: f64) -> (f64, f64) {
    p.heat(t)
}

pub fn n_profile(p: &OrliczProfile, y: f64) -> ExtReal {
    p.n(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monocalc::step_from_atoms;
    use std::f64::consts::E;

    fn c4() -> OrliczProfile {
        OrliczProfile::new(step_from_atoms(&[(2.0, 0.5), (4.0, 0.25)]).unwrap())
    }

    fn unit() -> OrliczProfile {
        OrliczProfile::new(step_from_atoms(&[(1.0, 1.0)]).unwrap())
    }

    #[test]
    fn h_values() {
        let p = c4();
        assert_eq!(p.h(1.0 / 16.0), ExtReal::Finite(0.125));
        assert_eq!(p.h(0.0), ExtReal::Finite(0.0));
        assert_eq!(p.h(0.5), ExtReal::PosInf);
    }

    #[test]
    fn heat_values() {
        let p = c4();
        assert_eq!(p.m_hat(0.0), 0.3125);
        let (l, m) = unit().heat(1.0);
        assert!((l - (-1.0f64).exp()).abs() < 1e-16);
        assert!((m - (-1.0f64).exp()).abs() < 1e-16);
        let mut prev = p.heat(0.0);
        for i in 1..60 {
            let cur = p.heat(i as f64 * 0.5);
            assert!(cur.0 < prev.0 && cur.1 < prev.1);
            prev = cur;
        }
        assert!(prev.0 < 1e-20 && prev.1 < 1e-20);
    }

    #[test]
    fn n_closed_form() {
        let p = unit();
        let n1 = p.n(1.0 / E).finite().unwrap();
        assert!((n1 - 1.0 / E).abs() < 1e-14, "{n1}");
        let n2 = p.n(E.powi(-2)).finite().unwrap();
        assert!((n2 - E.powi(-2) / 2.0).abs() < 1e-14, "{n2}");
        assert_eq!(p.n(1.0), ExtReal::PosInf);
        assert_eq!(p.n(2.0), ExtReal::PosInf);
        assert_eq!(p.n(0.0), ExtReal::Finite(0.0));
    }

    #[test]
    fn n_for_tiny_levels_converges() {
        let p = c4();
        let y = 1e-12;
        let t = p.m_inverse(y).finite().unwrap();
        assert!((p.m_hat(t) - y).abs() <= 1e-12 * y);
    }

    #[test]
    fn empty_profile() {
        let p = OrliczProfile::new(StepFunction::zero());
        assert_eq!(p.h(0.1), ExtReal::PosInf);
        assert_eq!(p.heat(1.0), (0.0, 0.0));
        assert_eq!(p.n(0.1), ExtReal::PosInf);
    }
}
