use std::f64::consts::LN_2;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::monocalc::{nash_target, ConvexMinorant, ExtReal, OrliczProfile, StepFunction};
use crate::report::{CheckRecord, Relation};
use crate::spectral_ops::{energy, project_off_kernel, OperatorInstance, SpectralDecomposition};

/// Entries with `|f(x)| ≤ SUPPORT_CUT·‖f‖_∞` are treated as zero.
pub const SUPPORT_CUT: f64 = 1e-12;

/// A nonzero state in `(ker A)^⊥` with its cached norms.
#[derive(Clone, Debug)]
pub struct TestState {
    pub name: String,
    pub f: DVector<f64>,
    pub af: DVector<f64>,
    pub energy: f64,
    pub l1: f64,
    pub l2_squared: f64,
    pub sup: f64,
}

fn support(v: &DVector<f64>) -> Vec<usize> {
    let cut = SUPPORT_CUT * v.amax();
    v.iter().enumerate().filter(|(_, x)| x.abs() > cut).map(|(i, _)| i).collect()
}

impl TestState {
    /// Projects `f` off the kernel and caches `E(f)`, `‖f‖₁`, `‖f‖₂²`.
    pub fn new(
        name: impl Into<String>,
        a: &OperatorInstance,
        d: &SpectralDecomposition,
        f: &DVector<f64>,
    ) -> Result<Self> {
        let name = name.into();
        let input_norm = f.norm();
        let f = project_off_kernel(d, f)?;
        let sup = f.amax();
        if f.norm() <= 1e-9 * input_norm || sup == 0.0 {
            return Err(Error::InvalidInput(format!("state {name} vanishes off the kernel")));
        }
        let e = energy(a, &f)?;
        if e <= 0.0 {
            return Err(Error::InvalidInput(format!("state {name} has zero energy")));
        }
        let af = a.apply(&f)?;
        Ok(TestState { name, l1: f.lp_norm(1), l2_squared: f.norm_squared(), sup, energy: e, af, f })
    }

    /// `supp f`.
    pub fn support(&self) -> Vec<usize> {
        support(&self.f)
    }

    /// `supp f ∪ supp Af`, the smallest domain containing both.
    pub fn domain(&self) -> Vec<usize> {
        let mut s = support(&self.f);
        s.extend(support(&self.af));
        s.sort_unstable();
        s.dedup();
        s
    }

    /// `E(f)/‖f‖₂²`.
    pub fn rayleigh(&self) -> f64 {
        self.energy / self.l2_squared
    }
}

fn sentinel(check: &str, state: &TestState, y: f64) -> Error {
    Error::Internal(format!("{check}: state {} reaches the unbounded branch at level {y:e}", state.name))
}

/// `Σ_x H(|f(x)|²/4E(f)) ≤ 1`.
pub fn check_h_sobolev(state: &TestState, profile: &OrliczProfile) -> Result<CheckRecord> {
    let mut lhs = 0.0;
    for &v in state.f.iter() {
        let y = v * v / (4.0 * state.energy);
        match profile.h(y) {
            ExtReal::Finite(h) => lhs += h,
            ExtReal::PosInf => return Err(sentinel("h-sobolev", state, y)),
        }
    }
    Ok(CheckRecord::le("h-sobolev", lhs, 1.0))
}

/// `Σ_x N(|f(x)|²/4E(f)) ≤ ln 2`.
pub fn check_n_sobolev(state: &TestState, profile: &OrliczProfile) -> Result<CheckRecord> {
    let mut lhs = 0.0;
    for &v in state.f.iter() {
        let y = v * v / (4.0 * state.energy);
        match profile.n(y) {
            ExtReal::Finite(n) => lhs += n,
            ExtReal::PosInf => return Err(sentinel("n-sobolev", state, y)),
        }
    }
    Ok(CheckRecord::le("n-sobolev", lhs, LN_2))
}

/// Checks that `φ` is an admissible Nash weight for `F`: convex, nonnegative
/// and below `y·F⁻¹(y)`.
pub fn validate_minorant(f: &StepFunction, phi: &ConvexMinorant) -> Result<()> {
    let total = f.total_mass();
    let mut ys: Vec<f64> = f.cumulative().iter().map(|c| c * (1.0 - 1e-12)).collect();
    ys.extend(phi.breakpoints().iter().map(|b| b.0).filter(|&y| y < total));
    if total > 0.0 {
        ys.extend((1..=256).map(|i| total * i as f64 / 257.0));
    }
    phi.validate(|y| nash_target(f, y), &ys, 1e-9)
        .map_err(|e| Error::InvalidInput(format!("inadmissible minorant: {e}")))
}

/// Records A and B of the Nash inequality:
/// `Σ_x |f|²·F⁻¹(|f|/2‖f‖₁) ≤ 4E(f)` and `‖f‖₁²·φ(‖f‖₂²/2‖f‖₁²) ≤ 2E(f)`.
pub fn check_nash(state: &TestState, f: &StepFunction, phi: &ConvexMinorant) -> Result<[CheckRecord; 2]> {
    validate_minorant(f, phi)?;
    let mut lhs = ExtReal::Finite(0.0);
    for &v in state.f.iter() {
        let term = f.right_inverse(v.abs() / (2.0 * state.l1)).scale(v * v);
        lhs = match (lhs, term) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        };
    }
    let a = CheckRecord::compare("nash-a", lhs, Relation::Le, ExtReal::Finite(4.0 * state.energy));
    let y = state.l2_squared / (2.0 * state.l1 * state.l1);
    let b = CheckRecord::le("nash-b", state.l1 * state.l1 * phi.eval(y), 2.0 * state.energy);
    Ok([a, b])
}

/// `μ(Ω)·φ(1/2μ(Ω)) ≤ 2E(f)/‖f‖₂²` with `Ω = supp f ∪ supp Af`; vacuous when
/// `Ω` is the whole space.
pub fn check_faber_krahn(state: &TestState, phi: &ConvexMinorant) -> CheckRecord {
    let mu = state.domain().len();
    if mu == state.f.len() {
        return CheckRecord::vacuous("faber-krahn", "domain is the whole space");
    }
    let m = mu as f64;
    CheckRecord::le("faber-krahn", m * phi.eval(1.0 / (2.0 * m)), 2.0 * state.rayleigh()).with_param(format!("mu={mu}"))
}

/// Largest `C` with `φ(y) ≥ C·y·F⁻¹(y)` on a log grid of `(0, F_total)`
/// together with the atom heights, where the right-hand side jumps.
pub fn uncertainty_constant(f: &StepFunction, phi: &ConvexMinorant) -> Result<f64> {
    let total = f.total_mass();
    if total <= 0.0 {
        return Err(Error::Diagnostic("uncertainty constant undefined for an empty spectrum".into()));
    }
    let mut ys: Vec<f64> = (0..1000).map(|i| total * 10f64.powf(-6.0 + 6.0 * i as f64 / 999.0)).collect();
    ys.extend_from_slice(f.cumulative());
    let mut c = f64::INFINITY;
    for y in ys {
        if let ExtReal::Finite(t) = nash_target(f, y) {
            if t > 0.0 {
                c = c.min(phi.eval(y) / t);
            }
        }
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Diagnostic(format!("minorant vanishes relative to y·F⁻¹(y) (C = {c})")));
    }
    Ok(c)
}

/// `2μ(Ω)·F(4λ/C) ≥ 1` with `Ω = supp f` and `λ = E(f)/‖f‖₂²`.
pub fn check_uncertainty(state: &TestState, f: &StepFunction, c: f64) -> CheckRecord {
    let mu = state.support().len() as f64;
    let lambda = state.rayleigh();
    CheckRecord::ge("uncertainty", 2.0 * mu * f.eval(4.0 * lambda / c), 1.0)
        .with_param(format!("C={c};lambda={lambda}"))
}
