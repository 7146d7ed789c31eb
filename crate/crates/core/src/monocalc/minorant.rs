use super::step::{ExtReal, StepFunction};
use crate::error::{invalid, Result};

/// Piecewise-linear convex function given by its breakpoints.
///
/// Between breakpoints the function is linear; beyond the last breakpoint it
/// continues with the last slope.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexMinorant {
    breakpoints: Vec<(f64, f64)>,
}

impl ConvexMinorant {
    /// `φ ≡ 0` on `[0, hi]`.
    pub fn zero(hi: f64) -> Self {
        ConvexMinorant { breakpoints: vec![(0.0, 0.0), (hi.max(0.0), 0.0)] }
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect()
    }

    pub fn is_convex(&self, tol: f64) -> bool {
        self.slopes().windows(2).all(|s| s[1] >= s[0] - tol * s[0].abs().max(1.0))
    }

    pub fn eval(&self, y: f64) -> f64 {
        let bp = &self.breakpoints;
        if bp.len() == 1 {
            return bp[0].1;
        }
        let i = bp.partition_point(|&(x, _)| x <= y);
        let (a, b) = if i == 0 {
            (bp[0], bp[1])
        } else if i >= bp.len() {
            (bp[bp.len() - 2], bp[bp.len() - 1])
        } else {
            (bp[i - 1], bp[i])
        };
        a.1 + (b.1 - a.1) * (y - a.0) / (b.0 - a.0)
    }

    /// Checks convexity and `φ ≤ target` at every given abscissa.
    pub fn validate<T>(&self, target: T, ys: &[f64], tol: f64) -> Result<()>
    where
        T: Fn(f64) -> ExtReal,
    {
        if !self.is_convex(tol) {
            return Err(invalid("minorant is not convex"));
        }
        for &y in ys {
            let phi = self.eval(y);
            if phi < -tol {
                return Err(invalid(format!("minorant is negative at y = {y}")));
            }
            if let ExtReal::Finite(t) = target(y) {
                if phi > t + tol * t.abs().max(1.0) {
                    return Err(invalid(format!("minorant exceeds target at y = {y}: {phi} > {t}")));
                }
            }
        }
        Ok(())
    }
}

/// Largest convex minorant of the samples restricted to `interval`, anchored
/// at the origin: the lower boundary of the convex hull of `{(0,0)} ∪ samples`.
pub fn convex_minorant(samples: &[(f64, f64)], interval: (f64, f64)) -> Result<ConvexMinorant> {
    let (lo, hi) = interval;
    let mut pts: Vec<(f64, f64)> = samples.iter().copied().filter(|&(y, _)| y >= lo && y <= hi).collect();
    if pts.len() < 2 {
        return Err(invalid(format!("convex minorant needs at least 2 samples in [{lo}, {hi}], got {}", pts.len())));
    }
    for &(y, v) in &pts {
        if !(y.is_finite() && v.is_finite()) || y < 0.0 || v < 0.0 {
            return Err(invalid(format!("invalid sample ({y}, {v})")));
        }
    }
    pts.push((0.0, 0.0));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    // keep the lowest value per abscissa
    pts.dedup_by(|b, a| a.0 == b.0);

    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b unless it lies strictly below the chord a–p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(ConvexMinorant { breakpoints: hull })
}

/// Exact largest convex minorant of `y ↦ y·F⁻¹(y)` on `[0, F_total]`.
///
/// On `[F(λ_{i-1}), F(λ_i))` the target is the line `λ_i y`. A convex function
/// below it is also below the left limit at `F(λ_i)`, so the hull of the piece
/// endpoints (with left limits) is the exact answer.
pub fn nash_minorant(f: &StepFunction) -> Result<ConvexMinorant> {
    if f.is_empty() {
        return Ok(ConvexMinorant::zero(0.0));
    }
    let mut samples = Vec::with_capacity(2 * f.len());
    let mut prev = 0.0;
    for (&loc, &cum) in f.locations().iter().zip(f.cumulative()) {
        samples.push((prev, loc * prev));
        samples.push((cum, loc * cum));
        prev = cum;
    }
    convex_minorant(&samples, (0.0, f.total_mass()))
}

/// `y·F⁻¹(y)`, the function Nash-type minorants must stay below.
pub fn nash_target(f: &StepFunction, y: f64) -> ExtReal {
    if y <= 0.0 {
        return ExtReal::Finite(0.0);
    }
    f.right_inverse(y).scale(y)
}
