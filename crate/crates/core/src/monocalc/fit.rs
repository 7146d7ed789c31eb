use super::step::StepFunction;
use crate::error::{invalid, Result};

/// Minimum number of atoms a fit window must contain.
pub const MIN_FIT_ATOMS: usize = 8;

/// `F(λ) ≈ C λ^α |ln λ|^k` on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticFit {
    pub alpha: f64,
    pub k: u32,
    pub c: f64,
    /// RMS of `log F − model` over the fitted atoms.
    pub residual: f64,
    pub window: (f64, f64),
    pub atoms_used: usize,
    /// Largest relative statistical error of the fitted values, when known.
    pub noise: Option<f64>,
}

/// Least-squares fit of `log F(λ_i) = α log λ_i + k log|log λ_i| + log C` at the
/// atoms of `F` inside `window`, for each candidate `k`; the smallest residual
/// wins (ties go to the smaller `k`).
pub fn asymptotic_fit(f: &StepFunction, window: (f64, f64), k_candidates: &[u32]) -> Result<AsymptoticFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(invalid(format!("fit window must satisfy 0 < lo < hi, got ({lo}, {hi})")));
    }
    if k_candidates.is_empty() {
        return Err(invalid("no log-exponent candidates"));
    }
    if k_candidates.iter().any(|&k| k > 0) && lo <= 1.0 && hi >= 1.0 {
        return Err(invalid("log-power model is singular at λ = 1; pick a window inside (0, 1)"));
    }
    let pts: Vec<(f64, f64)> = f
        .locations()
        .iter()
        .zip(f.cumulative())
        .filter(|(&l, _)| l >= lo && l <= hi)
        .map(|(&l, &c)| (l.ln(), c.ln()))
        .collect();
    if pts.len() < MIN_FIT_ATOMS {
        return Err(invalid(format!(
            "fit window ({lo}, {hi}) holds {} atoms, need at least {MIN_FIT_ATOMS}",
            pts.len()
        )));
    }

    let mut best: Option<AsymptoticFit> = None;
    let mut ks = k_candidates.to_vec();
    ks.sort_unstable();
    ks.dedup();
    for k in ks {
        let kf = k as f64;
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|&(x, y)| y - kf * x.abs().ln()).collect();
        let (alpha, intercept, residual) = least_squares_line(&xs, &ys);
        let fit = AsymptoticFit { alpha, k, c: intercept.exp(), residual, window, atoms_used: pts.len(), noise: None };
        if best.as_ref().is_none_or(|b| fit.residual < b.residual) {
            best = Some(fit);
        }
    }
    Ok(best.unwrap())
}

/// `y ≈ slope·x + intercept`; returns `(slope, intercept, rms residual)`.
fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    (slope, intercept, (sse / n).sqrt())
}
