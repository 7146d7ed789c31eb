//! Comparisons between `F`, `G` and their Laplace transforms.

use std::f64::consts::E;

use super::profile::OrliczProfile;
use super::step::StepFunction;
use crate::error::{Error, Result};
use crate::report::{CheckRecord, Status};

/// Relative slack for the growing condition; its extremal case is an equality.
const GROWTH_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub epsilon: f64,
    /// `F(2λ) ≥ 2(1+ε)F(λ)` at every atom of the tested range.
    pub condition_holds: bool,
    pub records: Vec<CheckRecord>,
}

fn growth_ok(f: &StepFunction, u: f64, epsilon: f64) -> bool {
    let lhs = f.eval(2.0 * u);
    let rhs = 2.0 * (1.0 + epsilon) * f.eval(u);
    lhs >= rhs - GROWTH_TOLERANCE * rhs
}

/// Tests the growing condition on the atoms of `F` inside `range` and the
/// sandwich `(2+ε⁻¹)F(λ) ≥ λG(λ) ≥ F(λ)` at the same atoms.
///
/// Both sides of the condition are step functions and `F(2u)` is minimal at the
/// left end of each step, so testing at atoms covers every `u`. The upper
/// sandwich at `λ` needs the condition on `(0, λ/2]`; where that fails the record
/// is kept as informational.
pub fn growth_sandwich(f: &StepFunction, epsilon: f64, range: (f64, f64)) -> GrowthReport {
    let g = f.g_transform();
    let tested: Vec<f64> = f.locations().iter().copied().filter(|&l| l >= range.0 && l <= range.1).collect();
    let condition_holds = tested.iter().all(|&u| growth_ok(f, u, epsilon));

    let mut records = Vec::with_capacity(3 * tested.len());
    for &lambda in &tested {
        let fl = f.eval(lambda);
        let lg = lambda * g.eval(lambda);
        let param = format!("lambda={lambda}");
        let mut cond = CheckRecord::ge("growth-condition", f.eval(2.0 * lambda), 2.0 * (1.0 + epsilon) * fl)
            .with_param(format!("{param};eps={epsilon}"))
            .informational();
        if growth_ok(f, lambda, epsilon) {
            cond.status = Status::Pass;
        }
        records.push(cond);
        records.push(CheckRecord::ge("sandwich-lower", lg, fl).with_param(param.clone()));

        let applies = f.locations().iter().take_while(|&&u| u <= lambda / 2.0).all(|&u| growth_ok(f, u, epsilon));
        let upper = CheckRecord::le("sandwich-upper", lg, (2.0 + 1.0 / epsilon) * fl).with_param(param);
        records.push(if applies { upper } else { upper.informational() });
    }
    GrowthReport { epsilon, condition_holds, records }
}

/// Operator-side heat quantities at one time: `‖e^{-tA}Π_V‖₁,∞` and
/// `‖A⁻¹e^{-tA}Π_V‖₁,∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasuredHeat {
    pub l: f64,
    pub m: f64,
}

/// Laplace-transform comparisons between the profile and measured heat norms.
///
/// * `L(t) ≤ L̂(t)`, `M(t) ≤ M̂(t)` whenever measurements are supplied;
/// * `L̂ ≤ nL`, `M̂ ≤ nM` for invariant instances (measurements then required);
/// * `G(y) ≤ n·e·M̂(1/y)` at every atom;
/// * `M̂(1/y) ≤ 3G(2Cy)` with `C = ln(G_total/G(λ_1))`, for which
///   `G(uy) ≤ e^{Cu}G(y)` holds at every base point `y ≥ λ_1`.
pub fn laplace_comparison(
    p: &OrliczProfile,
    t_grid: &[f64],
    n: usize,
    measured: Option<&[MeasuredHeat]>,
    invariant: bool,
) -> Result<Vec<CheckRecord>> {
    if n == 0 {
        return Err(Error::InvalidInput("fiber dimension must be ≥ 1".into()));
    }
    if invariant && measured.is_none() {
        return Err(Error::Config("invariant comparison needs measured heat norms".into()));
    }
    if let Some(m) = measured {
        if m.len() != t_grid.len() {
            return Err(Error::DimensionMismatch { expected: t_grid.len(), got: m.len() });
        }
    }
    let mut records = Vec::new();
    if p.f().is_empty() {
        return Ok(records);
    }
    let nf = n as f64;
    for (i, &t) in t_grid.iter().enumerate() {
        let (lh, mh) = p.heat(t);
        let param = format!("t={t}");
        if let Some(meas) = measured {
            let MeasuredHeat { l, m } = meas[i];
            records.push(CheckRecord::le("heat-L<=laplace-dF", l, lh).with_param(param.clone()));
            records.push(CheckRecord::le("heat-M<=laplace-dG", m, mh).with_param(param.clone()));
            if invariant {
                records.push(CheckRecord::le("laplace-dF<=nL", lh, nf * l).with_param(param.clone()));
                records.push(CheckRecord::le("laplace-dG<=nM", mh, nf * m).with_param(param.clone()));
            }
        }
    }

    let g = p.g();
    for &y in g.locations() {
        records.push(CheckRecord::le("G<=neM(1/y)", g.eval(y), nf * E * p.m_hat(1.0 / y)).with_param(format!("y={y}")));
    }

    let lambda1 = g.first_location().unwrap();
    let g1 = g.eval(lambda1);
    let c0 = (g.total_mass() / g1).ln();
    let c = if c0 > 0.0 { c0 } else { 1.0 };
    for &t in t_grid {
        let y = 1.0 / t;
        if 2.0 * c * y < lambda1 {
            continue;
        }
        records.push(
            CheckRecord::le("M(1/y)<=3G(2Cy)", p.m_hat(t), 3.0 * g.eval(2.0 * c * y))
                .with_param(format!("y={y};C={c}")),
        );
    }
    Ok(records)
}
