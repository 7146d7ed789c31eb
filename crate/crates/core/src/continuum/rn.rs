use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Volume of the unit ball in `ℝⁿ`.
pub fn ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * ball_volume(n - 2),
    }
}

/// Area of the unit sphere `Sⁿ ⊂ ℝⁿ⁺¹`.
pub fn sphere_area(n: usize) -> f64 {
    (n + 1) as f64 * ball_volume(n + 1)
}

/// Closed-form profiles of the Laplacian on `ℝⁿ`, `n ≥ 3`:
/// `F(λ) = C_n λ^{n/2}` with `C_n = (2π)^{-n} vol(Bⁿ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RnProfile {
    pub n: usize,
    pub c_n: f64,
    /// Constant of the Sobolev inequality obtained from `H`.
    pub sobolev_constant: f64,
    /// Best constant, for comparison.
    pub aubin_constant: f64,
}

pub fn rn_profile(n: usize) -> Result<RnProfile> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("dimension must be ≥ 3 (G diverges), got {n}")));
    }
    let nf = n as f64;
    let vol = ball_volume(n);
    let c_n = vol / (2.0 * PI).powi(n as i32);
    let sobolev_constant = (nf * vol / (nf - 2.0)).powf(1.0 / nf) / PI;
    let aubin_constant = 2.0 / (nf * (nf - 2.0)).sqrt() * sphere_area(n).powf(-1.0 / nf);
    if sobolev_constant < aubin_constant {
        return Err(Error::Internal(format!(
            "Sobolev constant {sobolev_constant} below the best constant {aubin_constant}"
        )));
    }
    Ok(RnProfile { n, c_n, sobolev_constant, aubin_constant })
}

impl RnProfile {
    fn nf(&self) -> f64 {
        self.n as f64
    }

    pub fn f(&self, lambda: f64) -> f64 {
        self.c_n * lambda.max(0.0).powf(self.nf() / 2.0)
    }

    /// `G(λ) = nC_n/(n−2)·λ^{n/2−1}`.
    pub fn g(&self, lambda: f64) -> f64 {
        let n = self.nf();
        n * self.c_n / (n - 2.0) * lambda.max(0.0).powf(n / 2.0 - 1.0)
    }

    pub fn g_inverse(&self, y: f64) -> f64 {
        let n = self.nf();
        ((n - 2.0) * y.max(0.0) / (n * self.c_n)).powf(2.0 / (n - 2.0))
    }

    /// `H(x) = ((n−2)/(nC_n))^{2/(n−2)} x^{n/(n−2)}`.
    pub fn h(&self, x: f64) -> f64 {
        let n = self.nf();
        ((n - 2.0) / (n * self.c_n)).powf(2.0 / (n - 2.0)) * x.max(0.0).powf(n / (n - 2.0))
    }
}
