use nalgebra::{Complex, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::cover::{twisted_blocks, AbelianCoverSpec};
use crate::error::{Error, Result};
use crate::seeds::rng_for;
use crate::spectral_ops::BlockFamily;

/// Two-sided bracket for the best constant `C` in `‖α‖_p ≤ C‖d_kα‖₂` on
/// `(ker d_k)^⊥` of the quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct SobolevBracket {
    pub p: f64,
    /// Largest sampled ratio `‖α‖_p / ‖d_kα‖₂`.
    pub lower: f64,
    /// `‖T‖_{2→2}^{2/p} ‖T‖_{2→∞}^{1−2/p}` with `T = d_k⁻¹` on the range.
    pub upper: f64,
    /// `max_x √(A⁺)_xx`.
    pub norm_2_inf: f64,
    /// `1/√λ_min⁺`.
    pub norm_2_2: f64,
    pub samples: usize,
}

/// Brackets the `ℓ²→ℓᵖ` Sobolev constant of `d_k` on the quotient.
///
/// The upper bound interpolates between the exact `2→2` and `2→∞` norms of
/// the inverse. The lower bound maximizes the ratio over `random` Gaussian
/// vectors projected off the kernel, the columns `A⁺e_x` (which attain the
/// `2→∞` norm) and the lowest mode (which attains the `2→2` norm).
pub fn sobolev_ratio(spec: &AbelianCoverSpec, k: usize, p: f64, random: usize, seed: u64) -> Result<SobolevBracket> {
    if p.is_nan() || p < 2.0 {
        return Err(Error::InvalidInput(format!("exponent p must be ≥ 2, got {p}")));
    }
    let fam = twisted_blocks(spec, k)?;
    let lambda_min =
        fam.lambda_min_positive().ok_or_else(|| Error::Diagnostic(format!("d_{k} vanishes on the quotient")))?;
    let diag = fam.weighted_diagonal(f64::INFINITY, |v| 1.0 / v);
    let norm_2_inf = diag.iter().copied().fold(0.0, f64::max).sqrt();
    let norm_2_2 = 1.0 / lambda_min.sqrt();
    let upper = if p.is_infinite() { norm_2_inf } else { norm_2_2.powf(2.0 / p) * norm_2_inf.powf(1.0 - 2.0 / p) };

    let ctx = Context::new(spec, k, &fam);
    let d = spec.quotient_coboundary(k);
    let ratio = |alpha: &[f64]| -> Option<f64> {
        let da = DVector::from_vec(d.apply(alpha)).norm();
        let a = lp_norm(alpha, p);
        (da > 1e-300 && a > 0.0).then(|| a / da)
    };

    let mut structured = Vec::new();
    for c in 0..spec.base().count(k) {
        structured.push(ctx.pseudo_inverse_column(c));
    }
    let (re, im) = ctx.lowest_mode();
    structured.push(re);
    structured.push(im);

    let best_structured = structured.par_iter().filter_map(|a| ratio(a)).reduce(|| 0.0, f64::max);
    let best_random = (0..random as u64)
        .into_par_iter()
        .filter_map(|s| {
            let mut rng = rng_for(seed, s);
            let x: Vec<f64> = (0..ctx.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
            ratio(&ctx.project_off_kernel(&x))
        })
        .reduce(|| 0.0, f64::max);
    let lower = best_structured.max(best_random);
    if lower > upper * (1.0 + 1e-9) {
        return Err(Error::Internal(format!("sampled Sobolev ratio {lower} exceeds the bound {upper}")));
    }
    Ok(SobolevBracket { p, lower, upper, norm_2_inf, norm_2_2, samples: structured.len() + random })
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Fourier transforms between cochains on the quotient and character blocks.
struct Context<'a> {
    fam: &'a BlockFamily,
    cells: usize,
    group: usize,
    n: usize,
    rank: usize,
}

impl<'a> Context<'a> {
    fn new(spec: &AbelianCoverSpec, k: usize, fam: &'a BlockFamily) -> Self {
        Context {
            fam,
            cells: spec.base().count(k),
            group: spec.group_size(),
            n: spec.quotient_size(),
            rank: spec.rank(),
        }
    }

    fn dim(&self) -> usize {
        self.cells * self.group
    }

    /// In-place `d`-dimensional DFT of one fiber coordinate.
    fn fft(&self, data: &mut [Complex<f64>], inverse: bool) {
        let mut planner = FftPlanner::new();
        let plan = if inverse { planner.plan_fft_inverse(self.n) } else { planner.plan_fft_forward(self.n) };
        let mut line = vec![Complex::new(0.0, 0.0); self.n];
        let mut stride = 1;
        for _ in 0..self.rank {
            for start in 0..self.group {
                if (start / stride) % self.n != 0 {
                    continue;
                }
                for (i, z) in line.iter_mut().enumerate() {
                    *z = data[start + i * stride];
                }
                plan.process(&mut line);
                for (i, z) in line.iter().enumerate() {
                    data[start + i * stride] = *z;
                }
            }
            stride *= self.n;
        }
    }

    /// Inverse transform of per-character coefficients `coef[θ][τ]`, real part.
    fn synthesize(&self, coef: &[Vec<Complex<f64>>]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let mut buf = vec![Complex::new(0.0, 0.0); self.group];
        let g = self.group as f64;
        for tau in 0..self.cells {
            for (x, z) in buf.iter_mut().enumerate() {
                *z = coef[x][tau];
            }
            self.fft(&mut buf, true);
            for (x, z) in buf.iter().enumerate() {
                out[tau * self.group + x] = z.re / g;
            }
        }
        out
    }

    fn project_off_kernel(&self, x: &[f64]) -> Vec<f64> {
        let mut coef = vec![vec![Complex::new(0.0, 0.0); self.cells]; self.group];
        let mut buf = vec![Complex::new(0.0, 0.0); self.group];
        for tau in 0..self.cells {
            for (i, z) in buf.iter_mut().enumerate() {
                *z = Complex::new(x[tau * self.group + i], 0.0);
            }
            self.fft(&mut buf, false);
            for (theta, z) in buf.iter().enumerate() {
                coef[theta][tau] = *z;
            }
        }
        let thr = self.fam.kernel_threshold();
        for (b, c) in self.fam.blocks().iter().zip(coef.iter_mut()) {
            for (j, &mu) in b.values.iter().enumerate() {
                if mu > thr {
                    continue;
                }
                let u = b.vectors.column(j);
                let dot: Complex<f64> = u.iter().zip(c.iter()).map(|(a, v)| a.conj() * v).sum();
                for (ci, a) in c.iter_mut().zip(u.iter()) {
                    *ci -= a * dot;
                }
            }
        }
        self.synthesize(&coef)
    }

    /// `A⁺ e_{(c, 0)}`.
    fn pseudo_inverse_column(&self, c: usize) -> Vec<f64> {
        let thr = self.fam.kernel_threshold();
        let coef: Vec<Vec<Complex<f64>>> = self
            .fam
            .blocks()
            .iter()
            .map(|b| {
                let mut v = vec![Complex::new(0.0, 0.0); self.cells];
                for (j, &mu) in b.values.iter().enumerate() {
                    if mu <= thr {
                        continue;
                    }
                    let u = b.vectors.column(j);
                    let w = u[c].conj() / mu;
                    for (vi, a) in v.iter_mut().zip(u.iter()) {
                        *vi += a * w;
                    }
                }
                v
            })
            .collect();
        self.synthesize(&coef)
    }

    /// Real and imaginary parts of the lowest nonzero mode.
    fn lowest_mode(&self) -> (Vec<f64>, Vec<f64>) {
        let thr = self.fam.kernel_threshold();
        let mut best = (f64::INFINITY, 0, 0);
        for (x, b) in self.fam.blocks().iter().enumerate() {
            if let Some(j) = b.values.iter().position(|&v| v > thr) {
                if b.values[j] < best.0 {
                    best = (b.values[j], x, j);
                }
            }
        }
        let (_, x, j) = best;
        let u = self.fam.blocks()[x].vectors.column(j);
        let theta = &self.fam.blocks()[x].theta;
        let (mut re, mut im) = (vec![0.0; self.dim()], vec![0.0; self.dim()]);
        for g in 0..self.group {
            let mut phase = 0usize;
            let mut rest = g;
            for t in theta {
                phase += t * (rest % self.n);
                rest /= self.n;
            }
            let w = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * (phase % self.n) as f64 / self.n as f64);
            for tau in 0..self.cells {
                let z = u[tau] * w;
                re[tau * self.group + g] = z.re;
                im[tau * self.group + g] = z.im;
            }
        }
        (re, im)
    }
}
