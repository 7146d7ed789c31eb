use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::monocalc::{asymptotic_fit, AsymptoticFit, StepFunction};
use crate::seeds::rng_for;

/// Smallest accepted Monte-Carlo budget.
pub const MIN_BUDGET: usize = 10_000;
const CHUNK: usize = 1 << 14;
/// Outer fraction of the box treated as its boundary shell.
const SHELL: f64 = 0.01;
/// Largest tolerated share of accepted samples in the shell.
const SHELL_LIMIT: f64 = 1e-3;
/// Largest tolerated relative standard error inside a fit window.
const MAX_FIT_NOISE: f64 = 0.2;

/// `σ(ξ) = Σ_I a_I (iξ)^I` with even multi-indices, so that `σ` is real.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSymbol {
    n: usize,
    /// `(I, a_I·i^{|I|})`.
    terms: Vec<(Vec<u32>, f64)>,
}

impl PolynomialSymbol {
    pub fn new(n: usize, monomials: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("symbol dimension must be ≥ 1".into()));
        }
        let mut terms = Vec::with_capacity(monomials.len());
        for (index, a) in monomials {
            if index.len() != n {
                return Err(Error::InvalidInput(format!("multi-index {index:?} is not {n}-dimensional")));
            }
            let deg: u32 = index.iter().sum();
            if deg == 0 && a != 0.0 {
                return Err(Error::InvalidInput("symbol must vanish at the origin".into()));
            }
            if deg % 2 == 1 {
                return Err(Error::InvalidInput(format!("odd monomial {index:?} makes the symbol non-real")));
            }
            let sign = if (deg / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            terms.push((index, sign * a));
        }
        Ok(PolynomialSymbol { n, terms })
    }

    /// Symbol of `−Δ` on `ℝⁿ`: `|ξ|²`.
    pub fn laplacian(n: usize) -> Self {
        let monomials = (0..n).map(|j| ((0..n).map(|i| if i == j { 2 } else { 0 }).collect(), -1.0)).collect();
        Self::new(n, monomials).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(index, a)| a * index.iter().zip(xi).map(|(&e, x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }
}

/// Sampling region for `D_λ = {σ ≤ λ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplingDomain {
    /// `[−R, R]ⁿ` must contain `D_{λmax}`; hits in the outer shell are an error.
    Bounding { half_width: f64 },
    /// Volumes of `D_λ ∩ [−R, R]ⁿ`; no containment is required. Appropriate
    /// for small-`λ` asymptotics when `D_λ` is unbounded.
    Restricted { half_width: f64 },
    /// Bounding box grown by doubling on a pilot sample.
    Auto,
}

/// Monte-Carlo estimate of `F(λ) = (2π)^{-n} vol(D_λ)` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolDensity {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Binomial standard error of each value.
    pub stderr: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub half_width: f64,
}

impl SymbolDensity {
    /// The estimates as a step function (atoms at grid points with positive
    /// increment), with the standard error at each atom.
    pub fn step_function(&self) -> Result<(StepFunction, Vec<f64>)> {
        let mut atoms = Vec::new();
        let mut errs = Vec::new();
        let mut prev = 0.0;
        for ((&l, &v), &e) in self.grid.iter().zip(&self.values).zip(&self.stderr) {
            if v > prev && l > 0.0 {
                atoms.push((l, v - prev));
                errs.push(e);
                prev = v;
            }
        }
        Ok((StepFunction::from_atoms(atoms)?, errs))
    }
}

struct Tally {
    hist: Vec<u64>,
    shell: u64,
    negative: Option<f64>,
}

fn tally(sigma: &PolynomialSymbol, grid: &[f64], half_width: f64, budget: usize, seed: u64) -> Tally {
    let chunks = budget.div_ceil(CHUNK);
    let lmax = *grid.last().unwrap();
    let scale = sigma.terms.iter().map(|t| t.1.abs()).sum::<f64>().max(1.0);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_for(seed, c as u64);
            let count = CHUNK.min(budget - c * CHUNK);
            let mut t = Tally { hist: vec![0; grid.len() + 1], shell: 0, negative: None };
            let mut xi = vec![0.0; sigma.n];
            for _ in 0..count {
                for x in xi.iter_mut() {
                    *x = rng.random_range(-half_width..half_width);
                }
                let s = sigma.eval(&xi);
                if s < -1e-12 * scale {
                    t.negative.get_or_insert(s);
                }
                t.hist[grid.partition_point(|&l| l < s)] += 1;
                if s <= lmax && xi.iter().any(|x| x.abs() > (1.0 - SHELL) * half_width) {
                    t.shell += 1;
                }
            }
            t
        })
        .reduce(
            || Tally { hist: vec![0; grid.len() + 1], shell: 0, negative: None },
            |mut a, b| {
                a.hist.iter_mut().zip(&b.hist).for_each(|(x, y)| *x += y);
                a.shell += b.shell;
                a.negative = a.negative.or(b.negative);
                a
            },
        )
}

/// Estimates `F(λ_j)` on `grid` from one set of uniform samples, so the
/// estimates are nested and monotone in `λ`.
pub fn symbol_density(
    sigma: &PolynomialSymbol,
    grid: &[f64],
    budget: usize,
    seed: u64,
    domain: SamplingDomain,
) -> Result<SymbolDensity> {
    if budget < MIN_BUDGET {
        return Err(Error::InvalidInput(format!("sample budget {budget} below {MIN_BUDGET}")));
    }
    if grid.is_empty() || grid.iter().any(|l| !l.is_finite() || *l < 0.0) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("λ grid must be nonnegative and strictly increasing".into()));
    }
    let (half_width, check_shell) = match domain {
        SamplingDomain::Bounding { half_width } => (half_width, true),
        SamplingDomain::Restricted { half_width } => (half_width, false),
        SamplingDomain::Auto => (auto_half_width(sigma, grid, seed)?, true),
    };
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidInput(format!("invalid box half-width {half_width}")));
    }
    let t = tally(sigma, grid, half_width, budget, seed);
    if let Some(s) = t.negative {
        return Err(Error::InvalidInput(format!("symbol takes the negative value {s:e} on the domain")));
    }
    let accepted: u64 = t.hist[..grid.len()].iter().sum();
    if check_shell && t.shell as f64 > SHELL_LIMIT * accepted as f64 {
        return Err(Error::Diagnostic(format!(
            "box [−{half_width}, {half_width}]^{} too small: {} of {accepted} accepted samples in the boundary shell",
            sigma.n, t.shell
        )));
    }
    let m = budget as f64;
    let factor = (2.0 * half_width / (2.0 * PI)).powi(sigma.n as i32);
    let mut cum = 0u64;
    let mut values = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    for &h in &t.hist[..grid.len()] {
        cum += h;
        let p = cum as f64 / m;
        values.push(factor * p);
        stderr.push(factor * (p * (1.0 - p) / m).sqrt());
    }
    Ok(SymbolDensity { grid: grid.to_vec(), values, stderr, samples: budget, seed, half_width })
}

fn auto_half_width(sigma: &PolynomialSymbol, grid: &[f64], seed: u64) -> Result<f64> {
    let mut r = 1.0;
    for _ in 0..40 {
        let t = tally(sigma, grid, r, 2 * MIN_BUDGET, seed ^ 0xA5A5_A5A5);
        let accepted: u64 = t.hist[..grid.len()].iter().sum();
        if t.shell as f64 <= 0.1 * SHELL_LIMIT * accepted as f64 {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::Diagnostic("could not find a bounding box for the sublevel set".into()))
}

/// Fits `C λ^α |ln λ|^k` to a Monte-Carlo density inside `window`.
pub fn exponent_readoff(density: &SymbolDensity, window: (f64, f64), k_candidates: &[u32]) -> Result<AsymptoticFit> {
    let mut noise = 0.0f64;
    for ((&l, &v), &e) in density.grid.iter().zip(&density.values).zip(&density.stderr) {
        if l < window.0 || l > window.1 {
            continue;
        }
        let rel = if v > 0.0 { e / v } else { f64::INFINITY };
        if rel >= MAX_FIT_NOISE {
            return Err(Error::Diagnostic(format!(
                "relative Monte-Carlo error {rel:.3} at λ = {l} exceeds {MAX_FIT_NOISE}; raise the budget or move the window"
            )));
        }
        noise = noise.max(rel);
    }
    let (f, _) = density.step_function()?;
    let mut fit = asymptotic_fit(&f, window, k_candidates)?;
    fit.noise = Some(noise);
    Ok(fit)
}
