//! Atomic nondecreasing right-continuous functions.
//!
//! Every spectral distribution handled by the crate is a finite sum of point
//! masses `F(λ) = Σ_{λ_i ≤ λ} w_i`, so Stieltjes integrals against `dF`
//! collapse to finite sums and are exact.

use std::fmt;

use crate::error::{invalid, Result};

/// A real number or `+∞`.
///
/// Generalized inverses of bounded step functions have no finite value above
/// the total mass; that case is carried explicitly instead of as an overflowed
/// float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    /// Multiplication by a nonnegative scalar, with `0 · ∞ = 0`.
    pub fn scale(self, c: f64) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(c * v),
            ExtReal::PosInf if c == 0.0 => ExtReal::Finite(0.0),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}

/// Atomic measure `Σ w_i δ_{λ_i}` viewed through its distribution function.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepFunction {
    locations: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl StepFunction {
    /// Builds `F` from `(location, weight)` pairs. Exact duplicate locations
    /// are merged by summing their weights.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(loc, w) in &atoms {
            if !(loc.is_finite() && loc > 0.0) {
                return Err(invalid(format!("atom location must be positive, got {loc}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid(format!("atom weight must be positive, got {w}")));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut locations = Vec::with_capacity(atoms.len());
        let mut weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (loc, w) in atoms {
            if locations.last() == Some(&loc) {
                *weights.last_mut().unwrap() += w;
            } else {
                locations.push(loc);
                weights.push(w);
            }
        }
        Ok(Self::from_sorted(locations, weights))
    }

    fn from_sorted(locations: Vec<f64>, weights: Vec<f64>) -> Self {
        let cumulative = weights
            .iter()
            .scan(0.0, |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        StepFunction { locations, weights, cumulative }
    }

    /// The identically zero function (empty spectrum).
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `F(λ_i)` for every atom, in order.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.locations.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn first_location(&self) -> Option<f64> {
        self.locations.first().copied()
    }

    pub fn last_location(&self) -> Option<f64> {
        self.locations.last().copied()
    }

    /// `F(λ) = Σ_{λ_i ≤ λ} w_i`.
    pub fn eval(&self, lambda: f64) -> f64 {
        let n = self.locations.partition_point(|&l| l <= lambda);
        if n == 0 {
            0.0
        } else {
            self.cumulative[n - 1]
        }
    }

    /// Left limit `F(λ⁻) = Σ_{λ_i < λ} w_i`.
    pub fn eval_left(&self, lambda: f64) -> f64 {
        let n = self.locations.partition_point(|&l| l < lambda);
        if n == 0 {
            0.0
        } else {
            self.cumulative[n - 1]
        }
    }

    /// Right-continuous generalized inverse `sup{λ ≥ 0 : F(λ) ≤ y}`.
    ///
    /// `F` is constant on `[λ_i, λ_{i+1})`, so the supremum is the first atom
    /// whose cumulative value exceeds `y`, or `+∞` when none does.
    pub fn right_inverse(&self, y: f64) -> ExtReal {
        let idx = self.cumulative.partition_point(|&c| c <= y);
        match self.locations.get(idx) {
            Some(&loc) => ExtReal::Finite(loc),
            None => ExtReal::PosInf,
        }
    }

    /// `G(λ) = ∫_0^λ dF(u)/u`, i.e. atoms `(λ_i, w_i/λ_i)`.
    pub fn g_transform(&self) -> StepFunction {
        let weights = self.atoms().map(|(l, w)| w / l).collect();
        Self::from_sorted(self.locations.clone(), weights)
    }

    /// Laplace transform of the measure, `Σ w_i e^{-λ_i t}`.
    pub fn laplace(&self, t: f64) -> f64 {
        self.atoms().map(|(l, w)| w * (-l * t).exp()).sum()
    }

    /// Returns a copy with every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<StepFunction> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(invalid(format!("scale factor must be positive, got {factor}")));
        }
        let weights = self.weights.iter().map(|w| w * factor).collect();
        Ok(Self::from_sorted(self.locations.clone(), weights))
    }
}

/// Canonical constructor; see [`StepFunction::from_atoms`].
pub fn step_from_atoms(atoms: &[(f64, f64)]) -> Result<StepFunction> {
    StepFunction::from_atoms(atoms.iter().copied())
}

/// `sup{λ : F(λ) ≤ y}`.
pub fn right_inverse_increasing(f: &StepFunction, y: f64) -> ExtReal {
    f.right_inverse(y)
}

pub fn g_transform(f: &StepFunction) -> StepFunction {
    f.g_transform()
}

/// Merges numerically coincident spectral values into atoms.
///
/// Values closer than `tol` to the running cluster are merged; the location is
/// the weight-averaged mean of the cluster. Used where eigenvalues that are
/// equal in exact arithmetic come out of a solver a few ulps apart.
pub fn cluster_atoms(mut values: Vec<(f64, f64)>, tol: f64) -> Result<StepFunction> {
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64, f64)> = Vec::new(); // (weighted sum, weight, last)
    for (loc, w) in values {
        match merged.last_mut() {
            Some((sum, weight, last)) if loc - *last <= tol => {
                *sum += loc * w;
                *weight += w;
                *last = loc;
            }
            _ => merged.push((loc * w, w, loc)),
        }
    }
    StepFunction::from_atoms(merged.into_iter().map(|(sum, w, _)| (sum / w, w)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> StepFunction {
        step_from_atoms(&[(2.0, 0.5), (4.0, 0.25)]).unwrap()
    }

    #[test]
    fn c4_values() {
        let f = c4();
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.eval(2.0), 0.5);
        assert_eq!(f.eval(3.999), 0.5);
        assert_eq!(f.eval(4.0), 0.75);
        assert_eq!(f.eval_left(2.0), 0.0);
        assert_eq!(f.eval_left(4.0), 0.5);
    }

    #[test]
    fn empty_and_merge() {
        let f = step_from_atoms(&[]).unwrap();
        assert!(f.is_empty());
        assert_eq!(f.eval(10.0), 0.0);
        assert_eq!(f.right_inverse(0.0), ExtReal::PosInf);

        let f = step_from_atoms(&[(1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.atoms().next(), Some((1.0, 1.0)));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(step_from_atoms(&[(0.0, 1.0)]).is_err());
        assert!(step_from_atoms(&[(1.0, 0.0)]).is_err());
        assert!(step_from_atoms(&[(-1.0, 1.0)]).is_err());
        assert!(step_from_atoms(&[(1.0, f64::NAN)]).is_err());
    }

    #[test]
    fn inverse_of_c4_g() {
        let g = c4().g_transform();
        assert_eq!(g.eval(2.0), 0.25);
        assert_eq!(g.eval(4.0), 0.3125);
        assert_eq!(g.right_inverse(0.25), ExtReal::Finite(4.0));
        assert_eq!(g.right_inverse(0.1), ExtReal::Finite(2.0));
        assert_eq!(g.right_inverse(0.3125), ExtReal::PosInf);
        assert_eq!(g.right_inverse(1.0), ExtReal::PosInf);
    }

    #[test]
    fn g_of_single_atom_and_zero() {
        let g = step_from_atoms(&[(1.0, 1.0)]).unwrap().g_transform();
        assert_eq!(g.eval(1.0), 1.0);
        assert!(StepFunction::zero().g_transform().is_empty());
    }

    #[test]
    fn clustering_merges_rounding_dust() {
        let f = cluster_atoms(vec![(2.0 + 1e-15, 0.25), (2.0 - 1e-15, 0.25), (4.0, 0.25)], 1e-10).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f.locations()[0] - 2.0).abs() < 1e-14);
        assert_eq!(f.weights()[0], 0.5);
    }

    #[test]
    fn ext_real_display() {
        assert_eq!(ExtReal::PosInf.to_string(), "inf");
        assert_eq!(ExtReal::Finite(0.125).to_string(), "0.125");
        assert_eq!(ExtReal::PosInf.scale(0.0), ExtReal::Finite(0.0));
    }
}
