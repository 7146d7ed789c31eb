//! Finite operator instances and their spectral calculus.
//!
//! Points carry the counting measure, so `‖P‖_{1,∞}` is the largest entry of
//! `P` in absolute value. For the positive operators used here (spectral
//! projectors and functions of `A` restricted to `(ker A)^⊥`) that entry sits on
//! the diagonal, since `|P_xy|² ≤ P_xx P_yy`.

mod blocks;
mod builders;

pub use blocks::{BlockEigen, BlockFamily};
pub use builders::{cayley_laplacian, cycle_laplacian, random_psd, torus_blocks, torus_laplacian};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::monocalc::{cluster_atoms, StepFunction};

/// Largest dimension handled by the dense eigensolver.
pub const DENSE_CAP: usize = 4096;

/// Relative asymmetry tolerated on input matrices.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Finite symmetric positive semidefinite operator under the counting measure.
///
/// For invariant instances the index is laid out as `x = a·|Γ| + g`, with `a`
/// the fiber coordinate (`0 ≤ a < n`) and `g` the group element.
#[derive(Clone, Debug)]
pub struct OperatorInstance {
    matrix: DMatrix<f64>,
    invariant: bool,
    fiber: usize,
    norm_max: f64,
}

impl OperatorInstance {
    pub fn new(matrix: DMatrix<f64>, invariant: bool, fiber: usize) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::InvalidInput("operator must have positive dimension".into()));
        }
        if fiber == 0 || rows % fiber != 0 {
            return Err(Error::InvalidInput(format!("fiber dimension {fiber} does not divide the dimension {rows}")));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let norm_max = matrix.amax();
        let asymmetry = (&matrix - matrix.transpose()).amax();
        if asymmetry > SYMMETRY_TOLERANCE * norm_max.max(1.0) {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let inst = OperatorInstance { matrix, invariant, fiber, norm_max };
        if invariant {
            inst.check_invariance()?;
        }
        Ok(inst)
    }

    /// Transitivity forces the diagonal of every polynomial in `A` to be
    /// constant along each fiber coordinate; `A` and `A²` are checked.
    fn check_invariance(&self) -> Result<()> {
        let g = self.group_size();
        let n = self.dim();
        let diag1: Vec<f64> = (0..n).map(|i| self.matrix[(i, i)]).collect();
        let diag2: Vec<f64> = (0..n).map(|i| self.matrix.column(i).norm_squared()).collect();
        let scale = self.norm_max.max(1.0);
        for (diag, s) in [(&diag1, scale), (&diag2, scale * scale)] {
            for a in 0..self.fiber {
                let block = &diag[a * g..(a + 1) * g];
                let (lo, hi) =
                    block.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
                if hi - lo > 1e-9 * s {
                    return Err(Error::InvalidInput(format!(
                        "instance flagged invariant but diagonal varies by {:e} along fiber {a}",
                        hi - lo
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    /// `|Γ| = dimension / n`.
    pub fn group_size(&self) -> usize {
        self.dim() / self.fiber
    }

    pub fn norm_max(&self) -> f64 {
        self.norm_max
    }

    pub fn apply(&self, f: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(f)?;
        Ok(&self.matrix * f)
    }

    fn check_len(&self, f: &DVector<f64>) -> Result<()> {
        if f.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: f.len() });
        }
        Ok(())
    }
}

/// Eigen-decomposition with eigenvalues ascending and a declared kernel cut.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    threshold: f64,
    /// Eigenvalues closer than this are treated as one spectral value.
    cluster_tol: f64,
}

/// Default kernel cut `10⁻⁹·‖A‖_max·dim`.
pub fn default_kernel_threshold(a: &OperatorInstance) -> f64 {
    1e-9 * a.norm_max() * a.dim() as f64
}

pub fn decompose(a: &OperatorInstance) -> Result<SpectralDecomposition> {
    decompose_with_threshold(a, default_kernel_threshold(a))
}

pub fn decompose_with_threshold(a: &OperatorInstance, threshold: f64) -> Result<SpectralDecomposition> {
    let n = a.dim();
    if n > DENSE_CAP {
        return Err(Error::TooLarge { dim: n, cap: DENSE_CAP });
    }
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, 0)
        .ok_or(Error::NoConvergence { residual: f64::NAN })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let norm = a.norm_max();
    if values[0] < -threshold.max(1e-9 * norm) {
        return Err(Error::NotPositive { min_eigenvalue: values[0] });
    }
    // The O(n³) reconstruction check is reserved for small instances; larger
    // ones are covered by the test suite.
    if n <= 256 {
        let recon = &vectors * DMatrix::from_diagonal(&DVector::from_vec(values.clone())) * vectors.transpose();
        let residual = (recon - a.matrix()).amax();
        if residual > 1e-8 * norm.max(1.0) {
            return Err(Error::NoConvergence { residual });
        }
    }
    let lambda_max = values[n - 1].max(0.0);
    Ok(SpectralDecomposition { values, vectors, threshold, cluster_tol: 1e-10 * lambda_max.max(1.0) })
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn kernel_threshold(&self) -> f64 {
        self.threshold
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Index of the first eigenvalue above the kernel cut.
    pub fn first_positive(&self) -> usize {
        self.values.partition_point(|&v| v <= self.threshold)
    }

    pub fn kernel_dim(&self) -> usize {
        self.first_positive()
    }

    /// Smallest eigenvalue above the kernel cut.
    pub fn lambda_min_positive(&self) -> Option<f64> {
        self.values.get(self.first_positive()).copied()
    }

    /// Eigenvalues closer than this are one cluster; projectors at `λ` take
    /// everything up to `λ + cluster_tolerance()`.
    pub fn cluster_tolerance(&self) -> f64 {
        self.cluster_tol
    }

    pub fn lambda_max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0).max(0.0)
    }

    /// Indices of positive eigenvalues `≤ λ` (up to the clustering tolerance).
    fn positive_upto(&self, lambda: f64) -> std::ops::Range<usize> {
        let start = self.first_positive();
        let end = self.values.partition_point(|&v| v <= lambda + self.cluster_tol).max(start);
        start..end
    }

    /// Distinct positive spectral values as `(value, index range)`.
    pub fn clusters(&self) -> Vec<(f64, std::ops::Range<usize>)> {
        let mut out: Vec<(f64, std::ops::Range<usize>)> = Vec::new();
        let start = self.first_positive();
        let mut i = start;
        while i < self.values.len() {
            let mut j = i + 1;
            while j < self.values.len() && self.values[j] - self.values[j - 1] <= self.cluster_tol {
                j += 1;
            }
            let mean = self.values[i..j].iter().sum::<f64>() / (j - i) as f64;
            out.push((mean, i..j));
            i = j;
        }
        out
    }

    /// `Σ_{i∈S} c_i q_i q_iᵀ` restricted to the diagonal.
    fn weighted_diagonal(&self, range: std::ops::Range<usize>, weight: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.dim();
        let mut diag = vec![0.0; n];
        for i in range {
            let c = weight(self.values[i]);
            for (x, q) in self.vectors.column(i).iter().enumerate() {
                diag[x] += c * q * q;
            }
        }
        diag
    }
}

/// `Π_λ = Σ_{0<λ_i≤λ} q_i q_iᵀ`.
pub fn projector(d: &SpectralDecomposition, lambda: f64) -> DMatrix<f64> {
    let r = d.positive_upto(lambda);
    let q = d.vectors.columns(r.start, r.len());
    q * q.transpose()
}

/// `max_{i,j} |P_ij|`.
pub fn ultra_norm(p: &DMatrix<f64>) -> f64 {
    p.amax()
}

/// `trace(P)/|Γ|`.
pub fn gamma_trace(p: &DMatrix<f64>, group_size: usize) -> f64 {
    p.trace() / group_size as f64
}

/// The spectral decay `F(λ) = ‖Π_λ‖_{1,∞}` as a step function.
///
/// Scalar invariant instances use the normalized eigenvalue count. Everything
/// else takes the maximal diagonal entry of `Π_λ`, accumulated cluster by
/// cluster.
pub fn spectral_density(a: &OperatorInstance) -> Result<StepFunction> {
    let d = decompose(a)?;
    spectral_density_from(a, &d)
}

pub fn spectral_density_from(a: &OperatorInstance, d: &SpectralDecomposition) -> Result<StepFunction> {
    if a.is_invariant() && a.fiber() == 1 {
        density_by_count(d, a.group_size())
    } else {
        density_by_ultra_norm(d)
    }
}

/// Normalized eigenvalue count: atoms `(λ, multiplicity/|Γ|)`.
pub fn density_by_count(d: &SpectralDecomposition, group_size: usize) -> Result<StepFunction> {
    let w = 1.0 / group_size as f64;
    let atoms = d.values[d.first_positive()..].iter().map(|&v| (v, w)).collect();
    cluster_atoms(atoms, d.cluster_tol)
}

/// `F(λ) = max_x Π_λ(x,x)` at each distinct positive eigenvalue.
pub fn density_by_ultra_norm(d: &SpectralDecomposition) -> Result<StepFunction> {
    let n = d.dim();
    let mut diag = vec![0.0; n];
    let mut prev = 0.0f64;
    let mut pending = 0.0f64;
    let mut atoms = Vec::new();
    for (value, range) in d.clusters() {
        for i in range {
            for (x, q) in d.vectors.column(i).iter().enumerate() {
                diag[x] += q * q;
            }
        }
        let cur = diag.iter().copied().fold(0.0, f64::max);
        let inc = cur - prev;
        if inc < -1e-9 * prev.max(1.0) {
            return Err(Error::Internal(format!("ultra-norm density decreased by {:e} at λ = {value}", -inc)));
        }
        pending += inc.max(0.0);
        // increments at rounding level are carried to the next atom
        if pending > 1e-13 * cur.max(1.0) {
            atoms.push((value, pending));
            pending = 0.0;
        }
        prev = prev.max(cur);
    }
    StepFunction::from_atoms(atoms)
}

/// `E(f) = ⟨Af, f⟩`.
pub fn energy(a: &OperatorInstance, f: &DVector<f64>) -> Result<f64> {
    let af = a.apply(f)?;
    let e = af.dot(f);
    let tol = 1e-9 * a.norm_max().max(1.0) * f.norm_squared();
    if e < -tol {
        return Err(Error::Internal(format!("negative energy {e:e}")));
    }
    Ok(e.max(0.0))
}

/// Removes the component of `f` in `ker A`.
pub fn project_off_kernel(d: &SpectralDecomposition, f: &DVector<f64>) -> Result<DVector<f64>> {
    if f.len() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), got: f.len() });
    }
    let k = d.kernel_dim();
    let mut out = f.clone();
    if k > 0 {
        let q = d.vectors.columns(0, k);
        out -= q * (q.transpose() * f);
    }
    Ok(out)
}

/// `‖A⁻¹Π_λ‖_{1,∞}` with `A⁻¹` taken on the positive spectral part.
pub fn resolvent_projector_norm(d: &SpectralDecomposition, lambda: f64) -> f64 {
    max_of(&d.weighted_diagonal(d.positive_upto(lambda), |v| 1.0 / v))
}

/// `(‖e^{-tA}Π_V‖_{1,∞}, ‖A⁻¹e^{-tA}Π_V‖_{1,∞})`.
pub fn heat_norms(d: &SpectralDecomposition, t: f64) -> (f64, f64) {
    let r = d.first_positive()..d.dim();
    let l = max_of(&d.weighted_diagonal(r.clone(), |v| (-v * t).exp()));
    let m = max_of(&d.weighted_diagonal(r, |v| (-v * t).exp() / v));
    (l, m)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> OperatorInstance {
        OperatorInstance::new(cycle_laplacian(4), true, 1).unwrap()
    }

    #[test]
    fn c4_spectrum() {
        let d = decompose(&c4()).unwrap();
        let want = [0.0, 2.0, 2.0, 4.0];
        for (v, w) in d.eigenvalues().iter().zip(want) {
            assert!((v - w).abs() < 1e-12);
        }
        assert_eq!(d.kernel_dim(), 1);
    }

    #[test]
    fn trivial_spectra() {
        let id = OperatorInstance::new(DMatrix::identity(3, 3), true, 1).unwrap();
        let d = decompose(&id).unwrap();
        assert!(d.eigenvalues().iter().all(|v| (v - 1.0).abs() < 1e-15));
        let f = spectral_density(&id).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f.locations()[0] - 1.0).abs() < 1e-15 && (f.total_mass() - 1.0).abs() < 1e-15);

        let z = OperatorInstance::new(DMatrix::zeros(3, 3), true, 1).unwrap();
        let d = decompose(&z).unwrap();
        assert_eq!(d.kernel_dim(), 3);
        assert!(spectral_density(&z).unwrap().is_empty());
    }

    #[test]
    fn c4_projector_entries() {
        let d = decompose(&c4()).unwrap();
        let p = projector(&d, 2.0);
        for x in 0..4 {
            for y in 0..4 {
                let want = 0.5 * (std::f64::consts::FRAC_PI_2 * (x as f64 - y as f64)).cos();
                assert!((p[(x, y)] - want).abs() < 1e-12);
            }
        }
        assert!((ultra_norm(&p) - 0.5).abs() < 1e-12);
        assert!((gamma_trace(&p, 4) - 0.5).abs() < 1e-12);
        assert_eq!(ultra_norm(&projector(&d, 1.0)), 0.0);
        let full = projector(&d, 10.0);
        let want = DMatrix::identity(4, 4) - DMatrix::from_element(4, 4, 0.25);
        assert!((full - want).amax() < 1e-12);
    }

    #[test]
    fn c4_density_both_paths() {
        let a = c4();
        let d = decompose(&a).unwrap();
        for f in [density_by_count(&d, 4).unwrap(), density_by_ultra_norm(&d).unwrap()] {
            let atoms: Vec<_> = f.atoms().collect();
            assert_eq!(atoms.len(), 2);
            assert!((atoms[0].0 - 2.0).abs() < 1e-12 && (atoms[0].1 - 0.5).abs() < 1e-12);
            assert!((atoms[1].0 - 4.0).abs() < 1e-12 && (atoms[1].1 - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn c4_energy_and_kernel() {
        let a = c4();
        let d = decompose(&a).unwrap();
        let f = DVector::from_vec(vec![1.0, 0.0, -1.0, 0.0]);
        assert!((energy(&a, &f).unwrap() - 4.0).abs() < 1e-12);
        let alt = DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0]);
        assert!((energy(&a, &alt).unwrap() - 16.0).abs() < 1e-12);
        assert_eq!(energy(&a, &DVector::from_element(4, 1.0)).unwrap(), 0.0);

        let delta = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let p = project_off_kernel(&d, &delta).unwrap();
        let want = DVector::from_vec(vec![0.75, -0.25, -0.25, -0.25]);
        assert!((p - want).amax() < 1e-12);
        assert!((project_off_kernel(&d, &f).unwrap() - &f).amax() < 1e-12);
        assert!(project_off_kernel(&d, &DVector::from_element(4, 1.0)).unwrap().amax() < 1e-12);
        assert!(energy(&a, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn c4_resolvent_and_heat() {
        let d = decompose(&c4()).unwrap();
        assert!((resolvent_projector_norm(&d, 4.0) - 0.3125).abs() < 1e-12);
        assert_eq!(resolvent_projector_norm(&d, 1.0), 0.0);
        let (l, m) = heat_norms(&d, 1.0);
        assert!((l - ((-2.0f64).exp() / 2.0 + (-4.0f64).exp() / 4.0)).abs() < 1e-12);
        assert!((m - ((-2.0f64).exp() / 4.0 + (-4.0f64).exp() / 16.0)).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(OperatorInstance::new(asym, false, 1), Err(Error::NotSymmetric { .. })));
        let neg = OperatorInstance::new(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]), false, 1).unwrap();
        assert!(matches!(decompose(&neg), Err(Error::NotPositive { .. })));
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        assert!(OperatorInstance::new(diag, true, 1).is_err());
        assert!(OperatorInstance::new(DMatrix::zeros(2, 3), false, 1).is_err());
    }
}
