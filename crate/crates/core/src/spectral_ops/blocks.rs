use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::monocalc::{cluster_atoms, StepFunction};

/// Eigen-decomposition of one Hermitian character block.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    /// Character index in `(ℤ/Nℤ)^d`.
    pub theta: Vec<usize>,
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal columns matching `values`.
    pub vectors: DMatrix<Complex<f64>>,
}

/// A Hermitian operator given by its Fourier blocks `A(θ)`, one per character
/// of a finite abelian group. The full operator acts on `block_size·|Γ|` points
/// and its spectrum is the union of the block spectra.
#[derive(Clone, Debug)]
pub struct BlockFamily {
    blocks: Vec<BlockEigen>,
    block_size: usize,
    threshold: f64,
    cluster_tol: f64,
}

impl BlockFamily {
    /// Decomposes every block (in parallel); the result keeps input order.
    pub fn from_blocks(blocks: Vec<(Vec<usize>, DMatrix<Complex<f64>>)>) -> Result<Self> {
        let block_size = blocks.first().map(|b| b.1.nrows()).unwrap_or(0);
        let mut norm = 0.0f64;
        for (theta, m) in &blocks {
            if m.nrows() != block_size || m.ncols() != block_size {
                return Err(Error::DimensionMismatch { expected: block_size, got: m.nrows().max(m.ncols()) });
            }
            let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if asym > 1e-12 * scale.max(1.0) {
                return Err(Error::InvalidInput(format!("block {theta:?} is not Hermitian ({asym:e})")));
            }
            norm = norm.max(scale);
        }
        let decomposed: Result<Vec<BlockEigen>> = blocks
            .into_par_iter()
            .map(|(theta, m)| {
                let n = m.nrows();
                let eig =
                    SymmetricEigen::try_new(m, f64::EPSILON, 0).ok_or(Error::NoConvergence { residual: f64::NAN })?;
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
                let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
                let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
                Ok(BlockEigen { theta, values, vectors })
            })
            .collect();
        let blocks = decomposed?;
        let threshold = 1e-9 * norm.max(1e-300) * block_size.max(1) as f64;
        let min = blocks.iter().flat_map(|b| b.values.first()).copied().fold(0.0, f64::min);
        if min < -threshold.max(1e-9 * norm) {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let lambda_max = blocks.iter().flat_map(|b| b.values.last()).copied().fold(0.0, f64::max);
        Ok(BlockFamily { blocks, block_size, threshold, cluster_tol: 1e-10 * lambda_max.max(1.0) })
    }

    pub fn blocks(&self) -> &[BlockEigen] {
        &self.blocks
    }

    /// Number of characters `|Γ|`.
    pub fn index_size(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn kernel_threshold(&self) -> f64 {
        self.threshold
    }

    /// All block eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Smallest eigenvalue above the kernel cut, over all blocks.
    pub fn lambda_min_positive(&self) -> Option<f64> {
        self.eigenvalues().into_iter().find(|&v| v > self.threshold)
    }

    /// Normalized count `τ_Γ(Π_λ)`: atoms `(λ, multiplicity/|Γ|)`.
    pub fn density(&self) -> Result<StepFunction> {
        let w = 1.0 / self.index_size() as f64;
        let atoms = self.eigenvalues().into_iter().filter(|&v| v > self.threshold).map(|v| (v, w)).collect();
        cluster_atoms(atoms, self.cluster_tol)
    }

    /// Diagonal of `Σ_{0<μ≤λ} c(μ) P_μ` on the full space, one value per fiber
    /// coordinate (it does not depend on the group element).
    pub fn weighted_diagonal(&self, lambda: f64, weight: impl Fn(f64) -> f64 + Sync) -> Vec<f64> {
        let cut = lambda + self.cluster_tol;
        let mut diag = vec![0.0; self.block_size];
        for b in &self.blocks {
            for (j, &mu) in b.values.iter().enumerate() {
                if mu <= self.threshold || mu > cut {
                    continue;
                }
                let c = weight(mu);
                for (x, u) in b.vectors.column(j).iter().enumerate() {
                    diag[x] += c * u.norm_sqr();
                }
            }
        }
        let g = self.index_size() as f64;
        diag.iter_mut().for_each(|v| *v /= g);
        diag
    }

    /// `‖Π_λ‖_{1,∞}` from the block diagonal.
    pub fn projector_ultra_norm(&self, lambda: f64) -> f64 {
        self.weighted_diagonal(lambda, |_| 1.0).into_iter().fold(0.0, f64::max)
    }

    /// `‖A⁻¹Π_λ‖_{1,∞}`.
    pub fn resolvent_projector_norm(&self, lambda: f64) -> f64 {
        self.weighted_diagonal(lambda, |v| 1.0 / v).into_iter().fold(0.0, f64::max)
    }

    /// `(‖e^{-tA}Π_V‖_{1,∞}, ‖A⁻¹e^{-tA}Π_V‖_{1,∞})`.
    pub fn heat_norms(&self, t: f64) -> (f64, f64) {
        let l = self.weighted_diagonal(f64::INFINITY, |v| (-v * t).exp());
        let m = self.weighted_diagonal(f64::INFINITY, |v| (-v * t).exp() / v);
        (l.into_iter().fold(0.0, f64::max), m.into_iter().fold(0.0, f64::max))
    }
}
