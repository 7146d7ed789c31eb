use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};

use super::complex::{Cell, Coboundary, Face, SimplicialComplex};
use crate::error::{Error, Result};
use crate::monocalc::StepFunction;
use crate::spectral_ops::{BlockFamily, OperatorInstance, DENSE_CAP};

/// A `ℤ^d` cover of a finite complex `K`, given by translation labels on the
/// stored (oriented) edges, together with the quotient size `N`.
///
/// The cover has cells `(τ, g)` with `g ∈ ℤ^d`. An edge `e = (a, b)` lifts to
/// `((a, g), (b, g + m_e))`; a higher cell lifts with per-vertex offsets that
/// are forced by its edges. Traversing an edge backwards contributes `−m_e`.
#[derive(Clone, Debug)]
pub struct AbelianCoverSpec {
    base: SimplicialComplex,
    labels: Vec<Vec<i64>>,
    rank: usize,
    n: usize,
    /// `offsets[k][τ][p]`: translation of the `p`-th vertex of `τ`.
    offsets: Vec<Vec<Vec<Vec<i64>>>>,
}

impl AbelianCoverSpec {
    pub fn new(base: SimplicialComplex, labels: Vec<Vec<i64>>, rank: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("quotient size must be ≥ 2, got {n}")));
        }
        if rank == 0 {
            return Err(Error::InvalidInput("cover rank must be ≥ 1".into()));
        }
        if labels.len() != base.count(1) {
            return Err(Error::DimensionMismatch { expected: base.count(1), got: labels.len() });
        }
        if let Some(bad) = labels.iter().find(|m| m.len() != rank) {
            return Err(Error::InvalidInput(format!("label {bad:?} does not have {rank} components")));
        }
        (n as u64)
            .checked_pow(rank as u32)
            .filter(|&g| g <= u32::MAX as u64)
            .ok_or_else(|| Error::InvalidInput("quotient group too large".into()))?;
        let offsets = solve_offsets(&base, &labels, rank)?;
        Ok(AbelianCoverSpec { base, labels, rank, n, offsets })
    }

    /// Same cover with another quotient size.
    pub fn with_quotient(&self, n: usize) -> Result<Self> {
        Self::new(self.base.clone(), self.labels.clone(), self.rank, n)
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn labels(&self) -> &[Vec<i64>] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn quotient_size(&self) -> usize {
        self.n
    }

    /// `N^d`.
    pub fn group_size(&self) -> usize {
        self.n.pow(self.rank as u32)
    }

    fn lin(&self, g: &[i64]) -> usize {
        let n = self.n as i64;
        g.iter().rev().fold(0usize, |acc, &x| acc * self.n + x.rem_euclid(n) as usize)
    }

    pub(crate) fn unlin(&self, mut x: usize) -> Vec<i64> {
        (0..self.rank)
            .map(|_| {
                let c = x % self.n;
                x /= self.n;
                c as i64
            })
            .collect()
    }

    /// Translation of the `i`-th face inside cell `τ` of degree `k`.
    fn face_shift(&self, k: usize, tau: usize, face: &Face) -> &[i64] {
        &self.offsets[k][tau][face.perm[0]]
    }

    /// The coboundary of the quotient complex without building its cells.
    pub fn quotient_coboundary(&self, k: usize) -> Coboundary {
        let g = self.group_size();
        let mut rows = Vec::with_capacity(self.base.count(k + 1) * g);
        for (tau, cell) in self.base.cells(k + 1).iter().enumerate() {
            for x in 0..g {
                let gv = self.unlin(x);
                let mut acc: Vec<(usize, i64)> = Vec::with_capacity(cell.faces.len());
                for f in &cell.faces {
                    let shift = self.face_shift(k + 1, tau, f);
                    let h: Vec<i64> = gv.iter().zip(shift).map(|(a, b)| a + b).collect();
                    let col = f.index * g + self.lin(&h);
                    match acc.iter_mut().find(|e| e.0 == col) {
                        Some(e) => e.1 += f.sign as i64,
                        None => acc.push((col, f.sign as i64)),
                    }
                }
                acc.retain(|e| e.1 != 0);
                acc.sort_unstable();
                rows.push(acc);
            }
        }
        Coboundary { rows, cols: self.base.count(k) * g }
    }

    /// `d_k(θ)`: the coboundary twisted by the character `θ ∈ (ℤ/Nℤ)^d`.
    pub fn twisted_coboundary(&self, k: usize, theta: &[usize]) -> DMatrix<Complex<f64>> {
        let rows = self.base.count(k + 1);
        let cols = self.base.count(k);
        let mut m = DMatrix::zeros(rows, cols);
        for (tau, cell) in self.base.cells(k + 1).iter().enumerate() {
            for f in &cell.faces {
                let shift = self.face_shift(k + 1, tau, f);
                let phase: i64 = theta.iter().zip(shift).map(|(&t, &s)| t as i64 * s).sum();
                let angle = 2.0 * PI * phase.rem_euclid(self.n as i64) as f64 / self.n as f64;
                m[(tau, f.index)] += Complex::from_polar(f.sign as f64, angle);
            }
        }
        m
    }
}

/// Solves for per-vertex translations of every cell and checks that the edge
/// labels form a cocycle (all constraints agree in `ℤ^d`).
fn solve_offsets(base: &SimplicialComplex, labels: &[Vec<i64>], rank: usize) -> Result<Vec<Vec<Vec<Vec<i64>>>>> {
    let zero = vec![0i64; rank];
    let mut offsets: Vec<Vec<Vec<Vec<i64>>>> = Vec::with_capacity(base.top_degree() + 1);
    offsets.push(vec![vec![zero.clone()]; base.count(0)]);
    if base.top_degree() >= 1 {
        offsets.push(labels.iter().map(|m| vec![zero.clone(), m.clone()]).collect());
    }
    for k in 2..=base.top_degree() {
        let mut level = Vec::with_capacity(base.count(k));
        for (tau, cell) in base.cells(k).iter().enumerate() {
            level.push(
                cell_offsets(cell, &offsets[k - 1], k, rank).map_err(|msg| {
                    Error::Complex(format!("labels are not a cocycle on degree-{k} cell {tau}: {msg}"))
                })?,
            );
        }
        offsets.push(level);
    }
    Ok(offsets)
}

fn cell_offsets(
    cell: &Cell,
    lower: &[Vec<Vec<i64>>],
    k: usize,
    rank: usize,
) -> std::result::Result<Vec<Vec<i64>>, String> {
    let mut off: Vec<Option<Vec<i64>>> = vec![None; k + 1];
    off[0] = Some(vec![0; rank]);
    loop {
        let mut changed = false;
        for f in &cell.faces {
            let sigma = &lower[f.index];
            let Some(p) = f.perm.iter().position(|&q| off[q].is_some()) else { continue };
            let anchor = off[f.perm[p]].clone().unwrap();
            for (q, &pos) in f.perm.iter().enumerate() {
                let want: Vec<i64> = (0..rank).map(|j| anchor[j] - sigma[p][j] + sigma[q][j]).collect();
                match &off[pos] {
                    Some(have) if *have != want => {
                        return Err(format!("vertex {pos} gets {have:?} and {want:?}"));
                    }
                    Some(_) => {}
                    None => {
                        off[pos] = Some(want);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    off.into_iter().map(|o| o.ok_or_else(|| "vertex offsets underdetermined".to_string())).collect()
}

/// The finite quotient `X/(Nℤ)^d`: cells `K_k × (ℤ/Nℤ)^d`, cell `(τ, g)` at
/// index `τ·N^d + Σ g_j N^j`. Vertices of `(τ, g)` are numbered the same way.
pub fn quotient_complex(spec: &AbelianCoverSpec) -> Result<SimplicialComplex> {
    let g = spec.group_size();
    let base = spec.base();
    let mut cells: Vec<Vec<Cell>> = Vec::with_capacity(base.top_degree() + 1);
    for k in 0..=base.top_degree() {
        let mut level = Vec::with_capacity(base.count(k) * g);
        for (tau, cell) in base.cells(k).iter().enumerate() {
            for x in 0..g {
                let gv = spec.unlin(x);
                let shifted = |off: &[i64]| -> Vec<i64> { gv.iter().zip(off).map(|(a, b)| a + b).collect() };
                let vertices = cell
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(p, &v)| {
                        let vi = base.cells(0).iter().position(|c| c.vertices[0] == v).unwrap();
                        vi * g + spec.lin(&shifted(&spec.offsets[k][tau][p]))
                    })
                    .collect();
                let faces = cell
                    .faces
                    .iter()
                    .map(|f| Face {
                        index: f.index * g + spec.lin(&shifted(spec.face_shift(k, tau, f))),
                        sign: f.sign,
                        perm: f.perm.clone(),
                    })
                    .collect();
                level.push(Cell { vertices, faces });
            }
        }
        cells.push(level);
    }
    SimplicialComplex::from_cells(cells)
}

/// Characters `θ` in index order.
pub fn characters(spec: &AbelianCoverSpec) -> Vec<Vec<usize>> {
    (0..spec.group_size()).map(|x| spec.unlin(x).into_iter().map(|c| c as usize).collect()).collect()
}

/// The blocks `A(θ) = d_k(θ)* d_k(θ)`, one per character.
pub fn twisted_blocks(spec: &AbelianCoverSpec, k: usize) -> Result<BlockFamily> {
    let blocks = characters(spec)
        .into_iter()
        .map(|theta| {
            let d = spec.twisted_coboundary(k, &theta);
            let mut a = d.adjoint() * &d;
            // exact Hermitian symmetry
            let at = a.adjoint();
            a = (a + at).scale(0.5);
            (theta, a)
        })
        .collect();
    BlockFamily::from_blocks(blocks)
}

/// Normalized spectral density of `d_k* d_k` on `(ker d_k)^⊥`: atoms carry
/// multiplicity / `N^d`.
pub fn hodge_density(spec: &AbelianCoverSpec, k: usize) -> Result<StepFunction> {
    twisted_blocks(spec, k)?.density()
}

/// Dense `d_kᵀ d_k` on the quotient, as an invariant instance with fiber `#K_k`.
pub fn hodge_operator(spec: &AbelianCoverSpec, k: usize) -> Result<OperatorInstance> {
    let dim = spec.base().count(k) * spec.group_size();
    if dim > DENSE_CAP {
        return Err(Error::TooLarge { dim, cap: DENSE_CAP });
    }
    let d = spec.quotient_coboundary(k).to_dense();
    OperatorInstance::new(d.transpose() * d, true, spec.base().count(k))
}

/// `ℤ^d` acting on the one-vertex complex with `d` loops labeled by the unit
/// vectors; the quotient is the torus graph `(ℤ/Nℤ)^d`.
pub fn lattice_cover(d: usize, n: usize) -> Result<AbelianCoverSpec> {
    let base = SimplicialComplex::build(vec![vec![vec![0]], vec![vec![0, 0]; d]], false)?;
    let labels = (0..d).map(|j| (0..d).map(|i| i64::from(i == j)).collect()).collect();
    AbelianCoverSpec::new(base, labels, d, n)
}

/// `ℤ²` acting on the triangulated plane; the base is the `m × m` triangulated
/// torus (`m ≥ 3`), cut open along its two generating cycles.
pub fn triangulated_plane_cover(m: usize, n: usize) -> Result<AbelianCoverSpec> {
    if m < 3 {
        return Err(Error::InvalidInput("triangulated base needs m ≥ 3".into()));
    }
    let id = |i: usize, j: usize| (i % m) + m * (j % m);
    let vertices = (0..m * m).map(|v| vec![v]).collect();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    let mut tris = Vec::new();
    for j in 0..m {
        for i in 0..m {
            let wx = i64::from(i + 1 == m);
            let wy = i64::from(j + 1 == m);
            for (a, b, lab) in [
                (id(i, j), id(i + 1, j), vec![wx, 0]),
                (id(i, j), id(i, j + 1), vec![0, wy]),
                (id(i, j), id(i + 1, j + 1), vec![wx, wy]),
            ] {
                edges.push(vec![a, b]);
                labels.push(lab);
            }
            tris.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
        }
    }
    let base = SimplicialComplex::build(vec![vertices, edges, tris], false)?;
    AbelianCoverSpec::new(base, labels, 2, n)
}
