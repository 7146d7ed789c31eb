//! Standard operator instances.

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::BlockFamily;
use crate::error::{invalid, Result};

/// Laplacian of the cycle `ℤ/Nℤ`: 2 on the diagonal, −1 to each neighbor.
pub fn cycle_laplacian(n: usize) -> DMatrix<f64> {
    torus_laplacian(1, n)
}

/// Laplacian of the torus `(ℤ/Nℤ)^d`, indexed by `Σ g_j N^j`.
pub fn torus_laplacian(d: usize, n: usize) -> DMatrix<f64> {
    let size = n.pow(d as u32);
    let mut m = DMatrix::zeros(size, size);
    for x in 0..size {
        let mut stride = 1;
        for _ in 0..d {
            let coord = (x / stride) % n;
            let y = x - coord * stride + ((coord + 1) % n) * stride;
            m[(x, x)] += 2.0;
            m[(x, y)] -= 1.0;
            m[(y, x)] -= 1.0;
            stride *= n;
        }
    }
    m
}

/// Character blocks of the torus Laplacian: `2d − 2Σ_j cos(2πθ_j/N)`.
pub fn torus_blocks(d: usize, n: usize) -> Result<BlockFamily> {
    let size = n.pow(d as u32);
    let blocks = (0..size)
        .map(|x| {
            let theta: Vec<usize> = (0..d).map(|j| (x / n.pow(j as u32)) % n).collect();
            let v: f64 =
                theta.iter().map(|&t| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * t as f64 / n as f64).cos()).sum();
            (theta, DMatrix::from_element(1, 1, Complex::new(v, 0.0)))
        })
        .collect();
    BlockFamily::from_blocks(blocks)
}

/// Laplacian `|S|·I − A` of the right Cayley graph `x ~ x·s`, given the
/// group's multiplication table (`table[a][b] = a·b`) and a generating multiset
/// closed under inverses.
pub fn cayley_laplacian(table: &[Vec<usize>], generators: &[usize]) -> Result<DMatrix<f64>> {
    let n = table.len();
    if n == 0 {
        return Err(invalid("empty multiplication table"));
    }
    for (a, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(invalid(format!("table row {a} has {} entries, expected {n}", row.len())));
        }
        let mut seen = vec![false; n];
        for &v in row {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(invalid(format!("table row {a} is not a permutation")));
            }
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or_else(|| invalid("table has no identity element"))?;
    let inverse = |s: usize| (0..n).find(|&t| table[s][t] == e);
    let mut counts = vec![0usize; n];
    for &s in generators {
        if s >= n {
            return Err(invalid(format!("generator {s} out of range")));
        }
        counts[s] += 1;
    }
    for &s in generators {
        let t = inverse(s).ok_or_else(|| invalid(format!("generator {s} has no inverse")))?;
        if counts[t] != counts[s] {
            return Err(invalid(format!("generator set is not closed under inverses at {s}")));
        }
    }
    let mut m = DMatrix::from_diagonal_element(n, n, generators.len() as f64);
    for x in 0..n {
        for &s in generators {
            m[(x, table[x][s])] -= 1.0;
        }
    }
    Ok(m)
}

/// `BᵀB/rank` with `B` a `rank × dim` standard Gaussian matrix.
pub fn random_psd(dim: usize, rank: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b: DMatrix<f64> = DMatrix::from_fn(rank, dim, |_, _| StandardNormal.sample(&mut rng));
    let mut a = b.transpose() * b / rank as f64;
    // exact symmetry
    let at = a.transpose();
    a = (a + at) * 0.5;
    a
}
