use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// One codimension-one face of a cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Index of the face among the cells of degree `k − 1`.
    pub index: usize,
    /// Incidence coefficient `(−1)^i·sgn(π)`.
    pub sign: i8,
    /// `perm[p]` is the position, in the cell's vertex tuple, of the face's
    /// `p`-th stored vertex.
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub vertices: Vec<usize>,
    /// Face `i` omits vertex position `i`.
    pub faces: Vec<Face>,
}

/// Finite oriented simplicial complex.
///
/// Degree-one cells may be loops `(v, v)` and several edges may join the same
/// pair of vertices; these are needed for base complexes of covers. Higher
/// cells must have distinct vertices and unambiguous faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    cells: Vec<Vec<Cell>>,
}

/// Sparse integer coboundary `d_k : C^k → C^{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coboundary {
    pub rows: Vec<Vec<(usize, i64)>>,
    pub cols: usize,
}

impl Coboundary {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(c, v)| v as f64 * x[c]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), self.cols);
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                m[(i, c)] += v as f64;
            }
        }
        m
    }

    /// Product `other ∘ self` with exact integer entries.
    pub fn then(&self, other: &Coboundary) -> Coboundary {
        let rows = other
            .rows
            .iter()
            .map(|r| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(mid, a) in r {
                    for &(c, b) in &self.rows[mid] {
                        *acc.entry(c).or_default() += a * b;
                    }
                }
                let mut v: Vec<(usize, i64)> = acc.into_iter().filter(|&(_, x)| x != 0).collect();
                v.sort_unstable();
                v
            })
            .collect();
        Coboundary { rows, cols: self.cols }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&(_, v)| v == 0))
    }
}

fn parity(perm: &[usize]) -> i8 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

impl SimplicialComplex {
    /// Builds a complex from vertex tuples per degree.
    ///
    /// Faces are matched by vertex set; a stored face may list its vertices in
    /// any order and the incidence sign absorbs the permutation parity. With
    /// `auto_complete`, missing faces are added in the order induced by the
    /// cell. The identity `d_{k+1} d_k = 0` is verified in exact arithmetic.
    pub fn build(simplices: Vec<Vec<Vec<usize>>>, auto_complete: bool) -> Result<Self> {
        let mut tuples = simplices;
        while tuples.last().is_some_and(|t| t.is_empty()) && tuples.len() > 1 {
            tuples.pop();
        }
        if tuples.is_empty() {
            tuples.push(Vec::new());
        }
        for (k, level) in tuples.iter().enumerate() {
            for t in level {
                if t.len() != k + 1 {
                    return Err(Error::Complex(format!("degree-{k} simplex {t:?} has {} vertices", t.len())));
                }
                if k >= 2 || k == 0 {
                    let mut s = t.clone();
                    s.sort_unstable();
                    if s.windows(2).any(|w| w[0] == w[1]) {
                        return Err(Error::Complex(format!("degenerate simplex {t:?}")));
                    }
                }
            }
        }
        {
            let mut seen = tuples[0].clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Complex("duplicate vertex".into()));
            }
        }

        let top = tuples.len() - 1;
        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); top + 1];
        // highest degree first so auto-completion can append lower faces
        let mut pending: Vec<Vec<Vec<usize>>> = tuples;
        for k in (0..=top).rev() {
            let level = std::mem::take(&mut pending[k]);
            if k == 0 {
                cells[0] = level.into_iter().map(|v| Cell { vertices: v, faces: Vec::new() }).collect();
                break;
            }
            // index of lower cells by sorted vertex set
            let mut lookup: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
            for (i, t) in pending[k - 1].iter().enumerate() {
                let mut key = t.clone();
                key.sort_unstable();
                lookup.entry(key).or_default().push(i);
            }
            let mut built = Vec::with_capacity(level.len());
            for t in level {
                let mut faces = Vec::with_capacity(k + 1);
                for i in 0..=k {
                    let rem: Vec<usize> = (0..=k).filter(|&p| p != i).collect();
                    let face_tuple: Vec<usize> = rem.iter().map(|&p| t[p]).collect();
                    let mut key = face_tuple.clone();
                    key.sort_unstable();
                    let index = match lookup.get(&key).map(Vec::as_slice) {
                        Some([one]) => *one,
                        Some(_) => return Err(Error::Complex(format!("face {face_tuple:?} of {t:?} is ambiguous"))),
                        None if auto_complete => {
                            pending[k - 1].push(face_tuple.clone());
                            let idx = pending[k - 1].len() - 1;
                            lookup.insert(key, vec![idx]);
                            idx
                        }
                        None => return Err(Error::Complex(format!("face {face_tuple:?} of {t:?} is missing"))),
                    };
                    let stored = &pending[k - 1][index];
                    let perm: Vec<usize> = if k == 1 {
                        vec![rem[0]]
                    } else {
                        stored.iter().map(|v| rem[face_tuple.iter().position(|x| x == v).unwrap()]).collect()
                    };
                    let base = if i % 2 == 0 { 1 } else { -1 };
                    let sign = base * parity(&perm);
                    faces.push(Face { index, sign, perm });
                }
                built.push(Cell { vertices: t, faces });
            }
            cells[k] = built;
        }
        let complex = SimplicialComplex { cells };
        complex.check_dd()?;
        Ok(complex)
    }

    /// Assembles a complex whose faces are already resolved.
    pub(crate) fn from_cells(cells: Vec<Vec<Cell>>) -> Result<Self> {
        let complex = SimplicialComplex { cells };
        complex.check_dd()?;
        Ok(complex)
    }

    fn check_dd(&self) -> Result<()> {
        for k in 0..self.top_degree().saturating_sub(1) {
            if !self.coboundary(k).then(&self.coboundary(k + 1)).is_zero() {
                return Err(Error::Complex(format!("d_{} d_{k} ≠ 0", k + 1)));
            }
        }
        Ok(())
    }

    pub fn top_degree(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    pub fn cells(&self, k: usize) -> &[Cell] {
        self.cells.get(k).map_or(&[], Vec::as_slice)
    }

    /// `d_k` as a `#K_{k+1} × #K_k` sparse integer matrix.
    pub fn coboundary(&self, k: usize) -> Coboundary {
        let rows = self
            .cells(k + 1)
            .iter()
            .map(|c| {
                let mut acc: Vec<(usize, i64)> = Vec::new();
                for f in &c.faces {
                    match acc.iter_mut().find(|e| e.0 == f.index) {
                        Some(e) => e.1 += f.sign as i64,
                        None => acc.push((f.index, f.sign as i64)),
                    }
                }
                acc.retain(|e| e.1 != 0);
                acc.sort_unstable();
                acc
            })
            .collect();
        Coboundary { rows, cols: self.count(k) }
    }
}

/// `build_complex` with faces required to be present.
pub fn build_complex(simplices: Vec<Vec<Vec<usize>>>) -> Result<SimplicialComplex> {
    SimplicialComplex::build(simplices, false)
}

/// Parsed complex file: the complex and the optional edge labels.
#[derive(Clone, Debug)]
pub struct ComplexFile {
    pub complex: SimplicialComplex,
    /// One `ℤ^d` label per edge (unlisted edges get zero), when a `[labels]`
    /// section is present.
    pub labels: Option<Vec<Vec<i64>>>,
}

/// Parses the line-oriented complex format.
///
/// ```text
/// [k=0]
/// 0
/// [k=1]
/// 0 0
/// [labels]
/// 0 1
/// ```
///
/// Each `[k=K]` line is an ordered vertex tuple; each `[labels]` line is an
/// edge index (into the `[k=1]` list) followed by its `ℤ^d` label. `#` starts a
/// comment.
pub fn parse_complex(text: &str, auto_complete: bool) -> Result<ComplexFile> {
    enum Section {
        None,
        Degree(usize),
        Labels,
    }
    let err = |line: usize, message: String| Error::Parse { location: format!("line {line}"), message };
    let mut section = Section::None;
    let mut tuples: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut label_lines: Vec<(usize, usize, Vec<i64>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(head) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let head = head.trim();
            section = if head == "labels" {
                Section::Labels
            } else if let Some(k) = head.strip_prefix("k=") {
                let k: usize = k.trim().parse().map_err(|_| err(lineno, format!("bad section header {line:?}")))?;
                if tuples.len() <= k {
                    tuples.resize(k + 1, Vec::new());
                }
                Section::Degree(k)
            } else {
                return Err(err(lineno, format!("unknown section {line:?}")));
            };
            continue;
        }
        match section {
            Section::None => return Err(err(lineno, "data before the first section".into())),
            Section::Degree(k) => {
                let t: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
                let t = t.map_err(|e| err(lineno, format!("{e}")))?;
                tuples[k].push(t);
            }
            Section::Labels => {
                let mut it = line.split_whitespace();
                let edge: usize = it.next().unwrap().parse().map_err(|e| err(lineno, format!("edge index: {e}")))?;
                let m: std::result::Result<Vec<i64>, _> = it.map(str::parse).collect();
                let m = m.map_err(|e| err(lineno, format!("label: {e}")))?;
                label_lines.push((lineno, edge, m));
            }
        }
    }
    let complex = SimplicialComplex::build(tuples, auto_complete)?;
    let labels = if label_lines.is_empty() {
        None
    } else {
        let d = label_lines[0].2.len();
        let mut labels = vec![vec![0i64; d]; complex.count(1)];
        let mut seen = vec![false; complex.count(1)];
        for (lineno, e, m) in label_lines {
            if m.len() != d {
                return Err(err(lineno, format!("label has {} components, expected {d}", m.len())));
            }
            if e >= labels.len() {
                return Err(err(lineno, format!("edge index {e} out of range")));
            }
            if std::mem::replace(&mut seen[e], true) {
                return Err(err(lineno, format!("edge {e} labeled twice")));
            }
            labels[e] = m;
        }
        Some(labels)
    };
    Ok(ComplexFile { complex, labels })
}
