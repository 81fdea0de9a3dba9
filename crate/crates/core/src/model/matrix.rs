use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense symmetric matrix, packed upper triangle (row-major, `i ≤ j`).
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    k: usize,
    data: Vec<f64>,
}

#[inline]
fn packed_index(k: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * k - i + 1) / 2 + (j - i)
}

impl SymMatrix {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            data: vec![0.0; k * (k + 1) / 2],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k);
        for i in 0..k {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on `i ≤ j`.
    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(k * (k + 1) / 2);
        for i in 0..k {
            for j in i..k {
                data.push(f(i, j));
            }
        }
        Self { k, data }
    }

    /// Reads the lower triangle of a row-major `k × k` array.
    pub fn from_dense(k: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), k * k);
        Self::from_fn(k, |i, j| dense[j * k + i])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed_index(self.k, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = packed_index(self.k, i, j);
        self.data[idx] = v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.k).map(|i| self.get(i, i)).collect()
    }

    /// Full row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let k = self.k;
        let mut out = vec![0.0; k * k];
        for i in 0..k {
            for j in i..k {
                let v = self.get(i, j);
                out[i * k + j] = v;
                out[j * k + i] = v;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Binary symmetric sparsity pattern with zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternJson", into = "PatternJson")]
pub struct StructureMatrix {
    k: usize,
    bits: Vec<bool>,
}

/// JSON form: `{"k": 4, "edges": [[0, 1], [1, 2]]}` with 0-based indices.
#[derive(Serialize, Deserialize)]
struct PatternJson {
    k: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<PatternJson> for StructureMatrix {
    type Error = Error;

    fn try_from(p: PatternJson) -> Result<Self> {
        let edges: Vec<(usize, usize)> = p.edges.iter().map(|e| (e[0], e[1])).collect();
        StructureMatrix::from_edges(p.k, &edges)
    }
}

impl From<StructureMatrix> for PatternJson {
    fn from(z: StructureMatrix) -> Self {
        PatternJson {
            k: z.k,
            edges: z.edges().map(|(i, j)| [i, j]).collect(),
        }
    }
}

#[inline]
fn pair_index(k: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

impl StructureMatrix {
    pub fn empty(k: usize) -> Self {
        Self {
            k,
            bits: vec![false; k * k.saturating_sub(1) / 2],
        }
    }

    pub fn dense(k: usize) -> Self {
        Self {
            k,
            bits: vec![true; k * k.saturating_sub(1) / 2],
        }
    }

    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut z = Self::empty(k);
        for &(i, j) in edges {
            if i == j {
                return Err(Error::domain(format!(
                    "pattern edge ({i},{j}) lies on the diagonal"
                )));
            }
            if i >= k || j >= k {
                return Err(Error::domain(format!(
                    "pattern edge ({i},{j}) out of range for k = {k}"
                )));
            }
            z.set(i, j, true);
        }
        Ok(z)
    }

    /// Path graph `0 – 1 – … – (k-1)`.
    pub fn path(k: usize) -> Self {
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Self::from_edges(k, &edges).expect("path edges are in range")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        i != j && self.bits[pair_index(self.k, i, j)]
    }

    /// Panics on a diagonal index.
    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        assert!(i != j, "diagonal of a structure matrix is fixed at zero");
        let idx = pair_index(self.k, i, j);
        self.bits[idx] = on;
    }

    /// Upper-triangle pairs `(i, j)`, `i < j`, with `z_ij = 1`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.k;
        (0..k)
            .flat_map(move |i| ((i + 1)..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j))
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.k];
        for (i, j) in self.edges() {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    /// Entrywise `self ≤ other`.
    pub fn is_subpattern_of(&self, other: &StructureMatrix) -> bool {
        self.k == other.k && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }
}

/// `d_z = max_i Σ_{j≠i} z_ij`.
pub fn max_degree(z: &StructureMatrix) -> usize {
    z.degrees().into_iter().max().unwrap_or(0)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let o = 4 * c;
        acc[0] += a[o] * b[o];
        acc[1] += a[o + 1] * b[o + 1];
        acc[2] += a[o + 2] * b[o + 2];
        acc[3] += a[o + 3] * b[o + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for o in 4 * chunks..n {
        s += a[o] * b[o];
    }
    s
}

/// Cholesky test: true iff every pivot is strictly positive.
///
/// A pivot that is zero, negative or NaN in floating point counts as not
/// positive definite.
pub fn is_pd(m: &SymMatrix) -> bool {
    let k = m.k();
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let s = m.get(j, i) - dot(&l[i * k..i * k + j], &l[j * k..j * k + j]);
            if i == j {
                if !(s > 0.0) {
                    return false;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    true
}

fn to_nalgebra(m: &SymMatrix) -> nalgebra::DMatrix<f64> {
    let k = m.k();
    nalgebra::DMatrix::from_fn(k, k, |i, j| m.get(i, j))
}

/// All eigenvalues, ascending.
pub fn eigenvalues(m: &SymMatrix) -> Vec<f64> {
    if m.k() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = to_nalgebra(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Smallest eigenvalue `λ_min`.
pub fn min_eig(m: &SymMatrix) -> f64 {
    if m.k() == 0 {
        return f64::INFINITY;
    }
    to_nalgebra(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Keeps the diagonal and multiplies every off-diagonal by `sigma_new / sigma`.
pub fn coupled_scale(m: &SymMatrix, sigma: f64, sigma_new: f64) -> Result<SymMatrix> {
    if !(sigma > 0.0) || !(sigma_new >= 0.0) {
        return Err(Error::domain(format!(
            "coupled_scale needs sigma > 0 and sigma' >= 0, got {sigma}, {sigma_new}"
        )));
    }
    let f = sigma_new / sigma;
    Ok(SymMatrix::from_fn(m.k(), |i, j| {
        if i == j {
            m.get(i, i)
        } else {
            f * m.get(i, j)
        }
    }))
}

/// Largest factor `s*` such that `D + s·A ≻ 0` for every `0 ≤ s < s*`,
/// where `D` is the diagonal and `A` the off-diagonal part of `m`.
///
/// `∞` when the off-diagonal part is zero; `0` when some diagonal entry is
/// not positive.
pub fn pd_scale_limit(m: &SymMatrix) -> f64 {
    let k = m.k();
    let diag = m.diagonal();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return 0.0;
    }
    let inv_sqrt: Vec<f64> = diag.iter().map(|d| 1.0 / d.sqrt()).collect();
    let b = SymMatrix::from_fn(k, |i, j| {
        if i == j {
            0.0
        } else {
            m.get(i, j) * inv_sqrt[i] * inv_sqrt[j]
        }
    });
    let lambda = min_eig(&b);
    if lambda < 0.0 {
        -1.0 / lambda
    } else {
        f64::INFINITY
    }
}
