//! Sparse and dense linear algebra helpers built on faer.
//!
//! `CsrMatrix` holds assembled stencils and does fast matrix-vector
//! products; `SparseLu` wraps the faer sparse LU for subdomain solves.
//! The remaining functions are small dense utilities used by the
//! spectral analysis and the coarse-space builders.

use faer::linalg::solvers::{DenseSolveCore, Solve, SolveCore};
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use crate::error::{Error, Result};

/// Compressed sparse row matrix with `f64` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for i in 0..nrows {
            let mut row: Vec<(usize, f64)> = (counts[i]..counts[i + 1])
                .map(|k| (cols[k], vals[k]))
                .collect();
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// Stored entries of row `i` as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    /// Principal submatrix on the given index list (in that order).
    pub fn principal_submatrix(&self, indices: &[usize]) -> CsrMatrix {
        let mut local = vec![usize::MAX; self.ncols];
        for (l, &g) in indices.iter().enumerate() {
            local[g] = l;
        }
        let mut triplets = Vec::new();
        for (l, &g) in indices.iter().enumerate() {
            for (j, v) in self.row(g) {
                if local[j] != usize::MAX {
                    triplets.push((l, local[j], v));
                }
            }
        }
        CsrMatrix::from_triplets(indices.len(), indices.len(), &triplets)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let triplets: Vec<Triplet<usize, usize, f64>> = (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, v)| Triplet::new(i, j, v)))
            .collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }
}

/// Sparse LU factorization with partial pivoting.
pub struct SparseLu {
    n: usize,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.n).finish()
    }
}

impl SparseLu {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        if a.nrows != a.ncols {
            return Err(Error::dimension("sparse LU (square)", a.nrows, a.ncols));
        }
        let lu = a
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(SparseLu { n: a.nrows, lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place_with_conj(faer::Conj::No, rhs.as_mut());
        (0..self.n).map(|i| rhs[(i, 0)]).collect()
    }

    /// Solves for every column of `b`.
    pub fn solve_mat(&self, b: &Mat<f64>) -> Mat<f64> {
        let mut rhs = b.clone();
        self.lu.solve_in_place_with_conj(faer::Conj::No, rhs.as_mut());
        rhs
    }
}

/// Dense LU factorization with partial pivoting.
pub struct DenseLu {
    lu: faer::linalg::solvers::PartialPivLu<f64>,
    n: usize,
}

impl std::fmt::Debug for DenseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseLu").field("n", &self.n).finish()
    }
}

impl DenseLu {
    pub fn new(a: &Mat<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::dimension("dense LU (square)", a.nrows(), a.ncols()));
        }
        Ok(DenseLu {
            lu: a.partial_piv_lu(),
            n: a.nrows(),
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_mat(&self, b: &Mat<f64>) -> Mat<f64> {
        self.lu.solve(b)
    }

    pub fn inverse(&self) -> Mat<f64> {
        self.lu.inverse()
    }
}

pub fn identity(n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
}

pub fn matvec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![0.0; a.nrows()];
    for j in 0..a.ncols() {
        let xj = x[j];
        if xj != 0.0 {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += a[(i, j)] * xj;
            }
        }
    }
    y
}

/// `a^T x`.
pub fn matvec_t(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.nrows(), x.len());
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)] * x[i]).sum())
        .collect()
}

pub fn column(a: &Mat<f64>, j: usize) -> Vec<f64> {
    (0..a.nrows()).map(|i| a[(i, j)]).collect()
}

/// Builds a matrix whose columns are the given vectors.
pub fn from_columns(nrows: usize, cols: &[Vec<f64>]) -> Mat<f64> {
    Mat::from_fn(nrows, cols.len(), |i, j| cols[j][i])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Largest absolute entrywise difference.
pub fn max_abs_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    m
}

pub fn matrix_power(a: &Mat<f64>, p: usize) -> Mat<f64> {
    let mut out = identity(a.nrows());
    for _ in 0..p {
        out = a * &out;
    }
    out
}

pub fn eigenvalues(a: &Mat<f64>) -> Result<Vec<c64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))
}

pub fn spectral_radius(a: &Mat<f64>) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

/// Singular values in decreasing order.
pub fn singular_values(a: &Mat<f64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut s = a
        .singular_values()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(s)
}

/// Spectral norm.
pub fn norm_2(a: &Mat<f64>) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Numerical rank with relative threshold `rtol * sigma_max`.
pub fn numerical_rank(sigma: &[f64], rtol: f64) -> usize {
    let top = sigma.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > rtol * top).count()
}

/// Orthonormal basis of the column span (thin QR).
pub fn orthonormalize(a: &Mat<f64>) -> Mat<f64> {
    a.qr().compute_thin_Q()
}

/// Cosines of the principal angles between two column spans, ascending.
pub fn principal_angle_cosines(a: &Mat<f64>, b: &Mat<f64>) -> Result<Vec<f64>> {
    let qa = orthonormalize(a);
    let qb = orthonormalize(b);
    let m = qa.transpose() * &qb;
    let mut s = singular_values(&m)?;
    s.reverse();
    Ok(s)
}

/// Largest principal angle (radians) between two column spans of equal dimension.
pub fn max_principal_angle(a: &Mat<f64>, b: &Mat<f64>) -> Result<f64> {
    let cos = principal_angle_cosines(a, b)?;
    Ok(cos.first().map(|c| c.clamp(-1.0, 1.0).acos()).unwrap_or(0.0))
}

/// Greedy matching distance between two eigenvalue multisets.
///
/// Every value of modulus above `zero_tol` in either set is paired with
/// the nearest unused value of the other set (small values included), and
/// the largest pairing distance is returned. Values below `zero_tol` on
/// both sides are treated as the zero eigenvalue and left unpaired.
pub fn spectrum_gap(a: &[c64], b: &[c64], zero_tol: f64) -> f64 {
    fn directed(x: &[c64], y: &[c64], zero_tol: f64) -> f64 {
        let mut xs: Vec<c64> = x.iter().copied().filter(|z| z.norm() > zero_tol).collect();
        xs.sort_by(|p, q| q.norm().partial_cmp(&p.norm()).unwrap());
        let mut used = vec![false; y.len()];
        let mut gap: f64 = 0.0;
        for z in xs {
            let mut best = None;
            let mut best_d = f64::INFINITY;
            for (j, w) in y.iter().enumerate() {
                if !used[j] {
                    let d = (z - w).norm();
                    if d < best_d {
                        best_d = d;
                        best = Some(j);
                    }
                }
            }
            match best {
                Some(j) => {
                    used[j] = true;
                    gap = gap.max(best_d);
                }
                None => gap = gap.max(z.norm()),
            }
        }
        gap
    }
    directed(a, b, zero_tol).max(directed(b, a, zero_tol))
}
