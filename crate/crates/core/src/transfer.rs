//! Coarse spaces, transfer operators and coarse matrices.
//!
//! Two families of transfers act on interface vectors:
//! - geometric: piecewise-linear interpolation `P` on each interface block
//!   with full weighting `R = ½ Pᵀ`;
//! - spectral: an explicit basis `V` of the coarse space with `P = V`,
//!   `R = Vᵀ` (Fourier sines, eigenvectors of `G`, or a randomized
//!   range approximation of `G^r`).

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::decomposition::DecompositionSpec;
use crate::error::{Error, Result};
use crate::linalg::{self, DenseLu};
use crate::substructured::{SubstructuredOperator, SubstructuredProblem};

/// Linear interpolation from `(n_fine - 1) / 2` coarse points to `n_fine` fine points.
pub fn interpolation_1d(n_fine: usize) -> Result<Mat<f64>> {
    if n_fine < 3 || n_fine % 2 == 0 {
        return Err(Error::validation("interface size", format!("{n_fine} is not 2^k - 1 with k >= 2")));
    }
    let n_coarse = (n_fine - 1) / 2;
    Ok(Mat::from_fn(n_fine, n_coarse, |i, j| {
        if i == 2 * j + 1 {
            1.0
        } else if i == 2 * j || i == 2 * j + 2 {
            0.5
        } else {
            0.0
        }
    }))
}

/// Orthonormal discrete sine `sqrt(2/(n+1)) sin(j k π/(n+1))`, `j = 1..n`.
pub fn sine_mode(n: usize, k: usize) -> Vec<f64> {
    let s = (2.0 / (n + 1) as f64).sqrt();
    (1..=n)
        .map(|j| s * (j as f64 * k as f64 * PI / (n + 1) as f64).sin())
        .collect()
}

/// Prolongation/restriction pair acting on interface vectors.
#[derive(Debug, Clone)]
pub enum TransferPair {
    /// Blockwise linear interpolation, `block` fine points per interface.
    Geometric { block: usize },
    /// Columns of `basis` span the coarse space; `R = basisᵀ`.
    Spectral { basis: Mat<f64>, descriptor: String },
}

impl TransferPair {
    pub fn geometric(block: usize) -> Result<Self> {
        interpolation_1d(block)?;
        Ok(TransferPair::Geometric { block })
    }

    pub fn fine_dim(&self) -> usize {
        match self {
            TransferPair::Geometric { block } => 2 * block,
            TransferPair::Spectral { basis, .. } => basis.nrows(),
        }
    }

    pub fn coarse_dim(&self) -> usize {
        match self {
            TransferPair::Geometric { block } => 2 * ((block - 1) / 2),
            TransferPair::Spectral { basis, .. } => basis.ncols(),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            TransferPair::Geometric { .. } => "geometric".into(),
            TransferPair::Spectral { descriptor, .. } => descriptor.clone(),
        }
    }

    /// `P c`.
    pub fn prolong(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.coarse_dim());
        match self {
            TransferPair::Geometric { block } => {
                let nc = (block - 1) / 2;
                let mut out = vec![0.0; 2 * block];
                for b in 0..2 {
                    let (fine, coarse) = (&mut out[b * block..(b + 1) * block], &c[b * nc..(b + 1) * nc]);
                    for (j, &cj) in coarse.iter().enumerate() {
                        fine[2 * j] += 0.5 * cj;
                        fine[2 * j + 1] += cj;
                        fine[2 * j + 2] += 0.5 * cj;
                    }
                }
                out
            }
            TransferPair::Spectral { basis, .. } => linalg::matvec(basis, c),
        }
    }

    /// `R v`.
    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.fine_dim());
        match self {
            TransferPair::Geometric { block } => {
                let nc = (block - 1) / 2;
                let mut out = Vec::with_capacity(2 * nc);
                for b in 0..2 {
                    let fine = &v[b * block..(b + 1) * block];
                    for j in 0..nc {
                        out.push(0.25 * fine[2 * j] + 0.5 * fine[2 * j + 1] + 0.25 * fine[2 * j + 2]);
                    }
                }
                out
            }
            TransferPair::Spectral { basis, .. } => linalg::matvec_t(basis, v),
        }
    }

    /// Dense `P`.
    pub fn p_matrix(&self) -> Mat<f64> {
        let nc = self.coarse_dim();
        let cols: Vec<Vec<f64>> = (0..nc)
            .map(|j| {
                let mut e = vec![0.0; nc];
                e[j] = 1.0;
                self.prolong(&e)
            })
            .collect();
        linalg::from_columns(self.fine_dim(), &cols)
    }

    /// Dense `R`.
    pub fn r_matrix(&self) -> Mat<f64> {
        let nf = self.fine_dim();
        let cols: Vec<Vec<f64>> = (0..nf)
            .map(|j| {
                let mut e = vec![0.0; nf];
                e[j] = 1.0;
                self.restrict(&e)
            })
            .collect();
        linalg::from_columns(self.coarse_dim(), &cols)
    }
}

/// Block-diagonal basis with the first `m` sines on each interface.
pub fn fourier_space(block: usize, m: usize) -> Result<TransferPair> {
    if m == 0 || m > block {
        return Err(Error::validation("m", format!("{m} not in 1..={block}")));
    }
    let mut basis = Mat::zeros(2 * block, 2 * m);
    for b in 0..2 {
        for k in 1..=m {
            let s = sine_mode(block, k);
            for (i, v) in s.into_iter().enumerate() {
                basis[(b * block + i, b * m + k - 1)] = v;
            }
        }
    }
    Ok(TransferPair::Spectral {
        basis,
        descriptor: format!("fourier:{m}"),
    })
}

/// Dense blocks `(G_1, G_2)`: `G_1` maps Γ1 data to Γ2, `G_2` maps Γ2 data to Γ1.
pub fn smoother_blocks(op: &SubstructuredOperator) -> Result<(Mat<f64>, Mat<f64>)> {
    let ny = op.split();
    let d = &op.decomposition;
    let unit = |j: usize| {
        let mut e = vec![0.0; ny];
        e[j] = 1.0;
        e
    };
    let g1: Result<Vec<Vec<f64>>> = (0..ny)
        .into_par_iter()
        .map(|j| Ok(d.left.trace(&d.left.dirichlet_solve(&unit(j), None)?)))
        .collect();
    let g2: Result<Vec<Vec<f64>>> = (0..ny)
        .into_par_iter()
        .map(|j| Ok(d.right.trace(&d.right.dirichlet_solve(&unit(j), None)?)))
        .collect();
    Ok((linalg::from_columns(ny, &g1?), linalg::from_columns(ny, &g2?)))
}

/// Real orthonormal basis of the invariant subspace of `a` belonging to
/// its `m` eigenvalues of largest modulus. A complex pair contributes its
/// real and imaginary parts, so the result may hold `m + 1` columns.
pub fn dominant_invariant_subspace(a: &Mat<f64>, m: usize) -> Result<Mat<f64>> {
    let n = a.nrows();
    let evd = a.eigen().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].norm().partial_cmp(&s[i].norm()).unwrap().then(i.cmp(&j)));
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut taken = 0;
    let mut idx = 0;
    while taken < m && idx < n {
        let k = order[idx];
        let lam = s[k];
        let re: Vec<f64> = (0..n).map(|i| u[(i, k)].re).collect();
        if lam.im.abs() <= 1e-12 * lam.norm().max(1e-300) {
            cols.push(re);
            taken += 1;
            idx += 1;
        } else {
            let im: Vec<f64> = (0..n).map(|i| u[(i, k)].im).collect();
            cols.push(re);
            cols.push(im);
            taken += 2;
            // skip the conjugate partner
            idx += 2;
        }
    }
    Ok(linalg::orthonormalize(&linalg::from_columns(n, &cols)))
}

/// Coarse space spanned by the `m` dominant eigenvectors of `G_1 G_2` on Γ2
/// and their images under `G_2` on Γ1. The span is invariant under `G`.
pub fn eigen_space(op: &SubstructuredOperator, m: usize) -> Result<TransferPair> {
    let ny = op.split();
    if m == 0 || m > ny {
        return Err(Error::validation("m", format!("{m} not in 1..={ny}")));
    }
    let (g1, g2) = smoother_blocks(op)?;
    let w2 = dominant_invariant_subspace(&(&g1 * &g2), m)?;
    let w1 = linalg::orthonormalize(&(&g2 * &w2));
    let k = w2.ncols();
    let mut basis = Mat::zeros(2 * ny, 2 * k);
    for j in 0..k {
        for i in 0..ny {
            basis[(i, j)] = w2[(i, j)];
            basis[(ny + i, k + j)] = w1[(i, j)];
        }
    }
    Ok(TransferPair::Spectral {
        basis,
        descriptor: format!("eigen:{m}"),
    })
}

/// Randomized coarse-space parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcaParams {
    /// Half the default coarse dimension.
    pub m: usize,
    /// Number of random samples.
    pub q: usize,
    /// Smoothing steps applied to each sample.
    pub r: usize,
    pub seed: u64,
    /// Number of left singular vectors kept; `None` keeps `2m`.
    pub keep: Option<usize>,
}

impl PcaParams {
    /// Defaults `q = 2m`, `r = 3`.
    pub fn new(m: usize, seed: u64) -> Self {
        PcaParams {
            m,
            q: 2 * m,
            r: 3,
            seed,
            keep: None,
        }
    }

    pub fn kept(&self) -> usize {
        self.keep.unwrap_or(2 * self.m)
    }

    pub fn descriptor(&self) -> String {
        format!("pca:{}:{}:{}:{}", self.m, self.q, self.r, self.seed)
    }
}

/// `n x q` standard normal matrix from a seeded ChaCha stream, filled column by column.
pub fn gaussian_matrix(n: usize, q: usize, seed: u64) -> Mat<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Mat::zeros(n, q);
    for j in 0..q {
        for i in 0..n {
            m[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    m
}

/// Leading `keep` left singular vectors of `w` and all singular values.
pub fn range_basis(w: &Mat<f64>, keep: usize) -> Result<(Mat<f64>, Vec<f64>)> {
    let svd = w.thin_svd().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let sv = svd.S().column_vector();
    let sigma: Vec<f64> = (0..sv.nrows()).map(|i| sv[i]).collect();
    let rank = linalg::numerical_rank(&sigma, 1e-10);
    if rank < keep {
        return Err(Error::DegenerateCoarseSpace { rank, requested: keep });
    }
    let u = svd.U();
    Ok((Mat::from_fn(w.nrows(), keep, |i, j| u[(i, j)]), sigma))
}

/// Randomized coarse space: left singular vectors of `G^r S`.
pub fn pca_space(op: &SubstructuredOperator, params: PcaParams) -> Result<TransferPair> {
    if params.m == 0 || params.q == 0 || params.r == 0 {
        return Err(Error::validation("pca", "m, q and r must be positive"));
    }
    let n = op.dim();
    let s = gaussian_matrix(n, params.q, params.seed);
    let cols: Result<Vec<Vec<f64>>> = (0..params.q)
        .into_par_iter()
        .map(|j| {
            let mut v = linalg::column(&s, j);
            for _ in 0..params.r {
                v = op.apply_g_uncounted(&v)?;
            }
            Ok(v)
        })
        .collect();
    let w = linalg::from_columns(n, &cols?);
    let (basis, _) = range_basis(&w, params.kept())?;
    Ok(TransferPair::Spectral {
        basis,
        descriptor: params.descriptor(),
    })
}

/// Reads a basis matrix written by [`write_basis`]. Files starting with the
/// magic bytes `SDDB` are binary; anything else is parsed as text.
pub fn read_basis(path: &Path) -> Result<Mat<f64>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.starts_with(b"SDDB") {
        if bytes.len() < 20 {
            return Err(Error::Parse("truncated binary basis".into()));
        }
        let rows = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
        let cols = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
        let body = &bytes[20..];
        if body.len() != 8 * rows * cols {
            return Err(Error::Parse("binary basis size mismatch".into()));
        }
        return Ok(Mat::from_fn(rows, cols, |i, j| {
            let k = 8 * (j * rows + i);
            f64::from_le_bytes(body[k..k + 8].try_into().unwrap())
        }));
    }
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty basis file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header '{header}'"))))
        .collect::<Result<_>>()?;
    if dims.len() != 2 {
        return Err(Error::Parse(format!("bad header '{header}'")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    let mut m = Mat::zeros(rows, cols);
    for i in 0..rows {
        let line = lines.next().ok_or_else(|| Error::Parse("missing basis row".into()))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad value '{t}'"))))
            .collect::<Result<_>>()?;
        if vals.len() != cols {
            return Err(Error::Parse(format!("row {i} has {} values, expected {cols}", vals.len())));
        }
        for (j, v) in vals.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Writes a basis matrix as text (`rows cols` header, one row per line) or binary.
pub fn write_basis(path: &Path, basis: &Mat<f64>, binary: bool) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    if binary {
        f.write_all(b"SDDB")?;
        f.write_all(&(basis.nrows() as u64).to_le_bytes())?;
        f.write_all(&(basis.ncols() as u64).to_le_bytes())?;
        for j in 0..basis.ncols() {
            for i in 0..basis.nrows() {
                f.write_all(&basis[(i, j)].to_le_bytes())?;
            }
        }
    } else {
        writeln!(f, "{} {}", basis.nrows(), basis.ncols())?;
        for i in 0..basis.nrows() {
            let row: Vec<String> = (0..basis.ncols()).map(|j| format!("{:.16e}", basis[(i, j)])).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
    }
    f.flush()?;
    Ok(())
}

/// Coarse-space choice by name.
#[derive(Debug, Clone, PartialEq)]
pub enum CoarseSelector {
    Fourier { m: usize },
    Eigen { m: usize },
    Pca(PcaParams),
    Geometric,
    File(String),
}

impl CoarseSelector {
    /// Parses `fourier:m`, `eigen:m`, `pca:m[:q[:r[:seed]]]`, `geometric` or `file:path`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<usize> {
            t.parse::<usize>()
                .map_err(|_| Error::validation("coarse", format!("'{t}' is not a non-negative integer")))
        };
        match parts.as_slice() {
            ["geometric"] => Ok(CoarseSelector::Geometric),
            ["fourier", m] => Ok(CoarseSelector::Fourier { m: num(m)? }),
            ["eigen", m] => Ok(CoarseSelector::Eigen { m: num(m)? }),
            ["pca", m, rest @ ..] if rest.len() <= 3 => {
                let mut p = PcaParams::new(num(m)?, 0);
                if let Some(q) = rest.first() {
                    p.q = num(q)?;
                }
                if let Some(r) = rest.get(1) {
                    p.r = num(r)?;
                }
                if let Some(seed) = rest.get(2) {
                    p.seed = num(seed)? as u64;
                }
                Ok(CoarseSelector::Pca(p))
            }
            ["file", ..] if s.len() > 5 => Ok(CoarseSelector::File(s[5..].to_string())),
            _ => Err(Error::validation("coarse", format!("unknown coarse space '{s}'"))),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            CoarseSelector::Fourier { m } => format!("fourier:{m}"),
            CoarseSelector::Eigen { m } => format!("eigen:{m}"),
            CoarseSelector::Pca(p) => p.descriptor(),
            CoarseSelector::Geometric => "geometric".into(),
            CoarseSelector::File(p) => format!("file:{p}"),
        }
    }

    /// Builds the transfer pair for an assembled operator.
    pub fn build(&self, op: &SubstructuredOperator) -> Result<TransferPair> {
        match self {
            CoarseSelector::Fourier { m } => fourier_space(op.split(), *m),
            CoarseSelector::Eigen { m } => eigen_space(op, *m),
            CoarseSelector::Pca(p) => pca_space(op, *p),
            CoarseSelector::Geometric => TransferPair::geometric(op.split()),
            CoarseSelector::File(path) => {
                let basis = read_basis(Path::new(path))?;
                if basis.nrows() != op.dim() {
                    return Err(Error::dimension("imported basis rows", op.dim(), basis.nrows()));
                }
                Ok(TransferPair::Spectral {
                    basis,
                    descriptor: self.descriptor(),
                })
            }
        }
    }
}

/// How the coarse matrix is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarseKind {
    /// `A_c = R A P`.
    Galerkin,
    /// `A_c = I - G_c` with `G_c` the substructured smoother of the same
    /// problem discretized on the grid with spacing `2h`.
    Rediscretized,
}

impl CoarseKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "galerkin" => Ok(CoarseKind::Galerkin),
            "rediscretized" => Ok(CoarseKind::Rediscretized),
            _ => Err(Error::validation("coarse_operator", format!("unknown kind '{s}'"))),
        }
    }
}

/// Rank diagnostics of a coarse matrix.
#[derive(Debug, Clone)]
pub struct RankReport {
    pub coarse_matrix: Mat<f64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub full_rank: bool,
}

impl RankReport {
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }
}

/// Rank of a square coarse matrix, relative threshold `1e-12`.
pub fn rank_report(coarse_matrix: Mat<f64>) -> Result<RankReport> {
    let sigma = linalg::singular_values(&coarse_matrix)?;
    let rank = linalg::numerical_rank(&sigma, 1e-12);
    Ok(RankReport {
        full_rank: rank == coarse_matrix.nrows(),
        coarse_matrix,
        singular_values: sigma,
        rank,
    })
}

/// `R A P` for dense `A`, `P`, `R` together with its rank.
pub fn check_coarse_rank(a: &Mat<f64>, p: &Mat<f64>, r: &Mat<f64>) -> Result<RankReport> {
    rank_report(r * (a * p))
}

/// Factorized coarse matrix.
#[derive(Debug)]
pub struct CoarseOperator {
    pub kind: CoarseKind,
    pub matrix: Mat<f64>,
    lu: DenseLu,
    /// `G P`, available when the Galerkin product was formed.
    pub smoothed_prolongation: Option<Mat<f64>>,
}

impl CoarseOperator {
    /// Factorizes a given coarse matrix after checking its rank.
    pub fn from_matrix(kind: CoarseKind, matrix: Mat<f64>, smoothed_prolongation: Option<Mat<f64>>) -> Result<Self> {
        let report = rank_report(matrix.clone())?;
        if !report.full_rank {
            return Err(Error::SingularCoarse {
                rank: report.rank,
                dim: matrix.nrows(),
            });
        }
        let lu = DenseLu::new(&matrix)?;
        Ok(CoarseOperator {
            kind,
            matrix,
            lu,
            smoothed_prolongation,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.lu.solve(rhs)
    }
}

/// `G P` column by column (uncounted smoother applications).
pub fn smoothed_prolongation(op: &SubstructuredOperator, transfer: &TransferPair) -> Result<Mat<f64>> {
    let p = transfer.p_matrix();
    let cols: Result<Vec<Vec<f64>>> = (0..p.ncols())
        .into_par_iter()
        .map(|j| op.apply_g_uncounted(&linalg::column(&p, j)))
        .collect();
    Ok(linalg::from_columns(p.nrows(), &cols?))
}

/// Galerkin coarse matrix `R (I - G) P`; also returns `G P`.
pub fn galerkin_matrix(op: &SubstructuredOperator, transfer: &TransferPair) -> Result<(Mat<f64>, Mat<f64>)> {
    if transfer.fine_dim() != op.dim() {
        return Err(Error::dimension("transfer fine dimension", op.dim(), transfer.fine_dim()));
    }
    let p = transfer.p_matrix();
    let gp = smoothed_prolongation(op, transfer)?;
    let ap = Mat::from_fn(p.nrows(), p.ncols(), |i, j| p[(i, j)] - gp[(i, j)]);
    let cols: Vec<Vec<f64>> = (0..ap.ncols()).map(|j| transfer.restrict(&linalg::column(&ap, j))).collect();
    Ok((linalg::from_columns(transfer.coarse_dim(), &cols), gp))
}

/// Decomposition of the same problem on the grid with spacing `2h`, when
/// both interfaces fall on coarse grid lines.
pub fn coarse_decomposition(spec: &DecompositionSpec) -> Result<DecompositionSpec> {
    let g2 = spec.left_interface_column;
    if g2 % 2 == 0 || spec.overlap_cells % 2 == 1 {
        return Err(Error::validation(
            "coarse_operator",
            "rediscretization needs both interface columns on the coarse grid (odd Γ2 column, N_ov + 1 even)",
        ));
    }
    Ok(DecompositionSpec::new((g2 + 1) / 2 - 1, spec.overlap_cells / 2))
}

/// The substructured problem one grid level down.
pub fn coarse_problem(fine: &SubstructuredProblem) -> Result<SubstructuredProblem> {
    let level = fine.volume.grid.level;
    if level < 2 {
        return Err(Error::validation("level", "cannot coarsen below level 1"));
    }
    let spec = coarse_decomposition(&fine.operator.decomposition.spec)?;
    SubstructuredProblem::new(&fine.problem, level - 1, spec)
}

/// Dense `I - G` of an operator, assembled column by column.
pub fn dense_a(op: &SubstructuredOperator) -> Result<Mat<f64>> {
    let n = op.dim();
    let cols: Result<Vec<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            op.apply_a_uncounted(&e)
        })
        .collect();
    Ok(linalg::from_columns(n, &cols?))
}

/// Builds and factorizes the coarse operator of a two-level method.
pub fn build_coarse_operator(
    fine: &SubstructuredProblem,
    transfer: &TransferPair,
    kind: CoarseKind,
) -> Result<CoarseOperator> {
    match kind {
        CoarseKind::Galerkin => {
            let (a_c, gp) = galerkin_matrix(&fine.operator, transfer)?;
            CoarseOperator::from_matrix(kind, a_c, Some(gp))
        }
        CoarseKind::Rediscretized => {
            if !matches!(transfer, TransferPair::Geometric { .. }) {
                return Err(Error::validation(
                    "coarse_operator",
                    "rediscretization requires the geometric transfer",
                ));
            }
            let coarse = coarse_problem(fine)?;
            CoarseOperator::from_matrix(kind, dense_a(&coarse.operator)?, None)
        }
    }
}
