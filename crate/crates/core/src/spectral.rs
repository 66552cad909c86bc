//! Dense iteration matrices and their spectra.
//!
//! Small problems are assembled column by column: the substructured
//! smoother `G_s`, two-level operators, the augmented block-Jacobi system
//! and the volume two-grid method with a restricted additive Schwarz
//! smoother.

use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::decomposition::Decomposition;
use crate::error::{Error, Result};
use crate::linalg::{self, CsrMatrix, DenseLu, SparseLu};
use crate::problem::VolumeMatrix;
use crate::substructured::SubstructuredOperator;
use crate::transfer::{interpolation_1d, TransferPair};

/// Default cap on `N^s` for dense assembly.
pub const DEFAULT_DENSE_CAP: usize = 2048;
/// Default cap on `N^a` for the augmented system.
pub const DEFAULT_AUGMENTED_CAP: usize = 20000;

/// Dense `G_s`, one smoother application per column.
pub fn assemble_dense_g(op: &SubstructuredOperator, cap: usize) -> Result<Mat<f64>> {
    let n = op.dim();
    if n > cap {
        return Err(Error::SizeCap { size: n, cap });
    }
    let cols: Result<Vec<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            op.apply_g_uncounted(&e)
        })
        .collect();
    Ok(linalg::from_columns(n, &cols?))
}

/// `G^{n2} (I - P A_c^{-1} R A) G^{n1}` with `A = I - G`.
pub fn assemble_two_level(g: &Mat<f64>, p: &Mat<f64>, r: &Mat<f64>, a_c: &Mat<f64>, n1: usize, n2: usize) -> Result<Mat<f64>> {
    let n = g.nrows();
    if p.nrows() != n || r.ncols() != n || a_c.nrows() != p.ncols() || r.nrows() != p.ncols() {
        return Err(Error::dimension("two-level operator", n, p.nrows()));
    }
    let a = linalg::identity(n) - g;
    let ra = r * &a;
    let corr = p * DenseLu::new(a_c)?.solve_mat(&ra);
    let proj = linalg::identity(n) - corr;
    Ok(linalg::matrix_power(g, n2) * (proj * linalg::matrix_power(g, n1)))
}

/// Spectrum of one operator and its comparison with a closed-form value.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub operator: String,
    pub n_ov: usize,
    pub level: u32,
    /// Eigenvalues sorted by decreasing modulus.
    pub spectrum: Vec<c64>,
    pub rho_numeric: f64,
    pub rho_theory: Option<f64>,
    /// Smoothing steps and coarse descriptor of a two-level operator.
    pub n1: usize,
    pub n2: usize,
    pub coarse: String,
}

impl SpectralReport {
    pub fn new(operator: &str, n_ov: usize, level: u32, matrix: &Mat<f64>, rho_theory: Option<f64>) -> Result<Self> {
        let mut spectrum = linalg::eigenvalues(matrix)?;
        spectrum.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
        let rho_numeric = spectrum.first().map(|z| z.norm()).unwrap_or(0.0);
        Ok(SpectralReport {
            operator: operator.to_string(),
            n_ov,
            level,
            spectrum,
            rho_numeric,
            rho_theory,
            n1: 0,
            n2: 0,
            coarse: String::new(),
        })
    }

    /// Report from a radius computed elsewhere (e.g. by power iteration).
    pub fn from_radius(operator: &str, n_ov: usize, level: u32, rho_numeric: f64, rho_theory: Option<f64>) -> Self {
        SpectralReport {
            operator: operator.to_string(),
            n_ov,
            level,
            spectrum: Vec::new(),
            rho_numeric,
            rho_theory,
            n1: 0,
            n2: 0,
            coarse: String::new(),
        }
    }

    pub fn with_cycle(mut self, n1: usize, n2: usize, coarse: &str) -> Self {
        self.n1 = n1;
        self.n2 = n2;
        self.coarse = coarse.to_string();
        self
    }

    /// `|rho_numeric - rho_theory|`.
    pub fn gap(&self) -> Option<f64> {
        self.rho_theory.map(|t| (self.rho_numeric - t).abs())
    }
}

/// Dense pieces of the augmented formulation and the substructured one.
#[derive(Debug, Clone)]
pub struct AugmentedSet {
    pub a_a: Mat<f64>,
    pub d: Mat<f64>,
    pub t_tilde: Mat<f64>,
    pub e_tilde: Mat<f64>,
    pub g_a: Mat<f64>,
    pub g_s: Mat<f64>,
    pub a_s: Mat<f64>,
    pub p_s: Mat<f64>,
    pub r_s: Mat<f64>,
    pub p_a: Mat<f64>,
    pub r_a: Mat<f64>,
    /// `[I - P_s (R_s A_s P_s)^{-1} R_s A_s] G_s`.
    pub g_s_2l: Mat<f64>,
    /// `[I - P_a (R_a D A_a P_a)^{-1} R_a D A_a] G_a`.
    pub g_a_2l: Mat<f64>,
}

/// Residuals of `T̃T̃ᵀ = I`, `A_s T̃ = T̃ D A_a`, `G_a = -D Ẽ T̃`, `G_s T̃ = T̃ G_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub trace_orthogonality: f64,
    pub system: f64,
    pub smoother_factorization: f64,
    pub smoother_intertwining: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.trace_orthogonality
            .max(self.system)
            .max(self.smoother_factorization)
            .max(self.smoother_intertwining)
    }
}

fn block_diag(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let (r, c) = (a.nrows(), a.ncols());
    Mat::from_fn(r + b.nrows(), c + b.ncols(), |i, j| {
        if i < r && j < c {
            a[(i, j)]
        } else if i >= r && j >= c {
            b[(i - r, j - c)]
        } else {
            0.0
        }
    })
}

fn two_grid(g: &Mat<f64>, a: &Mat<f64>, p: &Mat<f64>, r: &Mat<f64>) -> Result<Mat<f64>> {
    let ra = r * a;
    let coarse = &ra * p;
    let corr = p * DenseLu::new(&coarse)?.solve_mat(&ra);
    Ok((linalg::identity(g.nrows()) - corr) * g)
}

impl AugmentedSet {
    pub fn identity_residuals(&self) -> IdentityResiduals {
        let ns = self.g_s.nrows();
        let tt = &self.t_tilde;
        IdentityResiduals {
            trace_orthogonality: linalg::max_abs_diff(&(tt * tt.transpose()), &linalg::identity(ns)),
            system: linalg::max_abs_diff(&(&self.a_s * tt), &(tt * (&self.d * &self.a_a))),
            smoother_factorization: linalg::max_abs_diff(&self.g_a, &-(&self.d * (&self.e_tilde * tt))),
            smoother_intertwining: linalg::max_abs_diff(&(&self.g_s * tt), &(tt * &self.g_a)),
        }
    }
}

/// Builds the augmented operators of a decomposition and verifies their identities.
pub fn assemble_augmented(op: &SubstructuredOperator, transfer: &TransferPair, cap: usize) -> Result<AugmentedSet> {
    let d = &op.decomposition;
    let (l, r) = (&d.left, &d.right);
    let na = l.n_unknowns() + r.n_unknowns();
    if na > cap {
        return Err(Error::SizeCap { size: na, cap });
    }
    let (a1, a2) = (l.matrix.to_dense(), r.matrix.to_dense());
    let (a1_inv, a2_inv) = (DenseLu::new(&a1)?.inverse(), DenseLu::new(&a2)?.inverse());
    let (e1, e2) = (l.lift_matrix(), r.lift_matrix());
    // trace of Ω_1 on Γ2 and of Ω_2 on Γ1
    let (r2, r1) = (l.trace_matrix(), r.trace_matrix());
    let ny = d.grid.ny;
    let t_tilde = block_diag(&r2, &r1);
    let zero_e = Mat::<f64>::zeros(0, 0);
    let _ = zero_e;
    let (n1, n2) = (l.n_unknowns(), r.n_unknowns());
    let mut e_tilde = Mat::zeros(na, 2 * ny);
    for j in 0..ny {
        for i in 0..n1 {
            e_tilde[(i, ny + j)] = e1[(i, j)];
        }
        for i in 0..n2 {
            e_tilde[(n1 + i, j)] = e2[(i, j)];
        }
    }
    let a_a = block_diag(&a1, &a2) + &e_tilde * &t_tilde;
    let dm = block_diag(&a1_inv, &a2_inv);
    let g12 = -(&a1_inv * (&e1 * &r1));
    let g21 = -(&a2_inv * (&e2 * &r2));
    let g_a = Mat::from_fn(na, na, |i, j| match (i < n1, j < n1) {
        (true, false) => g12[(i, j - n1)],
        (false, true) => g21[(i - n1, j)],
        _ => 0.0,
    });
    let g_s = assemble_dense_g(op, DEFAULT_DENSE_CAP.max(op.dim()))?;
    let a_s = linalg::identity(2 * ny) - &g_s;
    let p_s = transfer.p_matrix();
    let r_s = transfer.r_matrix();
    let p_a = t_tilde.transpose() * &p_s;
    let r_a = &r_s * &t_tilde;
    let g_s_2l = two_grid(&g_s, &a_s, &p_s, &r_s)?;
    let da = &dm * &a_a;
    let g_a_2l = two_grid(&g_a, &da, &p_a, &r_a)?;
    let set = AugmentedSet {
        a_a,
        d: dm,
        t_tilde,
        e_tilde,
        g_a,
        g_s,
        a_s,
        p_s,
        r_s,
        p_a,
        r_a,
        g_s_2l,
        g_a_2l,
    };
    let res = set.identity_residuals();
    if res.max() >= 1e-10 {
        return Err(Error::Factorization(format!("augmented identities violated: {res:?}")));
    }
    Ok(set)
}

/// Volume two-grid method with one restricted additive Schwarz smoothing step.
///
/// The RAS error propagation `G_RAS = X Y` factors through the interface
/// columns: `Y` reads the volume error on Γ2 and Γ1 and `X` returns the
/// owned parts of the two subdomain solves. With the volume coarse
/// correction `C = I - P (R A P)^{-1} R A` the nonzero spectrum of
/// `C X Y` equals that of the interface-sized `Y C X`.
#[derive(Debug)]
pub struct RasTwoGrid<'a> {
    volume: &'a VolumeMatrix,
    decomposition: &'a Decomposition,
    p: CsrMatrix,
    r: CsrMatrix,
    coarse: SparseLu,
}

fn kron_interpolation(nx: usize, ny: usize) -> Result<(CsrMatrix, CsrMatrix)> {
    let px = interpolation_1d(nx)?;
    let py = interpolation_1d(ny)?;
    let (ncx, ncy) = (px.ncols(), py.ncols());
    let mut pt = Vec::new();
    let mut rt = Vec::new();
    for cx in 0..ncx {
        for cy in 0..ncy {
            let col = cx * ncy + cy;
            for fx in (2 * cx)..=(2 * cx + 2) {
                for fy in (2 * cy)..=(2 * cy + 2) {
                    let w = px[(fx, cx)] * py[(fy, cy)];
                    let row = fx * ny + fy;
                    pt.push((row, col, w));
                    rt.push((col, row, 0.25 * w));
                }
            }
        }
    }
    Ok((
        CsrMatrix::from_triplets(nx * ny, ncx * ncy, &pt),
        CsrMatrix::from_triplets(ncx * ncy, nx * ny, &rt),
    ))
}

impl<'a> RasTwoGrid<'a> {
    /// Bilinear interpolation, full weighting and the Galerkin coarse matrix.
    pub fn new(volume: &'a VolumeMatrix, decomposition: &'a Decomposition) -> Result<Self> {
        let g = &volume.grid;
        let (p, r) = kron_interpolation(g.nx, g.ny)?;
        let nc = p.ncols;
        let mut triplets = Vec::new();
        let mut e = vec![0.0; nc];
        for j in 0..nc {
            e[j] = 1.0;
            let col = r.matvec(&volume.matrix.matvec(&p.matvec(&e)));
            e[j] = 0.0;
            for (i, v) in col.into_iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        let coarse = SparseLu::new(&CsrMatrix::from_triplets(nc, nc, &triplets))?;
        Ok(RasTwoGrid {
            volume,
            decomposition,
            p,
            r,
            coarse,
        })
    }

    /// `X z`: subdomain error propagation of interface data `z = [Γ2; Γ1]`.
    fn ras_from_interface(&self, z: &[f64]) -> Result<Vec<f64>> {
        let d = self.decomposition;
        let ny = d.grid.ny;
        let mid = d.spec.midline_column();
        let mut out = vec![0.0; d.grid.n_volume()];
        if z[ny..].iter().any(|&x| x != 0.0) {
            let u = d.left.dirichlet_solve(&z[ny..], None)?;
            let owned = (mid + 1 - d.left.first_column) * ny;
            out[d.left.first_column * ny..d.left.first_column * ny + owned].copy_from_slice(&u[..owned]);
        }
        if z[..ny].iter().any(|&x| x != 0.0) {
            let u = d.right.dirichlet_solve(&z[..ny], None)?;
            let skip = (mid + 1 - d.right.first_column) * ny;
            out[(mid + 1) * ny..].copy_from_slice(&u[skip..]);
        }
        Ok(out)
    }

    /// `C e = e - P (R A P)^{-1} R A e`.
    pub fn coarse_correct(&self, e: &[f64]) -> Vec<f64> {
        let re = self.r.matvec(&self.volume.matrix.matvec(e));
        let c = self.p.matvec(&self.coarse.solve(&re));
        e.iter().zip(&c).map(|(a, b)| a - b).collect()
    }

    /// One RAS smoothing step on the error.
    pub fn apply_ras(&self, e: &[f64]) -> Result<Vec<f64>> {
        self.ras_from_interface(&self.decomposition.interface_traces(e))
    }

    /// Error propagation of one two-grid cycle.
    pub fn apply(&self, e: &[f64]) -> Result<Vec<f64>> {
        Ok(self.coarse_correct(&self.apply_ras(e)?))
    }

    /// Interface-sized matrix `Y C X` sharing the nonzero spectrum of the two-grid operator.
    pub fn reduced_matrix(&self) -> Result<Mat<f64>> {
        let n = self.decomposition.n_interface();
        let cols: Result<Vec<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut z = vec![0.0; n];
                z[j] = 1.0;
                let x = self.ras_from_interface(&z)?;
                Ok(self.decomposition.interface_traces(&self.coarse_correct(&x)))
            })
            .collect();
        Ok(linalg::from_columns(n, &cols?))
    }

    /// Dense volume operator (small grids only).
    pub fn dense(&self, cap: usize) -> Result<Mat<f64>> {
        let n = self.volume.grid.n_volume();
        if n > cap {
            return Err(Error::SizeCap { size: n, cap });
        }
        let cols: Result<Vec<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                self.apply(&e)
            })
            .collect();
        Ok(linalg::from_columns(n, &cols?))
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        linalg::spectral_radius(&self.reduced_matrix()?)
    }
}

/// Spectral radius estimate from the average growth of a normalized power
/// sequence over a sliding window; robust to dominant `±λ` and complex pairs.
pub fn power_iteration_radius<F>(apply: F, n: usize, tol: f64, maxit: usize, seed: u64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    const WINDOW: usize = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nx = linalg::norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut logs: Vec<f64> = Vec::new();
    let mut prev = f64::NAN;
    for it in 0..maxit {
        let y = apply(&x)?;
        let ny = linalg::norm2(&y);
        if ny == 0.0 || !ny.is_finite() {
            return Ok(if ny == 0.0 { 0.0 } else { f64::INFINITY });
        }
        logs.push(ny.ln());
        x = y.into_iter().map(|v| v / ny).collect();
        if logs.len() >= WINDOW {
            let est = (logs[logs.len() - WINDOW..].iter().sum::<f64>() / WINDOW as f64).exp();
            if it >= 2 * WINDOW && (est - prev).abs() <= tol * est.max(1e-300) {
                return Ok(est);
            }
            prev = est;
        }
    }
    log::warn!("power iteration reached {maxit} iterations");
    Ok(prev)
}
