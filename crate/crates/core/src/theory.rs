//! Closed-form convergence factors.
//!
//! Everything here is evaluated from the eigenvalues `ρ_j(k)` of the
//! smoother blocks on the sine modes, either the continuous rectangle
//! values or their exact discrete counterparts for the 5-point stencil.

use std::f64::consts::PI;

use faer::{c64, Mat};

use crate::decomposition::DecompositionSpec;
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::GridSpec;

/// `sinh(kπ(L_j - δ)/L̃) / sinh(kπ(L_j + δ)/L̃)`.
pub fn rho_rectangle(k: usize, l_j: f64, delta: f64, l_tilde: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= l_j) {
        return Err(Error::validation("delta", format!("{delta} not in (0, {l_j}]")));
    }
    if k == 0 || !(l_tilde > 0.0) {
        return Err(Error::validation("k", "mode index and height must be positive"));
    }
    let a = k as f64 * PI / l_tilde;
    // ratio of sinh computed through exponentials to stay finite for large k
    let num = a * (l_j - delta);
    let den = a * (l_j + delta);
    Ok((num - den).exp() * (1.0 - (-2.0 * num).exp()) / (1.0 - (-2.0 * den).exp()))
}

/// Exact trace ratio of the discrete harmonic extension of the `k`-th sine
/// mode (`n` interior points per column) across a strip whose data column
/// lies `own` cells from the far boundary and whose trace column lies
/// `opposite` cells from it.
pub fn rho_discrete(k: usize, n: usize, own: usize, opposite: usize) -> f64 {
    let c = 2.0 - (k as f64 * PI / (n + 1) as f64).cos();
    let mu = c.acosh();
    let (a, m) = (mu * opposite as f64, mu * own as f64);
    (a - m).exp() * (1.0 - (-2.0 * a).exp()) / (1.0 - (-2.0 * m).exp())
}

/// Discrete eigenvalues of the two smoother blocks on a rectangle grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteRectangle {
    /// Interior points per interface.
    pub n: usize,
    own_left: usize,
    opposite_left: usize,
    own_right: usize,
    opposite_right: usize,
}

impl DiscreteRectangle {
    /// Distances for the Laplace 5-point stencil on the given grid and decomposition.
    pub fn new(grid: &GridSpec, spec: &DecompositionSpec) -> Self {
        let g2 = spec.left_interface_column;
        let g1 = spec.right_interface_column();
        DiscreteRectangle {
            n: grid.ny,
            own_left: g1 + 1,
            opposite_left: g2 + 1,
            own_right: grid.nx - g2,
            opposite_right: grid.nx - g1,
        }
    }

    /// Eigenvalue of `G_1` (Γ1 data through Ω_1 to Γ2) on mode `k`.
    pub fn rho1(&self, k: usize) -> f64 {
        rho_discrete(k, self.n, self.own_left, self.opposite_left)
    }

    /// Eigenvalue of `G_2` (Γ2 data through Ω_2 to Γ1) on mode `k`.
    pub fn rho2(&self, k: usize) -> f64 {
        rho_discrete(k, self.n, self.own_right, self.opposite_right)
    }

    pub fn is_symmetric(&self) -> bool {
        self.own_left == self.own_right && self.opposite_left == self.opposite_right
    }
}

/// Two-level factor with an exact eigenvector coarse space of `m` modes per interface.
pub fn s2s_factor(m: usize, n1: usize, n2: usize, rho1: &dyn Fn(usize) -> f64, rho2: &dyn Fn(usize) -> f64) -> f64 {
    let (a, b) = (rho1(m + 1).abs(), rho2(m + 1).abs());
    let n = (n1 + n2) as f64;
    if n1 % 2 == n2 % 2 {
        (a * b).powf(n / 2.0)
    } else {
        (a * b).powf((n - 1.0) / 2.0) * a.max(b)
    }
}

/// Mode-pair blocks of the geometric two-level iteration matrix.
#[derive(Debug, Clone)]
pub struct G2sBlock {
    pub k: usize,
    pub k_tilde: usize,
    pub c: f64,
    pub s: f64,
    pub v: Mat<f64>,
    pub h: Mat<f64>,
    pub d_n1: Mat<f64>,
    pub d_n2: Mat<f64>,
    pub lambda1: Mat<f64>,
    pub lambda2: Mat<f64>,
    /// `D_{n2} (D_{n1} - V Λ_2^{-1} Λ_1)`.
    pub g_tilde: Mat<f64>,
}

/// Action of `G^n` on `[ψ_k,0], [ψ_k̃,0], [0,ψ_k], [0,ψ_k̃]`.
pub fn d_matrix(n: usize, r1k: f64, r1kt: f64, r2k: f64, r2kt: f64) -> Mat<f64> {
    let mut d = Mat::zeros(4, 4);
    if n % 2 == 0 {
        let e = (n / 2) as i32;
        let (pk, pkt) = ((r1k * r2k).powi(e), (r1kt * r2kt).powi(e));
        d[(0, 0)] = pk;
        d[(1, 1)] = pkt;
        d[(2, 2)] = pk;
        d[(3, 3)] = pkt;
    } else {
        let lo = ((n - 1) / 2) as i32;
        let hi = ((n + 1) / 2) as i32;
        let pi12 = |a: f64, b: f64| a.powi(lo) * b.powi(hi);
        let pi21 = |a: f64, b: f64| a.powi(hi) * b.powi(lo);
        d[(0, 2)] = pi21(r1k, r2k);
        d[(1, 3)] = pi21(r1kt, r2kt);
        d[(2, 0)] = pi12(r1k, r2k);
        d[(3, 1)] = pi12(r1kt, r2kt);
    }
    d
}

/// Assembles the 4x4 block of mode pair `(k, N_h + 1 - k)`, `1 <= k <= N_c`.
pub fn g2s_blocks(
    k: usize,
    n_h: usize,
    rho1: &dyn Fn(usize) -> f64,
    rho2: &dyn Fn(usize) -> f64,
    n1: usize,
    n2: usize,
) -> Result<G2sBlock> {
    let n_c = (n_h - 1) / 2;
    if k == 0 || k > n_c {
        return Err(Error::validation("k", format!("{k} not in 1..={n_c}")));
    }
    let kt = n_h + 1 - k;
    let hh = 1.0 / (n_h + 1) as f64;
    let c = (k as f64 * PI * hh / 2.0).cos();
    let s = (k as f64 * PI * hh / 2.0).sin();
    let (c2, s2) = (c * c, s * s);
    let mut v = Mat::zeros(4, 2);
    v[(0, 0)] = c2;
    v[(1, 0)] = -s2;
    v[(2, 1)] = c2;
    v[(3, 1)] = -s2;
    let (r1k, r1kt, r2k, r2kt) = (rho1(k), rho1(kt), rho2(k), rho2(kt));
    let mut h = linalg::identity(4);
    h[(0, 2)] = -r1k;
    h[(1, 3)] = -r1kt;
    h[(2, 0)] = -r2k;
    h[(3, 1)] = -r2kt;
    let d_n1 = d_matrix(n1, r1k, r1kt, r2k, r2kt);
    let d_n2 = d_matrix(n2, r1k, r1kt, r2k, r2kt);
    let vth = v.transpose() * &h;
    let lambda1 = &vth * &d_n1;
    let lambda2 = &vth * &v;
    let sigma = linalg::singular_values(&lambda2)?;
    if sigma[1] <= 1e-14 * sigma[0].max(1e-300) {
        return Err(Error::Factorization(format!("Λ_2 singular for mode pair {k}")));
    }
    let corr = &v * linalg::DenseLu::new(&lambda2)?.solve_mat(&lambda1);
    let inner = Mat::from_fn(4, 4, |i, j| d_n1[(i, j)] - corr[(i, j)]);
    let g_tilde = &d_n2 * &inner;
    Ok(G2sBlock {
        k,
        k_tilde: kt,
        c,
        s,
        v,
        h,
        d_n1,
        d_n2,
        lambda1,
        lambda2,
        g_tilde,
    })
}

/// 2x2 action of `G^{n1+n2}` on `[ψ_mid, 0], [0, ψ_mid]`, `mid = (N_h + 1) / 2`.
pub fn g2s_mid_block(n_h: usize, rho1: &dyn Fn(usize) -> f64, rho2: &dyn Fn(usize) -> f64, n1: usize, n2: usize) -> Mat<f64> {
    let mid = (n_h + 1) / 2;
    let d = d_matrix(n1 + n2, rho1(mid), rho1(mid), rho2(mid), rho2(mid));
    Mat::from_fn(2, 2, |i, j| d[(2 * i, 2 * j)])
}

/// Eigenvalues of `blockdiag(G̃_1, ..., G̃_{N_c}, mid block)`.
pub fn g2s_block_spectrum(
    n_h: usize,
    rho1: &dyn Fn(usize) -> f64,
    rho2: &dyn Fn(usize) -> f64,
    n1: usize,
    n2: usize,
) -> Result<Vec<c64>> {
    let n_c = (n_h - 1) / 2;
    let mut out = Vec::with_capacity(2 * n_h);
    for k in 1..=n_c {
        out.extend(linalg::eigenvalues(&g2s_blocks(k, n_h, rho1, rho2, n1, n2)?.g_tilde)?);
    }
    out.extend(linalg::eigenvalues(&g2s_mid_block(n_h, rho1, rho2, n1, n2))?);
    Ok(out)
}

/// The two nonzero eigenvalue moduli `(|λ_3|, |λ_4|)` of `G̃_k` for `ρ_1 = ρ_2 = ρ`.
pub fn g2s_lambda_moduli(k: usize, n_h: usize, rho: &dyn Fn(usize) -> f64, n: usize) -> (f64, f64) {
    let kt = n_h + 1 - k;
    let hh = 1.0 / (n_h + 1) as f64;
    let c4 = (k as f64 * PI * hh / 2.0).cos().powi(4);
    let s4 = (k as f64 * PI * hh / 2.0).sin().powi(4);
    let (rk, rkt) = (rho(k), rho(kt));
    let (pk, pkt) = (rk.powi(n as i32), rkt.powi(n as i32));
    let l3 = (c4 * (1.0 - rk) * pkt + s4 * (1.0 - rkt) * pk) / (c4 * (1.0 - rk) + s4 * (1.0 - rkt));
    let l4 = (c4 * (1.0 + rk) * pkt + s4 * (1.0 + rkt) * pk) / (c4 * (1.0 + rk) + s4 * (1.0 + rkt));
    (l3, l4)
}

/// Geometric two-level convergence factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2sFactor {
    pub value: f64,
    /// `false` when `ρ_1 != ρ_2` somewhere, outside the formula's hypotheses.
    pub hypotheses_hold: bool,
}

/// Maximum over `k in {1..N_c, (N_h+1)/2}` of `|λ_3(k)|`, evaluated with `ρ = ρ_1`.
pub fn g2s_factor(n_h: usize, rho1: &dyn Fn(usize) -> f64, rho2: &dyn Fn(usize) -> f64, n1: usize, n2: usize) -> G2sFactor {
    let n_c = (n_h - 1) / 2;
    let n = n1 + n2;
    let mut value: f64 = rho1((n_h + 1) / 2).powi(n as i32);
    for k in 1..=n_c {
        value = value.max(g2s_lambda_moduli(k, n_h, rho1, n).0);
    }
    let hypotheses_hold = (1..=n_h).all(|k| (rho1(k) - rho2(k)).abs() <= 1e-14 * rho1(k).abs().max(1e-300));
    if !hypotheses_hold {
        log::warn!("g2s_factor: ρ_1 != ρ_2, value outside the formula's hypotheses");
    }
    G2sFactor { value, hypotheses_hold }
}

/// `|λ_{m+1}|` for eigenvalues ordered with the coarse ones first.
pub fn generic_two_level_factor(lambda: &[f64], m: usize) -> f64 {
    lambda.get(m).map(|l| l.abs()).unwrap_or(0.0)
}
