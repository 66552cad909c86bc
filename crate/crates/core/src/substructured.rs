//! Interface operators of the substructured formulation.
//!
//! Interface vectors are ordered `[v on Γ2; v on Γ1]`: the first block is
//! the trace of the Ω_1 solution on Γ2, the second the trace of the Ω_2
//! solution on Γ1. The smoother is `G = [0, G_1; G_2, 0]` where `G_1`
//! maps Γ1 data through Ω_1 to Γ2 and `G_2` maps Γ2 data through Ω_2 to
//! Γ1; the substructured system reads `(I - G) v = b`.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::decomposition::{build_decomposition, Decomposition, DecompositionSpec};
use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::problem::{assemble_volume, manufactured_solution, GridSpec, ProblemSpec, VolumeMatrix};

/// `max(‖v_Γ2‖₂, ‖v_Γ1‖₂)` for an interface vector whose first block has length `split`.
pub fn norm_2inf(v: &[f64], split: usize) -> f64 {
    norm2(&v[..split]).max(norm2(&v[split..]))
}

/// Substructured operator built on two factorized subdomains.
#[derive(Debug)]
pub struct SubstructuredOperator {
    pub decomposition: Decomposition,
    volume_rhs: Vec<f64>,
    rhs: Vec<f64>,
    applications: AtomicUsize,
}

/// A fully assembled problem: volume system, decomposition and interface operator.
#[derive(Debug)]
pub struct SubstructuredProblem {
    pub problem: ProblemSpec,
    pub volume: VolumeMatrix,
    pub operator: SubstructuredOperator,
}

impl SubstructuredProblem {
    pub fn new(problem: &ProblemSpec, level: u32, spec: DecompositionSpec) -> Result<Self> {
        let grid = GridSpec::new(problem, level)?;
        let (volume, f) = assemble_volume(problem, &grid)?;
        let decomposition = build_decomposition(&volume, spec)?;
        let operator = SubstructuredOperator::new(decomposition, f)?;
        Ok(SubstructuredProblem {
            problem: problem.clone(),
            volume,
            operator,
        })
    }

    /// Same as [`SubstructuredProblem::new`] with the overlap centred on the grid.
    pub fn centered(problem: &ProblemSpec, level: u32, n_ov: usize) -> Result<Self> {
        let grid = GridSpec::new(problem, level)?;
        Self::new(problem, level, DecompositionSpec::centered(&grid, n_ov)?)
    }

    /// Exact discrete volume solution and its interface traces.
    pub fn reference(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let u = manufactured_solution(&self.volume, self.operator.volume_rhs())?;
        let v = self.operator.decomposition.interface_traces(&u);
        Ok((u, v))
    }
}

impl SubstructuredOperator {
    /// Wraps a decomposition and computes `b` from the volume rhs `f`.
    pub fn new(decomposition: Decomposition, volume_rhs: Vec<f64>) -> Result<Self> {
        if volume_rhs.len() != decomposition.grid.n_volume() {
            return Err(Error::dimension("volume rhs", decomposition.grid.n_volume(), volume_rhs.len()));
        }
        let mut op = SubstructuredOperator {
            decomposition,
            volume_rhs,
            rhs: Vec::new(),
            applications: AtomicUsize::new(0),
        };
        op.rhs = op.substructured_rhs(&op.volume_rhs.clone())?;
        Ok(op)
    }

    /// `N^s`.
    pub fn dim(&self) -> usize {
        self.decomposition.n_interface()
    }

    /// Length of the Γ2 block.
    pub fn split(&self) -> usize {
        self.decomposition.grid.ny
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn volume_rhs(&self) -> &[f64] {
        &self.volume_rhs
    }

    /// `b = [R_2 A_1^{-1} f_1; R_1 A_2^{-1} f_2]`.
    pub fn substructured_rhs(&self, f: &[f64]) -> Result<Vec<f64>> {
        let d = &self.decomposition;
        if f.len() != d.grid.n_volume() {
            return Err(Error::dimension("volume rhs", d.grid.n_volume(), f.len()));
        }
        let zero = vec![0.0; d.grid.ny];
        let (l, r) = rayon::join(
            || d.left.dirichlet_solve(&zero, Some(d.left.restrict(f))),
            || d.right.dirichlet_solve(&zero, Some(d.right.restrict(f))),
        );
        let mut b = d.left.trace(&l?);
        b.extend(d.right.trace(&r?));
        Ok(b)
    }

    /// `G v`, counted as one smoother application (two subdomain solves).
    pub fn apply_g(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.applications.fetch_add(1, Ordering::Relaxed);
        self.apply_g_uncounted(v)
    }

    /// `G v` without touching the application counter. Blocks of `v` that
    /// are identically zero skip their subdomain solve.
    pub fn apply_g_uncounted(&self, v: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::dimension("interface vector", n, v.len()));
        }
        let d = &self.decomposition;
        let ny = self.split();
        let (on_g2, on_g1) = v.split_at(ny);
        let solve_trace = |s: &crate::decomposition::SubdomainSolver, w: &[f64]| -> Result<Vec<f64>> {
            if w.iter().all(|&x| x == 0.0) {
                return Ok(vec![0.0; ny]);
            }
            Ok(s.trace(&s.dirichlet_solve(w, None)?))
        };
        let (a, b) = rayon::join(|| solve_trace(&d.left, on_g1), || solve_trace(&d.right, on_g2));
        let mut out = a?;
        out.extend(b?);
        Ok(out)
    }

    /// `A v = v - G v` (counted).
    pub fn apply_a(&self, v: &[f64]) -> Result<Vec<f64>> {
        let g = self.apply_g(v)?;
        Ok(v.iter().zip(&g).map(|(a, b)| a - b).collect())
    }

    pub fn apply_a_uncounted(&self, v: &[f64]) -> Result<Vec<f64>> {
        let g = self.apply_g_uncounted(v)?;
        Ok(v.iter().zip(&g).map(|(a, b)| a - b).collect())
    }

    /// One parallel Schwarz step `G v + b`.
    pub fn psm_step(&self, v: &[f64]) -> Result<Vec<f64>> {
        let g = self.apply_g(v)?;
        Ok(g.iter().zip(&self.rhs).map(|(a, b)| a + b).collect())
    }

    /// `k` parallel Schwarz steps starting from `v0`; returns every iterate after `v0`.
    pub fn psm_iterate(&self, v0: &[f64], k: usize) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(k);
        let mut v = v0.to_vec();
        for _ in 0..k {
            v = self.psm_step(&v)?;
            out.push(v.clone());
        }
        Ok(out)
    }

    /// `‖b - A v‖ / ‖b‖` in the `(2,∞)` norm, not counted.
    pub fn relative_residual(&self, v: &[f64]) -> Result<f64> {
        let av = self.apply_a_uncounted(v)?;
        let r: Vec<f64> = self.rhs.iter().zip(&av).map(|(b, a)| b - a).collect();
        let nb = norm_2inf(&self.rhs, self.split());
        let nr = norm_2inf(&r, self.split());
        Ok(if nb > 0.0 { nr / nb } else { nr })
    }

    /// Volume field obtained from interface data by one pair of subdomain
    /// solves with the true forcing, glued at the overlap midline.
    pub fn harmonic_extension(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::dimension("interface vector", self.dim(), v.len()));
        }
        let d = &self.decomposition;
        let ny = self.split();
        let f = &self.volume_rhs;
        let (l, r) = rayon::join(
            || d.left.dirichlet_solve(&v[ny..], Some(d.left.restrict(f))),
            || d.right.dirichlet_solve(&v[..ny], Some(d.right.restrict(f))),
        );
        Ok(d.merge(&l?, &r?))
    }

    /// Number of counted smoother applications so far.
    pub fn applications(&self) -> usize {
        self.applications.load(Ordering::Relaxed)
    }

    /// Subdomain solves performed by counted smoother applications.
    pub fn subdomain_solves(&self) -> usize {
        2 * self.applications()
    }

    pub fn reset_counter(&self) {
        self.applications.store(0, Ordering::Relaxed);
    }
}
