//! Iterative solvers for the substructured system `(I - G) v = b`.
//!
//! - [`psm_solve`]: one-level parallel Schwarz, `v <- G v + b`.
//! - [`two_level_solve`]: smoothing, interface coarse correction, smoothing.
//! - [`s2s_b1_solve`], [`s2s_b2_solve`]: the same two-level iteration
//!   with one smoother application per cycle, reusing `G P`.
//! - [`MultilevelHierarchy`]: V-cycle over a sequence of interface grids.

use std::time::Instant;

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseLu};
use crate::substructured::{norm_2inf, SubstructuredOperator, SubstructuredProblem};
use crate::transfer::{
    coarse_problem, dense_a, galerkin_matrix, smoothed_prolongation, CoarseKind, CoarseOperator, TransferPair,
};

/// Stopping and smoothing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelConfig {
    /// Pre-smoothing steps.
    pub n1: usize,
    /// Post-smoothing steps.
    pub n2: usize,
    /// Relative tolerance on the error (if a reference is given) or the residual.
    pub tol: f64,
    pub maxit: usize,
    /// Also record the relative residual (one uncounted smoother application per cycle).
    pub track_residual: bool,
}

impl Default for TwoLevelConfig {
    fn default() -> Self {
        TwoLevelConfig {
            n1: 1,
            n2: 0,
            tol: 1e-10,
            maxit: 200,
            track_residual: true,
        }
    }
}

impl TwoLevelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n1 + self.n2 == 0 {
            return Err(Error::validation("n1,n2", "at least one smoothing step is required"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::validation("tol", "must be positive"));
        }
        Ok(())
    }
}

/// One row of an iteration history.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub rel_error: Option<f64>,
    pub rel_residual: Option<f64>,
    /// Seconds since the start of the solve.
    pub elapsed: f64,
    /// Cumulative subdomain solves spent by the method itself.
    pub subdomain_solves: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
    Diverged,
}

/// Iterates and diagnostics of one solve.
#[derive(Debug, Clone)]
pub struct IterationHistory {
    pub method: String,
    pub records: Vec<IterationRecord>,
    pub status: Status,
    pub solution: Vec<f64>,
}

impl IterationHistory {
    /// Cycles performed.
    pub fn iterations(&self) -> usize {
        self.records.last().map(|r| r.iteration).unwrap_or(0)
    }

    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Metric used for stopping at every recorded cycle.
    pub fn metric(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.rel_error.or(r.rel_residual).unwrap_or(f64::NAN))
            .collect()
    }

    /// Geometric mean of the error reduction over the last `window`
    /// cycles whose metric stays above `floor`.
    pub fn observed_contraction(&self, window: usize, floor: f64) -> Option<f64> {
        let m: Vec<f64> = self.metric().into_iter().take_while(|&e| e > floor).collect();
        if m.len() < 2 {
            return None;
        }
        let w = window.min(m.len() - 1);
        let last = m.len() - 1;
        Some((m[last] / m[last - w]).powf(1.0 / w as f64))
    }
}

/// Runs a fixed-point style iteration with shared monitoring.
struct Monitor<'a> {
    op: &'a SubstructuredOperator,
    reference: Option<&'a [f64]>,
    reference_norm: f64,
    cfg: TwoLevelConfig,
    start: Instant,
    solves0: usize,
    records: Vec<IterationRecord>,
}

impl<'a> Monitor<'a> {
    fn new(op: &'a SubstructuredOperator, reference: Option<&'a [f64]>, cfg: TwoLevelConfig) -> Result<Self> {
        if let Some(r) = reference {
            if r.len() != op.dim() {
                return Err(Error::dimension("reference solution", op.dim(), r.len()));
            }
        }
        let reference_norm = reference.map(|r| norm_2inf(r, op.split())).unwrap_or(0.0);
        Ok(Monitor {
            op,
            reference,
            reference_norm,
            cfg,
            start: Instant::now(),
            solves0: op.subdomain_solves(),
            records: Vec::new(),
        })
    }

    /// Records the state after `iteration` cycles; returns the stopping metric.
    fn record(&mut self, iteration: usize, v: &[f64]) -> Result<f64> {
        let rel_error = self.reference.map(|r| {
            let d: Vec<f64> = v.iter().zip(r).map(|(a, b)| a - b).collect();
            let e = norm_2inf(&d, self.op.split());
            if self.reference_norm > 0.0 {
                e / self.reference_norm
            } else {
                e
            }
        });
        let rel_residual = if self.cfg.track_residual || rel_error.is_none() {
            Some(self.op.relative_residual(v)?)
        } else {
            None
        };
        self.records.push(IterationRecord {
            iteration,
            rel_error,
            rel_residual,
            elapsed: self.start.elapsed().as_secs_f64(),
            subdomain_solves: self.op.subdomain_solves() - self.solves0,
        });
        Ok(rel_error.or(rel_residual).unwrap())
    }

    fn diverging(&self) -> bool {
        let m: Vec<f64> = self
            .records
            .iter()
            .map(|r| r.rel_error.or(r.rel_residual).unwrap())
            .collect();
        let k = m.len();
        let last = m[k - 1];
        !last.is_finite() || (k > 5 && last > 10.0 * m[k - 6])
    }

    fn finish(self, method: &str, status: Status, solution: Vec<f64>) -> IterationHistory {
        IterationHistory {
            method: method.to_string(),
            records: self.records,
            status,
            solution,
        }
    }
}

/// Drives `step` until the monitor metric drops below `tol`.
fn iterate<F>(
    op: &SubstructuredOperator,
    v0: &[f64],
    cfg: TwoLevelConfig,
    reference: Option<&[f64]>,
    method: &str,
    mut step: F,
) -> Result<IterationHistory>
where
    F: FnMut(&[f64], usize) -> Result<Vec<f64>>,
{
    if v0.len() != op.dim() {
        return Err(Error::dimension("initial guess", op.dim(), v0.len()));
    }
    let mut mon = Monitor::new(op, reference, cfg)?;
    let mut v = v0.to_vec();
    if mon.record(0, &v)? <= cfg.tol {
        return Ok(mon.finish(method, Status::Converged, v));
    }
    for it in 1..=cfg.maxit {
        v = step(&v, it)?;
        let metric = mon.record(it, &v)?;
        if metric <= cfg.tol {
            return Ok(mon.finish(method, Status::Converged, v));
        }
        if mon.diverging() {
            log::warn!("{method}: diverging at cycle {it} (metric {metric:e})");
            return Ok(mon.finish(method, Status::Diverged, v));
        }
    }
    Ok(mon.finish(method, Status::MaxIterations, v))
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// One-level parallel Schwarz method.
pub fn psm_solve(
    op: &SubstructuredOperator,
    v0: &[f64],
    cfg: TwoLevelConfig,
    reference: Option<&[f64]>,
) -> Result<IterationHistory> {
    iterate(op, v0, cfg, reference, "psm", |v, _| op.psm_step(v))
}

/// One cycle of the two-level method: `n1` smoothing steps, coarse
/// correction on the residual, `n2` smoothing steps.
pub fn two_level_cycle(
    op: &SubstructuredOperator,
    transfer: &TransferPair,
    coarse: &CoarseOperator,
    v: &[f64],
    n1: usize,
    n2: usize,
) -> Result<Vec<f64>> {
    let mut u = v.to_vec();
    for _ in 0..n1 {
        u = op.psm_step(&u)?;
    }
    let au = op.apply_a(&u)?;
    let r: Vec<f64> = op.rhs().iter().zip(&au).map(|(b, a)| b - a).collect();
    let uc = coarse.solve(&transfer.restrict(&r));
    u = add(&u, &transfer.prolong(&uc));
    for _ in 0..n2 {
        u = op.psm_step(&u)?;
    }
    Ok(u)
}

/// Two-level substructured method; the stopping test follows post-smoothing.
pub fn two_level_solve(
    op: &SubstructuredOperator,
    transfer: &TransferPair,
    coarse: &CoarseOperator,
    v0: &[f64],
    cfg: TwoLevelConfig,
    reference: Option<&[f64]>,
) -> Result<IterationHistory> {
    cfg.validate()?;
    check_transfer(op, transfer, coarse)?;
    iterate(op, v0, cfg, reference, "two_level", |v, _| {
        two_level_cycle(op, transfer, coarse, v, cfg.n1, cfg.n2)
    })
}

fn check_transfer(op: &SubstructuredOperator, transfer: &TransferPair, coarse: &CoarseOperator) -> Result<()> {
    if transfer.fine_dim() != op.dim() {
        return Err(Error::dimension("transfer fine dimension", op.dim(), transfer.fine_dim()));
    }
    if transfer.coarse_dim() != coarse.dim() {
        return Err(Error::dimension("coarse dimension", coarse.dim(), transfer.coarse_dim()));
    }
    Ok(())
}

fn gp_of(op: &SubstructuredOperator, transfer: &TransferPair, coarse: &CoarseOperator) -> Result<Mat<f64>> {
    match &coarse.smoothed_prolongation {
        Some(gp) => Ok(gp.clone()),
        None => smoothed_prolongation(op, transfer),
    }
}

/// Two-level method with one pre-smoothing step that reuses `G P`: after the
/// first cycle only one smoother application is needed per cycle. Its
/// iterates equal those of [`two_level_solve`] with `n1 = 1, n2 = 0`.
pub fn s2s_b1_solve(
    op: &SubstructuredOperator,
    transfer: &TransferPair,
    coarse: &CoarseOperator,
    v0: &[f64],
    cfg: TwoLevelConfig,
    reference: Option<&[f64]>,
) -> Result<IterationHistory> {
    check_transfer(op, transfer, coarse)?;
    let gp = gp_of(op, transfer, coarse)?;
    let b = op.rhs().to_vec();
    // state carried between cycles: v = G u1 and the coarse correction d
    let mut carried: Option<(Vec<f64>, Vec<f64>)> = None;
    iterate(op, v0, cfg, reference, "s2s_b1", |u0, _| {
        let u1 = match &carried {
            None => op.psm_step(u0)?,
            Some((v, d)) => add(&add(v, &linalg::matvec(&gp, d)), &b),
        };
        let v = op.apply_g(&u1)?;
        let r: Vec<f64> = (0..u1.len()).map(|i| b[i] - u1[i] + v[i]).collect();
        let d = coarse.solve(&transfer.restrict(&r));
        let next = add(&u1, &transfer.prolong(&d));
        carried = Some((v, d));
        Ok(next)
    })
}

/// Two-level method with the coarse correction before one smoothing step,
/// `u <- G (u + P d) + b`, using `G P` so each cycle costs one smoother
/// application.
pub fn s2s_b2_solve(
    op: &SubstructuredOperator,
    transfer: &TransferPair,
    coarse: &CoarseOperator,
    v0: &[f64],
    cfg: TwoLevelConfig,
    reference: Option<&[f64]>,
) -> Result<IterationHistory> {
    check_transfer(op, transfer, coarse)?;
    let gp = gp_of(op, transfer, coarse)?;
    let b = op.rhs().to_vec();
    iterate(op, v0, cfg, reference, "s2s_b2", |u0, _| {
        let v = op.apply_g(u0)?;
        let r: Vec<f64> = (0..u0.len()).map(|i| b[i] - u0[i] + v[i]).collect();
        let d = coarse.solve(&transfer.restrict(&r));
        Ok(add(&add(&v, &linalg::matvec(&gp, &d)), &b))
    })
}

/// Operator of one level of a hierarchy.
#[derive(Debug)]
enum LevelOperator {
    /// Substructured operator of a coarser grid.
    Rediscretized(Box<SubstructuredProblem>),
    /// Dense Galerkin matrix `A_ℓ`; the smoother is `I - A_ℓ`.
    Galerkin(Mat<f64>),
}

/// Sequence of interface grids from the finest level down to a directly solved one.
#[derive(Debug)]
pub struct MultilevelHierarchy {
    pub kind: CoarseKind,
    /// Transfers between level `i` and `i + 1` (level 0 is the finest).
    transfers: Vec<TransferPair>,
    /// Operators of levels `1..` (the finest lives outside the hierarchy).
    levels: Vec<LevelOperator>,
    coarsest: DenseLu,
}

impl MultilevelHierarchy {
    /// Builds `n_levels` grids (including the finest) with geometric transfers.
    pub fn new(fine: &SubstructuredProblem, n_levels: usize, kind: CoarseKind) -> Result<Self> {
        if n_levels < 2 {
            return Err(Error::validation("levels", "a hierarchy needs at least two levels"));
        }
        let level = fine.volume.grid.level as usize;
        if level < n_levels {
            return Err(Error::validation(
                "levels",
                format!("{n_levels} levels need a finest level of at least {n_levels}"),
            ));
        }
        let mut transfers = Vec::new();
        let mut levels = Vec::new();
        let mut block = fine.operator.split();
        let mut coarsest = None;
        for k in 1..n_levels {
            let t = TransferPair::geometric(block)?;
            let op = match kind {
                CoarseKind::Galerkin => {
                    let a = if k == 1 {
                        galerkin_matrix(&fine.operator, &t)?.0
                    } else {
                        let prev = match levels.last() {
                            Some(LevelOperator::Galerkin(a)) => a,
                            _ => unreachable!(),
                        };
                        t.r_matrix() * (prev * t.p_matrix())
                    };
                    LevelOperator::Galerkin(a)
                }
                CoarseKind::Rediscretized => {
                    let parent = if k == 1 {
                        fine
                    } else {
                        match levels.last() {
                            Some(LevelOperator::Rediscretized(p)) => p.as_ref(),
                            _ => unreachable!(),
                        }
                    };
                    LevelOperator::Rediscretized(Box::new(coarse_problem(parent)?))
                }
            };
            if k == n_levels - 1 {
                let a = match &op {
                    LevelOperator::Galerkin(a) => a.clone(),
                    LevelOperator::Rediscretized(p) => dense_a(&p.operator)?,
                };
                coarsest = Some(CoarseOperator::from_matrix(kind, a, None)?);
            }
            block = (block - 1) / 2;
            transfers.push(t);
            levels.push(op);
        }
        let coarsest = coarsest.unwrap();
        Ok(MultilevelHierarchy {
            kind,
            transfers,
            levels,
            coarsest: DenseLu::new(&coarsest.matrix)?,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len() + 1
    }

    fn apply_g(&self, level: usize, v: &[f64]) -> Result<Vec<f64>> {
        match &self.levels[level - 1] {
            LevelOperator::Rediscretized(p) => p.operator.apply_g(v),
            LevelOperator::Galerkin(a) => {
                let av = linalg::matvec(a, v);
                Ok(v.iter().zip(&av).map(|(x, y)| x - y).collect())
            }
        }
    }

    /// One V-cycle on `level >= 1` with rhs `b` and zero initial guess.
    fn vcycle_coarse(&self, level: usize, b: &[f64], n1: usize, n2: usize) -> Result<Vec<f64>> {
        if level == self.levels.len() {
            return Ok(self.coarsest.solve(b));
        }
        let smooth = |u: &[f64]| -> Result<Vec<f64>> { Ok(add(&self.apply_g(level, u)?, b)) };
        let mut u = vec![0.0; b.len()];
        for _ in 0..n1 {
            u = smooth(&u)?;
        }
        let gu = self.apply_g(level, &u)?;
        let r: Vec<f64> = (0..u.len()).map(|i| b[i] - u[i] + gu[i]).collect();
        let t = &self.transfers[level];
        let uc = self.vcycle_coarse(level + 1, &t.restrict(&r), n1, n2)?;
        u = add(&u, &t.prolong(&uc));
        for _ in 0..n2 {
            u = smooth(&u)?;
        }
        Ok(u)
    }

    /// One V-cycle on the finest level starting from `v`.
    pub fn vcycle(&self, op: &SubstructuredOperator, v: &[f64], n1: usize, n2: usize) -> Result<Vec<f64>> {
        let mut u = v.to_vec();
        for _ in 0..n1 {
            u = op.psm_step(&u)?;
        }
        let au = op.apply_a(&u)?;
        let r: Vec<f64> = op.rhs().iter().zip(&au).map(|(b, a)| b - a).collect();
        let t = &self.transfers[0];
        let uc = self.vcycle_coarse(1, &t.restrict(&r), n1, n2)?;
        u = add(&u, &t.prolong(&uc));
        for _ in 0..n2 {
            u = op.psm_step(&u)?;
        }
        Ok(u)
    }
}

/// Multilevel V-cycle iteration on the finest operator.
pub fn gmls_solve(
    op: &SubstructuredOperator,
    hierarchy: &MultilevelHierarchy,
    v0: &[f64],
    cfg: TwoLevelConfig,
    reference: Option<&[f64]>,
) -> Result<IterationHistory> {
    cfg.validate()?;
    if hierarchy.transfers[0].fine_dim() != op.dim() {
        return Err(Error::dimension("hierarchy fine dimension", op.dim(), hierarchy.transfers[0].fine_dim()));
    }
    iterate(op, v0, cfg, reference, "gmls", |v, _| hierarchy.vcycle(op, v, cfg.n1, cfg.n2))
}
