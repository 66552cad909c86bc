//! Experiment driver behind the command-line tool.
//!
//! An [`ExperimentConfig`] is read from flat key/value text. [`run`] executes
//! one experiment (a solve, a set of spectral radii or a theory table) and
//! [`reproduce`] runs a named multi-method recipe. All artifacts are CSV
//! files plus a `manifest.txt`, written below an output root.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::config::KeyValues;
use crate::decomposition::DecompositionSpec;
use crate::error::{Error, Result};
use crate::output::{fmt_f64, history_table, spectral_table, CsvTable, RunLabel};
use crate::problem::{AdvectionField, GridSpec, OperatorKind, ProblemSpec, RhsKind};
use crate::solvers::{
    gmls_solve, psm_solve, s2s_b1_solve, s2s_b2_solve, two_level_solve, IterationHistory, MultilevelHierarchy,
    Status, TwoLevelConfig,
};
use crate::spectral::{
    assemble_augmented, assemble_dense_g, assemble_two_level, power_iteration_radius, RasTwoGrid, SpectralReport,
    DEFAULT_AUGMENTED_CAP, DEFAULT_DENSE_CAP,
};
use crate::substructured::SubstructuredProblem;
use crate::theory::{g2s_block_spectrum, g2s_factor, rho_rectangle, s2s_factor, DiscreteRectangle};
use crate::transfer::{build_coarse_operator, CoarseKind, CoarseOperator, CoarseSelector, PcaParams, TransferPair};

/// Environment variable holding the output root.
pub const OUTPUT_ROOT_ENV: &str = "SUBDD_OUTPUT_DIR";

/// Known recipe names.
pub const RECIPES: &[&str] = &["fig_convergence_rect", "fig_radii_sweep", "tab_iterations", "jump_channels"];

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation { .. } | Error::Parse(_) | Error::Dimension { .. } => 2,
        Error::Diverged { .. } => 3,
        Error::SizeCap { .. } => 4,
        _ => 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Spectra,
    TheoryTable,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "solve" => Ok(Mode::Solve),
            "spectra" => Ok(Mode::Spectra),
            "theory-table" | "theory_table" => Ok(Mode::TheoryTable),
            _ => Err(Error::validation("mode", format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Psm,
    S2s,
    G2s,
    S2sB1,
    S2sB2,
    Gmls,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "psm" => Ok(Method::Psm),
            "s2s" => Ok(Method::S2s),
            "g2s" => Ok(Method::G2s),
            "s2s-b1" | "s2s_b1" => Ok(Method::S2sB1),
            "s2s-b2" | "s2s_b2" => Ok(Method::S2sB2),
            "gmls" => Ok(Method::Gmls),
            _ => Err(Error::validation("method", format!("unknown method '{s}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Psm => "psm",
            Method::S2s => "s2s",
            Method::G2s => "g2s",
            Method::S2sB1 => "s2s-b1",
            Method::S2sB2 => "s2s-b2",
            Method::Gmls => "gmls",
        }
    }
}

/// Decomposition by overlap parameter (centred) or by explicit columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecompositionChoice {
    Centered { n_ov: usize },
    Explicit(DecompositionSpec),
}

impl DecompositionChoice {
    pub fn resolve(&self, grid: &GridSpec) -> Result<DecompositionSpec> {
        let spec = match self {
            DecompositionChoice::Centered { n_ov } => DecompositionSpec::centered(grid, *n_ov)?,
            DecompositionChoice::Explicit(s) => *s,
        };
        spec.validate(grid)?;
        Ok(spec)
    }
}

/// Parameters of the continuous rectangle table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    pub l1: f64,
    pub l2: f64,
    pub delta: f64,
    pub l_tilde: f64,
    pub kmax: usize,
}

impl Default for TheoryParams {
    fn default() -> Self {
        TheoryParams {
            l1: 1.0,
            l2: 1.0,
            delta: 0.1,
            l_tilde: 1.0,
            kmax: 10,
        }
    }
}

/// One experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub problem_name: String,
    pub problem: ProblemSpec,
    pub level: u32,
    pub decomposition: DecompositionChoice,
    pub method: Method,
    pub solver: TwoLevelConfig,
    pub coarse: CoarseSelector,
    pub coarse_operator: CoarseKind,
    /// Levels of the GMLS hierarchy.
    pub levels: usize,
    pub seed: u64,
    /// Output directory, relative to the output root unless absolute.
    pub output: PathBuf,
    /// Write wall-clock times into histories.
    pub timings: bool,
    /// Also assemble the augmented operators in spectra mode.
    pub augmented: bool,
    pub dense_cap: usize,
    pub theory: TheoryParams,
}

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "problem",
    "width",
    "height",
    "rhs",
    "alpha",
    "advection",
    "level",
    "n_ov",
    "left_column",
    "overlap_cells",
    "method",
    "coarse",
    "coarse_operator",
    "levels",
    "n1",
    "n2",
    "tol",
    "maxit",
    "track_residual",
    "seed",
    "output",
    "timings",
    "augmented",
    "dense_cap",
    "l1",
    "l2",
    "delta",
    "l_tilde",
    "kmax",
];

fn build_problem(kv: &KeyValues) -> Result<(String, ProblemSpec)> {
    let name = kv.get("problem").unwrap_or("laplace").to_string();
    let rhs = RhsKind::parse(kv.get("rhs").unwrap_or("sin2pi_xy"))?;
    let width = kv.parse_or("width", 2.0)?;
    let height = kv.parse_or("height", 1.0)?;
    let mut p = match name.as_str() {
        "laplace" => ProblemSpec::laplace(width, height, rhs),
        "channels" => {
            let mut p = ProblemSpec::channels(kv.parse_or("alpha", 1e2)?);
            if kv.get("rhs").is_some() {
                p.rhs = rhs;
            }
            p
        }
        "advection" => {
            let mut p = ProblemSpec::laplace(width, height, rhs);
            p.operator = OperatorKind::AdvectionDiffusion;
            p.advection = AdvectionField::Cubic;
            p
        }
        _ => return Err(Error::validation("problem", format!("unknown problem '{name}'"))),
    };
    if let Some(a) = kv.get("advection") {
        p.advection = AdvectionField::parse(a)?;
        if p.advection != AdvectionField::Zero {
            p.operator = OperatorKind::AdvectionDiffusion;
        }
    }
    p.validate()?;
    Ok((name, p))
}

impl ExperimentConfig {
    /// Builds and validates a configuration; unknown keys are rejected.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        if let Some(k) = kv.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(Error::validation(k, "unknown key"));
        }
        let mode = Mode::parse(kv.get("mode").unwrap_or("solve"))?;
        let (problem_name, problem) = build_problem(kv)?;
        let level: u32 = kv.parse_or("level", 5)?;
        let decomposition = match (kv.parse_opt::<usize>("left_column")?, kv.parse_opt::<usize>("overlap_cells")?) {
            (Some(l), Some(o)) => DecompositionChoice::Explicit(DecompositionSpec::new(l, o)),
            (None, None) => DecompositionChoice::Centered {
                n_ov: kv.parse_or("n_ov", 2)?,
            },
            _ => {
                return Err(Error::validation(
                    "left_column",
                    "left_column and overlap_cells must be given together",
                ))
            }
        };
        let method = Method::parse(kv.get("method").unwrap_or("g2s"))?;
        let default_coarse = if method == Method::S2s { "fourier:5" } else { "geometric" };
        let seed: u64 = kv.parse_or("seed", 0)?;
        let coarse_text = kv.get("coarse").unwrap_or(default_coarse);
        let mut coarse = CoarseSelector::parse(coarse_text)?;
        if let CoarseSelector::Pca(p) = &mut coarse {
            if coarse_text.split(':').count() < 5 {
                p.seed = seed;
            }
        }
        if matches!(method, Method::G2s | Method::Gmls) && coarse != CoarseSelector::Geometric {
            return Err(Error::validation("coarse", format!("{} requires the geometric coarse space", method.name())));
        }
        let coarse_operator = CoarseKind::parse(kv.get("coarse_operator").unwrap_or("galerkin"))?;
        if coarse_operator == CoarseKind::Rediscretized && coarse != CoarseSelector::Geometric {
            return Err(Error::validation("coarse_operator", "rediscretization requires the geometric coarse space"));
        }
        let solver = TwoLevelConfig {
            n1: kv.parse_or("n1", 1)?,
            n2: kv.parse_or("n2", 0)?,
            tol: kv.parse_or("tol", 1e-10)?,
            maxit: kv.parse_or("maxit", 200)?,
            track_residual: kv.bool_or("track_residual", true)?,
        };
        if method != Method::Psm {
            solver.validate()?;
        } else if !(solver.tol > 0.0) {
            return Err(Error::validation("tol", "must be positive"));
        }
        let levels = kv.parse_or("levels", 3)?;
        if method == Method::Gmls && levels < 2 {
            return Err(Error::validation("levels", "a hierarchy needs at least two levels"));
        }
        let theory = TheoryParams {
            l1: kv.parse_or("l1", 1.0)?,
            l2: kv.parse_or("l2", 1.0)?,
            delta: kv.parse_or("delta", 0.1)?,
            l_tilde: kv.parse_or("l_tilde", 1.0)?,
            kmax: kv.parse_or("kmax", 10)?,
        };
        let cfg = ExperimentConfig {
            mode,
            problem_name,
            problem,
            level,
            decomposition,
            method,
            solver,
            coarse,
            coarse_operator,
            levels,
            seed,
            output: PathBuf::from(kv.get("output").unwrap_or("results")),
            timings: kv.bool_or("timings", false)?,
            augmented: kv.bool_or("augmented", false)?,
            dense_cap: kv.parse_or("dense_cap", DEFAULT_DENSE_CAP)?,
            theory,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_key_values(&KeyValues::parse(text)?)
    }

    /// Checks everything that can be checked before any numerical work.
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::TheoryTable => {
                if self.theory.kmax == 0 {
                    return Err(Error::validation("kmax", "must be positive"));
                }
                rho_rectangle(1, self.theory.l1, self.theory.delta, self.theory.l_tilde)?;
                rho_rectangle(1, self.theory.l2, self.theory.delta, self.theory.l_tilde)?;
                Ok(())
            }
            _ => {
                let grid = GridSpec::new(&self.problem, self.level)?;
                self.decomposition.resolve(&grid)?;
                Ok(())
            }
        }
    }

    /// Resolved decomposition on the configured grid.
    pub fn decomposition_spec(&self) -> Result<DecompositionSpec> {
        self.decomposition.resolve(&GridSpec::new(&self.problem, self.level)?)
    }

    /// Canonical key/value form, recorded in manifests.
    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.set("mode", match self.mode {
            Mode::Solve => "solve",
            Mode::Spectra => "spectra",
            Mode::TheoryTable => "theory-table",
        });
        kv.set("problem", self.problem_name.clone());
        kv.set("width", self.problem.width.to_string());
        kv.set("height", self.problem.height.to_string());
        kv.set("rhs", self.problem.rhs.name());
        kv.set("advection", self.problem.advection.name());
        if let Some(c) = self.problem.diffusion.channels.first() {
            kv.set("alpha", c.value.to_string());
        }
        kv.set("level", self.level.to_string());
        match self.decomposition {
            DecompositionChoice::Centered { n_ov } => kv.set("n_ov", n_ov.to_string()),
            DecompositionChoice::Explicit(s) => {
                kv.set("left_column", s.left_interface_column.to_string());
                kv.set("overlap_cells", s.overlap_cells.to_string());
            }
        }
        kv.set("method", self.method.name());
        kv.set("coarse", self.coarse.descriptor());
        kv.set("coarse_operator", match self.coarse_operator {
            CoarseKind::Galerkin => "galerkin",
            CoarseKind::Rediscretized => "rediscretized",
        });
        kv.set("levels", self.levels.to_string());
        kv.set("n1", self.solver.n1.to_string());
        kv.set("n2", self.solver.n2.to_string());
        kv.set("tol", self.solver.tol.to_string());
        kv.set("maxit", self.solver.maxit.to_string());
        kv.set("track_residual", self.solver.track_residual.to_string());
        kv.set("seed", self.seed.to_string());
        kv.set("output", self.output.display().to_string());
        kv.set("timings", self.timings.to_string());
        kv.set("augmented", self.augmented.to_string());
        kv.set("dense_cap", self.dense_cap.to_string());
        kv.set("l1", self.theory.l1.to_string());
        kv.set("l2", self.theory.l2.to_string());
        kv.set("delta", self.theory.delta.to_string());
        kv.set("l_tilde", self.theory.l_tilde.to_string());
        kv.set("kmax", self.theory.kmax.to_string());
        kv
    }

    /// Output directory below `root`.
    pub fn output_dir(&self, root: &Path) -> PathBuf {
        if self.output.is_absolute() {
            self.output.clone()
        } else {
            root.join(&self.output)
        }
    }
}

/// Output root from the environment, else the current directory.
pub fn output_root_from_env() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

/// Artifacts and one summary line per sub-run.
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    /// First divergence encountered, reported after all files are written.
    pub diverged: Option<(usize, f64)>,
}

impl RunOutcome {
    fn write(&mut self, dir: &Path, name: &str, table: &CsvTable, seed: u64) -> Result<()> {
        let path = dir.join(name);
        table.write(&path, seed)?;
        self.files.push(path);
        Ok(())
    }

    fn note(&mut self, h: &IterationHistory, label: &str) {
        let last = h.metric().last().copied().unwrap_or(f64::NAN);
        self.summary
            .push(format!("{label}: {:?} after {} iterations (metric {last:e})", h.status, h.iterations()));
        if h.status == Status::Diverged && self.diverged.is_none() {
            self.diverged = Some((h.iterations(), last));
        }
    }

    fn finish(mut self, dir: &Path, header: &str, kv: &KeyValues) -> Result<Self> {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut text = format!("# {header}\ncreated_unix = {stamp}\n");
        text.push_str(&kv.to_text());
        for f in &self.files {
            text.push_str(&format!("file = {}\n", f.file_name().unwrap().to_string_lossy()));
        }
        for s in &self.summary {
            text.push_str(&format!("# {s}\n"));
        }
        let path = dir.join("manifest.txt");
        std::fs::write(&path, text)?;
        self.files.push(path);
        if let Some((iteration, error)) = self.diverged {
            return Err(Error::Diverged { iteration, error });
        }
        Ok(self)
    }
}

/// Transfer pair for a selector; a rank-deficient PCA sample keeps its numerical rank.
pub fn build_transfer(selector: &CoarseSelector, p: &SubstructuredProblem) -> Result<TransferPair> {
    match (selector.build(&p.operator), selector) {
        (Err(Error::DegenerateCoarseSpace { rank, requested }), CoarseSelector::Pca(params)) if rank > 0 => {
            log::warn!("pca coarse space has rank {rank} < {requested}; keeping {rank} vectors");
            let reduced = PcaParams {
                keep: Some(rank),
                ..*params
            };
            CoarseSelector::Pca(reduced).build(&p.operator)
        }
        (r, _) => r,
    }
}

fn label(cfg: &ExperimentConfig, n_ov: usize, coarse: &str) -> RunLabel {
    RunLabel {
        method: cfg.method.name().to_string(),
        level: cfg.level,
        n_ov,
        n1: cfg.solver.n1,
        n2: cfg.solver.n2,
        coarse: coarse.to_string(),
    }
}

/// Runs one configured solve on an assembled problem.
pub fn solve_problem(cfg: &ExperimentConfig, p: &SubstructuredProblem) -> Result<(IterationHistory, String)> {
    let (_, exact) = p.reference()?;
    let op = &p.operator;
    let v0 = vec![0.0; op.dim()];
    op.reset_counter();
    if cfg.method == Method::Psm {
        return Ok((psm_solve(op, &v0, cfg.solver, Some(&exact))?, "none".into()));
    }
    if cfg.method == Method::Gmls {
        let h = MultilevelHierarchy::new(p, cfg.levels, cfg.coarse_operator)?;
        let desc = format!("geometric:levels={}:{}", cfg.levels, kind_name(cfg.coarse_operator));
        return Ok((gmls_solve(op, &h, &v0, cfg.solver, Some(&exact))?, desc));
    }
    let transfer = build_transfer(&cfg.coarse, p)?;
    let coarse = build_coarse_operator(p, &transfer, cfg.coarse_operator)?;
    let desc = transfer.descriptor();
    let h = match cfg.method {
        Method::S2s | Method::G2s => two_level_solve(op, &transfer, &coarse, &v0, cfg.solver, Some(&exact))?,
        Method::S2sB1 => s2s_b1_solve(op, &transfer, &coarse, &v0, cfg.solver, Some(&exact))?,
        Method::S2sB2 => s2s_b2_solve(op, &transfer, &coarse, &v0, cfg.solver, Some(&exact))?,
        Method::Psm | Method::Gmls => unreachable!(),
    };
    Ok((h, desc))
}

fn kind_name(k: CoarseKind) -> &'static str {
    match k {
        CoarseKind::Galerkin => "galerkin",
        CoarseKind::Rediscretized => "rediscretized",
    }
}

fn is_plain_laplace(p: &ProblemSpec) -> bool {
    p.operator == OperatorKind::Laplace
}

/// Theoretical radius of the two-level operator, when a closed form applies.
fn two_level_theory(
    p: &SubstructuredProblem,
    spec: &DecompositionSpec,
    coarse: &CoarseSelector,
    kind: CoarseKind,
    n1: usize,
    n2: usize,
) -> Result<Option<f64>> {
    if !is_plain_laplace(&p.problem) {
        return Ok(None);
    }
    let dr = DiscreteRectangle::new(&p.volume.grid, spec);
    let (r1, r2) = (|k| dr.rho1(k), |k| dr.rho2(k));
    match (coarse, kind) {
        (CoarseSelector::Geometric, CoarseKind::Galerkin) => {
            if dr.is_symmetric() {
                Ok(Some(g2s_factor(dr.n, &r1, &r2, n1, n2).value))
            } else {
                let s = g2s_block_spectrum(dr.n, &r1, &r2, n1, n2)?;
                Ok(Some(s.iter().map(|z| z.norm()).fold(0.0, f64::max)))
            }
        }
        (CoarseSelector::Fourier { m } | CoarseSelector::Eigen { m }, _) if dr.is_symmetric() => {
            Ok(Some(s2s_factor(*m, n1, n2, &r1, &r2)))
        }
        _ => Ok(None),
    }
}

fn radius(m: &faer::Mat<f64>) -> Result<f64> {
    crate::linalg::spectral_radius(m)
}

/// Error propagation of one two-level cycle, applied matrix-free.
fn two_level_error(
    p: &SubstructuredProblem,
    t: &TransferPair,
    c: &CoarseOperator,
    e: &[f64],
    n1: usize,
    n2: usize,
) -> Result<Vec<f64>> {
    let op = &p.operator;
    let mut u = e.to_vec();
    for _ in 0..n1 {
        u = op.apply_g_uncounted(&u)?;
    }
    let au = op.apply_a_uncounted(&u)?;
    let d = t.prolong(&c.solve(&t.restrict(&au)));
    u.iter_mut().zip(&d).for_each(|(a, b)| *a -= b);
    for _ in 0..n2 {
        u = op.apply_g_uncounted(&u)?;
    }
    Ok(u)
}

/// Spectral reports for one assembled problem.
pub fn spectra_for(cfg: &ExperimentConfig, p: &SubstructuredProblem) -> Result<Vec<SpectralReport>> {
    let spec = p.operator.decomposition.spec;
    let n_ov = spec.n_ov();
    let level = cfg.level;
    let op = &p.operator;
    let (n1, n2) = (cfg.solver.n1, cfg.solver.n2);
    let mut out = Vec::new();
    let dense = op.dim() <= cfg.dense_cap;
    let theory_g = if is_plain_laplace(&p.problem) {
        let dr = DiscreteRectangle::new(&p.volume.grid, &spec);
        Some((dr.rho1(1) * dr.rho2(1)).sqrt())
    } else {
        None
    };
    let g = if dense { Some(assemble_dense_g(op, cfg.dense_cap)?) } else { None };
    let rho_g = match &g {
        Some(g) => radius(g)?,
        None => power_iteration_radius(|x| op.apply_g_uncounted(x), op.dim(), 1e-6, 10_000, cfg.seed)?,
    };
    out.push(SpectralReport::from_radius("G_s", n_ov, level, rho_g, theory_g));

    if cfg.method != Method::Psm && cfg.method != Method::Gmls {
        let transfer = build_transfer(&cfg.coarse, p)?;
        let coarse = build_coarse_operator(p, &transfer, cfg.coarse_operator)?;
        let rho_t = match &g {
            Some(g) => {
                let t = assemble_two_level(g, &transfer.p_matrix(), &transfer.r_matrix(), &coarse.matrix, n1, n2)?;
                radius(&t)?
            }
            None => power_iteration_radius(
                |x| two_level_error(p, &transfer, &coarse, x, n1, n2),
                op.dim(),
                1e-6,
                10_000,
                cfg.seed,
            )?,
        };
        let theory = two_level_theory(p, &spec, &cfg.coarse, cfg.coarse_operator, n1, n2)?;
        out.push(
            SpectralReport::from_radius("T_2L", n_ov, level, rho_t, theory).with_cycle(n1, n2, &transfer.descriptor()),
        );
    }

    let ras = RasTwoGrid::new(&p.volume, &op.decomposition)?;
    let rho_ras = if dense {
        ras.spectral_radius()?
    } else {
        power_iteration_radius(|x| ras.apply(x), p.volume.grid.n_volume(), 1e-6, 10_000, cfg.seed)?
    };
    out.push(SpectralReport::from_radius("G_RAS_2L", n_ov, level, rho_ras, None).with_cycle(1, 0, "volume_geometric"));

    if cfg.augmented {
        let transfer = TransferPair::geometric(op.split())?;
        let set = assemble_augmented(op, &transfer, DEFAULT_AUGMENTED_CAP)?;
        out.push(SpectralReport::from_radius("G_a", n_ov, level, radius(&set.g_a)?, Some(rho_g)));
        let rho_s2l = radius(&set.g_s_2l)?;
        out.push(
            SpectralReport::from_radius("G_s_2L", n_ov, level, rho_s2l, None).with_cycle(1, 0, "geometric"),
        );
        out.push(
            SpectralReport::from_radius("G_a_2L", n_ov, level, radius(&set.g_a_2l)?, Some(rho_s2l))
                .with_cycle(1, 0, "geometric"),
        );
    }
    Ok(out)
}

/// Continuous `ρ_j(k)` table.
pub fn theory_table(t: &TheoryParams) -> Result<CsvTable> {
    let mut table = CsvTable::new(&["k", "rho1", "rho2", "l1", "l2", "delta", "l_tilde"]);
    for k in 1..=t.kmax {
        table.push(vec![
            k.to_string(),
            fmt_f64(rho_rectangle(k, t.l1, t.delta, t.l_tilde)?),
            fmt_f64(rho_rectangle(k, t.l2, t.delta, t.l_tilde)?),
            fmt_f64(t.l1),
            fmt_f64(t.l2),
            fmt_f64(t.delta),
            fmt_f64(t.l_tilde),
        ]);
    }
    Ok(table)
}

/// Runs one experiment and writes its artifacts below `root`.
pub fn run(cfg: &ExperimentConfig, root: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let dir = cfg.output_dir(root);
    let mut out = RunOutcome::default();
    match cfg.mode {
        Mode::TheoryTable => {
            let table = theory_table(&cfg.theory)?;
            std::fs::create_dir_all(&dir)?;
            out.write(&dir, "theory.csv", &table, cfg.seed)?;
        }
        Mode::Solve => {
            let p = SubstructuredProblem::new(&cfg.problem, cfg.level, cfg.decomposition_spec()?)?;
            let (h, desc) = solve_problem(cfg, &p)?;
            let table = history_table(&h, &label(cfg, p.operator.decomposition.spec.n_ov(), &desc), cfg.timings);
            std::fs::create_dir_all(&dir)?;
            out.write(&dir, &format!("history_{}.csv", cfg.method.name()), &table, cfg.seed)?;
            out.note(&h, cfg.method.name());
        }
        Mode::Spectra => {
            let p = SubstructuredProblem::new(&cfg.problem, cfg.level, cfg.decomposition_spec()?)?;
            let reports = spectra_for(cfg, &p)?;
            std::fs::create_dir_all(&dir)?;
            out.write(&dir, "spectra.csv", &spectral_table(&reports), cfg.seed)?;
            for r in &reports {
                out.summary.push(format!("{}: rho = {:.6e}", r.operator, r.rho_numeric));
            }
        }
    }
    out.finish(&dir, "subdd run", &cfg.to_key_values())
}

/// Keys a recipe sets unless the user overrides them.
pub fn recipe_defaults(name: &str) -> Result<KeyValues> {
    let text = match name {
        "fig_convergence_rect" => "level = 6\nn_ov = 2\ntol = 1e-12\nmaxit = 1000\noutput = fig_convergence_rect\n",
        "fig_radii_sweep" => "level = 5\nmode = spectra\noutput = fig_radii_sweep\n",
        "tab_iterations" => "tol = 1e-10\nn_ov = 2\noutput = tab_iterations\n",
        "jump_channels" => "problem = channels\nlevel = 5\nn_ov = 2\ntol = 1e-8\nmaxit = 100\noutput = jump_channels\n",
        _ => {
            return Err(Error::validation(
                "recipe",
                format!("unknown recipe '{name}' (expected one of {})", RECIPES.join(", ")),
            ))
        }
    };
    KeyValues::parse(text)
}

fn with_method(base: &ExperimentConfig, method: Method, coarse: CoarseSelector) -> ExperimentConfig {
    let mut c = base.clone();
    c.method = method;
    c.coarse = coarse;
    c.coarse_operator = CoarseKind::Galerkin;
    c
}

fn tag(cfg: &ExperimentConfig) -> String {
    match cfg.method {
        Method::S2s => format!("s2s_{}", cfg.coarse.descriptor().replace(':', "_")),
        m => m.name().replace('-', "_"),
    }
}

/// Solves with one method and records its history file.
fn recipe_solve(
    cfg: &ExperimentConfig,
    p: &SubstructuredProblem,
    file: &str,
    dir: &Path,
    out: &mut RunOutcome,
) -> Result<IterationHistory> {
    let (h, desc) = solve_problem(cfg, p)?;
    let table = history_table(&h, &label(cfg, p.operator.decomposition.spec.n_ov(), &desc), cfg.timings);
    out.write(dir, file, &table, cfg.seed)?;
    out.note(&h, file);
    Ok(h)
}

fn summary_row(cfg: &ExperimentConfig, n_ov: usize, coarse: &str, h: &IterationHistory, extra: &str) -> Vec<String> {
    vec![
        cfg.method.name().to_string(),
        cfg.level.to_string(),
        n_ov.to_string(),
        cfg.solver.n1.to_string(),
        cfg.solver.n2.to_string(),
        coarse.to_string(),
        extra.to_string(),
        h.iterations().to_string(),
        format!("{:?}", h.status).to_lowercase(),
        h.records.last().map(|r| r.subdomain_solves).unwrap_or(0).to_string(),
    ]
}

const SUMMARY_HEADER: &[&str] = &[
    "method",
    "level",
    "n_ov",
    "n1",
    "n2",
    "coarse",
    "parameter",
    "iterations",
    "status",
    "subdomain_solves",
];

/// Parses a comma-separated list key (e.g. `n_ov_list = 1,3,5`).
fn list<T: std::str::FromStr>(kv: &KeyValues, key: &str, default: &str) -> Result<Vec<T>> {
    kv.get(key)
        .unwrap_or(default)
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::validation(key, format!("cannot parse list entry '{s}'")))
        })
        .collect()
}

/// Runs a named recipe. `user` holds the caller's keys; list keys
/// (`n_ov_list`, `level_list`, `alpha_list`) select sweep values.
pub fn reproduce(name: &str, user: &KeyValues, root: &Path) -> Result<RunOutcome> {
    let mut kv = recipe_defaults(name)?;
    let mut lists = KeyValues::new();
    for k in user.keys() {
        let v = user.get(k).unwrap();
        if k.ends_with("_list") {
            lists.set(k, v);
        } else {
            kv.set(k, v);
        }
    }
    let base = ExperimentConfig::from_key_values(&kv)?;
    let dir = base.output_dir(root);
    let mut out = RunOutcome::default();
    match name {
        "fig_convergence_rect" => {
            let p = SubstructuredProblem::new(&base.problem, base.level, base.decomposition_spec()?)?;
            let runs = vec![
                with_method(&base, Method::Psm, CoarseSelector::Geometric),
                with_method(&base, Method::G2s, CoarseSelector::Geometric),
                with_method(&base, Method::S2s, CoarseSelector::Fourier { m: 5 }),
                with_method(&base, Method::S2s, CoarseSelector::Fourier { m: 20 }),
                with_method(&base, Method::S2s, CoarseSelector::Pca(PcaParams::new(5, base.seed))),
                with_method(&base, Method::S2sB1, CoarseSelector::Geometric),
                with_method(&base, Method::S2sB2, CoarseSelector::Geometric),
                with_method(&base, Method::Gmls, CoarseSelector::Geometric),
            ];
            std::fs::create_dir_all(&dir)?;
            for c in &runs {
                recipe_solve(c, &p, &format!("conv_{}.csv", tag(c)), &dir, &mut out)?;
            }
        }
        "fig_radii_sweep" => {
            let n_ovs: Vec<usize> = list(&lists, "n_ov_list", "1,2,3,4,5,6,7")?;
            let mut by_op: Vec<(String, Vec<SpectralReport>)> = Vec::new();
            let mut cfg = with_method(&base, Method::G2s, CoarseSelector::Geometric);
            cfg.solver.n1 = 1;
            cfg.solver.n2 = 0;
            for n_ov in n_ovs {
                cfg.decomposition = DecompositionChoice::Centered { n_ov };
                let p = SubstructuredProblem::new(&cfg.problem, cfg.level, cfg.decomposition_spec()?)?;
                for mut r in spectra_for(&cfg, &p)? {
                    if r.operator == "T_2L" {
                        r.operator = "G_s_2L".into();
                    }
                    match by_op.iter_mut().find(|(o, _)| *o == r.operator) {
                        Some((_, v)) => v.push(r),
                        None => by_op.push((r.operator.clone(), vec![r])),
                    }
                }
            }
            std::fs::create_dir_all(&dir)?;
            for (op, reports) in &by_op {
                out.write(&dir, &format!("radii_{}.csv", op.to_lowercase()), &spectral_table(reports), base.seed)?;
            }
        }
        "tab_iterations" => {
            let levels: Vec<u32> = list(&lists, "level_list", "5,6,7")?;
            let mut summary = CsvTable::new(SUMMARY_HEADER);
            std::fs::create_dir_all(&dir)?;
            for level in levels {
                let mut lb = base.clone();
                lb.level = level;
                let p = SubstructuredProblem::new(&lb.problem, level, lb.decomposition_spec()?)?;
                let n_ov = p.operator.decomposition.spec.n_ov();
                for m in [Method::G2s, Method::S2sB1, Method::S2sB2] {
                    let c = with_method(&lb, m, CoarseSelector::Geometric);
                    let h = recipe_solve(&c, &p, &format!("tab_{}_l{level}.csv", tag(&c)), &dir, &mut out)?;
                    summary.push(summary_row(&c, n_ov, "geometric", &h, ""));
                }
            }
            out.write(&dir, "tab_iterations.csv", &summary, base.seed)?;
        }
        "jump_channels" => {
            let alphas: Vec<f64> = list(&lists, "alpha_list", "1e2,1e4,1e6")?;
            let mut summary = CsvTable::new(SUMMARY_HEADER);
            std::fs::create_dir_all(&dir)?;
            for alpha in alphas {
                let mut c = with_method(&base, Method::G2s, CoarseSelector::Geometric);
                c.problem = ProblemSpec::channels(alpha);
                c.problem.rhs = base.problem.rhs;
                let p = SubstructuredProblem::new(&c.problem, c.level, c.decomposition_spec()?)?;
                let h = recipe_solve(&c, &p, &format!("channels_g2s_alpha{alpha:e}.csv"), &dir, &mut out)?;
                summary.push(summary_row(&c, p.operator.decomposition.spec.n_ov(), "geometric", &h, &fmt_f64(alpha)));
            }
            out.write(&dir, "jump_channels.csv", &summary, base.seed)?;
        }
        _ => unreachable!(),
    }
    let mut record = base.to_key_values();
    for k in lists.keys() {
        record.set(k, lists.get(k).unwrap());
    }
    out.finish(&dir, &format!("subdd reproduce {name}"), &record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("subdd-runner-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn defaults_are_valid() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg.method, Method::G2s);
        assert_eq!(cfg.coarse, CoarseSelector::Geometric);
        assert_eq!(cfg.level, 5);
    }

    #[test]
    fn level_one_is_rejected_without_output() {
        let root = tmp("invalid");
        let err = ExperimentConfig::parse("level = 1").unwrap_err();
        assert_eq!(exit_code(&err), 2);
        assert!(!root.exists());
    }

    #[test]
    fn unknown_keys_and_selectors_are_rejected() {
        for text in ["levle = 4", "method = multigrid", "coarse = wavelet:3", "method = g2s\ncoarse = fourier:3"] {
            let err = ExperimentConfig::parse(text).unwrap_err();
            assert_eq!(exit_code(&err), 2, "{text}");
        }
    }

    #[test]
    fn pca_inherits_config_seed() {
        let cfg = ExperimentConfig::parse("method = s2s\ncoarse = pca:4\nseed = 17").unwrap();
        match cfg.coarse {
            CoarseSelector::Pca(p) => assert_eq!(p.seed, 17),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_round_trips_through_key_values() {
        let cfg = ExperimentConfig::parse("method = s2s-b1\nlevel = 4\nn_ov = 3\nn2 = 1").unwrap();
        let again = ExperimentConfig::from_key_values(&cfg.to_key_values()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn theory_table_spot_value() {
        let t = theory_table(&TheoryParams::default()).unwrap();
        let rho: f64 = t.rows[0][1].parse().unwrap();
        assert!((rho - 0.532).abs() < 5e-4);
    }

    #[test]
    fn solve_is_deterministic() {
        let root = tmp("det");
        let text = "method = s2s\ncoarse = pca:3\nlevel = 4\nn_ov = 3\nseed = 9\noutput = a";
        let cfg = ExperimentConfig::parse(text).unwrap();
        let o1 = run(&cfg, &root).unwrap();
        let first = std::fs::read_to_string(&o1.files[0]).unwrap();
        let o2 = run(&cfg, &root).unwrap();
        assert_eq!(first, std::fs::read_to_string(&o2.files[0]).unwrap());
        assert!(first.starts_with("# seed=9\n"));
        let _ = std::fs::remove_dir_all(&root);
    }

    #[test]
    fn divergence_maps_to_its_exit_code() {
        let err = Error::Diverged {
            iteration: 4,
            error: 1e3,
        };
        assert_eq!(exit_code(&err), 3);
        assert_eq!(exit_code(&Error::SizeCap { size: 5, cap: 4 }), 4);
    }
}
