//! Command-line entry point.
//!
//! ```text
//! subdd run --config exp.cfg --level 6 --method g2s
//! subdd run --set mode=theory-table
//! subdd reproduce fig_radii_sweep --set n_ov_list=1,3,5
//! ```
//!
//! Artifacts go below `$SUBDD_OUTPUT_DIR` (default: current directory).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use subdd::config::KeyValues;
use subdd::runner::{self, ExperimentConfig};
use subdd::Error;

#[derive(Parser, Debug)]
#[command(name = "subdd", version, about = "Substructured two-level and multilevel Schwarz methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment (solve, spectra or theory-table).
    Run(Overrides),
    /// Run a named recipe: fig_convergence_rect, fig_radii_sweep, tab_iterations, jump_channels.
    Reproduce {
        recipe: String,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Debug)]
struct Overrides {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root (overrides SUBDD_OUTPUT_DIR).
    #[arg(long)]
    output_root: Option<PathBuf>,
    /// Arbitrary key=value override; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    rhs: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    n_ov: Option<usize>,
    #[arg(long)]
    left_column: Option<usize>,
    #[arg(long)]
    overlap_cells: Option<usize>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    coarse: Option<String>,
    #[arg(long)]
    coarse_operator: Option<String>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    maxit: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<String>,
    /// Record wall-clock times in histories.
    #[arg(long)]
    timings: bool,
}

impl Overrides {
    fn key_values(&self) -> subdd::Result<KeyValues> {
        let mut kv = match &self.config {
            Some(p) => KeyValues::from_file(p)?,
            None => KeyValues::new(),
        };
        let flags: [(&str, Option<String>); 19] = [
            ("mode", self.mode.clone()),
            ("problem", self.problem.clone()),
            ("rhs", self.rhs.clone()),
            ("alpha", self.alpha.map(|v| v.to_string())),
            ("level", self.level.map(|v| v.to_string())),
            ("n_ov", self.n_ov.map(|v| v.to_string())),
            ("left_column", self.left_column.map(|v| v.to_string())),
            ("overlap_cells", self.overlap_cells.map(|v| v.to_string())),
            ("method", self.method.clone()),
            ("coarse", self.coarse.clone()),
            ("coarse_operator", self.coarse_operator.clone()),
            ("levels", self.levels.map(|v| v.to_string())),
            ("n1", self.n1.map(|v| v.to_string())),
            ("n2", self.n2.map(|v| v.to_string())),
            ("tol", self.tol.map(|v| v.to_string())),
            ("maxit", self.maxit.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("output", self.output.clone()),
            ("timings", self.timings.then(|| "true".to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                kv.set(k, v);
            }
        }
        for pair in &self.set {
            kv.set_pair(pair)?;
        }
        Ok(kv)
    }

    fn root(&self) -> PathBuf {
        self.output_root.clone().unwrap_or_else(runner::output_root_from_env)
    }
}

fn execute(cli: &Cli) -> subdd::Result<runner::RunOutcome> {
    match &cli.command {
        Command::Run(o) => {
            let cfg = ExperimentConfig::from_key_values(&o.key_values()?)?;
            runner::run(&cfg, &o.root())
        }
        Command::Reproduce { recipe, overrides } => runner::reproduce(recipe, &overrides.key_values()?, &overrides.root()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            for s in &outcome.summary {
                println!("{s}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Diverged { .. } = e {
                eprintln!("partial histories were written before stopping");
            }
            ExitCode::from(runner::exit_code(&e) as u8)
        }
    }
}
