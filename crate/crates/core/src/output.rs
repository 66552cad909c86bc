//! CSV artifacts: iteration histories, spectral reports and theory tables.
//!
//! Every file starts with a `# seed=<u64>` comment line followed by a header.
//! Floats use scientific notation with 17 significant digits.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::solvers::IterationHistory;
use crate::spectral::SpectralReport;

pub const HISTORY_HEADER: &[&str] = &[
    "method",
    "level",
    "n_ov",
    "n1",
    "n2",
    "coarse",
    "iteration",
    "rel_error",
    "rel_residual",
    "wall_time",
    "subdomain_solves",
];

pub const SPECTRAL_HEADER: &[&str] = &[
    "operator",
    "n_ov",
    "level",
    "n1",
    "n2",
    "coarse",
    "rho_numeric",
    "rho_theory",
    "gap",
];

/// Round-trip exact float formatting; empty for missing values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string().to_lowercase()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Header plus string rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn append(&mut self, other: CsvTable) {
        self.rows.extend(other.rows);
    }

    /// File contents, seed comment included.
    pub fn render(&self, seed: u64) -> String {
        let mut s = format!("# seed={seed}\n{}\n", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path, seed: u64) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.render(seed).as_bytes())?;
        Ok(())
    }
}

/// Columns identifying a run in every history row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLabel {
    pub method: String,
    pub level: u32,
    pub n_ov: usize,
    pub n1: usize,
    pub n2: usize,
    pub coarse: String,
}

/// History rows; `wall_time` is left empty unless `timings` is set so that
/// repeated runs produce identical files.
pub fn history_table(history: &IterationHistory, label: &RunLabel, timings: bool) -> CsvTable {
    let mut t = CsvTable::new(HISTORY_HEADER);
    for r in &history.records {
        t.push(vec![
            label.method.clone(),
            label.level.to_string(),
            label.n_ov.to_string(),
            label.n1.to_string(),
            label.n2.to_string(),
            label.coarse.clone(),
            r.iteration.to_string(),
            fmt_opt(r.rel_error),
            fmt_opt(r.rel_residual),
            if timings { fmt_f64(r.elapsed) } else { String::new() },
            r.subdomain_solves.to_string(),
        ]);
    }
    t
}

pub fn spectral_table(reports: &[SpectralReport]) -> CsvTable {
    let mut t = CsvTable::new(SPECTRAL_HEADER);
    for r in reports {
        t.push(vec![
            r.operator.clone(),
            r.n_ov.to_string(),
            r.level.to_string(),
            r.n1.to_string(),
            r.n2.to_string(),
            r.coarse.clone(),
            fmt_f64(r.rho_numeric),
            fmt_opt(r.rho_theory),
            fmt_opt(r.gap()),
        ]);
    }
    t
}
