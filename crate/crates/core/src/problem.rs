//! Rectangular model problem and its finite-difference discretization.
//!
//! The domain is `(x_min, x_min + width) x (0, height)` with homogeneous
//! Dirichlet data. Interior nodes are numbered column by column
//! (`index = ix * n_y + iy`), so every vertical grid line is a contiguous
//! block of unknowns.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SparseLu};

/// Which elliptic operator is discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `-Δu`; the diffusion and advection fields are ignored.
    Laplace,
    /// `-div(α∇u)`.
    DiffusionVariable,
    /// `-div(α∇u) + a·∇u`.
    AdvectionDiffusion,
}

impl OperatorKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "laplace" => Ok(OperatorKind::Laplace),
            "diffusion_variable" | "diffusion" => Ok(OperatorKind::DiffusionVariable),
            "advection_diffusion" => Ok(OperatorKind::AdvectionDiffusion),
            _ => Err(Error::validation("operator", format!("unknown operator kind '{s}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::Laplace => "laplace",
            OperatorKind::DiffusionVariable => "diffusion_variable",
            OperatorKind::AdvectionDiffusion => "advection_diffusion",
        }
    }
}

/// Axis-aligned box with its own diffusion coefficient (closed box).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub value: f64,
}

impl ChannelBox {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

/// Piecewise constant diffusion coefficient: background plus boxes.
/// The first box containing a point wins.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionField {
    pub background: f64,
    pub channels: Vec<ChannelBox>,
}

impl Default for DiffusionField {
    fn default() -> Self {
        DiffusionField {
            background: 1.0,
            channels: Vec::new(),
        }
    }
}

impl DiffusionField {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.channels
            .iter()
            .find(|c| c.contains(x, y))
            .map(|c| c.value)
            .unwrap_or(self.background)
    }
}

/// Closed-form advection fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdvectionField {
    Zero,
    Constant { ax: f64, ay: f64 },
    /// `a = (10 x^3, -20 - 30 y^2)`.
    Cubic,
}

impl AdvectionField {
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        match *self {
            AdvectionField::Zero => (0.0, 0.0),
            AdvectionField::Constant { ax, ay } => (ax, ay),
            AdvectionField::Cubic => (10.0 * x * x * x, -20.0 - 30.0 * y * y),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["zero"] | ["none"] => Ok(AdvectionField::Zero),
            ["cubic"] => Ok(AdvectionField::Cubic),
            ["constant", ax, ay] => Ok(AdvectionField::Constant {
                ax: parse_f64("advection", ax)?,
                ay: parse_f64("advection", ay)?,
            }),
            _ => Err(Error::validation("advection", format!("unknown field '{s}'"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            AdvectionField::Zero => "zero".into(),
            AdvectionField::Cubic => "cubic".into(),
            AdvectionField::Constant { ax, ay } => format!("constant:{ax}:{ay}"),
        }
    }
}

/// Named right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsKind {
    Zero,
    One,
    /// `sin(2πx) sin(2πy)`.
    Sin2Pi,
    /// `sin(2πx) sin(2πy) sin(2πxy)`.
    Sin2PiXy,
    /// Forcing of the smooth solution `sin(π(x-x_min)/W) sin(πy/H)`.
    SineMode,
}

impl RhsKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(RhsKind::Zero),
            "one" => Ok(RhsKind::One),
            "sin2pi" => Ok(RhsKind::Sin2Pi),
            "sin2pi_xy" => Ok(RhsKind::Sin2PiXy),
            "sine_mode" => Ok(RhsKind::SineMode),
            _ => Err(Error::validation("rhs", format!("unknown rhs '{s}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RhsKind::Zero => "zero",
            RhsKind::One => "one",
            RhsKind::Sin2Pi => "sin2pi",
            RhsKind::Sin2PiXy => "sin2pi_xy",
            RhsKind::SineMode => "sine_mode",
        }
    }
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::validation(field, format!("'{s}' is not a number")))
}

/// Continuous problem definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub width: f64,
    pub height: f64,
    /// Left end of the domain; the right end is `x_min + width`.
    pub x_min: f64,
    pub operator: OperatorKind,
    pub diffusion: DiffusionField,
    pub advection: AdvectionField,
    pub rhs: RhsKind,
}

impl ProblemSpec {
    /// Laplace problem on `(-width/2, width/2) x (0, height)`.
    pub fn laplace(width: f64, height: f64, rhs: RhsKind) -> Self {
        ProblemSpec {
            width,
            height,
            x_min: -0.5 * width,
            operator: OperatorKind::Laplace,
            diffusion: DiffusionField::default(),
            advection: AdvectionField::Zero,
            rhs,
        }
    }

    /// The `(-1,1) x (0,1)` rectangle.
    pub fn rectangle(rhs: RhsKind) -> Self {
        Self::laplace(2.0, 1.0, rhs)
    }

    /// Diffusion on `(-1,1) x (0,1)` with two horizontal channels of
    /// coefficient `alpha` crossing the middle of the domain.
    pub fn channels(alpha: f64) -> Self {
        let channel = |y_min: f64, y_max: f64| ChannelBox {
            x_min: -0.75,
            x_max: 0.75,
            y_min,
            y_max,
            value: alpha,
        };
        ProblemSpec {
            width: 2.0,
            height: 1.0,
            x_min: -1.0,
            operator: OperatorKind::DiffusionVariable,
            diffusion: DiffusionField {
                background: 1.0,
                channels: vec![channel(0.25, 0.375), channel(0.625, 0.75)],
            },
            advection: AdvectionField::Zero,
            rhs: RhsKind::Sin2PiXy,
        }
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.width
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::validation("width", "must be positive"));
        }
        if !(self.height > 0.0) || !self.height.is_finite() {
            return Err(Error::validation("height", "must be positive"));
        }
        if self.operator != OperatorKind::Laplace {
            if !(self.diffusion.background > 0.0) {
                return Err(Error::validation("alpha", "background must be positive"));
            }
            let eps = 1e-12 * self.width.max(self.height);
            for c in &self.diffusion.channels {
                if !(c.value > 0.0) {
                    return Err(Error::validation("channels", "channel value must be positive"));
                }
                if c.x_min > c.x_max || c.y_min > c.y_max {
                    return Err(Error::validation("channels", "empty channel box"));
                }
                if c.x_min < self.x_min - eps
                    || c.x_max > self.x_max() + eps
                    || c.y_min < -eps
                    || c.y_max > self.height + eps
                {
                    return Err(Error::validation("channels", "channel box leaves the domain"));
                }
            }
        }
        Ok(())
    }

    pub fn alpha(&self, x: f64, y: f64) -> f64 {
        match self.operator {
            OperatorKind::Laplace => 1.0,
            _ => self.diffusion.eval(x, y),
        }
    }

    pub fn advection_at(&self, x: f64, y: f64) -> (f64, f64) {
        match self.operator {
            OperatorKind::AdvectionDiffusion => self.advection.eval(x, y),
            _ => (0.0, 0.0),
        }
    }

    /// Smooth exact solution, when the rhs is `SineMode` and the operator
    /// has constant coefficients and no advection.
    pub fn exact_solution(&self, x: f64, y: f64) -> Option<f64> {
        if self.rhs != RhsKind::SineMode || !self.has_constant_diffusion() {
            return None;
        }
        Some((PI * (x - self.x_min) / self.width).sin() * (PI * y / self.height).sin())
    }

    fn has_constant_diffusion(&self) -> bool {
        match self.operator {
            OperatorKind::Laplace => true,
            OperatorKind::DiffusionVariable => self.diffusion.channels.is_empty(),
            OperatorKind::AdvectionDiffusion => false,
        }
    }

    pub fn rhs_at(&self, x: f64, y: f64) -> f64 {
        let tp = 2.0 * PI;
        match self.rhs {
            RhsKind::Zero => 0.0,
            RhsKind::One => 1.0,
            RhsKind::Sin2Pi => (tp * x).sin() * (tp * y).sin(),
            RhsKind::Sin2PiXy => (tp * x).sin() * (tp * y).sin() * (tp * x * y).sin(),
            RhsKind::SineMode => {
                let kx = PI / self.width;
                let ky = PI / self.height;
                let alpha = self.alpha(x, y);
                alpha * (kx * kx + ky * ky) * (kx * (x - self.x_min)).sin() * (ky * y).sin()
            }
        }
    }
}

/// Uniform grid with `n_y = 2^level - 1` interior points per vertical line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub level: u32,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub x_min: f64,
}

impl GridSpec {
    pub fn new(problem: &ProblemSpec, level: u32) -> Result<Self> {
        problem.validate()?;
        if level == 0 || level > 24 {
            return Err(Error::validation("level", format!("{level} out of range 1..=24")));
        }
        let ny = (1usize << level) - 1;
        let h = problem.height / (ny + 1) as f64;
        let cells = problem.width / h;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-12 * cells || rounded < 2.0 {
            return Err(Error::validation(
                "width",
                format!("width/h = {cells} is not an integer >= 2 at level {level}"),
            ));
        }
        Ok(GridSpec {
            level,
            nx: rounded as usize - 1,
            ny,
            h,
            x_min: problem.x_min,
        })
    }

    /// Number of volume unknowns.
    pub fn n_volume(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + (ix + 1) as f64 * self.h
    }

    pub fn y(&self, iy: usize) -> f64 {
        (iy + 1) as f64 * self.h
    }

    /// Column index of the grid line at abscissa `x`, if it is an interior line.
    pub fn column_at(&self, x: f64) -> Option<usize> {
        let t = (x - self.x_min) / self.h;
        let r = t.round();
        if (t - r).abs() > 1e-9 || r < 1.0 || r > self.nx as f64 {
            return None;
        }
        Some(r as usize - 1)
    }
}

/// Assembled volume operator `A_v` on all interior nodes.
#[derive(Debug, Clone)]
pub struct VolumeMatrix {
    pub grid: GridSpec,
    pub matrix: CsrMatrix,
}

/// Harmonic average of `α` along the link from `(x0, y0)` to `(x1, y1)`,
/// sampled at the midpoints of four equal sub-segments. A coefficient jump
/// located on a grid node leaves every link on one side of it.
fn face_coefficient(problem: &ProblemSpec, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    const SAMPLES: [f64; 4] = [0.125, 0.375, 0.625, 0.875];
    let inv: f64 = SAMPLES
        .iter()
        .map(|t| 1.0 / problem.alpha(x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
        .sum();
    SAMPLES.len() as f64 / inv
}

/// Assembles the 5-point operator (with upwind advection) and the discrete rhs.
pub fn assemble_volume(problem: &ProblemSpec, grid: &GridSpec) -> Result<(VolumeMatrix, Vec<f64>)> {
    problem.validate()?;
    let expected = GridSpec::new(problem, grid.level)?;
    if expected.nx != grid.nx || expected.ny != grid.ny || (expected.x_min - grid.x_min).abs() > 1e-14 {
        return Err(Error::validation("grid", "grid does not match the problem dimensions"));
    }
    let (nx, ny, h) = (grid.nx, grid.ny, grid.h);
    let inv_h2 = 1.0 / (h * h);
    let mut triplets = Vec::with_capacity(5 * grid.n_volume());
    let mut rhs = vec![0.0; grid.n_volume()];
    for ix in 0..nx {
        for iy in 0..ny {
            let (x, y) = (grid.x(ix), grid.y(iy));
            let row = grid.index(ix, iy);
            let neighbours = [
                (x - h, y, ix.checked_sub(1).map(|j| grid.index(j, iy))),
                (x + h, y, (ix + 1 < nx).then(|| grid.index(ix + 1, iy))),
                (x, y - h, iy.checked_sub(1).map(|j| grid.index(ix, j))),
                (x, y + h, (iy + 1 < ny).then(|| grid.index(ix, iy + 1))),
            ];
            let mut diag = 0.0;
            for (xn, yn, col) in neighbours {
                let face = face_coefficient(problem, x, y, xn, yn) * inv_h2;
                if !(face > 0.0) || !face.is_finite() {
                    return Err(Error::validation("alpha", "coefficient must be positive and finite"));
                }
                diag += face;
                if let Some(c) = col {
                    triplets.push((row, c, -face));
                }
            }
            let (ax, ay) = problem.advection_at(x, y);
            for (a, back, fwd) in [
                (ax, neighbours[0].2, neighbours[1].2),
                (ay, neighbours[2].2, neighbours[3].2),
            ] {
                if a != 0.0 {
                    diag += a.abs() / h;
                    let upwind = if a > 0.0 { back } else { fwd };
                    if let Some(c) = upwind {
                        triplets.push((row, c, -a.abs() / h));
                    }
                }
            }
            triplets.push((row, row, diag));
            rhs[row] = problem.rhs_at(x, y);
        }
    }
    let matrix = CsrMatrix::from_triplets(grid.n_volume(), grid.n_volume(), &triplets);
    Ok((VolumeMatrix { grid: *grid, matrix }, rhs))
}

/// Exact discrete solution `A_v^{-1} f` by one sparse direct solve.
pub fn manufactured_solution(volume: &VolumeMatrix, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != volume.grid.n_volume() {
        return Err(Error::dimension("volume rhs", volume.grid.n_volume(), f.len()));
    }
    if f.iter().all(|&v| v == 0.0) {
        return Ok(vec![0.0; f.len()]);
    }
    let lu = SparseLu::new(&volume.matrix)?;
    let u = lu.solve(f);
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorization("volume solve produced non-finite values".into()));
    }
    Ok(u)
}

/// Samples the continuous exact solution on the grid, when known.
pub fn sample_exact(problem: &ProblemSpec, grid: &GridSpec) -> Option<Vec<f64>> {
    let mut out = vec![0.0; grid.n_volume()];
    for ix in 0..grid.nx {
        for iy in 0..grid.ny {
            out[grid.index(ix, iy)] = problem.exact_solution(grid.x(ix), grid.y(iy))?;
        }
    }
    Some(out)
}
