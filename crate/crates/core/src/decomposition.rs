//! Two-subdomain overlapping decomposition along vertical grid lines.
//!
//! `Γ2` is the left interface column and `Γ1 = Γ2 + overlap_cells` the
//! right one. Ω_1 holds every column strictly left of Γ1 and Ω_2 every
//! column strictly right of Γ2, so each interface is an interior column of
//! its own subdomain and a Dirichlet boundary of the other one.

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SparseLu};
use crate::problem::{GridSpec, VolumeMatrix};

/// Placement of the two interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecompositionSpec {
    /// Grid column of Γ2.
    pub left_interface_column: usize,
    /// Number of cells between Γ2 and Γ1 (`N_ov + 1`).
    pub overlap_cells: usize,
}

impl DecompositionSpec {
    pub fn new(left_interface_column: usize, overlap_cells: usize) -> Self {
        DecompositionSpec {
            left_interface_column,
            overlap_cells,
        }
    }

    /// Places the overlap around the middle column of the grid. The
    /// placement is symmetric for odd `n_ov`; for even `n_ov` Γ1 sits one
    /// cell further from the middle than Γ2.
    pub fn centered(grid: &GridSpec, n_ov: usize) -> Result<Self> {
        if grid.nx % 2 == 0 {
            return Err(Error::validation("decomposition", "grid has no middle column"));
        }
        let overlap_cells = n_ov + 1;
        let middle = (grid.nx - 1) / 2;
        let left = middle
            .checked_sub(overlap_cells / 2)
            .ok_or_else(|| Error::validation("n_ov", "overlap wider than the domain"))?;
        let spec = DecompositionSpec::new(left, overlap_cells);
        spec.validate(grid)?;
        Ok(spec)
    }

    pub fn right_interface_column(&self) -> usize {
        self.left_interface_column + self.overlap_cells
    }

    /// Interior grid points strictly inside the overlap.
    pub fn n_ov(&self) -> usize {
        self.overlap_cells.saturating_sub(1)
    }

    /// Half overlap width, `2δ = h (N_ov + 1)`.
    pub fn delta(&self, h: f64) -> f64 {
        0.5 * h * self.overlap_cells as f64
    }

    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if self.overlap_cells < 2 {
            return Err(Error::validation("n_ov", "at least one interior overlap column is required"));
        }
        if self.right_interface_column() >= grid.nx {
            return Err(Error::validation(
                "decomposition",
                format!(
                    "interface columns {}..{} exceed the {} grid columns",
                    self.left_interface_column,
                    self.right_interface_column(),
                    grid.nx
                ),
            ));
        }
        Ok(())
    }

    /// Column at or left of which the merged volume field is taken from Ω_1.
    pub fn midline_column(&self) -> usize {
        self.left_interface_column + self.overlap_cells / 2
    }
}

/// Which subdomain a solver belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Ω_1, the left subdomain, with Dirichlet interface Γ1.
    Left,
    /// Ω_2, the right subdomain, with Dirichlet interface Γ2.
    Right,
}

/// Factorized subdomain problem with its lift and trace maps.
#[derive(Debug)]
pub struct SubdomainSolver {
    pub side: Side,
    /// First volume column of the subdomain.
    pub first_column: usize,
    /// Number of volume columns in the subdomain.
    pub n_columns: usize,
    pub ny: usize,
    /// Principal submatrix `A_j` of the volume matrix.
    pub matrix: CsrMatrix,
    lu: SparseLu,
    /// Stencil couplings between the interface column and its neighbour column.
    pub lift_coefficients: Vec<f64>,
    /// Local column adjacent to the Dirichlet interface.
    pub lift_local_column: usize,
    /// Global column of the subdomain's Dirichlet interface.
    pub dirichlet_column: usize,
    /// Global column of the opposite interface (interior to this subdomain).
    pub trace_column: usize,
}

impl SubdomainSolver {
    /// Number of subdomain unknowns `N^a_j`.
    pub fn n_unknowns(&self) -> usize {
        self.n_columns * self.ny
    }

    /// Restriction of a volume vector to the subdomain unknowns.
    pub fn restrict<'a>(&self, volume: &'a [f64]) -> &'a [f64] {
        &volume[self.first_column * self.ny..(self.first_column + self.n_columns) * self.ny]
    }

    /// `E_j w`: rhs contribution of Dirichlet data `w` on the own interface.
    pub fn lift(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_unknowns()];
        let base = self.lift_local_column * self.ny;
        for (iy, (&c, &wi)) in self.lift_coefficients.iter().zip(w).enumerate() {
            out[base + iy] = c * wi;
        }
        out
    }

    /// `R_j u`: values of a subdomain vector on the opposite interface.
    pub fn trace(&self, u: &[f64]) -> Vec<f64> {
        let base = (self.trace_column - self.first_column) * self.ny;
        u[base..base + self.ny].to_vec()
    }

    /// `A_j^{-1}(f_j - E_j w)`; a missing `f_j` means zero forcing.
    pub fn dirichlet_solve(&self, w: &[f64], f: Option<&[f64]>) -> Result<Vec<f64>> {
        if w.len() != self.ny {
            return Err(Error::dimension("interface data", self.ny, w.len()));
        }
        let mut rhs = match f {
            Some(f) => {
                if f.len() != self.n_unknowns() {
                    return Err(Error::dimension("subdomain rhs", self.n_unknowns(), f.len()));
                }
                f.to_vec()
            }
            None => vec![0.0; self.n_unknowns()],
        };
        let base = self.lift_local_column * self.ny;
        for (iy, (&c, &wi)) in self.lift_coefficients.iter().zip(w).enumerate() {
            rhs[base + iy] -= c * wi;
        }
        Ok(self.lu.solve(&rhs))
    }

    /// Dense `E_j` (`N^a_j x N_j`).
    pub fn lift_matrix(&self) -> Mat<f64> {
        let base = self.lift_local_column * self.ny;
        Mat::from_fn(self.n_unknowns(), self.ny, |i, j| {
            if i == base + j {
                self.lift_coefficients[j]
            } else {
                0.0
            }
        })
    }

    /// Dense `R_j` (`N_j x N^a_j`).
    pub fn trace_matrix(&self) -> Mat<f64> {
        let base = (self.trace_column - self.first_column) * self.ny;
        Mat::from_fn(self.ny, self.n_unknowns(), |i, j| if j == base + i { 1.0 } else { 0.0 })
    }

    /// Solves with several right-hand sides at once.
    pub fn solve_mat(&self, rhs: &Mat<f64>) -> Mat<f64> {
        self.lu.solve_mat(rhs)
    }
}

/// The two factorized subdomains of a volume problem.
#[derive(Debug)]
pub struct Decomposition {
    pub spec: DecompositionSpec,
    pub grid: GridSpec,
    pub left: SubdomainSolver,
    pub right: SubdomainSolver,
}

impl Decomposition {
    /// Interface sizes `(N_1, N_2)`; both equal `n_y`.
    pub fn interface_sizes(&self) -> (usize, usize) {
        (self.grid.ny, self.grid.ny)
    }

    /// `N^s = N_1 + N_2`.
    pub fn n_interface(&self) -> usize {
        2 * self.grid.ny
    }

    /// Glues two subdomain vectors into a volume vector, splitting the
    /// overlap at its midline.
    pub fn merge(&self, u_left: &[f64], u_right: &[f64]) -> Vec<f64> {
        let ny = self.grid.ny;
        let mid = self.spec.midline_column();
        let mut out = vec![0.0; self.grid.n_volume()];
        for ix in 0..self.grid.nx {
            let dst = &mut out[ix * ny..(ix + 1) * ny];
            if ix <= mid {
                let l = ix - self.left.first_column;
                dst.copy_from_slice(&u_left[l * ny..(l + 1) * ny]);
            } else {
                let l = ix - self.right.first_column;
                dst.copy_from_slice(&u_right[l * ny..(l + 1) * ny]);
            }
        }
        out
    }

    /// Volume column values on Γ2 and Γ1, in interface ordering `[Γ2; Γ1]`.
    pub fn interface_traces(&self, volume: &[f64]) -> Vec<f64> {
        let ny = self.grid.ny;
        let g2 = self.spec.left_interface_column;
        let g1 = self.spec.right_interface_column();
        let mut out = Vec::with_capacity(2 * ny);
        out.extend_from_slice(&volume[g2 * ny..(g2 + 1) * ny]);
        out.extend_from_slice(&volume[g1 * ny..(g1 + 1) * ny]);
        out
    }
}

fn build_side(volume: &VolumeMatrix, spec: &DecompositionSpec, side: Side) -> Result<SubdomainSolver> {
    let grid = &volume.grid;
    let ny = grid.ny;
    let g2 = spec.left_interface_column;
    let g1 = spec.right_interface_column();
    let (first_column, n_columns, dirichlet_column, trace_column, adjacent) = match side {
        Side::Left => (0, g1, g1, g2, g1 - 1),
        Side::Right => (g2 + 1, grid.nx - g2 - 1, g2, g1, g2 + 1),
    };
    let indices: Vec<usize> = (first_column * ny..(first_column + n_columns) * ny).collect();
    let matrix = volume.matrix.principal_submatrix(&indices);
    let lift_coefficients = (0..ny)
        .map(|iy| volume.matrix.get(grid.index(adjacent, iy), grid.index(dirichlet_column, iy)))
        .collect();
    let lu = SparseLu::new(&matrix)?;
    Ok(SubdomainSolver {
        side,
        first_column,
        n_columns,
        ny,
        matrix,
        lu,
        lift_coefficients,
        lift_local_column: adjacent - first_column,
        dirichlet_column,
        trace_column,
    })
}

/// Extracts and factorizes both subdomain problems.
pub fn build_decomposition(volume: &VolumeMatrix, spec: DecompositionSpec) -> Result<Decomposition> {
    spec.validate(&volume.grid)?;
    let (left, right) = rayon::join(
        || build_side(volume, &spec, Side::Left),
        || build_side(volume, &spec, Side::Right),
    );
    Ok(Decomposition {
        spec,
        grid: volume.grid,
        left: left?,
        right: right?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseLu;
    use crate::problem::{assemble_volume, ProblemSpec, RhsKind};

    fn setup(level: u32, n_ov: usize) -> (VolumeMatrix, Vec<f64>, Decomposition) {
        let p = ProblemSpec::rectangle(RhsKind::Sin2PiXy);
        let g = GridSpec::new(&p, level).unwrap();
        let (v, f) = assemble_volume(&p, &g).unwrap();
        let spec = DecompositionSpec::centered(&g, n_ov).unwrap();
        let d = build_decomposition(&v, spec).unwrap();
        (v, f, d)
    }

    #[test]
    fn interface_counts_at_level_two() {
        let (_, _, d) = setup(2, 1);
        assert_eq!(d.interface_sizes(), (3, 3));
        assert_eq!(d.spec.left_interface_column, 2);
        assert_eq!(d.spec.right_interface_column(), 4);
    }

    #[test]
    fn even_overlap_is_asymmetric() {
        let p = ProblemSpec::rectangle(RhsKind::Zero);
        let g = GridSpec::new(&p, 4).unwrap();
        let s = DecompositionSpec::centered(&g, 2).unwrap();
        assert_eq!(s.left_interface_column, 14);
        assert_eq!(s.right_interface_column(), 17);
        assert!((s.delta(g.h) - 1.5 * g.h).abs() < 1e-15);
    }

    #[test]
    fn invalid_overlap_rejected() {
        let p = ProblemSpec::rectangle(RhsKind::Zero);
        let g = GridSpec::new(&p, 3).unwrap();
        assert!(DecompositionSpec::new(3, 1).validate(&g).is_err());
        assert!(DecompositionSpec::new(10, 6).validate(&g).is_err());
    }

    #[test]
    fn zero_data_zero_solution() {
        let (_, _, d) = setup(3, 1);
        let u = d.left.dirichlet_solve(&vec![0.0; d.grid.ny], None).unwrap();
        assert!(u.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn solve_is_linear() {
        let (_, f, d) = setup(3, 3);
        let w: Vec<f64> = (0..d.grid.ny).map(|i| (i as f64 * 0.7).cos()).collect();
        let fj = d.right.restrict(&f);
        let a = d.right.dirichlet_solve(&w, Some(fj)).unwrap();
        let b = d.right.dirichlet_solve(&w, None).unwrap();
        let c = d.right.dirichlet_solve(&vec![0.0; d.grid.ny], Some(fj)).unwrap();
        for i in 0..a.len() {
            assert!((a[i] - b[i] - c[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn lift_restricted_to_adjacent_column_is_coupling() {
        let (v, _, d) = setup(3, 3);
        let w: Vec<f64> = (0..d.grid.ny).map(|i| i as f64 + 1.0).collect();
        let e = d.left.lift(&w);
        let g = &d.grid;
        for iy in 0..g.ny {
            let adj = g.index(d.spec.right_interface_column() - 1, iy);
            let coupling = v.matrix.get(adj, g.index(d.spec.right_interface_column(), iy));
            assert_eq!(e[adj], coupling * w[iy]);
        }
        let nonzero = e.iter().filter(|&&x| x != 0.0).count();
        assert_eq!(nonzero, g.ny);
    }

    #[test]
    fn trace_is_a_row_selection() {
        let (_, _, d) = setup(3, 3);
        let r = d.left.trace_matrix();
        let rrt = &r * r.transpose();
        for i in 0..rrt.nrows() {
            for j in 0..rrt.ncols() {
                assert_eq!(rrt[(i, j)], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    /// Dense 5-point Laplacian on columns `0..cols` of the rectangle with
    /// Dirichlet data `w` on column `cols`, built straight from the stencil.
    fn reference_left_solve(g: &GridSpec, cols: usize, w: &[f64], f: &[f64]) -> Vec<f64> {
        let ny = g.ny;
        let n = cols * ny;
        let s = 1.0 / (g.h * g.h);
        let mut a = Mat::<f64>::zeros(n, n);
        let mut b = f[..n].to_vec();
        for ix in 0..cols {
            for iy in 0..ny {
                let r = ix * ny + iy;
                a[(r, r)] = 4.0 * s;
                if ix > 0 {
                    a[(r, r - ny)] = -s;
                }
                if ix + 1 < cols {
                    a[(r, r + ny)] = -s;
                } else {
                    b[r] += s * w[iy];
                }
                if iy > 0 {
                    a[(r, r - 1)] = -s;
                }
                if iy + 1 < ny {
                    a[(r, r + 1)] = -s;
                }
            }
        }
        DenseLu::new(&a).unwrap().solve(&b)
    }

    #[test]
    fn subdomain_solve_matches_dense_reference() {
        let (_, f, d) = setup(4, 3);
        let w: Vec<f64> = (0..d.grid.ny).map(|i| 1.0 + (i as f64).sin()).collect();
        let u = d.left.dirichlet_solve(&w, Some(d.left.restrict(&f))).unwrap();
        let r = reference_left_solve(&d.grid, d.left.n_columns, &w, &f);
        let diff = u.iter().zip(&r).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 1e-11, "diff {diff}");
    }

    #[test]
    fn sine_data_gives_collinear_trace() {
        let (_, _, d) = setup(4, 3);
        let ny = d.grid.ny;
        let psi: Vec<f64> = (0..ny)
            .map(|j| (std::f64::consts::PI * (j + 1) as f64 / (ny + 1) as f64).sin())
            .collect();
        let u = d.left.dirichlet_solve(&psi, None).unwrap();
        let t = d.left.trace(&u);
        let rho = crate::linalg::dot(&t, &psi) / crate::linalg::dot(&psi, &psi);
        let res = t
            .iter()
            .zip(&psi)
            .fold(0.0f64, |m, (a, b)| m.max((a - rho * b).abs()));
        assert!(res <= 1e-10);
        assert!(rho > 0.0 && rho < 1.0);
    }

    #[test]
    fn merge_of_restrictions_recovers_volume() {
        let (_, f, d) = setup(3, 2);
        let u = d.merge(d.left.restrict(&f), d.right.restrict(&f));
        assert_eq!(u, f);
    }

    #[test]
    fn repeated_solves_are_bitwise_identical() {
        let (_, f, d) = setup(4, 3);
        let w = vec![0.3; d.grid.ny];
        let a = d.left.dirichlet_solve(&w, Some(d.left.restrict(&f))).unwrap();
        let b = d.left.dirichlet_solve(&w, Some(d.left.restrict(&f))).unwrap();
        assert_eq!(a, b);
    }
}
