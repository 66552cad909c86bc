//! Property tests over randomized inputs.

use faer::{c64, Mat};
use proptest::prelude::*;

use subdd::config::KeyValues;
use subdd::decomposition::DecompositionSpec;
use subdd::linalg::{self, CsrMatrix};
use subdd::output::fmt_f64;
use subdd::problem::{GridSpec, ProblemSpec, RhsKind};
use subdd::solvers::two_level_cycle;
use subdd::spectral::{assemble_dense_g, power_iteration_radius, DEFAULT_DENSE_CAP};
use subdd::substructured::SubstructuredProblem;
use subdd::theory::{rho_discrete, rho_rectangle, DiscreteRectangle};
use subdd::transfer::{build_coarse_operator, sine_mode, CoarseKind, TransferPair};

fn rectangle_with(level: u32, left: usize, overlap: usize, rhs: RhsKind) -> Option<SubstructuredProblem> {
    let problem = ProblemSpec::rectangle(rhs);
    let grid = GridSpec::new(&problem, level).ok()?;
    if left + overlap + 1 >= grid.nx {
        return None;
    }
    SubstructuredProblem::new(&problem, level, DecompositionSpec::new(left, overlap)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn float_format_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let back: f64 = fmt_f64(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn key_values_round_trip(entries in proptest::collection::btree_map("[a-z][a-z_0-9]{0,9}", "[A-Za-z0-9.:_-]{1,12}", 0..8)) {
        let mut kv = KeyValues::new();
        for (k, v) in &entries {
            kv.set(k, v.clone());
        }
        let back = KeyValues::parse(&kv.to_text()).unwrap();
        prop_assert_eq!(back.keys().count(), entries.len());
        for (k, v) in &entries {
            prop_assert_eq!(back.get(k), Some(v.as_str()));
        }
    }

    #[test]
    fn restriction_is_half_the_adjoint(k in 2u32..8, seed in any::<u64>()) {
        let block = (1usize << k) - 1;
        let t = TransferPair::geometric(block).unwrap();
        let v: Vec<f64> = linalg::column(&subdd::transfer::gaussian_matrix(2 * block, 1, seed), 0);
        let c: Vec<f64> = linalg::column(&subdd::transfer::gaussian_matrix(t.coarse_dim(), 1, seed ^ 1), 0);
        let lhs = linalg::dot(&t.restrict(&v), &c);
        let rhs = 0.5 * linalg::dot(&v, &t.prolong(&c));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn interpolation_injects_and_averages(k in 2u32..8, seed in any::<u64>()) {
        let block = (1usize << k) - 1;
        let nc = (block - 1) / 2;
        let t = TransferPair::geometric(block).unwrap();
        let c: Vec<f64> = linalg::column(&subdd::transfer::gaussian_matrix(2 * nc, 1, seed), 0);
        let f = t.prolong(&c);
        for b in 0..2 {
            let (fine, coarse) = (&f[b * block..(b + 1) * block], &c[b * nc..(b + 1) * nc]);
            for j in 0..nc {
                prop_assert_eq!(fine[2 * j + 1], coarse[j]);
            }
            for j in 1..nc {
                prop_assert!((fine[2 * j] - 0.5 * (coarse[j - 1] + coarse[j])).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn continuous_factor_decreases_in_mode_and_overlap(k in 1usize..40, delta in 0.01f64..0.9, l_j in 1.0f64..3.0) {
        let r = rho_rectangle(k, l_j, delta, 1.0).unwrap();
        prop_assert!(r > 0.0 && r < 1.0);
        prop_assert!(rho_rectangle(k + 1, l_j, delta, 1.0).unwrap() <= r);
        prop_assert!(rho_rectangle(k, l_j, delta * 1.05, 1.0).unwrap() <= r);
    }

    #[test]
    fn discrete_factor_decreases_in_mode(n_exp in 2u32..8, own in 2usize..60, gap in 1usize..20, k in 1usize..200) {
        let n = (1usize << n_exp) - 1;
        let k = 1 + k % n;
        let opposite = own.saturating_sub(gap).max(1);
        prop_assume!(opposite < own);
        let r = rho_discrete(k, n, own, opposite);
        prop_assert!(r > 0.0 && r < 1.0);
        if k < n {
            prop_assert!(rho_discrete(k + 1, n, own, opposite) <= r);
        }
    }

    #[test]
    fn csr_matvec_matches_dense(triplets in proptest::collection::vec((0usize..9, 0usize..7, -5.0f64..5.0), 0..40),
                                x in proptest::collection::vec(-3.0f64..3.0, 7)) {
        let a = CsrMatrix::from_triplets(9, 7, &triplets);
        let dense = linalg::matvec(&a.to_dense(), &x);
        for (p, q) in a.matvec(&x).iter().zip(&dense) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn spectrum_gap_is_symmetric_and_order_free(values in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
                                                shift in 0.0f64..0.1) {
        let a: Vec<c64> = values.iter().map(|&(re, im)| c64::new(re, im)).collect();
        let mut b: Vec<c64> = a.iter().rev().map(|z| *z + c64::new(shift, 0.0)).collect();
        prop_assert_eq!(linalg::spectrum_gap(&a, &a, 0.0), 0.0);
        let g = linalg::spectrum_gap(&a, &b, 0.0);
        prop_assert!((g - linalg::spectrum_gap(&b, &a, 0.0)).abs() <= 1e-15);
        if a.len() == 1 {
            prop_assert!((g - shift).abs() <= 1e-15);
        }
        b.rotate_left(1);
        prop_assert!((linalg::spectrum_gap(&a, &b, 0.0) - g).abs() <= 1e-15);
    }

    #[test]
    fn power_iteration_finds_dominant_diagonal(d in proptest::collection::vec(-0.5f64..0.5, 2..30), top in 0.7f64..0.99, neg in any::<bool>()) {
        let mut d = d;
        d[0] = if neg { -top } else { top };
        let rho = power_iteration_radius(|x| Ok(x.iter().zip(&d).map(|(a, b)| a * b).collect()), d.len(), 1e-12, 5000, 1).unwrap();
        prop_assert!((rho - top).abs() <= 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn smoother_spectrum_comes_in_signed_pairs(left in 6usize..12, overlap in 2usize..8) {
        let Some(p) = rectangle_with(3, left, overlap, RhsKind::Zero) else { return Ok(()) };
        let g = assemble_dense_g(&p.operator, DEFAULT_DENSE_CAP).unwrap();
        let eig = linalg::eigenvalues(&g).unwrap();
        let neg: Vec<c64> = eig.iter().map(|z| -*z).collect();
        prop_assert!(linalg::spectrum_gap(&eig, &neg, 1e-12) <= 1e-10);
    }

    #[test]
    fn sine_modes_follow_the_discrete_factor(left in 4usize..12, overlap in 2usize..10, k in 1usize..8) {
        let Some(p) = rectangle_with(3, left, overlap, RhsKind::Zero) else { return Ok(()) };
        let d = &p.operator.decomposition;
        let dr = DiscreteRectangle::new(&d.grid, &d.spec);
        let psi = sine_mode(d.grid.ny, k);
        let g1 = d.left.trace(&d.left.dirichlet_solve(&psi, None).unwrap());
        let g2 = d.right.trace(&d.right.dirichlet_solve(&psi, None).unwrap());
        for (i, &s) in psi.iter().enumerate() {
            prop_assert!((g1[i] - dr.rho1(k) * s).abs() <= 1e-12);
            prop_assert!((g2[i] - dr.rho2(k) * s).abs() <= 1e-12);
        }
    }

    #[test]
    fn exact_traces_are_a_fixed_point(level in 3u32..6, n_ov in 1usize..6) {
        let p = SubstructuredProblem::centered(&ProblemSpec::rectangle(RhsKind::Sin2PiXy), level, n_ov).unwrap();
        let (_, v) = p.reference().unwrap();
        let step = p.operator.psm_step(&v).unwrap();
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in step.iter().zip(&v) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
        prop_assert!(p.operator.relative_residual(&v).unwrap() <= 1e-10);
    }

    #[test]
    fn complete_coarse_space_solves_in_one_cycle(left in 6usize..12, overlap in 2usize..8, seed in any::<u64>()) {
        let Some(p) = rectangle_with(3, left, overlap, RhsKind::Sin2PiXy) else { return Ok(()) };
        let n = p.operator.dim();
        let t = TransferPair::Spectral { basis: Mat::identity(n, n), descriptor: "identity".into() };
        let coarse = build_coarse_operator(&p, &t, CoarseKind::Galerkin).unwrap();
        let (_, exact) = p.reference().unwrap();
        let v0: Vec<f64> = linalg::column(&subdd::transfer::gaussian_matrix(n, 1, seed), 0);
        let v1 = two_level_cycle(&p.operator, &t, &coarse, &v0, 1, 0).unwrap();
        let scale = exact.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, b) in v1.iter().zip(&exact) {
            prop_assert!((a - b).abs() <= 1e-9 * scale.max(1.0));
        }
    }
}
