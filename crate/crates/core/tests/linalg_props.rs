use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_hull_core::linalg::eigen::{random_gaussian, random_symmetric};
use spectral_hull_core::linalg::{
    lp_solve, quad_feasible, svd, sym_eig, Bound, LpConstraint, LpProblem, LpStatus, Matrix,
    Relation,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    random_gaussian(1, n, r).into_vec()
}

fn max_entry_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// A bounded LP around a known feasible point.
fn bounded_lp(r: &mut ChaCha8Rng, n: usize, m: usize) -> LpProblem {
    let x0 = gaussian(r, n);
    let mut p = LpProblem::new(n).maximize(gaussian(r, n));
    for _ in 0..m {
        let row = gaussian(r, n);
        let at: f64 = row.iter().zip(&x0).map(|(a, b)| a * b).sum();
        if r.random_bool(0.2) {
            p.add_eq(row, at);
        } else {
            p.add_le(row, at + r.random::<f64>());
        }
    }
    for j in 0..n {
        p.set_bound(
            j,
            Bound {
                lower: Some(x0[j] - 2.0),
                upper: r.random_bool(0.7).then(|| x0[j] + 2.0),
            },
        );
        let mut row = vec![0.0; n];
        row[j] = 1.0;
        p.add_le(row, x0[j] + 3.0);
    }
    p
}

/// Fixed seed so runs are reproducible; no regression files.
fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 256,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn lp_optimum_satisfies_kkt(seed in any::<u64>(), n in 1usize..6, m in 0usize..8) {
        let mut r = rng(seed);
        let p = bounded_lp(&mut r, n, m);
        let res = lp_solve(&p).unwrap();
        prop_assert_eq!(res.status, LpStatus::Optimal);
        prop_assert!(res.kkt_residual(&p) <= 1e-7, "kkt {}", res.kkt_residual(&p));
    }

    #[test]
    fn infeasible_lp_has_farkas_ray(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let mut p = bounded_lp(&mut r, n, 3);
        // a·x ≤ -1 together with -a·x ≤ -1 is empty.
        let a = gaussian(&mut r, n);
        p.add_le(a.clone(), -1.0);
        p.add_le(a.iter().map(|x| -x).collect(), -1.0);
        let res = lp_solve(&p).unwrap();
        prop_assert_eq!(res.status, LpStatus::Infeasible);
        prop_assert!(res.verify_farkas(&p, 1e-7));
    }

    #[test]
    fn sym_eig_reconstructs(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let a = random_symmetric(n, &mut r);
        let e = sym_eig(&a).unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(e.vectors.orthonormality_defect() <= 1e-10);
        prop_assert!(max_entry_diff(&e.reconstruct(), &a) <= 1e-10 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), m in 1usize..6, n in 1usize..6) {
        let mut r = rng(seed);
        let a = random_gaussian(m, n, &mut r);
        let s = svd(&a).unwrap();
        prop_assert_eq!(s.singular_values.len(), m.min(n));
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.singular_values.iter().all(|x| *x >= 0.0));
        prop_assert!(s.u.orthonormality_defect() <= 1e-10);
        prop_assert!(s.v.orthonormality_defect() <= 1e-10);
        prop_assert!(max_entry_diff(&s.reconstruct(), &a) <= 1e-10 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn quad_feasibility_is_monotone_in_level(seed in any::<u64>(), n in 1usize..5) {
        let mut r = rng(seed);
        let g = random_gaussian(n, n, &mut r);
        let q = g.transpose().matmul(&g).unwrap().sub(&Matrix::identity(n).scaled(-0.5)).unwrap();
        let lin: Vec<LpConstraint> = (0..n)
            .map(|_| LpConstraint {
                row: gaussian(&mut r, n),
                relation: Relation::Le,
                rhs: -r.random::<f64>(),
            })
            .collect();
        let out = quad_feasible(&q, &lin, 0.0).unwrap();
        if let Some(w) = &out.witness {
            let val = q.quad_form(w).unwrap();
            prop_assert!((val - out.min_value).abs() <= 1e-8 * (1.0 + val.abs()));
            for c in &lin {
                let lhs: f64 = c.row.iter().zip(w).map(|(a, b)| a * b).sum();
                prop_assert!(lhs <= c.rhs + 1e-8);
            }
            for level in [out.min_value * 0.5 - 1e-3, out.min_value + 1e-3, 2.0 * out.min_value + 1.0] {
                let f = quad_feasible(&q, &lin, level).unwrap().feasible;
                prop_assert_eq!(f, level >= out.min_value);
            }
        } else {
            prop_assert!(!quad_feasible(&q, &lin, 1e9).unwrap().feasible);
        }
    }
}

#[test]
fn lp_reports_unbounded() {
    let mut p = LpProblem::new(2).maximize(vec![1.0, 0.0]);
    p.add_le(vec![0.0, 1.0], 1.0);
    assert_eq!(lp_solve(&p).unwrap().status, LpStatus::Unbounded);
}

#[test]
fn lp_small_example() {
    // max x + y subject to x + 2y ≤ 4, 3x + y ≤ 6, x, y ≥ 0.
    let mut p = LpProblem::new(2).maximize(vec![1.0, 1.0]);
    p.add_le(vec![1.0, 2.0], 4.0).add_le(vec![3.0, 1.0], 6.0);
    p.set_bound(0, Bound::NONNEG).set_bound(1, Bound::NONNEG);
    let r = lp_solve(&p).unwrap();
    assert!((r.optimal_value - 2.8).abs() < 1e-12);
    assert!((r.solution[0] - 1.6).abs() < 1e-12);
    assert!((r.solution[1] - 1.2).abs() < 1e-12);
}

#[test]
fn asymmetric_input_is_rejected() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
    assert!(sym_eig(&a).is_err());
}

#[test]
fn indefinite_quadratic_is_rejected() {
    let q = Matrix::diag(&[1.0, -1.0]);
    assert!(quad_feasible(&q, &[], 1.0).is_err());
}
