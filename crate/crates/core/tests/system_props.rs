use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_hull_core::hull::{majorizes, member_conv_hull, spectral_sup};
use spectral_hull_core::oracle::brute_conv_member;
use spectral_hull_core::sets::SetSpec;
use spectral_hull_core::{PointV, SpectralSystem};

fn system(slot: usize, n: usize) -> SpectralSystem {
    match slot % 5 {
        0 => SpectralSystem::Reorder(n),
        1 => SpectralSystem::Abs(n),
        2 => SpectralSystem::AbsReorder(n),
        3 => SpectralSystem::SymEig(n),
        _ => SpectralSystem::SingVal(n, n + slot % 2),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
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
    fn lambda_lands_in_k(seed in any::<u64>(), slot in 0usize..5, n in 1usize..6) {
        let sys = system(slot, n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = sys.random_point(&mut r);
        let u = sys.lambda(&x).unwrap();
        prop_assert!(sys.in_cone_k(&u, 1e-12));
        // λ preserves the norm.
        prop_assert!((x.norm() - dot(&u, &u).sqrt()).abs() <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn fan_inequality_and_align(seed in any::<u64>(), slot in 0usize..5, n in 1usize..6) {
        let sys = system(slot, n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let c = sys.random_point(&mut r);
        let y = sys.random_point(&mut r);
        let lc = sys.lambda(&c).unwrap();
        let ly = sys.lambda(&y).unwrap();
        prop_assert!(c.inner(&y) <= dot(&lc, &ly) + 1e-10);

        let u = sys.random_k_point(&mut r);
        let x = sys.align(&c, &u).unwrap();
        let lx = sys.lambda(&x).unwrap();
        prop_assert!(max_diff(&lx, &u) <= 1e-9);
        prop_assert!((c.inner(&x) - dot(&lc, &u)).abs() <= 1e-9);
    }

    #[test]
    fn cone_and_polar_are_dual(seed in any::<u64>(), slot in 0usize..5, n in 1usize..6) {
        let sys = system(slot, n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let k = sys.random_k_point(&mut r);
        let d = sys.dim_w();
        let y: Vec<f64> = (0..d).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
        if sys.in_polar_k(&y, 0.0) {
            prop_assert!(dot(&k, &y) <= 1e-12);
        }
        // Differences v − μ(y) over the μ-orbit of y lie in K°.
        let red = sys.reduced();
        let mu = sys.reduced_mu(&y).unwrap();
        for o in red.orbit_enumerate(&mu).unwrap() {
            let diff: Vec<f64> = o.flat().iter().zip(mu.iter()).map(|(a, b)| a - b).collect();
            prop_assert!(sys.in_polar_k(&diff, 1e-12));
            prop_assert!(dot(&k, &diff) <= 1e-12);
        }
        // μ fixes K and is idempotent.
        prop_assert_eq!(sys.reduced_mu(&mu).unwrap(), mu.clone());
        prop_assert!(max_diff(&sys.reduced_mu(&k).unwrap(), &k) <= 1e-12);
    }

    #[test]
    fn orbit_points_share_the_spectrum(seed in any::<u64>(), slot in 0usize..5, n in 1usize..5) {
        let sys = system(slot, n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let u = sys.random_k_point(&mut r);
        let pts = if sys.is_vector() {
            sys.orbit_enumerate(&u).unwrap()
        } else {
            sys.orbit_sample(&u, 8, seed).unwrap()
        };
        for p in &pts {
            prop_assert!(max_diff(&sys.lambda(p).unwrap(), &u) <= 1e-9);
            // Every orbit point is majorized by any other.
            prop_assert!(majorizes(&sys, &pts[0], p).unwrap());
        }
    }

    #[test]
    fn engine_agrees_with_brute_force(seed in any::<u64>(), slot in 0usize..3, n in 1usize..4) {
        let sys = system(slot, n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let m = r.random_range(1..=4);
        let pts: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| (r.random::<f64>() * 4.0 - 2.0).round() / 2.0).collect())
            .collect();
        let set = SetSpec::finite(pts);
        let x = PointV::Vector((0..n).map(|_| (r.random::<f64>() * 4.0 - 2.0).round() / 4.0).collect());
        match member_conv_hull(&sys, &set, &x) {
            Ok(cert) => prop_assert_eq!(cert.verdict, brute_conv_member(&sys, &set, &x).unwrap()),
            Err(e) => prop_assert!(matches!(e, spectral_hull_core::Error::Infeasible)),
        }
    }

    #[test]
    fn sup_bounds_members(seed in any::<u64>(), slot in 0usize..5, n in 1usize..4) {
        let sys = system(slot, n);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let u = sys.random_k_point(&mut r);
        let set = SetSpec::FinitePoints { points: vec![u.clone()] };
        let c = sys.random_point(&mut r);
        let sup = spectral_sup(&sys, &c, &set).unwrap();
        let lc = sys.lambda(&c).unwrap();
        prop_assert!((sup.value - dot(&lc, &u)).abs() <= 1e-9 * (1.0 + sup.value.abs()));
        let x = sys.align(&sys.random_point(&mut r), &u).unwrap();
        prop_assert!(c.inner(&x) <= sup.value + 1e-9);
    }
}
