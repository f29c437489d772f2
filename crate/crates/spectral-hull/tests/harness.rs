use rand::SeedableRng;
use spectral_hull::core::SpectralSystem;
use spectral_hull::harness::gen::Rng8;
use spectral_hull::harness::{
    self, remark_sets, replay, reproduce_seeded, run_suite, thm35_instance, trial_seed, HarnessError,
    REPRODUCTIONS, SUITES,
};

#[test]
fn every_suite_runs_a_few_trials() {
    for name in SUITES {
        let r = run_suite(name, 6, 11).unwrap();
        assert_eq!(r.trials, 6);
        assert!(r.passed(), "{name}: {:?}", r.failures);
        assert!(r.max_residual <= 1e-7, "{name}: {}", r.max_residual);
    }
}

#[test]
fn reports_are_deterministic() {
    for name in ["p2_align", "oracle_equiv", "invariance", "thm35"] {
        let a = run_suite(name, 25, 5).unwrap().canonical();
        let b = run_suite(name, 25, 5).unwrap().canonical();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
    for id in REPRODUCTIONS {
        let a = reproduce_seeded(id, 2).unwrap().canonical();
        let b = reproduce_seeded(id, 2).unwrap().canonical();
        assert_eq!(a, b);
    }
}

#[test]
fn different_seeds_draw_different_trials() {
    assert_ne!(trial_seed(0, 0), trial_seed(0, 1));
    assert_ne!(trial_seed(0, 0), trial_seed(1, 0));
}

#[test]
fn unknown_names() {
    assert!(matches!(run_suite("nope", 1, 0), Err(HarnessError::UnknownSuite(_))));
    assert!(matches!(harness::reproduce("nope"), Err(HarnessError::UnknownExample(_))));
    assert!(matches!(replay("nope", 0, 0), Err(HarnessError::UnknownSuite(_))));
}

#[test]
fn replay_matches_the_run() {
    let seed = 9;
    let report = run_suite("sup_equality", 8, seed).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..8 {
        let t = replay("sup_equality", trial_seed(seed, i), i).unwrap();
        assert!(t.failures.is_empty());
        worst = worst.max(t.residual);
    }
    assert_eq!(worst, report.max_residual);
}

#[test]
fn remark_sets_and_condition_a() {
    let sys = SpectralSystem::Reorder(2);
    let [gap, sibling] = remark_sets();
    let mut rng = Rng8::seed_from_u64(0);
    let r = thm35_instance(&sys, &gap, 100, &mut rng).unwrap();
    assert!(!r.condition_holds);
    assert!(!r.hulls_agree);
    let r = thm35_instance(&sys, &sibling, 100, &mut rng).unwrap();
    assert!(r.condition_holds);
    assert!(r.hulls_agree);
    assert!(r.checked > 0);
}

#[test]
fn sandwich_counts_small_run() {
    let c = harness::sparse_ellipsoid_sandwich(4, 2).unwrap();
    assert_eq!(c.instances, 2);
    assert_eq!(c.violations(), 0);
    assert!(c.engine_members + c.engine_nonmembers > 0);
}
