//! One pass/fail line per acceptance criterion. Exits nonzero if any fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use spectral_hull::core::invariance::check_orbit_in_mu_polar;
use spectral_hull::core::SpectralSystem;
use spectral_hull::harness::gen::{self, Rng8};
use spectral_hull::harness::{self, SuiteReport, ELLIPSOID_INSTANCES};

const SEED: u64 = 0;
const MAX_RESIDUAL: f64 = 1e-7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report_ok(r: &SuiteReport) -> Outcome {
    Outcome {
        pass: r.passed(),
        detail: format!(
            "{} trials, {} failures, residual {:.1e}, {} skipped",
            r.trials,
            r.failures.len(),
            r.max_residual,
            r.skipped
        ),
    }
}

fn reproduction(id: &str) -> Outcome {
    match harness::reproduce(id) {
        Ok(r) => report_ok(&r),
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn suite(name: &str, trials: usize) -> Result<SuiteReport, String> {
    harness::run_suite(name, trials, SEED).map_err(|e| e.to_string())
}

fn oracle_equivalence() -> Outcome {
    // Trial i uses vector system i mod 3, so 3000 trials give 1000 per system.
    match suite("oracle_equiv", 3000) {
        Ok(r) => report_ok(&r),
        Err(e) => Outcome { pass: false, detail: e },
    }
}

fn property_suites() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in [
        "p1",
        "p2_align",
        "gowda_i_iv",
        "majorization_equiv",
        "spectral_set_equiv",
        "sup_equality",
    ] {
        match suite(name, 1000) {
            Ok(r) => {
                pass &= r.passed() && r.max_residual <= MAX_RESIDUAL;
                parts.push(format!(
                    "{name} {}/{} ok, residual {:.1e}",
                    r.trials - r.failures.len().min(r.trials),
                    r.trials,
                    r.max_residual
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn condition_a() -> Outcome {
    match suite("thm35", 200) {
        Ok(r) => report_ok(&r),
        Err(e) => Outcome { pass: false, detail: e },
    }
}

fn invariance() -> Outcome {
    let mut rng = Rng8::seed_from_u64(SEED);
    let mut orbit_failures = 0;
    let mut orbit_checks = 0;
    for n in 2..=5 {
        let parents = [
            SpectralSystem::Reorder(n),
            SpectralSystem::Abs(n),
            SpectralSystem::AbsReorder(n),
            SpectralSystem::SymEig(n),
            SpectralSystem::SingVal(n, n + 1),
        ];
        for sys in parents {
            for _ in 0..1000 / 4 {
                let u = gen::gaussian_vec(&mut rng, sys.dim_w());
                orbit_checks += 1;
                if !matches!(check_orbit_in_mu_polar(&sys, &u), Ok(true)) {
                    orbit_failures += 1;
                }
            }
        }
    }
    match suite("invariance", 500) {
        Ok(r) => Outcome {
            pass: orbit_failures == 0 && r.passed(),
            detail: format!(
                "{orbit_checks} orbit checks, {orbit_failures} failures; {} invariant instances, {} failures",
                r.trials,
                r.failures.len()
            ),
        },
        Err(e) => Outcome { pass: false, detail: e },
    }
}

fn sparse_ellipsoid() -> Outcome {
    match harness::sparse_ellipsoid_sandwich(SEED, ELLIPSOID_INSTANCES) {
        Ok(c) => Outcome {
            pass: c.violations() == 0 && c.relax_checked > 0,
            detail: format!(
                "{} instances, {} inner points, {} members, {} non-members, {} violations, relaxation {} checked / {} disagreements",
                c.instances,
                c.inner_points,
                c.engine_members,
                c.engine_nonmembers,
                c.violations(),
                c.relax_checked,
                c.relax_disagreements
            ),
        },
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn main() -> ExitCode {
    // (name, check, time budget in seconds)
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 8] = [
        ("two-point example", || reproduction("two_pt"), Some(1)),
        ("convexify before vs after", || reproduction("conv_order"), Some(1)),
        ("closedness is necessary", || reproduction("cl_nec"), Some(1)),
        ("oracle equivalence", oracle_equivalence, Some(60)),
        ("property suites", property_suites, Some(120)),
        ("condition (a) on finite sets", condition_a, None),
        ("invariant sets", invariance, None),
        ("sparse ellipsoid sandwich", sparse_ellipsoid, Some(60)),
    ];
    let mut all = true;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let slow = match budget {
            Some(s) => elapsed > Duration::from_secs(*s),
            _ => false,
        };
        let pass = out.pass && !slow;
        all &= pass;
        println!(
            "{} criterion {}: {name} ({:.2}s{}) {}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            if slow { ", over budget" } else { "" },
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
