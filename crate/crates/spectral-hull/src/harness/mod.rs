//! Named property suites and example reproductions.
//!
//! Every suite runs `trials` independent trials. Trial `i` draws from its
//! own generator seeded by [`trial_seed`]`(seed, i)`, trials run in
//! parallel, and outcomes are merged in trial order, so a report depends
//! only on `(suite, trials, seed)` apart from `elapsed_secs`.

pub mod gen;
mod reproduce;
mod suites;
mod theorems;

use std::time::Instant;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use spectral_hull_core::Error;

pub use reproduce::{
    reproduce, reproduce_seeded, sparse_ellipsoid_sandwich, SandwichCounts, ELLIPSOID_INSTANCES,
    REPRODUCTIONS,
};
pub use theorems::{remark_sets, thm35_instance, Thm35Instance};

/// A failed check with enough data to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub seed: u64,
    pub inputs: Value,
    pub expected: Value,
    pub got: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite_name: String,
    pub trials: usize,
    pub failures: Vec<Failure>,
    pub max_residual: f64,
    /// Checks skipped because the query sat within the boundary margin.
    pub skipped: usize,
    pub elapsed_secs: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// The report with timing zeroed, for byte-level comparisons.
    pub fn canonical(&self) -> SuiteReport {
        SuiteReport {
            elapsed_secs: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error(transparent)]
    Core(#[from] Error),
}

/// Outcome of one trial.
#[derive(Debug, Clone, Default)]
pub struct Trial {
    pub residual: f64,
    pub skipped: usize,
    pub failures: Vec<(Value, Value, Value)>,
}

impl Trial {
    pub fn residual(&mut self, r: f64) {
        if r.is_nan() {
            self.residual = f64::INFINITY;
        } else {
            self.residual = self.residual.max(r);
        }
    }

    pub fn fail(&mut self, inputs: Value, expected: impl Serialize, got: impl Serialize) {
        self.failures.push((
            inputs,
            serde_json::to_value(expected).unwrap_or(Value::Null),
            serde_json::to_value(got).unwrap_or(Value::Null),
        ));
    }

    /// Records a residual and fails when it exceeds `tol`.
    pub fn check_residual(&mut self, what: &str, r: f64, tol: f64, inputs: impl FnOnce() -> Value) {
        self.residual(r);
        if !(r <= tol) {
            self.fail(
                serde_json::json!({ "check": what, "data": inputs() }),
                format!("residual ≤ {tol:e}"),
                r,
            );
        }
    }
}

/// Seed for trial `index` of a run seeded with `seed` (splitmix64).
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) type TrialFn = dyn Fn(usize, &mut gen::Rng8) -> Result<Trial, Error> + Sync;

pub(crate) fn run_trials(name: &str, trials: usize, seed: u64, f: &TrialFn) -> SuiteReport {
    let start = Instant::now();
    let outcomes: Vec<(u64, Result<Trial, Error>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let ts = trial_seed(seed, i);
            let mut rng = gen::Rng8::seed_from_u64(ts);
            (ts, f(i, &mut rng))
        })
        .collect();
    let mut report = SuiteReport {
        suite_name: name.to_string(),
        trials,
        failures: Vec::new(),
        max_residual: 0.0,
        skipped: 0,
        elapsed_secs: 0.0,
        notes: Vec::new(),
    };
    for (ts, out) in outcomes {
        match out {
            Ok(t) => {
                report.max_residual = report.max_residual.max(t.residual);
                report.skipped += t.skipped;
                for (inputs, expected, got) in t.failures {
                    report.failures.push(Failure {
                        seed: ts,
                        inputs,
                        expected,
                        got,
                    });
                }
            }
            Err(e) => report.failures.push(Failure {
                seed: ts,
                inputs: Value::Null,
                expected: Value::String("trial completes".into()),
                got: Value::String(e.to_string()),
            }),
        }
    }
    report.elapsed_secs = start.elapsed().as_secs_f64();
    report
}

/// Names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "p1",
    "p2_align",
    "gowda_i_iv",
    "majorization_equiv",
    "spectral_set_equiv",
    "sup_equality",
    "oracle_equiv",
    "thm_main",
    "thm_feasible",
    "prop_equal_hulls",
    "thm35",
    "lem_AB",
    "lem_B",
    "invariance",
];

fn suite_fn(name: &str) -> Option<&'static TrialFn> {
    let f: &'static TrialFn = match name {
        "p1" => &suites::p1,
        "p2_align" => &suites::p2_align,
        "gowda_i_iv" => &suites::gowda_i_iv,
        "majorization_equiv" => &suites::majorization_equiv,
        "spectral_set_equiv" => &suites::spectral_set_equiv,
        "sup_equality" => &suites::sup_equality,
        "oracle_equiv" => &theorems::oracle_equiv,
        "thm_main" => &theorems::thm_main,
        "thm_feasible" => &theorems::thm_feasible,
        "prop_equal_hulls" => &theorems::prop_equal_hulls,
        "thm35" => &theorems::thm35,
        "lem_AB" => &theorems::lem_ab,
        "lem_B" => &theorems::lem_b,
        "invariance" => &theorems::invariance,
        _ => return None,
    };
    Some(f)
}

/// Runs a named suite.
pub fn run_suite(name: &str, trials: usize, seed: u64) -> Result<SuiteReport, HarnessError> {
    let f = suite_fn(name).ok_or_else(|| HarnessError::UnknownSuite(name.to_string()))?;
    Ok(run_trials(name, trials, seed, f))
}

/// Re-runs the single trial whose generator seed is recorded in a [`Failure`].
/// `index` is the trial's position in the original run.
pub fn replay(name: &str, trial_seed: u64, index: usize) -> Result<Trial, HarnessError> {
    let f = suite_fn(name).ok_or_else(|| HarnessError::UnknownSuite(name.to_string()))?;
    let mut rng = gen::Rng8::seed_from_u64(trial_seed);
    Ok(f(index, &mut rng)?)
}
