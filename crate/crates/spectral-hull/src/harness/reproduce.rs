//! The four worked examples.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;
use spectral_hull_core::hull::{
    hyperbola_contains, hyperbola_member, member_conv_hull, member_via_conv_c, spectral_sup,
};
use spectral_hull_core::relax::{emit_relaxation, validate_relaxation, Objective, ProblemSpec};
use spectral_hull_core::sets::{feasible_body, ConvexBody};
use spectral_hull_core::linalg::norm;
use spectral_hull_core::{PointV, SpectralSystem};

use super::gen::{self, Rng8};
use super::suites::{diff, RESIDUAL_TOL};
use super::theorems::remark_sets;
use super::{HarnessError, SuiteReport, Trial};

/// Example ids accepted by [`reproduce`].
pub const REPRODUCTIONS: &[&str] = &["two_pt", "conv_order", "cl_nec", "sparse_ellipsoid"];

/// Seed used by [`reproduce`].
pub const REPRODUCE_SEED: u64 = 0;

/// Runs one example with the fixed seed.
pub fn reproduce(id: &str) -> Result<SuiteReport, HarnessError> {
    reproduce_seeded(id, REPRODUCE_SEED)
}

pub fn reproduce_seeded(id: &str, seed: u64) -> Result<SuiteReport, HarnessError> {
    let start = Instant::now();
    let mut rng = Rng8::seed_from_u64(seed);
    let (trials, t, notes) = match id {
        "two_pt" => two_pt(&mut rng)?,
        "conv_order" => conv_order(&mut rng)?,
        "cl_nec" => cl_nec()?,
        "sparse_ellipsoid" => {
            let c = sparse_ellipsoid_sandwich(seed, ELLIPSOID_INSTANCES)?;
            let mut t = Trial::default();
            t.residual(c.max_outer_excess.max(0.0));
            if c.violations() > 0 {
                t.fail(json!({ "example": id }), "no violations", &c);
            }
            let note = serde_json::to_string(&c).unwrap_or_default();
            (c.instances, t, vec![note])
        }
        other => return Err(HarnessError::UnknownExample(other.to_string())),
    };
    Ok(SuiteReport {
        suite_name: id.to_string(),
        trials,
        failures: t
            .failures
            .into_iter()
            .map(|(inputs, expected, got)| super::Failure {
                seed,
                inputs,
                expected,
                got,
            })
            .collect(),
        max_residual: t.residual,
        skipped: t.skipped,
        elapsed_secs: start.elapsed().as_secs_f64(),
        notes,
    })
}

type Outcome = (usize, Trial, Vec<String>);

fn v(x: &[f64]) -> PointV {
    PointV::Vector(x.to_vec())
}

/// Distance from `p` to the segment `{(α, 1 − α) : α ∈ [0, 1]}`.
fn segment_distance(p: [f64; 2]) -> f64 {
    let a = ((p[0] - p[1] + 1.0) / 2.0).clamp(0.0, 1.0);
    ((p[0] - a).powi(2) + (p[1] - 1.0 + a).powi(2)).sqrt()
}

fn two_pt(rng: &mut Rng8) -> Result<Outcome, HarnessError> {
    let sys = SpectralSystem::Reorder(2);
    let set = remark_sets()[0].clone();
    let mut t = Trial::default();
    for j in 0..=100 {
        let a = j as f64 / 100.0;
        let x = [a, 1.0 - a];
        let cert = member_conv_hull(&sys, &set, &v(&x))?;
        if !cert.verdict {
            t.fail(json!({ "x": x }), true, false);
        } else if let Some(u) = &cert.witness_u {
            let r = sys.polar_k().violation(&diff(&sys.lambda(&v(&x))?, u));
            t.residual(r);
        }
    }
    let mut outside = 0;
    while outside < 100 {
        let x = [-1.0 + 3.0 * rng.random::<f64>(), -1.0 + 3.0 * rng.random::<f64>()];
        if segment_distance(x) < 1e-3 {
            continue;
        }
        outside += 1;
        if member_conv_hull(&sys, &set, &v(&x))?.verdict {
            t.fail(json!({ "x": x }), false, true);
        }
    }
    Ok((201, t, vec!["hull of λ⁻¹(C) is the segment from (1,0) to (0,1)".into()]))
}

fn conv_order(rng: &mut Rng8) -> Result<Outcome, HarnessError> {
    let sys = SpectralSystem::Reorder(2);
    let [gap_set, sibling] = remark_sets();
    let mut t = Trial::default();
    let gap = v(&[1.0, 1.0]);
    let via = member_via_conv_c(&sys, &gap_set, &gap)?;
    let hull = member_conv_hull(&sys, &gap_set, &gap)?.verdict;
    if !via || hull {
        t.fail(
            json!({ "x": [1.0, 1.0] }),
            json!({ "via_conv_c": true, "hull": false }),
            json!({ "via_conv_c": via, "hull": hull }),
        );
    }
    for _ in 0..200 {
        let x = v(&[-1.0 + 3.0 * rng.random::<f64>(), -1.0 + 3.0 * rng.random::<f64>()]);
        let a = member_via_conv_c(&sys, &sibling, &x)?;
        let b = member_conv_hull(&sys, &sibling, &x)?.verdict;
        if a != b {
            t.fail(json!({ "C": sibling, "x": x }), b, a);
        }
    }
    Ok((201, t, vec!["gap point (1,1): in λ⁻¹(((conv C)∩K)+K°), not in conv λ⁻¹(C)".into()]))
}

fn cl_nec() -> Result<Outcome, HarnessError> {
    let sys = SpectralSystem::Reorder(2);
    let tt = 1e3;
    let mut t = Trial::default();
    for e in 1..=6 {
        let delta = 10f64.powi(-e);
        let x = [tt, -tt + delta];
        let cert = hyperbola_member(x);
        if !cert.verdict || cert.closedness_certified {
            t.fail(json!({ "x": x }), json!({ "verdict": true, "closed": false }), &cert);
            continue;
        }
        let u = cert.witness_u.expect("members carry a witness");
        if !hyperbola_contains(&u, 1e-12) {
            t.fail(json!({ "x": x, "check": "witness_in_set" }), true, &u);
        }
        // Relative to the witness scale, which grows like 1/δ.
        let scale = 1.0 + u[0].abs();
        let r = sys.polar_k().violation(&diff(&x, &u)) / scale;
        t.check_residual("witness_polar_gap", r, RESIDUAL_TOL, || json!({ "x": x, "u": u }));
    }
    let edge = hyperbola_member([tt, -tt]);
    if edge.verdict || edge.closedness_certified {
        t.fail(json!({ "x": [tt, -tt] }), json!({ "verdict": false, "closed": false }), &edge);
    }
    Ok((7, t, vec!["D + K° is the open half-plane u₁ + u₂ > 0".into()]))
}

/// Random matrices used by the sparse-ellipsoid example.
pub const ELLIPSOID_INSTANCES: usize = 20;
const ELLIPSOID_K: usize = 2;
const INNER_POINTS: usize = 8;
const OUTER_POINTS: usize = 8;
const SANDWICH_DIRECTIONS: usize = 200;
const RELAX_SAMPLES: usize = 20;

/// Counts from the sparse-ellipsoid sandwich.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SandwichCounts {
    pub instances: usize,
    pub inner_points: usize,
    /// Points of the sampled inner hull the engine rejected.
    pub inner_violations: usize,
    pub engine_members: usize,
    pub engine_nonmembers: usize,
    /// Engine members separated by some sampled direction.
    pub outer_violations: usize,
    pub max_outer_excess: f64,
    /// Engine non-members without a working separator.
    pub separator_failures: usize,
    pub relax_checked: usize,
    pub relax_disagreements: usize,
    /// Emitted programs whose row counts differ from 2 ordering, 1
    /// quadratic and 4 Ky Fan rows.
    pub relax_shape_mismatches: usize,
}

impl SandwichCounts {
    pub fn violations(&self) -> usize {
        self.inner_violations
            + self.outer_violations
            + self.separator_failures
            + self.relax_disagreements
            + self.relax_shape_mismatches
    }
}

/// Sandwich check on `SingVal(4, 4)` with `C = {u : ‖u‖₀ ≤ 2, uᵀAu ≤ 1}`.
pub fn sparse_ellipsoid_sandwich(seed: u64, instances: usize) -> Result<SandwichCounts, HarnessError> {
    let sys = SpectralSystem::SingVal(4, 4);
    let n = sys.dim_w();
    let mut rng = Rng8::seed_from_u64(seed);
    let mut c = SandwichCounts {
        instances,
        max_outer_excess: f64::NEG_INFINITY,
        ..Default::default()
    };
    for _ in 0..instances {
        let set = gen::ellipsoid_spec(n, ELLIPSOID_K, &mut rng);
        let ConvexBody::OrderedEllipsoidSlice { q, k, .. } = feasible_body(&sys, &set)? else {
            unreachable!("sparse ellipsoids intersect to ordered slices");
        };

        for _ in 0..INNER_POINTS {
            let m = rng.random_range(1..=3);
            let mut pts = Vec::with_capacity(m);
            for _ in 0..m {
                let r = 0.3 + 0.65 * rng.random::<f64>();
                let u = gen::ellipsoid_point(&q, k, n, r, &mut rng);
                pts.push(gen::orbit_point(&sys, &u, &mut rng)?);
            }
            let x = PointV::combination(&pts, &gen::simplex_weights(&mut rng, m)).expect("nonempty");
            c.inner_points += 1;
            if !member_conv_hull(&sys, &set, &x)?.verdict {
                c.inner_violations += 1;
            }
        }

        for _ in 0..OUTER_POINTS {
            // At the scale of the body: half are lifted points of the
            // stretched slice, half are Gaussian.
            let s = 0.5 + rng.random::<f64>();
            let u = gen::ellipsoid_point(&q, k, n, s, &mut rng);
            let x = if rng.random_bool(0.5) {
                gen::lift(&sys, &u, &mut rng)?
            } else {
                let g = sys.random_point(&mut rng);
                g.scaled(s * norm(&u) / g.norm())
            };
            let cert = member_conv_hull(&sys, &set, &x)?;
            if cert.verdict {
                c.engine_members += 1;
                let mut worst = f64::NEG_INFINITY;
                for _ in 0..SANDWICH_DIRECTIONS {
                    let dir = sys.random_point(&mut rng);
                    let sup = spectral_sup(&sys, &dir, &set)?;
                    worst = worst.max(dir.inner(&x) - sup.value);
                }
                c.max_outer_excess = c.max_outer_excess.max(worst);
                if worst > RESIDUAL_TOL {
                    c.outer_violations += 1;
                }
            } else {
                c.engine_nonmembers += 1;
                let ok = match &cert.separator_c {
                    Some(dir) => dir.inner(&x) > spectral_sup(&sys, dir, &set)?.value,
                    None => false,
                };
                if !ok {
                    c.separator_failures += 1;
                }
            }
        }

        let problem = ProblemSpec {
            system: sys,
            set: set.clone(),
            domain: None,
            objective: Objective::External,
        };
        let relax = emit_relaxation(&problem)?;
        if relax.count("ordering") != 2 || relax.count("quadratic") != 1 || relax.count("kyfan") != 4 {
            c.relax_shape_mismatches += 1;
        }
        let rep = validate_relaxation(&relax, RELAX_SAMPLES, rng.random())?;
        c.relax_checked += rep.checked;
        c.relax_disagreements += rep.disagreements;
    }
    if c.max_outer_excess == f64::NEG_INFINITY {
        c.max_outer_excess = 0.0;
    }
    Ok(c)
}
