//! Property suites on the spectral maps, majorization, spectral sets and
//! the support function.

use std::collections::BTreeSet;

use rand::Rng;
use serde_json::json;
use spectral_hull_core::hull::{majorizes, spectral_sup, SupStatus};
use spectral_hull_core::linalg::{dot, norm};
use spectral_hull_core::oracle::orbit_points;
use spectral_hull_core::relax::BOUNDARY_MARGIN;
use spectral_hull_core::sets::{convex_weights, feasible_body, member_body, orbit_closure, ConvexBody};
use spectral_hull_core::{Error, PointV, PointW, SpectralSystem};

use super::gen::{self, Rng8};
use super::Trial;

/// Residual bound shared by the property suites.
pub const RESIDUAL_TOL: f64 = 1e-7;

/// Inner-product directions per majorization screen.
const SCREEN_DIRECTIONS: usize = 200;

pub(crate) fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&diff(a, b))
}

/// Exact key of a point, with `-0.0` folded into `0.0`.
pub(crate) fn key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| (x + 0.0).to_bits()).collect()
}

fn key_set<'a>(pts: impl IntoIterator<Item = &'a [f64]>) -> BTreeSet<Vec<u64>> {
    pts.into_iter().map(key).collect()
}

/// `Some(inside)` when `y` is clearly inside or outside `K°`, `None` within
/// the boundary margin.
pub(crate) fn classify_polar(sys: &SpectralSystem, y: &[f64]) -> Option<bool> {
    let cone = sys.polar_k();
    let eq = cone.eq.iter().map(|e| dot(e, y).abs()).fold(0.0f64, f64::max);
    let ineq = cone
        .ineq
        .iter()
        .map(|a| dot(a, y))
        .fold(f64::NEG_INFINITY, f64::max);
    if eq > BOUNDARY_MARGIN || ineq > BOUNDARY_MARGIN {
        Some(false)
    } else if eq <= 1e-9 && ineq < -BOUNDARY_MARGIN {
        Some(true)
    } else {
        None
    }
}

pub fn p1(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let x = sys.random_point(rng);
    let y = sys.random_point(rng);
    let gap = x.inner(&y) - dot(&sys.lambda(&x)?, &sys.lambda(&y)?);
    let mut t = Trial::default();
    t.check_residual("fan_inequality", gap.max(0.0), RESIDUAL_TOL, || {
        json!({ "system": sys, "x": x, "y": y })
    });
    Ok(t)
}

/// A direction with ties about a fifth of the time (vector systems).
fn direction(sys: &SpectralSystem, rng: &mut Rng8) -> PointV {
    let c = sys.random_point(rng);
    match c {
        PointV::Vector(v) if rng.random_bool(0.2) => {
            PointV::Vector(v.iter().map(|x| x.round()).collect())
        }
        c => c,
    }
}

/// A point of `K`, with repeated entries about a fifth of the time.
fn cone_point(sys: &SpectralSystem, rng: &mut Rng8) -> Result<PointW, Error> {
    if rng.random_bool(0.2) {
        let g: Vec<f64> = gen::gaussian_vec(rng, sys.dim_w())
            .into_iter()
            .map(|x| x.round())
            .collect();
        sys.reduced_mu(&g)
    } else {
        Ok(sys.random_k_point(rng))
    }
}

pub fn p2_align(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let c = direction(&sys, rng);
    let u = cone_point(&sys, rng)?;
    let x = sys.align(&c, &u)?;
    let lc = sys.lambda(&c)?;
    let lx = sys.lambda(&x)?;
    let mut t = Trial::default();
    let inputs = || json!({ "system": sys, "c": c, "u": u });
    t.check_residual("spectrum_of_aligned", dist(&lx, &u), RESIDUAL_TOL, inputs);
    let r = (c.inner(&x) - dot(&lc, &u)).abs();
    t.check_residual("aligned_inner_product", r, RESIDUAL_TOL, inputs);
    Ok(t)
}

pub fn gowda_i_iv(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let mut t = Trial::default();

    // Positive homogeneity.
    let x = sys.random_point(rng);
    let s = 3.0 * rng.random::<f64>();
    let lx = sys.lambda(&x)?;
    let scaled: Vec<f64> = lx.iter().map(|v| s * v).collect();
    let r = dist(&sys.lambda(&x.scaled(s))?, &scaled);
    t.check_residual("homogeneity", r, RESIDUAL_TOL, || {
        json!({ "system": sys, "x": x, "t": s })
    });

    // 1-Lipschitz.
    let y = sys.random_point(rng);
    let r = (dist(&lx, &sys.lambda(&y)?) - x.sub(&y).norm()).max(0.0);
    t.check_residual("lipschitz", r, RESIDUAL_TOL, || {
        json!({ "system": sys, "x": x, "y": y })
    });

    // Sum majorization and its norm consequence.
    let k = rng.random_range(2..=4);
    let pts: Vec<PointV> = (0..k).map(|_| sys.random_point(rng)).collect();
    let total = PointV::combination(&pts, &vec![1.0; k]).expect("nonempty");
    let mut spec_sum = vec![0.0; sys.dim_w()];
    for p in &pts {
        for (a, b) in spec_sum.iter_mut().zip(sys.lambda(p)?.iter()) {
            *a += b;
        }
    }
    let lt = sys.lambda(&total)?;
    let inputs = || json!({ "system": sys, "points": pts });
    let r = sys.polar_k().violation(&diff(&lt, &spec_sum));
    t.check_residual("sum_majorization", r, RESIDUAL_TOL, inputs);
    let r = (norm(&lt) - norm(&spec_sum)).max(0.0);
    t.check_residual("sum_norm", r, RESIDUAL_TOL, inputs);

    // Aligned pairs satisfy all three equivalent conditions.
    let c = direction(&sys, rng);
    let u = cone_point(&sys, rng)?;
    let x = sys.align(&c, &u)?;
    let lc = sys.lambda(&c)?;
    let lx = sys.lambda(&x)?;
    let inputs = || json!({ "system": sys, "c": c, "u": u });
    let r = (c.inner(&x) - dot(&lc, &lx)).abs();
    t.check_residual("aligned_inner_product", r, RESIDUAL_TOL, inputs);
    let sum: Vec<f64> = lc.iter().zip(lx.iter()).map(|(a, b)| a + b).collect();
    let r = dist(&sys.lambda(&c.add(&x))?, &sum);
    t.check_residual("aligned_additivity", r, RESIDUAL_TOL, inputs);
    let r = (dist(&lc, &lx) - c.sub(&x).norm()).abs();
    t.check_residual("aligned_distance", r, RESIDUAL_TOL, inputs);
    Ok(t)
}

/// Shifts `x` along the identity so that its spectrum has the same total
/// as `target`, for systems whose polar cone fixes the total.
fn match_total(sys: &SpectralSystem, x: PointV, target: &[f64]) -> Result<PointV, Error> {
    if !matches!(sys, SpectralSystem::Reorder(_) | SpectralSystem::SymEig(_)) {
        return Ok(x);
    }
    let n = sys.dim_w();
    let shift = (target.iter().sum::<f64>() - sys.lambda(&x)?.iter().sum::<f64>()) / n as f64;
    Ok(match x {
        PointV::Vector(v) => PointV::Vector(v.iter().map(|a| a + shift).collect()),
        PointV::Matrix(mut m) => {
            for i in 0..n {
                m[(i, i)] += shift;
            }
            PointV::Matrix(m)
        }
    })
}

/// Samples `⟨λ(c), λ(x)⟩ ≤ ⟨λ(c), λ(y)⟩` over random `c`.
fn screen(
    sys: &SpectralSystem,
    lx: &[f64],
    ly: &[f64],
    rng: &mut Rng8,
    t: &mut Trial,
) -> Result<(), Error> {
    let d = diff(lx, ly);
    let mut worst = 0.0f64;
    for _ in 0..SCREEN_DIRECTIONS {
        let lc = sys.lambda(&sys.random_point(rng))?;
        worst = worst.max(dot(&lc, &d));
    }
    t.check_residual("inner_product_screen", worst, RESIDUAL_TOL, || {
        json!({ "system": sys, "lambda_x": lx, "lambda_y": ly })
    });
    Ok(())
}

pub fn majorization_equiv(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let mut t = Trial::default();
    let y = sys.random_point(rng);
    let ly = sys.lambda(&y)?;

    // Convex combinations of orbit points of y are majorized by y.
    let k = rng.random_range(1..=4);
    let orbit = sys.orbit_sample(&ly, k, rng.random())?;
    let x_in = PointV::combination(&orbit, &gen::simplex_weights(rng, k)).expect("nonempty");
    let lx_in = sys.lambda(&x_in)?;
    let r = sys.polar_k().violation(&diff(&lx_in, &ly));
    t.check_residual("orbit_hull_majorized", r, RESIDUAL_TOL, || {
        json!({ "system": sys, "x": x_in, "y": y })
    });
    screen(&sys, &lx_in, &ly, rng, &mut t)?;

    // A random pair, classified away from the boundary.
    let s = 0.2 + rng.random::<f64>();
    let x = match_total(&sys, sys.random_point(rng).scaled(s), &ly)?;
    let lx = sys.lambda(&x)?;
    let d = diff(&lx, &ly);
    let Some(inside) = classify_polar(&sys, &d) else {
        t.skipped += 1;
        return Ok(t);
    };
    let inputs = || json!({ "system": sys, "x": x, "y": y });
    let engine = majorizes(&sys, &x, &y)?;
    if engine != inside {
        t.fail(inputs(), inside, engine);
    }
    if sys.is_vector() {
        let orbit: Vec<PointW> = sys
            .orbit_enumerate(&ly)?
            .into_iter()
            .map(|p| PointW(p.flat().to_vec()))
            .collect();
        let brute = convex_weights(&orbit, x.flat(), 1e-9)?.is_some();
        if brute != inside {
            t.fail(json!({ "check": "orbit_hull_lp", "data": inputs() }), inside, brute);
        }
    }
    if inside {
        screen(&sys, &lx, &ly, rng, &mut t)?;
    } else {
        // A polar normal n ∈ K with ⟨n, d⟩ > 0 is λ(c) for c = align(x, n).
        let n = sys
            .polar_k()
            .split_normals()
            .into_iter()
            .max_by(|a, b| dot(a, &d).total_cmp(&dot(b, &d)))
            .expect("polar cone has normals");
        let lc = sys.lambda(&sys.align(&x, &n)?)?;
        let gap = dot(&lc, &d);
        if !(gap > 0.0) {
            t.fail(json!({ "check": "screen_certificate", "data": inputs() }), "> 0", gap);
        }
    }
    Ok(t)
}

pub fn spectral_set_equiv(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let mut t = Trial::default();
    let pts = gen::finite_set(&sys, 5, rng);
    let set = gen::finite_spec(&pts);
    let inputs = || json!({ "system": sys, "C": pts });

    // Orbit closure in W is extensive, idempotent and monotone.
    let closure = orbit_closure(&sys, &pts)?;
    let closed = key_set(closure.iter().map(|p| p.coords()));
    let again = key_set(orbit_closure(&sys, &closure)?.iter().map(|p| p.coords()));
    if again != closed {
        t.fail(json!({ "check": "closure_idempotent", "data": inputs() }), closed.len(), again.len());
    }
    if !pts.iter().all(|p| closed.contains(&key(p))) {
        t.fail(json!({ "check": "closure_extensive", "data": inputs() }), true, false);
    }
    let sub = orbit_closure(&sys, &pts[..1])?;
    if !sub.iter().all(|p| closed.contains(&key(p))) {
        t.fail(json!({ "check": "closure_monotone", "data": inputs() }), true, false);
    }

    let ConvexBody::VPolytope { vertices: cap } = feasible_body(&sys, &set)? else {
        unreachable!("finite sets give point lists");
    };
    let near_cap = |u: &[f64]| cap.iter().map(|c| dist(c, u)).fold(f64::INFINITY, f64::min);
    if sys.is_vector() {
        // λ⁻¹(C) is a union of orbits whose spectra lie in C ∩ K.
        let e = orbit_points(&sys, &set)?;
        let e_keys = key_set(e.iter().map(|p| p.coords()));
        let mut worst = 0.0f64;
        for _ in 0..e.len().min(20) {
            let p = &e[rng.random_range(0..e.len())];
            let lp = sys.lambda(&PointV::Vector(p.0.clone()))?;
            worst = worst.max(near_cap(&lp));
            for q in sys.orbit_enumerate(&lp)? {
                if !e_keys.contains(&key(q.flat())) {
                    t.fail(
                        json!({ "check": "preimage_orbit_closed", "data": inputs() }),
                        "orbit inside λ⁻¹(C)",
                        q,
                    );
                    break;
                }
            }
        }
        t.check_residual("preimage_spectra_in_set", worst, RESIDUAL_TOL, inputs);
        let first = gen::finite_spec(&pts[..1]);
        if !orbit_points(&sys, &first)?.iter().all(|p| e_keys.contains(&key(p))) {
            t.fail(json!({ "check": "preimage_monotone", "data": inputs() }), true, false);
        }
    } else {
        let mut worst = 0.0f64;
        for u in &cap {
            for x in sys.orbit_sample(u, 3, rng.random())? {
                worst = worst.max(near_cap(&sys.lambda(&x)?));
            }
        }
        t.check_residual("sampled_orbit_spectra", worst, RESIDUAL_TOL, inputs);
    }
    Ok(t)
}

pub fn sup_equality(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let mut t = Trial::default();
    let d = sys.dim_w();
    let c = sys.random_point(rng);
    let lc = sys.lambda(&c)?;
    let ellipsoid = matches!(sys, SpectralSystem::AbsReorder(_) | SpectralSystem::SingVal(..))
        && rng.random_bool(0.25);
    let set = if ellipsoid {
        let k = rng.random_range(1..=d);
        gen::ellipsoid_spec(d, k, rng)
    } else {
        gen::finite_spec(&gen::finite_set(&sys, 6, rng))
    };
    let inputs = || json!({ "system": sys, "c": c, "C": set });
    let sup = spectral_sup(&sys, &c, &set)?;
    let Some(arg) = sup.argmax_u.clone().filter(|_| sup.status == SupStatus::Optimal) else {
        t.fail(inputs(), "attained supremum", &sup.status);
        return Ok(t);
    };
    let body = feasible_body(&sys, &set)?;
    if !member_body(&body, &arg, 1e-9)?.0 {
        t.fail(json!({ "check": "argmax_in_body", "data": inputs() }), true, false);
    }
    let r = (dot(&lc, &arg) - sup.value).abs();
    t.check_residual("argmax_value", r, RESIDUAL_TOL, inputs);
    let x = sys.align(&c, &arg)?;
    let r = (c.inner(&x) - sup.value).abs();
    t.check_residual("aligned_attains", r, RESIDUAL_TOL, inputs);

    if sys.is_vector() && !ellipsoid {
        let best = orbit_points(&sys, &set)?
            .iter()
            .map(|p| dot(c.flat(), p))
            .fold(f64::NEG_INFINITY, f64::max);
        t.check_residual("orbit_maximum", (best - sup.value).abs(), RESIDUAL_TOL, inputs);
    } else {
        let samples: Vec<Vec<f64>> = match &body {
            ConvexBody::VPolytope { vertices } => vertices.iter().map(|v| v.0.clone()).collect(),
            ConvexBody::OrderedEllipsoidSlice { q, k, n } => (0..10)
                .map(|_| gen::ellipsoid_point(q, *k, *n, 1.0, rng))
                .collect(),
            ConvexBody::HPolyhedronWithCone { .. } => Vec::new(),
        };
        let mut lower = f64::NEG_INFINITY;
        for u in &samples {
            for y in sys.orbit_sample(u, 3, rng.random())? {
                lower = lower.max(c.inner(&y));
            }
        }
        t.check_residual("sampled_lower_bound", (lower - sup.value).max(0.0), RESIDUAL_TOL, inputs);
    }
    Ok(t)
}
