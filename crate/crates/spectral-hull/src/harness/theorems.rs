//! Suites for the hull theorems, the two set lemmas and invariant sets.

use rand::Rng;
use serde_json::json;
use spectral_hull_core::hull::{
    check_condition_a, majorizes, member_clconv, member_conv_hull, member_conv_hull_of_convex_d,
    member_conv_hull_tol, member_via_conv_c, member_via_conv_c_tol, spectral_sup,
    MembershipCertificate, CONDITION_A_EXACT_DIM,
};
use spectral_hull_core::invariance::{
    check_orbit_in_mu_polar, corollary_d_insensitivity, mu_image, transfer_conv_member,
};
use spectral_hull_core::linalg::{dot, lp_solve, Bound, LpProblem};
use spectral_hull_core::oracle::brute_conv_member;
use spectral_hull_core::relax::BOUNDARY_MARGIN;
use spectral_hull_core::sets::{feasible_body, is_feasible, orbit_closure, ConvexBody, SetSpec};
use spectral_hull_core::{Error, PointV, PointW, SpectralSystem, EPS};

use super::gen::{self, Rng8};
use super::suites::{diff, dist, key, RESIDUAL_TOL};
use super::Trial;

/// Directions tried by the outer half of the sandwich check.
const OUTER_DIRECTIONS: usize = 50;

/// Engine verdict when it is stable under a `±BOUNDARY_MARGIN` slack.
fn clear_verdict(sys: &SpectralSystem, set: &SetSpec, x: &PointV) -> Result<Option<bool>, Error> {
    let lo = member_conv_hull_tol(sys, set, x, -BOUNDARY_MARGIN)?.verdict;
    let hi = member_conv_hull_tol(sys, set, x, BOUNDARY_MARGIN)?.verdict;
    Ok((lo == hi).then_some(lo))
}

fn clear_via_conv_c(sys: &SpectralSystem, set: &SetSpec, x: &PointV) -> Result<Option<bool>, Error> {
    let lo = member_via_conv_c_tol(sys, set, x, -BOUNDARY_MARGIN)?;
    let hi = member_via_conv_c_tol(sys, set, x, BOUNDARY_MARGIN)?;
    Ok((lo == hi).then_some(lo))
}

/// Checks the witness of a positive certificate: `u ∈ conv(C ∩ K)` via the
/// weights and `λ(x) − u ∈ K°`.
fn check_witness(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
    cert: &MembershipCertificate,
    t: &mut Trial,
) -> Result<(), Error> {
    let inputs = || json!({ "system": sys, "C": set, "x": x });
    let (Some(u), Some(w)) = (&cert.witness_u, &cert.weights) else {
        t.fail(json!({ "check": "witness_present", "data": inputs() }), true, false);
        return Ok(());
    };
    if let ConvexBody::VPolytope { vertices } = feasible_body(sys, set)? {
        let mut comb = vec![0.0; sys.dim_w()];
        for (v, wi) in vertices.iter().zip(w) {
            for (c, vi) in comb.iter_mut().zip(v.iter()) {
                *c += wi * vi;
            }
        }
        let neg = w.iter().fold(0.0f64, |m, &wi| m.max(-wi));
        let sum = (w.iter().sum::<f64>() - 1.0).abs();
        t.check_residual("witness_weights", dist(&comb, u).max(neg).max(sum), RESIDUAL_TOL, inputs);
    }
    let r = sys.polar_k().violation(&diff(&sys.lambda(x)?, u));
    t.check_residual("witness_polar_gap", r, RESIDUAL_TOL, inputs);
    Ok(())
}

/// Checks a verdict against the support function: a member is never
/// separated by a sampled direction, and a clear non-member carries a
/// separator that works.
fn outer_check(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
    cert: &MembershipCertificate,
    clear: Option<bool>,
    rng: &mut Rng8,
    t: &mut Trial,
) -> Result<(), Error> {
    let inputs = || json!({ "system": sys, "C": set, "x": x });
    if cert.verdict {
        let mut worst = 0.0f64;
        for _ in 0..OUTER_DIRECTIONS {
            let c = sys.random_point(rng);
            let sup = spectral_sup(sys, &c, set)?;
            worst = worst.max(c.inner(x) - sup.value);
        }
        t.check_residual("outer_bound", worst, RESIDUAL_TOL, inputs);
    } else if clear == Some(false) {
        match &cert.separator_c {
            Some(c) => {
                let sup = spectral_sup(sys, c, set)?;
                let gap = c.inner(x) - sup.value;
                if !(gap > 0.0) {
                    t.fail(json!({ "check": "separator_gap", "data": inputs() }), "> 0", gap);
                }
            }
            None => t.fail(json!({ "check": "separator_present", "data": inputs() }), true, false),
        }
    }
    Ok(())
}

/// A point of the hull by construction: a convex combination of orbit
/// points of `C ∩ K`.
fn inner_point(sys: &SpectralSystem, cap: &[PointW], rng: &mut Rng8) -> Result<PointV, Error> {
    let k = rng.random_range(1..=3);
    let mut pts = Vec::with_capacity(k);
    for _ in 0..k {
        let u = &cap[rng.random_range(0..cap.len())];
        pts.push(gen::orbit_point(sys, u, rng)?);
    }
    Ok(PointV::combination(&pts, &gen::simplex_weights(rng, k)).expect("nonempty"))
}

fn cap_points(sys: &SpectralSystem, set: &SetSpec) -> Result<Vec<PointW>, Error> {
    match feasible_body(sys, set)? {
        ConvexBody::VPolytope { vertices } => Ok(vertices),
        _ => Err(Error::Unsupported("expected a finite set".into())),
    }
}

/// Compares the engine with the orbit-enumeration oracle on one `(C, x)`;
/// vector systems only.
fn compare_with_brute(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
    engine: bool,
    t: &mut Trial,
) -> Result<(), Error> {
    let brute = brute_conv_member(sys, set, x)?;
    if brute != engine {
        if clear_verdict(sys, set, x)?.is_none() {
            t.skipped += 1;
        } else {
            t.fail(json!({ "system": sys, "C": set, "x": x }), brute, engine);
        }
    }
    Ok(())
}

/// Engine against the orbit-enumeration oracle: vector systems, `n ≤ 4`,
/// `|C| ≤ 5`.
pub fn oracle_equiv(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::vector_system_for(i, 4, rng);
    let mut t = Trial::default();
    let set = gen::finite_spec(&gen::finite_set(&sys, 5, rng));
    for x in gen::query_points(&sys, &set, 3, rng)? {
        let engine = member_conv_hull(&sys, &set, &x)?.verdict;
        compare_with_brute(&sys, &set, &x, engine, &mut t)?;
    }
    Ok(t)
}

/// Hull membership through `conv(C ∩ K) + K°`, with certificates, for all
/// five systems.
pub fn thm_feasible(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let mut t = Trial::default();
    let pts = gen::finite_set(&sys, 5, rng);
    let set = gen::finite_spec(&pts);
    let cap = cap_points(&sys, &set)?;

    let x_in = inner_point(&sys, &cap, rng)?;
    let cert = member_conv_hull(&sys, &set, &x_in)?;
    if !cert.verdict {
        t.fail(json!({ "system": sys, "C": set, "x": x_in }), true, false);
    } else {
        check_witness(&sys, &set, &x_in, &cert, &mut t)?;
    }

    for x in gen::query_points(&sys, &set, 3, rng)? {
        let cert = member_clconv(&sys, &set, &x)?;
        if !cert.closedness_certified {
            t.fail(json!({ "check": "closedness", "system": sys, "C": set }), true, false);
        }
        if cert.verdict {
            check_witness(&sys, &set, &x, &cert, &mut t)?;
        }
        if sys.is_vector() {
            compare_with_brute(&sys, &set, &x, cert.verdict, &mut t)?;
        }
        let clear = clear_verdict(&sys, &set, &x)?;
        outer_check(&sys, &set, &x, &cert, clear, rng, &mut t)?;
    }
    Ok(t)
}

/// Hulls of `λ⁻¹(D)` for a convex polytope `D ⊆ K`, including singletons.
pub fn thm_main(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let mut t = Trial::default();
    let m = if i % 2 == 0 { 1 } else { rng.random_range(2..=4) };
    let d_pts = gen::cone_points(&sys, m, rng);
    let set = gen::finite_spec(&d_pts);
    let body = ConvexBody::VPolytope {
        vertices: d_pts.clone(),
    };

    let x_in = inner_point(&sys, &d_pts, rng)?;
    if !member_conv_hull_of_convex_d(&sys, &body, &x_in)?.verdict {
        t.fail(json!({ "system": sys, "D": d_pts, "x": x_in }), true, false);
    }

    for x in gen::query_points(&sys, &set, 3, rng)? {
        let cert = member_conv_hull_of_convex_d(&sys, &body, &x)?;
        let clear = clear_verdict(&sys, &set, &x)?;
        if m == 1 {
            // Orbit hull of a point is the set of points it majorizes.
            let y = sys.align(&x, &d_pts[0])?;
            let maj = majorizes(&sys, &x, &y)?;
            if maj != cert.verdict && clear.is_some() {
                t.fail(
                    json!({ "check": "orbit_hull_majorization", "system": sys, "u": d_pts[0], "x": x }),
                    maj,
                    cert.verdict,
                );
            }
        }
        if sys.is_vector() {
            compare_with_brute(&sys, &set, &x, cert.verdict, &mut t)?;
        }
        outer_check(&sys, &set, &x, &cert, clear, rng, &mut t)?;
    }
    Ok(t)
}

/// `C` and any `D` with `C ∩ K ⊆ D ⊆ conv(C ∩ K)` have the same hull.
pub fn prop_equal_hulls(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let mut t = Trial::default();
    let pts = gen::finite_set(&sys, 5, rng);
    let set = gen::finite_spec(&pts);
    let cap = cap_points(&sys, &set)?;
    let mut d_pts = cap.clone();
    let gens: Vec<Vec<f64>> = cap.iter().map(|p| p.0.clone()).collect();
    for _ in 0..rng.random_range(1..=3) {
        let w = gen::simplex_weights(rng, gens.len());
        d_pts.push(PointW(gen::combine(&gens, &w)));
    }
    let d_set = gen::finite_spec(&d_pts);
    for x in gen::query_points(&sys, &set, 6, rng)? {
        let Some(expected) = clear_verdict(&sys, &set, &x)? else {
            t.skipped += 1;
            continue;
        };
        let got = member_conv_hull(&sys, &d_set, &x)?.verdict;
        if got != expected {
            t.fail(json!({ "system": sys, "C": pts, "D": d_pts, "x": x }), expected, got);
        }
        if sys.is_vector() && brute_conv_member(&sys, &d_set, &x)? != expected {
            t.fail(json!({ "check": "brute_on_D", "system": sys, "D": d_pts, "x": x }), expected, !expected);
        }
    }
    Ok(t)
}

/// Query points per condition-(a) instance.
pub const THM35_QUERIES: usize = 200;

/// The two sets of the convexify-before-or-after remark, used by the first
/// two trials of `thm35`.
pub fn remark_sets() -> [SetSpec; 2] {
    [
        SetSpec::finite(vec![vec![1.0, 0.0], vec![1.0, 2.0]]),
        SetSpec::finite(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
    ]
}

/// Outcome of one condition-(a) instance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Thm35Instance {
    pub condition_holds: bool,
    pub hulls_agree: bool,
    pub checked: usize,
    pub skipped: usize,
}

/// Condition (a) against agreement of `λ⁻¹(((conv C) ∩ K) + K°)` with the
/// hull of `λ⁻¹(C)` on sampled points plus the condition's counterexample.
pub fn thm35_instance(
    sys: &SpectralSystem,
    set: &SetSpec,
    queries: usize,
    rng: &mut Rng8,
) -> Result<Thm35Instance, Error> {
    let cond = check_condition_a(sys, set)?;
    let mut agree = true;
    let mut checked = 0;
    let mut skipped = 0;
    for x in gen::query_points(sys, set, queries, rng)? {
        let (Some(a), Some(b)) = (clear_via_conv_c(sys, set, &x)?, clear_verdict(sys, set, &x)?) else {
            skipped += 1;
            continue;
        };
        checked += 1;
        agree &= a == b;
    }
    if let Some(v) = &cond.counterexample {
        let x = gen::lift(sys, v, rng)?;
        checked += 1;
        agree &= member_via_conv_c(sys, set, &x)? == member_conv_hull(sys, set, &x)?.verdict;
    }
    Ok(Thm35Instance {
        condition_holds: cond.holds,
        hulls_agree: agree,
        checked,
        skipped,
    })
}

pub fn thm35(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let (sys, set) = if i < 2 {
        (SpectralSystem::Reorder(2), remark_sets()[i].clone())
    } else {
        let sys = match i % 5 {
            0 => SpectralSystem::Reorder(2),
            1 => SpectralSystem::Abs(2),
            2 => SpectralSystem::AbsReorder(2),
            3 => SpectralSystem::SymEig(2),
            _ => SpectralSystem::SingVal(2, 3),
        };
        let set = gen::finite_spec(&gen::finite_set(&sys, 5, rng));
        (sys, set)
    };
    let mut t = Trial::default();
    let r = thm35_instance(&sys, &set, THM35_QUERIES, rng)?;
    t.skipped += r.skipped;
    if r.condition_holds != r.hulls_agree {
        t.fail(
            json!({ "system": sys, "C": set }),
            json!({ "condition_a": r.condition_holds }),
            json!({ "hulls_agree": r.hulls_agree, "checked": r.checked }),
        );
    }
    Ok(t)
}

/// LP for `w ∈ conv(B) + K°` when `with_cap` is false, or for
/// `w ∈ ((conv(B) + K°) ∩ K) + K°` when it is true. Polar and cone rows are
/// relaxed by `tol`; split equalities keep `|tol|`.
fn in_b_plus_polar(
    sys: &SpectralSystem,
    b: &[PointW],
    w: &[f64],
    with_cap: bool,
    tol: f64,
) -> Result<bool, Error> {
    let d = sys.dim_w();
    let m = b.len();
    let nv = if with_cap { m + d } else { m };
    let mut lp = LpProblem::new(nv);
    let mut bounds = vec![Bound::NONNEG; m];
    bounds.resize(nv, Bound::FREE);
    lp.bounds = Some(bounds);
    let mut row = vec![0.0; nv];
    row[..m].fill(1.0);
    lp.add_eq(row, 1.0);
    let polar = sys.polar_k();
    let n_ineq = polar.ineq.len();
    for (j, n) in polar.split_normals().iter().enumerate() {
        let t = if j < n_ineq { tol } else { tol.abs() };
        let nb: Vec<f64> = b.iter().map(|p| dot(n, p)).collect();
        if with_cap {
            // u − Σ tᵢ bᵢ ∈ K° and w − u ∈ K°.
            let mut r1: Vec<f64> = nb.iter().map(|v| -v).collect();
            r1.extend_from_slice(n);
            lp.add_le(r1, t);
            let mut r2 = vec![0.0; m];
            r2.extend(n.iter().map(|v| -v));
            lp.add_le(r2, t - dot(n, w));
        } else {
            let r: Vec<f64> = nb.iter().map(|v| -v).collect();
            lp.add_le(r, t - dot(n, w));
        }
    }
    if with_cap {
        for r in sys.cone_k().split_normals() {
            let mut row = vec![0.0; m];
            row.extend_from_slice(&r);
            lp.add_le(row, tol.max(0.0));
        }
    }
    Ok(lp_solve(&lp)?.is_optimal())
}

fn clear_b_plus_polar(
    sys: &SpectralSystem,
    b: &[PointW],
    w: &[f64],
    with_cap: bool,
) -> Result<Option<bool>, Error> {
    let lo = in_b_plus_polar(sys, b, w, with_cap, -BOUNDARY_MARGIN)?;
    let hi = in_b_plus_polar(sys, b, w, with_cap, BOUNDARY_MARGIN)?;
    Ok((lo == hi).then_some(lo))
}

/// A point `λ(z) ∈ K` with `λ(z) − a ∈ K°`, for `z` in the orbit hull of `a`.
fn majorized_point(sys: &SpectralSystem, a: &[f64], rng: &mut Rng8) -> Result<PointW, Error> {
    let k = rng.random_range(2..=3);
    let orbit = sys.orbit_sample(a, k, rng.random())?;
    let z = PointV::combination(&orbit, &gen::simplex_weights(rng, k)).expect("nonempty");
    sys.lambda(&z)
}

/// `λ⁻¹(A + K°) = λ⁻¹(B + K°)` forces `B ⊆ A + K°` and `A ⊆ B + K°`;
/// tested with `A`, `B` replaced by their hulls.
pub fn lem_ab(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::small_system(i, 3, rng);
    let mut t = Trial::default();
    let a = gen::cone_points(&sys, rng.random_range(1..=3), rng);
    let mut b = a.clone();
    for p in &a {
        b.push(majorized_point(&sys, p, rng)?);
    }
    if rng.random_bool(0.5) {
        // An extra point that usually breaks the hypothesis.
        b.push(sys.random_k_point(rng));
    }
    let inputs = || json!({ "system": sys, "A": a, "B": b });

    // The preimages agree iff (A + K°) ∩ K = (B + K°) ∩ K; the points of
    // A ∪ B certify it, since each is its own spectrum. These points sit on
    // the boundary by construction, so they are decided at the plain slack.
    let mut hypothesis = true;
    for u in a.iter().chain(&b) {
        hypothesis &=
            in_b_plus_polar(&sys, &a, u, false, EPS)? == in_b_plus_polar(&sys, &b, u, false, EPS)?;
    }
    let mut conclusion = true;
    for u in &b {
        conclusion &= in_b_plus_polar(&sys, &a, u, false, EPS)?;
    }
    for u in &a {
        conclusion &= in_b_plus_polar(&sys, &b, u, false, EPS)?;
    }
    if hypothesis && !conclusion {
        t.fail(inputs(), "conclusion", "hypothesis without conclusion");
    }
    if conclusion != hypothesis {
        t.fail(json!({ "check": "certifying_set", "data": inputs() }), conclusion, hypothesis);
    }

    // Random points of V agree whenever the hypothesis holds.
    if hypothesis {
        for _ in 0..10 {
            let x = sys.random_point(rng);
            let w = sys.lambda(&x)?;
            let (Some(x_a), Some(x_b)) = (
                clear_b_plus_polar(&sys, &a, &w, false)?,
                clear_b_plus_polar(&sys, &b, &w, false)?,
            ) else {
                t.skipped += 1;
                continue;
            };
            if x_a != x_b {
                t.fail(json!({ "check": "preimage_agreement", "data": inputs(), "x": x }), x_a, x_b);
            }
        }
    }
    Ok(t)
}

/// Sampled points per `lem_B` trial.
const LEM_B_SAMPLES: usize = 50;

/// `((B + K°) ∩ K) + K° = B + K°`, tested with `B` replaced by its hull.
pub fn lem_b(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::small_system(i, 3, rng);
    let mut t = Trial::default();
    let b = gen::cone_points(&sys, rng.random_range(1..=4), rng);
    let d = sys.dim_w();
    for j in 0..LEM_B_SAMPLES {
        let w: Vec<f64> = if j % 2 == 0 {
            let p = &b[rng.random_range(0..b.len())];
            let noise = gen::gaussian_vec(rng, d);
            p.iter().zip(&noise).map(|(x, e)| x + 0.7 * e).collect()
        } else {
            gen::gaussian_vec(rng, d)
        };
        let (Some(direct), Some(capped)) = (
            clear_b_plus_polar(&sys, &b, &w, false)?,
            clear_b_plus_polar(&sys, &b, &w, true)?,
        ) else {
            t.skipped += 1;
            continue;
        };
        if direct != capped {
            t.fail(json!({ "system": sys, "B": b, "w": w }), direct, capped);
        }
    }
    Ok(t)
}

/// Queries per invariant set.
const INVARIANT_QUERIES: usize = 4;
/// Largest invariant set sent through exact vertex enumeration.
const CONDITION_A_MAX_POINTS: usize = 12;

/// Reduced systems and invariant sets.
pub fn invariance(i: usize, rng: &mut Rng8) -> Result<Trial, Error> {
    let sys = gen::system_for(i, rng);
    let mut t = Trial::default();

    // Orbits sit in μ(u) + K° and μ is idempotent.
    let u: Vec<f64> = if rng.random_bool(0.2) {
        gen::gaussian_vec(rng, sys.dim_w()).iter().map(|x| x.round()).collect()
    } else {
        gen::gaussian_vec(rng, sys.dim_w())
    };
    if !check_orbit_in_mu_polar(&sys, &u)? {
        t.fail(json!({ "check": "orbit_in_mu_polar", "system": sys, "u": u }), true, false);
    }
    let mu = sys.reduced_mu(&u)?;
    if key(&sys.reduced_mu(&mu)?) != key(&mu) {
        t.fail(json!({ "check": "mu_idempotent", "system": sys, "u": u }), true, false);
    }

    // An invariant set: the orbit closure of a few random points.
    let seed_pts: Vec<PointW> = (0..rng.random_range(1..=3))
        .map(|_| PointW(gen::gaussian_vec(rng, sys.dim_w())))
        .collect();
    let closure = orbit_closure(&sys, &seed_pts)?;
    let set = gen::finite_spec(&closure);
    let inputs = || json!({ "system": sys, "generators": seed_pts });
    if !is_feasible(&sys, &set)? {
        t.fail(json!({ "check": "invariant_feasible", "data": inputs() }), true, false);
        return Ok(t);
    }
    mu_image(&sys, &set)?;
    for x in gen::query_points(&sys, &set, INVARIANT_QUERIES, rng)? {
        let Some(hull) = clear_verdict(&sys, &set, &x)? else {
            t.skipped += 1;
            continue;
        };
        let transfer = transfer_conv_member(&sys, &set, &x)?;
        if transfer != hull {
            t.fail(json!({ "check": "transfer", "data": inputs(), "x": x }), hull, transfer);
        }
    }
    if sys.dim_w() <= CONDITION_A_EXACT_DIM && closure.len() <= CONDITION_A_MAX_POINTS {
        let cond = check_condition_a(&sys, &set)?;
        if !cond.holds {
            t.fail(json!({ "check": "condition_a", "data": inputs() }), true, &cond.counterexample);
        }
    }
    if closure.len() <= 200 {
        let rep = corollary_d_insensitivity(&sys, &set, 1, rng.random())?;
        if rep.disagreements + rep.upper_disagreements > 0 {
            t.fail(json!({ "check": "d_insensitivity", "data": inputs() }), 0, &rep);
        }
        t.skipped += rep.skipped_boundary;
    }
    Ok(t)
}
