//! Membership in `conv λ⁻¹(C)` and friends.
//!
//! Everything reduces to one joint feasibility problem in `W`: is there a
//! `u` in a convex body `D ⊆ K` with `λ(x) − u ∈ K°`? For polytopes and
//! polyhedra this is a single LP, for the ordered ellipsoid slice a convex
//! QP. Infeasibility certificates give a normal `a ∈ K` that is pulled back
//! to a separating direction in `V` through the alignment map.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::linalg::{
    dot, lp_solve, norm, quad_feasible, solve, Bound, LpConstraint, LpProblem, LpStatus, Matrix,
    Relation,
};
use crate::sets::{
    body_is_nonempty, convex_weights, dedup_exact, feasible_body, hpoly_lp, intersect_with_k,
    ConvexBody, SetSpec,
};
use crate::system::{PointV, PointW, SpectralSystem};
use crate::EPS;

/// Required gap between `⟨c, x⟩` and the support value for a separator.
pub const SEPARATION_MARGIN: f64 = 1e-9;
/// Largest sparsity handled by the face enumeration of the ellipsoid support.
pub const MAX_FACE_K: usize = 15;

/// Outcome of a hull-membership query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipCertificate {
    pub verdict: bool,
    /// Point `u` of the convex body with `λ(x) − u ∈ K°`.
    pub witness_u: Option<PointW>,
    /// Convex weights over the points of `C ∩ K` producing `witness_u`.
    pub weights: Option<Vec<f64>>,
    /// Direction `c` with `⟨c, x⟩ > sup` over the hull.
    #[serde(rename = "separator")]
    pub separator_c: Option<PointV>,
    pub closedness_certified: bool,
}

impl Serialize for PointV {
    /// Row-major flat array.
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        self.flat().serialize(s)
    }
}

/// Status of a support-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupStatus {
    Optimal,
    Unbounded,
}

/// `sup_{u ∈ D} ⟨a, u⟩` with a maximizer when attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupResult {
    pub value: f64,
    pub argmax_u: Option<PointW>,
    pub status: SupStatus,
}

/// Raw result of the joint feasibility problem.
#[derive(Debug, Clone)]
pub(crate) struct Decision {
    pub verdict: bool,
    pub witness_u: Option<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
    /// Normal `a ∈ K` with `⟨a, λ(x)⟩ > sup_D ⟨a, ·⟩` when the verdict is false.
    pub normal: Option<Vec<f64>>,
}

/// Rows `−⟨n, G z⟩ ≤ tol − ⟨n, w⟩` encoding `w − Gz ∈ K°` (relaxed by `tol`).
///
/// Normals past `n_ineq` are halves of split equalities; those keep the
/// slack `|tol|`, since an equality cannot be shrunk.
fn push_polar_rows(
    lp: &mut LpProblem,
    normals: &[Vec<f64>],
    n_ineq: usize,
    gens: &[Vec<f64>],
    w: &[f64],
    tol: f64,
) -> core::ops::Range<usize> {
    let start = lp.constraints.len();
    for (i, n) in normals.iter().enumerate() {
        let row: Vec<f64> = gens.iter().map(|g| -dot(n, g)).collect();
        let t = if i < n_ineq { tol } else { tol.abs() };
        lp.add_le(row, t - dot(n, w));
    }
    start..lp.constraints.len()
}

fn identity_gens(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        })
        .collect()
}

fn combine(gens: &[Vec<f64>], z: &[f64], d: usize) -> Vec<f64> {
    let mut u = vec![0.0; d];
    for (g, zj) in gens.iter().zip(z) {
        for (ui, gi) in u.iter_mut().zip(g) {
            *ui += zj * gi;
        }
    }
    u
}

fn normal_from_ray(normals: &[Vec<f64>], ray: &[f64], d: usize) -> Vec<f64> {
    let mut a = vec![0.0; d];
    for (n, pi) in normals.iter().zip(ray) {
        let pi = pi.max(0.0);
        for (ai, ni) in a.iter_mut().zip(n) {
            *ai += pi * ni;
        }
    }
    a
}

/// Decides `∃ u ∈ body : w − u ∈ K°` with the polar rows relaxed by `tol`.
pub(crate) fn decide(
    sys: &SpectralSystem,
    body: &ConvexBody,
    w: &[f64],
    tol: f64,
) -> Result<Decision> {
    let d = sys.dim_w();
    check_len("spectral point", d, w.len())?;
    let polar_cone = sys.polar_k();
    let n_ineq = polar_cone.ineq.len();
    let normals = polar_cone.split_normals();
    match body {
        ConvexBody::VPolytope { vertices } => {
            if vertices.is_empty() {
                return Err(Error::Infeasible);
            }
            let gens: Vec<Vec<f64>> = vertices.iter().map(|v| v.0.clone()).collect();
            let m = gens.len();
            let mut lp = LpProblem::new(m);
            lp.bounds = Some(vec![Bound::NONNEG; m]);
            lp.add_eq(vec![1.0; m], 1.0);
            let polar = push_polar_rows(&mut lp, &normals, n_ineq, &gens, w, tol);
            let r = lp_solve(&lp)?;
            Ok(match r.status {
                LpStatus::Optimal => Decision {
                    verdict: true,
                    witness_u: Some(combine(&gens, &r.solution, d)),
                    weights: Some(r.solution),
                    normal: None,
                },
                _ => Decision {
                    verdict: false,
                    witness_u: None,
                    weights: None,
                    normal: Some(normal_from_ray(&normals, &r.dual_certificate[polar], d)),
                },
            })
        }
        ConvexBody::HPolyhedronWithCone { a, b, cone } => {
            let mut lp = hpoly_lp(a, b, cone, d);
            let polar = push_polar_rows(&mut lp, &normals, n_ineq, &identity_gens(d), w, tol);
            let r = lp_solve(&lp)?;
            Ok(match r.status {
                LpStatus::Optimal => Decision {
                    verdict: true,
                    witness_u: Some(r.solution),
                    weights: None,
                    normal: None,
                },
                _ => Decision {
                    verdict: false,
                    witness_u: None,
                    weights: None,
                    normal: Some(normal_from_ray(&normals, &r.dual_certificate[polar], d)),
                },
            })
        }
        ConvexBody::OrderedEllipsoidSlice { q, k, n } => {
            check_len("ellipsoid dimension", d, *n)?;
            let (lin, first_polar) = ellipsoid_rows(*k, &normals, w, tol);
            let f = quad_feasible(q, &lin, 1.0)?;
            if f.feasible {
                let mut u = f.witness.expect("feasible has witness");
                u.resize(d, 0.0);
                return Ok(Decision {
                    verdict: true,
                    witness_u: Some(u),
                    weights: None,
                    normal: None,
                });
            }
            let mult = if f.multipliers.is_empty() {
                f.farkas.unwrap_or_default()
            } else {
                f.multipliers
            };
            let ray = mult.get(first_polar..).unwrap_or(&[]);
            Ok(Decision {
                verdict: false,
                witness_u: None,
                weights: None,
                normal: Some(normal_from_ray(&normals, ray, d)),
            })
        }
    }
}

/// Linear rows on `v ∈ ℝᵏ`: ordering `v₁ ≥ ⋯ ≥ v_k ≥ 0` followed by one
/// partial-sum row per polar normal. Returns the rows and the index of the
/// first partial-sum row.
pub(crate) fn ellipsoid_rows(
    k: usize,
    normals: &[Vec<f64>],
    w: &[f64],
    tol: f64,
) -> (Vec<LpConstraint>, usize) {
    let mut lin = Vec::new();
    for i in 0..k.saturating_sub(1) {
        let mut r = vec![0.0; k];
        r[i] = -1.0;
        r[i + 1] = 1.0;
        lin.push(le(r, 0.0));
    }
    let mut r = vec![0.0; k];
    r[k - 1] = -1.0;
    lin.push(le(r, 0.0));
    let first = lin.len();
    for n in normals {
        let row: Vec<f64> = n[..k].iter().map(|x| -x).collect();
        lin.push(le(row, tol - dot(n, w)));
    }
    (lin, first)
}

fn le(row: Vec<f64>, rhs: f64) -> LpConstraint {
    LpConstraint {
        row,
        relation: Relation::Le,
        rhs,
    }
}

/// `x ≺ y`: `λ(x) − λ(y) ∈ K°`.
pub fn majorizes(sys: &SpectralSystem, x: &PointV, y: &PointV) -> Result<bool> {
    let lx = sys.lambda(x)?;
    let ly = sys.lambda(y)?;
    let diff: Vec<f64> = lx.iter().zip(ly.iter()).map(|(a, b)| a - b).collect();
    Ok(sys.in_polar_k(&diff, EPS))
}

/// Support function of a convex body inside `K`.
pub fn support(body: &ConvexBody, a: &[f64]) -> Result<SupResult> {
    match body {
        ConvexBody::VPolytope { vertices } => {
            let best = vertices
                .iter()
                .map(|v| (dot(a, v), v))
                .max_by(|p, q| p.0.total_cmp(&q.0))
                .ok_or(Error::Infeasible)?;
            Ok(SupResult {
                value: best.0,
                argmax_u: Some(best.1.clone()),
                status: SupStatus::Optimal,
            })
        }
        ConvexBody::HPolyhedronWithCone { a: am, b, cone } => {
            let d = a.len();
            let lp = hpoly_lp(am, b, cone, d).maximize(a.to_vec());
            let r = lp_solve(&lp)?;
            match r.status {
                LpStatus::Optimal => Ok(SupResult {
                    value: r.optimal_value,
                    argmax_u: Some(PointW(r.solution)),
                    status: SupStatus::Optimal,
                }),
                LpStatus::Unbounded => Ok(SupResult {
                    value: f64::INFINITY,
                    argmax_u: None,
                    status: SupStatus::Unbounded,
                }),
                LpStatus::Infeasible => Err(Error::Infeasible),
            }
        }
        ConvexBody::OrderedEllipsoidSlice { q, k, n } => {
            check_len("direction", *n, a.len())?;
            let (value, v) = ellipsoid_support(q, &a[..*k])?;
            let mut u = v;
            u.resize(*n, 0.0);
            Ok(SupResult {
                value,
                argmax_u: Some(PointW(u)),
                status: SupStatus::Optimal,
            })
        }
    }
}

/// `max ⟨a, v⟩` over `{v₁ ≥ ⋯ ≥ v_k ≥ 0, vᵀQv ≤ 1}`.
///
/// Writing `v = Bs` with `s ≥ 0` (column `j` of `B` has `j` leading ones)
/// turns the cone into the orthant. On each support set `S` of `s` the
/// optimum is `s_S ∝ M_S⁻¹ g_S` with `M = BᵀQB`, `g = Bᵀa`; every support
/// is tried and infeasible candidates dropped.
fn ellipsoid_support(q: &Matrix, a: &[f64]) -> Result<(f64, Vec<f64>)> {
    let k = a.len();
    if k > MAX_FACE_K {
        return Err(Error::Resource(alloc::format!(
            "face enumeration for k = {k} exceeds k ≤ {MAX_FACE_K}"
        )));
    }
    // g_j = Σ_{i≤j} a_i ; M_{ij} = Σ_{p≤i, r≤j} Q_{pr}
    let mut g = vec![0.0; k];
    let mut acc = 0.0;
    for j in 0..k {
        acc += a[j];
        g[j] = acc;
    }
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut s = 0.0;
            for p in 0..=i {
                for r in 0..=j {
                    s += q[(p, r)];
                }
            }
            m[(i, j)] = s;
        }
    }
    let mut best = (0.0, vec![0.0; k]);
    for mask in 1u32..(1u32 << k) {
        let idx: Vec<usize> = (0..k).filter(|j| mask >> j & 1 == 1).collect();
        let sz = idx.len();
        let mut ms = Matrix::zeros(sz, sz);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                ms[(r, c)] = m[(i, j)];
            }
        }
        let gs: Vec<f64> = idx.iter().map(|&i| g[i]).collect();
        let Some(y) = solve(&ms, &gs, 1e-14) else {
            continue;
        };
        let quad = dot(&gs, &y);
        if quad <= 0.0 {
            continue;
        }
        let scale = libm::sqrt(quad);
        if y.iter().any(|yi| *yi < -1e-12 * scale) {
            continue;
        }
        if scale > best.0 {
            let mut s = vec![0.0; k];
            for (r, &i) in idx.iter().enumerate() {
                s[i] = (y[r] / scale).max(0.0);
            }
            // v_i = Σ_{j≥i} s_j
            let mut v = vec![0.0; k];
            let mut tail = 0.0;
            for i in (0..k).rev() {
                tail += s[i];
                v[i] = tail;
            }
            best = (scale, v);
        }
    }
    Ok(best)
}

/// `sup_{y ∈ λ⁻¹(C)} ⟨c, y⟩ = sup_{u ∈ C∩K} ⟨λ(c), u⟩`.
pub fn spectral_sup(sys: &SpectralSystem, c: &PointV, set: &SetSpec) -> Result<SupResult> {
    let body = feasible_body(sys, set)?;
    support(&body, &sys.lambda(c)?)
}

/// Whether closedness of `D + K°` is guaranteed: `D` compact or polyhedral
/// (every `K` here is polyhedral).
pub fn closedness_certified(sys: &SpectralSystem, body: &ConvexBody) -> Result<bool> {
    Ok(body.is_polyhedral() || body.is_bounded(sys.dim_w())?)
}

/// Turns a normal `a ∈ K` into a direction `c ∈ V` and checks it separates `x`.
fn separator_from_normal(
    sys: &SpectralSystem,
    body: &ConvexBody,
    x: &PointV,
    w: &[f64],
    normal: &[f64],
) -> Result<Option<PointV>> {
    let mut candidates = Vec::new();
    if norm(normal) > 0.0 {
        candidates.push(normal.to_vec());
    }
    candidates.push(w.to_vec());
    for cand in candidates {
        let mut a = sys.reduced_mu(&cand)?.0;
        let na = norm(&a);
        if na == 0.0 || !na.is_finite() {
            continue;
        }
        for ai in a.iter_mut() {
            *ai /= na;
        }
        let c = sys.align(x, &a)?;
        let sup = support(body, &sys.lambda(&c)?)?;
        if sup.status == SupStatus::Optimal && c.inner(x) > sup.value + SEPARATION_MARGIN {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn certify(
    sys: &SpectralSystem,
    body: &ConvexBody,
    x: &PointV,
    tol: f64,
) -> Result<MembershipCertificate> {
    let w = sys.lambda(x)?;
    let dec = decide(sys, body, &w, tol)?;
    let closed = closedness_certified(sys, body)?;
    let separator_c = match (&dec.normal, dec.verdict) {
        (Some(a), false) if closed => separator_from_normal(sys, body, x, &w, a)?,
        _ => None,
    };
    Ok(MembershipCertificate {
        verdict: dec.verdict,
        witness_u: dec.witness_u.map(PointW),
        weights: dec.weights,
        separator_c,
        closedness_certified: closed,
    })
}

/// Decides `x ∈ conv λ⁻¹(C)` via `λ(x) ∈ conv(C∩K) + K°`.
pub fn member_conv_hull(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
) -> Result<MembershipCertificate> {
    member_conv_hull_tol(sys, set, x, EPS)
}

/// As [`member_conv_hull`] with an explicit polar slack (negative values
/// shrink the hull, which is how callers detect boundary-adjacent points).
pub fn member_conv_hull_tol(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
    tol: f64,
) -> Result<MembershipCertificate> {
    let body = feasible_body(sys, set)?;
    certify(sys, &body, x, tol)
}

/// Decides `x ∈ conv λ⁻¹(D) = λ⁻¹(D + K°)` for a convex `D ⊆ K`.
pub fn member_conv_hull_of_convex_d(
    sys: &SpectralSystem,
    d: &ConvexBody,
    x: &PointV,
) -> Result<MembershipCertificate> {
    if !body_is_nonempty(d, sys.dim_w())? {
        return Err(Error::Infeasible);
    }
    certify(sys, d, x, EPS)
}

/// Membership in `clconv λ⁻¹(C)`; exact whenever `closedness_certified`.
pub fn member_clconv(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
) -> Result<MembershipCertificate> {
    member_conv_hull(sys, set, x)
}

/// A direction `c` with `⟨c, x⟩ > spectral_sup(c, C) + margin`.
pub fn separate(sys: &SpectralSystem, set: &SetSpec, x: &PointV) -> Result<PointV> {
    let body = feasible_body(sys, set)?;
    let w = sys.lambda(x)?;
    let dec = decide(sys, &body, &w, EPS)?;
    if dec.verdict {
        return Err(Error::IsMember);
    }
    if !closedness_certified(sys, &body)? {
        return Err(Error::Unsupported("closedness of D + K° not certified".into()));
    }
    let a = dec.normal.unwrap_or_default();
    separator_from_normal(sys, &body, x, &w, &a)?
        .ok_or_else(|| Error::Numerical("separator failed its margin check".into()))
}

/// Decides `λ(x) ∈ ((conv C) ∩ K) + K°`, which contains the hull image and
/// equals it exactly when condition (a) holds.
pub fn member_via_conv_c(sys: &SpectralSystem, set: &SetSpec, x: &PointV) -> Result<bool> {
    member_via_conv_c_tol(sys, set, x, EPS)
}

pub fn member_via_conv_c_tol(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
    tol: f64,
) -> Result<bool> {
    set.validate(sys)?;
    let w = sys.lambda(x)?;
    match set {
        SetSpec::FinitePoints { points } => {
            let gens: Vec<Vec<f64>> = dedup_exact(points).into_iter().map(|p| p.0).collect();
            Ok(conv_c_lp(sys, &gens, &w, tol)?.is_some())
        }
        SetSpec::HPolyhedron { .. } => {
            let body = intersect_with_k(sys, set)?;
            Ok(decide(sys, &body, &w, tol)?.verdict)
        }
        SetSpec::SparseEllipsoid { .. } => Err(Error::Unsupported(
            "conv C for sparse ellipsoid sets is not polyhedral".into(),
        )),
    }
}

/// LP over `u = Σ tⱼ gⱼ`, `t ∈ Δ`, `u ∈ K`, `w − u ∈ K°`; returns `u`.
fn conv_c_lp(
    sys: &SpectralSystem,
    gens: &[Vec<f64>],
    w: &[f64],
    tol: f64,
) -> Result<Option<Vec<f64>>> {
    let m = gens.len();
    let mut lp = LpProblem::new(m);
    lp.bounds = Some(vec![Bound::NONNEG; m]);
    lp.add_eq(vec![1.0; m], 1.0);
    for r in sys.cone_k().split_normals() {
        let row: Vec<f64> = gens.iter().map(|g| dot(&r, g)).collect();
        lp.add_le(row, tol.max(0.0));
    }
    let polar = sys.polar_k();
    push_polar_rows(&mut lp, &polar.split_normals(), polar.ineq.len(), gens, w, tol);
    let r = lp_solve(&lp)?;
    Ok(r.is_optimal().then(|| combine(gens, &r.solution, sys.dim_w())))
}

/// Result of checking `(conv C) ∩ K ⊆ conv(C ∩ K) + K°`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionA {
    pub holds: bool,
    pub counterexample: Option<PointW>,
    /// `true` when decided by vertex enumeration; `false` for the sampled
    /// refutation path, where `holds` only means "not refuted".
    pub exact: bool,
}

/// Largest `dim W` handled by exact vertex enumeration.
pub const CONDITION_A_EXACT_DIM: usize = 3;
const REFUTATION_SAMPLES: usize = 2000;

fn in_target(sys: &SpectralSystem, cap: &[PointW], u: &[f64]) -> Result<bool> {
    if cap.is_empty() {
        return Ok(false);
    }
    let body = ConvexBody::VPolytope {
        vertices: cap.to_vec(),
    };
    Ok(decide(sys, &body, u, EPS)?.verdict)
}

/// Checks condition (a) for a finite `C`.
pub fn check_condition_a(sys: &SpectralSystem, set: &SetSpec) -> Result<ConditionA> {
    let SetSpec::FinitePoints { points } = set else {
        return Err(Error::Unsupported(
            "condition (a) is checked for finite sets only".into(),
        ));
    };
    set.validate(sys)?;
    let pts = dedup_exact(points);
    let cap: Vec<PointW> = pts
        .iter()
        .filter(|p| sys.in_cone_k(p, EPS))
        .cloned()
        .collect();
    if sys.dim_w() <= CONDITION_A_EXACT_DIM {
        for v in conv_c_cap_k_vertices(sys, &pts)? {
            if !in_target(sys, &cap, &v)? {
                return Ok(ConditionA {
                    holds: false,
                    counterexample: Some(PointW(v)),
                    exact: true,
                });
            }
        }
        return Ok(ConditionA {
            holds: true,
            counterexample: None,
            exact: true,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..REFUTATION_SAMPLES {
        let t: Vec<f64> = (0..pts.len())
            .map(|_| -libm::log(1.0 - rng.random::<f64>()))
            .collect();
        let s: f64 = t.iter().sum();
        let u = combine(
            &pts.iter().map(|p| p.0.clone()).collect::<Vec<_>>(),
            &t.iter().map(|x| x / s).collect::<Vec<_>>(),
            sys.dim_w(),
        );
        if sys.in_cone_k(&u, 0.0) && !in_target(sys, &cap, &u)? {
            return Ok(ConditionA {
                holds: false,
                counterexample: Some(PointW(u)),
                exact: false,
            });
        }
    }
    Ok(ConditionA {
        holds: true,
        counterexample: None,
        exact: false,
    })
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// A superset of the vertices of `(conv C) ∩ K`, all lying in that polytope.
///
/// A vertex lies in the relative interior of some face `F` of `conv C` of
/// dimension `f` and is cut out there by `f` independent active rows of
/// `K`; so it is the unique point of `aff(S)` (for `f+1` affinely
/// independent points `S ⊆ F`) on which those rows vanish.
pub fn conv_c_cap_k_vertices(sys: &SpectralSystem, pts: &[PointW]) -> Result<Vec<Vec<f64>>> {
    let d = sys.dim_w();
    let rows = sys.cone_k().split_normals();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for f in 0..=d.min(pts.len().saturating_sub(1)) {
        for s in subsets(pts.len(), f + 1) {
            let base = &pts[s[0]];
            let diffs: Vec<Vec<f64>> = s[1..]
                .iter()
                .map(|&j| pts[j].iter().zip(base.iter()).map(|(a, b)| a - b).collect())
                .collect();
            if crate::linalg::matrix::rank(&diffs, 1e-12) != f {
                continue;
            }
            for r in subsets(rows.len(), f) {
                let mut m = Matrix::zeros(f + 1, f + 1);
                let mut rhs = vec![0.0; f + 1];
                rhs[0] = 1.0;
                for c in 0..=f {
                    m[(0, c)] = 1.0;
                    for (ri, &row) in r.iter().enumerate() {
                        m[(ri + 1, c)] = dot(&rows[row], &pts[s[c]]);
                    }
                }
                let Some(alpha) = solve(&m, &rhs, 1e-12) else {
                    continue;
                };
                let gens: Vec<Vec<f64>> = s.iter().map(|&j| pts[j].0.clone()).collect();
                let u = combine(&gens, &alpha, d);
                if !sys.in_cone_k(&u, 1e-9) || convex_weights(pts, &u, 1e-9)?.is_none() {
                    continue;
                }
                let dup = out
                    .iter()
                    .any(|v| v.iter().zip(&u).all(|(a, b)| (a - b).abs() <= 1e-10));
                if !dup {
                    out.push(u);
                }
            }
        }
    }
    Ok(out)
}

/// Membership in `λ⁻¹(D + K°)` for `C = {u : u₁ ≥ 1, u₂² ≤ u₁² − 1}` in
/// `Reorder(2)`, where `D = C ∩ K = C`.
///
/// `D + K°` is the open half-plane `{u₁ + u₂ > 0}`, so this set is not
/// closed and the answer is reported with `closedness_certified = false`.
pub fn hyperbola_member(x: [f64; 2]) -> MembershipCertificate {
    let w = if x[0] >= x[1] { x } else { [x[1], x[0]] };
    let s = w[0] + w[1];
    if s.is_nan() || s <= 0.0 {
        return MembershipCertificate {
            verdict: false,
            witness_u: None,
            weights: None,
            separator_c: None,
            closedness_certified: false,
        };
    }
    // u = w + (α, −α) with u₁ ≥ (s² + 1)/(2s) lands on or inside the branch.
    let u1 = w[0].max((s * s + 1.0) / (2.0 * s)).max(1.0);
    MembershipCertificate {
        verdict: true,
        witness_u: Some(PointW(vec![u1, s - u1])),
        weights: None,
        separator_c: None,
        closedness_certified: false,
    }
}

/// Whether `u` lies in the hyperbola set, to a relative tolerance.
pub fn hyperbola_contains(u: &[f64], tol: f64) -> bool {
    u.len() == 2 && u[0] >= 1.0 - tol && u[1] * u[1] <= u[0] * u[0] - 1.0 + tol * (1.0 + u[0] * u[0])
}
