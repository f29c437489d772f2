//! Descriptions of `C ⊆ W` and of the convex bodies `C ∩ K`, `conv(C ∩ K)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, lp_solve, sym_eig, Bound, LpProblem, Matrix};
use crate::linalg::qp::PD_TOL;
use crate::system::{ConeDesc, PointW, SpectralSystem};

/// A subset `C` of `W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum SetSpec {
    /// A finite list of points.
    #[serde(rename = "finite")]
    FinitePoints { points: Vec<PointW> },
    /// `{u : Au ≤ b}`; zero rows means all of `W`.
    #[serde(rename = "hpoly")]
    HPolyhedron {
        #[serde(rename = "A")]
        a: Matrix,
        b: Vec<f64>,
    },
    /// `{u : ‖u‖₀ ≤ k, uᵀAu ≤ 1}` for positive definite `A`.
    #[serde(rename = "sparse_ellipsoid")]
    SparseEllipsoid {
        #[serde(rename = "A")]
        a: Matrix,
        k: usize,
    },
}

impl SetSpec {
    pub fn finite(points: Vec<Vec<f64>>) -> Self {
        SetSpec::FinitePoints {
            points: points.into_iter().map(PointW).collect(),
        }
    }

    /// Ambient dimension, when the description pins it down.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SetSpec::FinitePoints { points } => points.first().map(|p| p.len()),
            SetSpec::HPolyhedron { a, .. } => (a.rows() > 0).then(|| a.cols()),
            SetSpec::SparseEllipsoid { a, .. } => Some(a.rows()),
        }
    }

    /// Checks shapes against `sys` and the variant invariants.
    pub fn validate(&self, sys: &SpectralSystem) -> Result<()> {
        let d = sys.dim_w();
        match self {
            SetSpec::FinitePoints { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidInput("finite set has no points".into()));
                }
                for p in points {
                    check_len("set point", d, p.len())?;
                    if p.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidInput("non-finite set point".into()));
                    }
                }
            }
            SetSpec::HPolyhedron { a, b } => {
                check_len("polyhedron rhs", a.rows(), b.len())?;
                if a.rows() > 0 {
                    check_len("polyhedron row", d, a.cols())?;
                }
            }
            SetSpec::SparseEllipsoid { a, k } => {
                check_len("ellipsoid rows", d, a.rows())?;
                check_len("ellipsoid cols", d, a.cols())?;
                a.check_symmetric(crate::linalg::eigen::SYMMETRY_TOL)?;
                if *k == 0 || *k > d {
                    return Err(Error::InvalidInput(format!(
                        "sparsity k = {k} outside 1..={d}"
                    )));
                }
                let e = sym_eig(a)?;
                if e.values.last().is_some_and(|m| *m <= PD_TOL) {
                    return Err(Error::NotPositiveDefinite);
                }
            }
        }
        Ok(())
    }
}

/// A convex subset of `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConvexBody {
    /// `conv` of the listed points (all in `K`).
    VPolytope { vertices: Vec<PointW> },
    /// `{u : Au ≤ b} ∩ K`.
    HPolyhedronWithCone { a: Matrix, b: Vec<f64>, cone: ConeDesc },
    /// `{u : u₁ ≥ ⋯ ≥ u_k ≥ 0, u_{k+1} = ⋯ = u_n = 0, vᵀQv ≤ 1}` with `v = u₁..u_k`.
    OrderedEllipsoidSlice { q: Matrix, k: usize, n: usize },
}

impl ConvexBody {
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexBody::VPolytope { vertices } => vertices.first().map(|v| v.len()),
            ConvexBody::HPolyhedronWithCone { cone, .. } => cone.ineq.first().map(Vec::len),
            ConvexBody::OrderedEllipsoidSlice { n, .. } => Some(*n),
        }
    }

    /// Whether the body is compact. For H-polyhedra this runs LP probes
    /// along `±eᵢ`; an infeasible body counts as compact.
    pub fn is_bounded(&self, dim: usize) -> Result<bool> {
        match self {
            ConvexBody::VPolytope { .. } | ConvexBody::OrderedEllipsoidSlice { .. } => Ok(true),
            ConvexBody::HPolyhedronWithCone { a, b, cone } => {
                for i in 0..dim {
                    for s in [1.0, -1.0] {
                        let mut obj = vec![0.0; dim];
                        obj[i] = s;
                        let lp = hpoly_lp(a, b, cone, dim).maximize(obj);
                        if lp_solve(&lp)?.status == crate::linalg::LpStatus::Unbounded {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// Whether the body is a polyhedron.
    pub fn is_polyhedral(&self) -> bool {
        !matches!(self, ConvexBody::OrderedEllipsoidSlice { .. })
    }
}

/// LP in `u ∈ ℝ^dim` (free) with rows `Au ≤ b` and the homogeneous cone rows.
pub(crate) fn hpoly_lp(a: &Matrix, b: &[f64], cone: &ConeDesc, dim: usize) -> LpProblem {
    let mut lp = LpProblem::new(dim);
    for i in 0..a.rows() {
        lp.add_le(a.row(i).to_vec(), b[i]);
    }
    for r in &cone.ineq {
        lp.add_le(r.clone(), 0.0);
    }
    for r in &cone.eq {
        lp.add_eq(r.clone(), 0.0);
    }
    lp
}

/// Removes exact duplicates, keeping first occurrences.
pub(crate) fn dedup_exact(points: &[PointW]) -> Vec<PointW> {
    let mut seen = BTreeSet::new();
    points
        .iter()
        .filter(|p| seen.insert(bits(p)))
        .cloned()
        .collect()
}

/// `C ∩ K` as a convex body (a point list, for finite `C`).
pub fn intersect_with_k(sys: &SpectralSystem, c: &SetSpec) -> Result<ConvexBody> {
    c.validate(sys)?;
    let n = sys.dim_w();
    Ok(match c {
        SetSpec::FinitePoints { points } => {
            let kept: Vec<PointW> = points
                .iter()
                .filter(|p| sys.in_cone_k(p, crate::EPS))
                .cloned()
                .collect();
            ConvexBody::VPolytope {
                vertices: dedup_exact(&kept),
            }
        }
        SetSpec::HPolyhedron { a, b } => ConvexBody::HPolyhedronWithCone {
            a: if a.rows() == 0 { Matrix::zeros(0, n) } else { a.clone() },
            b: b.clone(),
            cone: sys.cone_k(),
        },
        SetSpec::SparseEllipsoid { a, k } => {
            if !matches!(
                sys,
                SpectralSystem::AbsReorder(_) | SpectralSystem::SingVal(_, _)
            ) {
                return Err(Error::Unsupported(format!(
                    "sparse ellipsoid sets need K = (ℝⁿ₊)↓, not the range of {sys}"
                )));
            }
            ConvexBody::OrderedEllipsoidSlice {
                q: a.leading_principal(*k),
                k: *k,
                n,
            }
        }
    })
}

/// Whether `C ∩ K` is nonempty.
pub fn is_feasible(sys: &SpectralSystem, c: &SetSpec) -> Result<bool> {
    body_is_nonempty(&intersect_with_k(sys, c)?, sys.dim_w())
}

pub(crate) fn body_is_nonempty(body: &ConvexBody, dim: usize) -> Result<bool> {
    match body {
        ConvexBody::VPolytope { vertices } => Ok(!vertices.is_empty()),
        ConvexBody::HPolyhedronWithCone { a, b, cone } => {
            Ok(lp_solve(&hpoly_lp(a, b, cone, dim))?.is_optimal())
        }
        ConvexBody::OrderedEllipsoidSlice { .. } => Ok(true),
    }
}

/// `C ∩ K` for a set that must be feasible.
pub fn feasible_body(sys: &SpectralSystem, c: &SetSpec) -> Result<ConvexBody> {
    let body = intersect_with_k(sys, c)?;
    if !body_is_nonempty(&body, sys.dim_w())? {
        return Err(Error::Infeasible);
    }
    Ok(body)
}

/// Convex weights `t` with `Σ tᵢ pᵢ = u` within `tol` per coordinate, if any.
pub fn convex_weights(points: &[PointW], u: &[f64], tol: f64) -> Result<Option<Vec<f64>>> {
    let m = points.len();
    let mut lp = LpProblem::new(m);
    lp.bounds = Some(vec![Bound::NONNEG; m]);
    lp.add_eq(vec![1.0; m], 1.0);
    for (i, ui) in u.iter().enumerate() {
        let row: Vec<f64> = points.iter().map(|p| p[i]).collect();
        if tol > 0.0 {
            lp.add_le(row.clone(), ui + tol);
            lp.add_ge(row, ui - tol);
        } else {
            lp.add_eq(row, *ui);
        }
    }
    let r = lp_solve(&lp)?;
    Ok(r.is_optimal().then_some(r.solution))
}

/// Membership of `u` in a convex body, with a weight certificate for polytopes.
pub fn member_body(body: &ConvexBody, u: &[f64], tol: f64) -> Result<(bool, Option<Vec<f64>>)> {
    match body {
        ConvexBody::VPolytope { vertices } => {
            if vertices.is_empty() {
                return Ok((false, None));
            }
            for v in vertices {
                check_len("query point", v.len(), u.len())?;
            }
            let w = convex_weights(vertices, u, tol)?;
            Ok((w.is_some(), w))
        }
        ConvexBody::HPolyhedronWithCone { a, b, cone } => {
            let mut ok = cone.contains(u, tol);
            for i in 0..a.rows() {
                check_len("query point", a.cols(), u.len())?;
                ok &= dot(a.row(i), u) <= b[i] + tol;
            }
            Ok((ok, None))
        }
        ConvexBody::OrderedEllipsoidSlice { q, k, n } => {
            check_len("query point", *n, u.len())?;
            let k = *k;
            let mut ok = (0..k.saturating_sub(1)).all(|i| u[i + 1] <= u[i] + tol);
            ok &= k == 0 || u[k - 1] >= -tol;
            ok &= u[k..].iter().all(|x| x.abs() <= tol);
            ok &= q.quad_form(&u[..k])? <= 1.0 + tol;
            Ok((ok, None))
        }
    }
}

/// Membership of `u` in `conv(C ∩ K)`.
pub fn member_conv_c_cap_k(
    sys: &SpectralSystem,
    c: &SetSpec,
    u: &[f64],
    tol: f64,
) -> Result<(bool, Option<Vec<f64>>)> {
    check_len("query point", sys.dim_w(), u.len())?;
    let body = feasible_body(sys, c)?;
    member_body(&body, u, tol)
}

/// The smallest union of `μ`-orbits containing the finite set `points`.
pub fn orbit_closure(sys: &SpectralSystem, points: &[PointW]) -> Result<Vec<PointW>> {
    let red = sys.reduced();
    let mut out: Vec<PointW> = Vec::new();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut done: BTreeSet<Vec<u64>> = BTreeSet::new();
    for p in points {
        check_len("set point", sys.dim_w(), p.len())?;
        let mu = red.reduced_mu(p)?;
        if !done.insert(bits(&mu)) {
            continue;
        }
        for x in red.orbit_enumerate(&mu)? {
            let w = PointW(x.flat().to_vec());
            if seen.insert(bits(&w)) {
                out.push(w);
                if out.len() > crate::system::MAX_ORBIT_POINTS {
                    return Err(Error::Resource("orbit closure exceeds point budget".into()));
                }
            }
        }
    }
    Ok(out)
}

/// Exact key of a point; `-0.0` and `0.0` share a key.
fn bits(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| (x + 0.0).to_bits()).collect()
}

/// Whether the finite set is a union of `μ`-orbits.
pub fn is_invariant(sys: &SpectralSystem, points: &[PointW]) -> Result<bool> {
    let closure = orbit_closure(sys, points)?;
    let set: BTreeSet<Vec<u64>> = points.iter().map(|p| bits(p)).collect();
    Ok(closure.len() == set.len() && closure.iter().all(|p| set.contains(&bits(p))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pt() -> SetSpec {
        SetSpec::finite(vec![vec![1.0, 0.0], vec![1.0, 2.0]])
    }

    #[test]
    fn finite_intersection_filters_points() {
        let sys = SpectralSystem::Reorder(2);
        match intersect_with_k(&sys, &two_pt()).unwrap() {
            ConvexBody::VPolytope { vertices } => assert_eq!(vertices, vec![PointW(vec![1.0, 0.0])]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(is_feasible(&sys, &two_pt()).unwrap());
        assert!(!is_feasible(&sys, &SetSpec::finite(vec![vec![1.0, 2.0]])).unwrap());
    }

    #[test]
    fn whole_space_polyhedron_is_k() {
        let sys = SpectralSystem::Abs(2);
        let c = SetSpec::HPolyhedron {
            a: Matrix::zeros(0, 0),
            b: vec![],
        };
        let body = intersect_with_k(&sys, &c).unwrap();
        assert!(member_body(&body, &[1.0, 2.0], 0.0).unwrap().0);
        assert!(!member_body(&body, &[-1.0, 2.0], 1e-9).unwrap().0);
        assert!(!body.is_bounded(2).unwrap());
    }

    #[test]
    fn ellipsoid_slice_shape() {
        let sys = SpectralSystem::SingVal(3, 3);
        let c = SetSpec::SparseEllipsoid {
            a: Matrix::identity(3),
            k: 2,
        };
        let body = intersect_with_k(&sys, &c).unwrap();
        assert!(member_body(&body, &[0.6, 0.6, 0.0], 1e-9).unwrap().0);
        assert!(!member_body(&body, &[0.6, 0.7, 0.0], 1e-9).unwrap().0);
        assert!(!member_body(&body, &[0.5, 0.1, 0.1], 1e-9).unwrap().0);
        assert!(!member_body(&body, &[0.8, 0.7, 0.0], 1e-9).unwrap().0);
        assert!(is_feasible(&sys, &c).unwrap());
    }

    #[test]
    fn conv_membership_examples() {
        let sys = SpectralSystem::Reorder(2);
        assert!(member_conv_c_cap_k(&sys, &two_pt(), &[1.0, 0.0], 1e-9).unwrap().0);
        let c = SetSpec::finite(vec![vec![3.0, 1.0], vec![1.0, 1.0]]);
        let (ok, w) = member_conv_c_cap_k(&sys, &c, &[2.0, 1.0], 0.0).unwrap();
        assert!(ok);
        let w = w.unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        assert!(!member_conv_c_cap_k(&sys, &c, &[4.0, 1.0], 1e-9).unwrap().0);
        assert_eq!(
            member_conv_c_cap_k(&sys, &SetSpec::finite(vec![vec![0.0, 1.0]]), &[0.0, 0.0], 0.0),
            Err(Error::Infeasible)
        );
    }

    #[test]
    fn closure_and_invariance() {
        let sys = SpectralSystem::Reorder(2);
        let c = vec![PointW(vec![1.0, 0.0])];
        assert_eq!(orbit_closure(&sys, &c).unwrap().len(), 2);
        assert!(!is_invariant(&sys, &c).unwrap());
        let c2 = vec![PointW(vec![1.0, 0.0]), PointW(vec![0.0, 1.0])];
        assert!(is_invariant(&sys, &c2).unwrap());
        let mut all = Vec::new();
        for (a, b) in [(1.0, 2.0), (2.0, 1.0)] {
            for sa in [1.0, -1.0] {
                for sb in [1.0, -1.0] {
                    all.push(PointW(vec![sa * a, sb * b]));
                }
            }
        }
        assert!(is_invariant(&SpectralSystem::AbsReorder(2), &all).unwrap());
    }

    #[test]
    fn set_spec_json_shape() {
        let c: SetSpec =
            serde_json::from_str(r#"{"variant":"hpoly","A":[[1.0,0.0]],"b":[2.0]}"#).unwrap();
        assert!(matches!(c, SetSpec::HPolyhedron { .. }));
        let f: SetSpec = serde_json::from_str(r#"{"variant":"finite","points":[[1,0],[1,2]]}"#).unwrap();
        assert_eq!(f, two_pt());
        let back = serde_json::to_string(&f).unwrap();
        assert_eq!(back, r#"{"variant":"finite","points":[[1.0,0.0],[1.0,2.0]]}"#);
    }
}
