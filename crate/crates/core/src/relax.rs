//! Emits the convexified problem
//! `min f(x) s.t. x ∈ S, u ∈ conv(C ∩ K), λ(x) − u ∈ K°`
//! as a declarative list of typed rows, and checks an emitted program
//! against the hull engine.
//!
//! Row vocabulary: `linear`, `ordering`, `quadratic`, `kyfan`, `simplex`.
//! A `kyfan` row reads `⟨normal, λ(x)⟩ + Σ terms ≤ rhs`; with `normal` the
//! indicator of the first `l` coordinates it is a Ky-Fan `l`-norm bound.
//! Every row carries a non-empty `tag` naming the piece of the model it
//! comes from.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::hull::{member_conv_hull_tol, support, SupStatus};
use crate::linalg::{dot, lp_solve, quad_feasible, Bound, LpProblem, Matrix};
use crate::sets::{feasible_body, ConvexBody, SetSpec};
use crate::system::{PointV, SpectralSystem};
use crate::EPS;

/// Linear constraints `{x : Ax ≤ b}` on the flattened `V` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaces {
    #[serde(rename = "A")]
    pub a: Matrix,
    pub b: Vec<f64>,
}

impl HalfSpaces {
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        (0..self.a.rows()).all(|i| dot(self.a.row(i), x) <= self.b[i] + tol)
    }
}

/// Placeholder for `f`; it is carried, never evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Objective {
    #[default]
    External,
    /// `⟨coeffs, x⟩` over the flattened `V` point.
    Linear { coeffs: Vec<f64> },
}

/// `min f(x) s.t. x ∈ S, λ(x) ∈ C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub system: SpectralSystem,
    #[serde(rename = "C")]
    pub set: SetSpec,
    /// `None` means unconstrained.
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<HalfSpaces>,
    #[serde(default)]
    pub objective: Objective,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableBlock {
    pub name: String,
    pub dim: usize,
    pub role: String,
}

/// Coefficients on one variable block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub var: String,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowRelation {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Row {
    /// `Σ terms (rel) rhs`.
    Linear {
        tag: String,
        terms: Vec<Term>,
        relation: RowRelation,
        rhs: f64,
    },
    /// A linear `≤` row belonging to the description of `K`.
    Ordering {
        tag: String,
        terms: Vec<Term>,
        rhs: f64,
    },
    /// `varᵀ Q var ≤ rhs`.
    Quadratic {
        tag: String,
        var: String,
        #[serde(rename = "Q")]
        q: Matrix,
        rhs: f64,
    },
    /// `⟨normal, λ(x)⟩ + Σ terms ≤ rhs`.
    Kyfan {
        tag: String,
        map: SpectralSystem,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<usize>,
        normal: Vec<f64>,
        terms: Vec<Term>,
        rhs: f64,
    },
    /// `var ≥ 0, Σ var = 1`.
    Simplex { tag: String, var: String },
}

impl Row {
    pub fn tag(&self) -> &str {
        match self {
            Row::Linear { tag, .. }
            | Row::Ordering { tag, .. }
            | Row::Quadratic { tag, .. }
            | Row::Kyfan { tag, .. }
            | Row::Simplex { tag, .. } => tag,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Row::Linear { .. } => "linear",
            Row::Ordering { .. } => "ordering",
            Row::Quadratic { .. } => "quadratic",
            Row::Kyfan { .. } => "kyfan",
            Row::Simplex { .. } => "simplex",
        }
    }
}

/// The emitted convex program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSpec {
    pub system: SpectralSystem,
    pub variables: Vec<VariableBlock>,
    pub objective: Objective,
    pub feasibility_only: bool,
    pub rows: Vec<Row>,
    /// The problem this program was emitted from.
    pub problem: ProblemSpec,
}

impl RelaxationSpec {
    pub fn count(&self, kind: &str) -> usize {
        self.rows.iter().filter(|r| r.kind() == kind).count()
    }
}

const X: &str = "x";

fn term(var: &str, coeffs: Vec<f64>) -> Term {
    Term {
        var: var.to_string(),
        coeffs,
    }
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| 0.0 - x).collect()
}

/// Length `l` when `n` is the indicator of the first `l` coordinates.
fn prefix_len(n: &[f64]) -> Option<usize> {
    let l = n.iter().take_while(|x| **x == 1.0).count();
    (l > 0 && n[l..].iter().all(|x| *x == 0.0)).then_some(l)
}

/// Coefficients `c` on the flattened `x` with `⟨c, x⟩ = Σ λ(x)`, for the
/// systems where the total is linear (sum, trace).
fn total_as_linear(sys: &SpectralSystem) -> Result<Vec<f64>> {
    match *sys {
        SpectralSystem::Reorder(n) => Ok(vec![1.0; n]),
        SpectralSystem::SymEig(n) => Ok(Matrix::identity(n).into_vec()),
        _ => Err(Error::Unsupported(format!(
            "the total of λ is not linear for {sys}"
        ))),
    }
}

/// Flattened length of a `V` point.
fn v_len(sys: &SpectralSystem) -> usize {
    let (r, c) = sys.v_shape();
    r * c
}

/// `λ(x) − u ∈ K°` rows with `u` given by `u_terms(normal)`.
fn polar_rows(
    sys: &SpectralSystem,
    rows: &mut Vec<Row>,
    u_terms: impl Fn(&[f64]) -> Vec<Term>,
) -> Result<()> {
    let polar = sys.polar_k();
    for n in &polar.ineq {
        rows.push(Row::Kyfan {
            tag: "polar_gap".into(),
            map: *sys,
            l: prefix_len(n),
            normal: n.clone(),
            terms: u_terms(n),
            rhs: 0.0,
        });
    }
    for n in &polar.eq {
        let mut terms = vec![term(X, total_as_linear(sys)?)];
        debug_assert!(n.iter().all(|x| *x == 1.0));
        terms.extend(u_terms(n));
        rows.push(Row::Linear {
            tag: "polar_gap".into(),
            terms,
            relation: RowRelation::Eq,
            rhs: 0.0,
        });
    }
    Ok(())
}

/// Builds the convexified program for `p`.
pub fn emit_relaxation(p: &ProblemSpec) -> Result<RelaxationSpec> {
    let sys = p.system;
    sys.validate()?;
    let body = feasible_body(&sys, &p.set)?;
    let d = sys.dim_w();
    let nx = v_len(&sys);

    if let Objective::Linear { coeffs } = &p.objective {
        check_len("objective coefficients", nx, coeffs.len())?;
    }
    let mut variables = vec![VariableBlock {
        name: X.into(),
        dim: nx,
        role: format!("point of V, row-major {:?}", sys.v_shape()),
    }];
    let mut rows = Vec::new();

    if let Some(s) = &p.domain {
        if !sys.is_vector() {
            return Err(Error::Unsupported(
                "a constraint set S is only supported for vector systems".into(),
            ));
        }
        check_len("S rhs", s.a.rows(), s.b.len())?;
        for i in 0..s.a.rows() {
            check_len("S row", nx, s.a.cols())?;
            rows.push(Row::Linear {
                tag: "domain_S".into(),
                terms: vec![term(X, s.a.row(i).to_vec())],
                relation: RowRelation::Le,
                rhs: s.b[i],
            });
        }
    }

    match &body {
        ConvexBody::VPolytope { vertices } => {
            let m = vertices.len();
            variables.push(VariableBlock {
                name: "t".into(),
                dim: m,
                role: "convex weights over the points of C ∩ K".into(),
            });
            variables.push(VariableBlock {
                name: "u".into(),
                dim: d,
                role: "point of conv(C ∩ K)".into(),
            });
            rows.push(Row::Simplex {
                tag: "hull_weights".into(),
                var: "t".into(),
            });
            for i in 0..d {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                rows.push(Row::Linear {
                    tag: "hull_point".into(),
                    terms: vec![
                        term("u", e),
                        term("t", vertices.iter().map(|v| 0.0 - v[i]).collect()),
                    ],
                    relation: RowRelation::Eq,
                    rhs: 0.0,
                });
            }
            polar_rows(&sys, &mut rows, |n| vec![term("u", neg(n))])?;
        }
        ConvexBody::HPolyhedronWithCone { a, b, cone } => {
            variables.push(VariableBlock {
                name: "u".into(),
                dim: d,
                role: "point of C ∩ K".into(),
            });
            for i in 0..a.rows() {
                rows.push(Row::Linear {
                    tag: "set_C".into(),
                    terms: vec![term("u", a.row(i).to_vec())],
                    relation: RowRelation::Le,
                    rhs: b[i],
                });
            }
            for r in &cone.ineq {
                rows.push(Row::Ordering {
                    tag: "cone_K".into(),
                    terms: vec![term("u", r.clone())],
                    rhs: 0.0,
                });
            }
            polar_rows(&sys, &mut rows, |n| vec![term("u", neg(n))])?;
        }
        ConvexBody::OrderedEllipsoidSlice { q, k, .. } => {
            let k = *k;
            variables.push(VariableBlock {
                name: "v".into(),
                dim: k,
                role: "leading k coordinates of u ∈ C ∩ K (the rest vanish)".into(),
            });
            for i in 0..k.saturating_sub(1) {
                let mut r = vec![0.0; k];
                r[i] = -1.0;
                r[i + 1] = 1.0;
                rows.push(Row::Ordering {
                    tag: "cone_K".into(),
                    terms: vec![term("v", r)],
                    rhs: 0.0,
                });
            }
            let mut r = vec![0.0; k];
            r[k - 1] = -1.0;
            rows.push(Row::Ordering {
                tag: "cone_K".into(),
                terms: vec![term("v", r)],
                rhs: 0.0,
            });
            rows.push(Row::Quadratic {
                tag: "ellipsoid".into(),
                var: "v".into(),
                q: q.clone(),
                rhs: 1.0,
            });
            polar_rows(&sys, &mut rows, |n| vec![term("v", neg(&n[..k]))])?;
        }
    }

    let feasibility_only = match &p.objective {
        Objective::Linear { coeffs } => coeffs.iter().all(|c| *c == 0.0),
        Objective::External => false,
    };
    Ok(RelaxationSpec {
        system: sys,
        variables,
        objective: p.objective.clone(),
        feasibility_only,
        rows,
        problem: p.clone(),
    })
}

/// Whether the emitted program has a feasible `(t, u, v)` for the fixed `x`,
/// with every non-quadratic row relaxed by `tol`.
pub fn relaxation_feasible_at(r: &RelaxationSpec, x: &PointV, tol: f64) -> Result<bool> {
    let sys = r.system;
    let lam = sys.lambda(x)?;
    let xf = x.flat();

    let mut offsets: Vec<(&str, usize, usize)> = Vec::new();
    let mut nvars = 0;
    for b in &r.variables {
        if b.name == X {
            check_len("x block", xf.len(), b.dim)?;
            continue;
        }
        offsets.push((&b.name, nvars, b.dim));
        nvars += b.dim;
    }
    let lookup = |name: &str| {
        offsets
            .iter()
            .find(|(n, _, _)| *n == name)
            .map(|(_, o, d)| (*o, *d))
            .ok_or_else(|| Error::InvalidInput(format!("unknown variable block `{name}`")))
    };
    // Splits terms into (row over LP variables, constant from x).
    let flatten = |terms: &[Term]| -> Result<(Vec<f64>, f64, bool)> {
        let mut row = vec![0.0; nvars];
        let mut constant = 0.0;
        let mut has_vars = false;
        for t in terms {
            if t.var == X {
                check_len("x coefficients", xf.len(), t.coeffs.len())?;
                constant += dot(&t.coeffs, xf);
            } else {
                let (o, d) = lookup(&t.var)?;
                check_len("term coefficients", d, t.coeffs.len())?;
                for (j, c) in t.coeffs.iter().enumerate() {
                    row[o + j] += c;
                }
                has_vars = true;
            }
        }
        Ok((row, constant, has_vars))
    };

    let mut lp = LpProblem::new(nvars);
    let mut bounds = vec![Bound::FREE; nvars];
    let mut quadratic: Option<(usize, usize, &Matrix, f64)> = None;
    for row in &r.rows {
        match row {
            Row::Linear {
                terms,
                relation,
                rhs,
                ..
            } => {
                let (a, c, has_vars) = flatten(terms)?;
                let rhs = rhs - c;
                match (relation, has_vars) {
                    (RowRelation::Le, false) if rhs < -tol => return Ok(false),
                    (RowRelation::Eq, false) if rhs.abs() > tol => return Ok(false),
                    (_, false) => {}
                    (RowRelation::Le, true) => {
                        lp.add_le(a, rhs + tol);
                    }
                    (RowRelation::Eq, true) => {
                        lp.add_le(a.clone(), rhs + tol);
                        lp.add_ge(a, rhs - tol);
                    }
                }
            }
            Row::Ordering { terms, rhs, .. } => {
                let (a, c, _) = flatten(terms)?;
                lp.add_le(a, rhs - c);
            }
            Row::Kyfan {
                map,
                normal,
                terms,
                rhs,
                ..
            } => {
                if *map != sys {
                    return Err(Error::InvalidInput("kyfan row for another system".into()));
                }
                check_len("kyfan normal", lam.len(), normal.len())?;
                let (a, c, _) = flatten(terms)?;
                lp.add_le(a, rhs - c - dot(normal, &lam) + tol);
            }
            Row::Simplex { var, .. } => {
                let (o, d) = lookup(var)?;
                let mut a = vec![0.0; nvars];
                for j in o..o + d {
                    a[j] = 1.0;
                    bounds[j] = Bound::NONNEG;
                }
                lp.add_eq(a, 1.0);
            }
            Row::Quadratic { var, q, rhs, .. } => {
                if quadratic.is_some() {
                    return Err(Error::Unsupported("more than one quadratic row".into()));
                }
                let (o, d) = lookup(var)?;
                check_len("quadratic form", d, q.rows())?;
                quadratic = Some((o, d, q, *rhs));
            }
        }
    }
    lp.bounds = Some(bounds);

    match quadratic {
        None => Ok(lp_solve(&lp)?.is_optimal()),
        Some((o, d, q, level)) => {
            if o != 0 || d != nvars {
                return Err(Error::Unsupported(
                    "quadratic rows must cover every non-x variable".into(),
                ));
            }
            Ok(quad_feasible(q, &lp.constraints, level)?.feasible)
        }
    }
}

/// One disagreement between the emitted program and the hull engine.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationFailure {
    pub point: Vec<f64>,
    pub relaxation: bool,
    pub engine: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub checked: usize,
    /// Samples within `1e-6` of the boundary, where both answers are allowed.
    pub skipped_boundary: usize,
    pub members: usize,
    pub disagreements: usize,
    pub failures: Vec<ValidationFailure>,
}

/// Margin used to classify samples as clearly inside or outside.
pub const BOUNDARY_MARGIN: f64 = 1e-6;

/// Engine verdict for `x ∈ S ∩ conv λ⁻¹(C)`, or `None` near the boundary.
fn engine_verdict(p: &ProblemSpec, x: &PointV) -> Result<Option<bool>> {
    let lo = member_conv_hull_tol(&p.system, &p.set, x, -BOUNDARY_MARGIN)?.verdict;
    let hi = member_conv_hull_tol(&p.system, &p.set, x, BOUNDARY_MARGIN)?.verdict;
    let (s_lo, s_hi) = match &p.domain {
        Some(s) => (
            s.contains(x.flat(), -BOUNDARY_MARGIN),
            s.contains(x.flat(), BOUNDARY_MARGIN),
        ),
        None => (true, true),
    };
    let inner = lo && s_lo;
    let outer = hi && s_hi;
    Ok((inner == outer).then_some(inner))
}

/// Compares the emitted program with the hull engine on `samples` points.
pub fn validate_relaxation(r: &RelaxationSpec, samples: usize, seed: u64) -> Result<ValidationReport> {
    let points = sample_points(&r.system, &r.problem.set, samples, seed)?;
    validate_relaxation_on(r, &points)
}

pub fn validate_relaxation_on(r: &RelaxationSpec, points: &[PointV]) -> Result<ValidationReport> {
    let mut rep = ValidationReport {
        samples: points.len(),
        ..Default::default()
    };
    for x in points {
        let Some(engine) = engine_verdict(&r.problem, x)? else {
            rep.skipped_boundary += 1;
            continue;
        };
        rep.checked += 1;
        rep.members += engine as usize;
        let relaxed = relaxation_feasible_at(r, x, EPS)?;
        if relaxed != engine {
            rep.disagreements += 1;
            rep.failures.push(ValidationFailure {
                point: x.flat().to_vec(),
                relaxation: relaxed,
                engine,
            });
        }
    }
    Ok(rep)
}

/// Random points of `V` spread around `λ⁻¹(C)`: a quarter are convex
/// combinations of two points with spectra in `C ∩ K`, a quarter have `λ(x) = s·u` with
/// `s ∈ [0.2, 1.8]`, the rest are Gaussian at the scale of `C ∩ K`.
pub fn sample_points(
    sys: &SpectralSystem,
    set: &SetSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<PointV>> {
    let body = feasible_body(sys, set)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let u = body_point(sys, &body, &mut rng)?;
        let scale = crate::linalg::norm(&u).max(1.0);
        let x = if i % 4 == 0 {
            let v = body_point(sys, &body, &mut rng)?;
            let t: f64 = rng.random();
            let a = sys.align(&sys.random_point(&mut rng), &u)?;
            let b = sys.align(&sys.random_point(&mut rng), &v)?;
            a.scaled(t).add(&b.scaled(1.0 - t))
        } else if i % 2 == 0 {
            let s = 0.2 + 1.6 * rng.random::<f64>();
            let su: Vec<f64> = u.iter().map(|v| v * s).collect();
            sys.align(&sys.random_point(&mut rng), &su)?
        } else {
            sys.random_point(&mut rng).scaled(scale * 0.7)
        };
        out.push(x);
    }
    Ok(out)
}

/// Some point of the body, randomized.
fn body_point<R: Rng>(sys: &SpectralSystem, body: &ConvexBody, rng: &mut R) -> Result<Vec<f64>> {
    match body {
        ConvexBody::VPolytope { vertices } => {
            let t: Vec<f64> = vertices
                .iter()
                .map(|_| -libm::log(1.0 - rng.random::<f64>()))
                .collect();
            let s: f64 = t.iter().sum();
            let mut u = vec![0.0; sys.dim_w()];
            for (v, ti) in vertices.iter().zip(&t) {
                for (ui, vi) in u.iter_mut().zip(v.iter()) {
                    *ui += ti / s * vi;
                }
            }
            Ok(u)
        }
        _ => {
            let a = sys.random_k_point(rng);
            let sup = support(body, &a)?;
            match (sup.status, sup.argmax_u) {
                (SupStatus::Optimal, Some(u)) => {
                    let f = rng.random::<f64>();
                    Ok(u.iter().map(|x| x * f).collect())
                }
                _ => {
                    // Unbounded direction: start from a feasible point and walk along a.
                    let feas = support(body, &vec![0.0; sys.dim_w()])?;
                    let base = feas.argmax_u.map(|p| p.0).unwrap_or_else(|| vec![0.0; sys.dim_w()]);
                    let f = rng.random::<f64>() * 3.0;
                    Ok(base.iter().zip(a.iter()).map(|(b, ai)| b + f * ai).collect())
                }
            }
        }
    }
}
