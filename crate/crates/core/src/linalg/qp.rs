//! Strictly convex quadratic minimization over a polyhedron and the
//! `quad_feasible` decision built on it.

use alloc::vec;
use alloc::vec::Vec;

use super::eigen::sym_eig;
use super::lp::{lp_solve, LpConstraint, LpProblem, LpStatus, Relation};
use super::matrix::{dot, max_abs, rank, solve, Matrix};
use crate::error::{check_len, Error, Result};

const ACTIVE_TOL: f64 = 1e-10;
const MAX_ITERS: usize = 10_000;

/// Smallest eigenvalue accepted as positive definite.
pub const PD_TOL: f64 = 1e-10;
/// Tolerance when comparing the minimum against the level.
pub const LEVEL_TOL: f64 = 1e-6;

/// Minimizer of `vᵀQv` over linear constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub point: Vec<f64>,
    pub value: f64,
    /// Lagrange multipliers, one per constraint (non-negative on `≤` rows),
    /// satisfying `2Qv + Σ mᵢ aᵢ = 0`.
    pub multipliers: Vec<f64>,
}

/// Outcome of [`quad_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadFeasibility {
    pub feasible: bool,
    /// Minimizer of `vᵀQv` over the linear constraints (a witness when feasible).
    pub witness: Option<Vec<f64>>,
    /// Minimum of `vᵀQv`; `+∞` when the linear constraints are inconsistent.
    pub min_value: f64,
    pub multipliers: Vec<f64>,
    /// Farkas ray over the linear constraints when they are inconsistent.
    pub farkas: Option<Vec<f64>>,
}

fn check_pd(q: &Matrix) -> Result<()> {
    let e = sym_eig(q)?;
    match e.values.last() {
        Some(min) if *min > PD_TOL => Ok(()),
        Some(_) => Err(Error::NotPositiveDefinite),
        None => Ok(()),
    }
}

/// Minimizes `vᵀQv` for positive definite `Q` over `lin` by a primal
/// active-set method started from an LP-feasible point.
///
/// Returns `Ok(Err(farkas))` when the linear constraints are inconsistent.
pub fn minimize_quadratic(
    q: &Matrix,
    lin: &[LpConstraint],
) -> Result<core::result::Result<QpSolution, Vec<f64>>> {
    let k = q.rows();
    check_len("quadratic form", k, q.cols())?;
    for c in lin {
        check_len("quadratic constraint row", k, c.row.len())?;
    }

    let mut lp = LpProblem::new(k);
    lp.constraints = lin.to_vec();
    let start = lp_solve(&lp)?;
    match start.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Ok(Err(start.dual_certificate)),
        LpStatus::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
    let mut x = start.solution;

    let scale_of = |c: &LpConstraint| max_abs(&c.row).max(1.0);
    let slack = |c: &LpConstraint, x: &[f64]| c.rhs - dot(&c.row, x);

    // Equalities are always in the working set; seed it with active
    // inequalities that keep the normals independent.
    let mut working: Vec<usize> = Vec::new();
    let mut normals: Vec<Vec<f64>> = Vec::new();
    for (i, c) in lin.iter().enumerate() {
        if c.relation == Relation::Eq {
            normals.push(c.row.clone());
            if rank(&normals, 1e-10) == normals.len() {
                working.push(i);
            } else {
                normals.pop();
            }
        }
    }
    for (i, c) in lin.iter().enumerate() {
        if c.relation == Relation::Le && slack(c, &x).abs() <= ACTIVE_TOL * scale_of(c) {
            normals.push(c.row.clone());
            if rank(&normals, 1e-10) == normals.len() {
                working.push(i);
            } else {
                normals.pop();
            }
        }
    }

    let g_mat = q.scaled(2.0);
    for _ in 0..MAX_ITERS {
        // Equality-constrained step: min ½pᵀGp + gᵀp, a_iᵀp = 0 on W.
        let g = g_mat.mul_vec(&x)?;
        let w = working.len();
        let dim = k + w;
        let mut kkt = Matrix::zeros(dim, dim);
        let mut rhs = vec![0.0; dim];
        for i in 0..k {
            for j in 0..k {
                kkt[(i, j)] = g_mat[(i, j)];
            }
            rhs[i] = -g[i];
        }
        for (r, &ci) in working.iter().enumerate() {
            for j in 0..k {
                kkt[(k + r, j)] = lin[ci].row[j];
                kkt[(j, k + r)] = lin[ci].row[j];
            }
        }
        let sol = solve(&kkt, &rhs, 1e-13)
            .ok_or_else(|| Error::Numerical("singular KKT system in active-set QP".into()))?;
        let p = &sol[..k];
        let pscale = max_abs(&x).max(1.0);
        // A working set of rank k pins x; any nonzero p is solve noise.
        if w == k || max_abs(p) <= 1e-10 * pscale {
            // Multipliers: G x + Σ m_i a_i = 0 → m = sol[k..] at p = 0.
            let mult = &sol[k..];
            let mut worst: Option<(usize, f64)> = None;
            for (r, &ci) in working.iter().enumerate() {
                if lin[ci].relation == Relation::Le && mult[r] < -1e-12 {
                    // Bland-style: lowest constraint index among negatives.
                    if worst.is_none_or(|(wi, _)| ci < wi) {
                        worst = Some((ci, mult[r]));
                    }
                }
            }
            match worst {
                None => {
                    let mut multipliers = vec![0.0; lin.len()];
                    for (r, &ci) in working.iter().enumerate() {
                        multipliers[ci] = mult[r];
                    }
                    let value = q.quad_form(&x)?;
                    return Ok(Ok(QpSolution {
                        point: x,
                        value,
                        multipliers,
                    }));
                }
                Some((drop, _)) => {
                    working.retain(|&c| c != drop);
                }
            }
        } else {
            let mut alpha = 1.0;
            let mut blocking = None;
            for (i, c) in lin.iter().enumerate() {
                if c.relation != Relation::Le || working.contains(&i) {
                    continue;
                }
                let ap = dot(&c.row, p);
                if ap > 1e-14 * scale_of(c) {
                    let step = slack(c, &x).max(0.0) / ap;
                    if step < alpha {
                        alpha = step;
                        blocking = Some(i);
                    }
                }
            }
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += alpha * pi;
            }
            if let Some(b) = blocking {
                working.push(b);
            }
        }
    }
    Err(Error::Numerical("active-set QP iteration limit".into()))
}

/// Decides whether some `v` satisfying `lin` has `vᵀQv ≤ level`.
///
/// `Q` must be positive definite (smallest eigenvalue above [`PD_TOL`]).
/// The minimum is compared against `level` with tolerance [`LEVEL_TOL`].
pub fn quad_feasible(q: &Matrix, lin: &[LpConstraint], level: f64) -> Result<QuadFeasibility> {
    check_len("quadratic form", q.rows(), q.cols())?;
    check_pd(q)?;
    match minimize_quadratic(q, lin)? {
        Ok(sol) => Ok(QuadFeasibility {
            feasible: sol.value <= level + LEVEL_TOL,
            min_value: sol.value,
            witness: Some(sol.point),
            multipliers: sol.multipliers,
            farkas: None,
        }),
        Err(ray) => Ok(QuadFeasibility {
            feasible: false,
            witness: None,
            min_value: f64::INFINITY,
            multipliers: Vec::new(),
            farkas: Some(ray),
        }),
    }
}
