//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are stated as `maximize ⟨objective, z⟩` subject to rows
//! `⟨a_i, z⟩ ≤ b_i` or `⟨a_i, z⟩ = b_i` and optional per-variable bounds
//! (free when absent). Every result carries row multipliers: dual prices at
//! an optimum, a Farkas ray when the rows are inconsistent.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::matrix::{dot, max_abs};
use crate::error::{check_len, Error, Result};

/// Pivot and reduced-cost tolerance.
const PIVOT_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;
/// Relative window in which two ratio-test candidates count as tied.
const RATIO_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpConstraint {
    pub row: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bound {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bound {
    pub const FREE: Bound = Bound {
        lower: None,
        upper: None,
    };
    pub const NONNEG: Bound = Bound {
        lower: Some(0.0),
        upper: None,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    /// Maximized.
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    /// One entry per variable; `None` means every variable is free.
    pub bounds: Option<Vec<Bound>>,
}

impl LpProblem {
    /// Feasibility problem (zero objective) over `n` free variables.
    pub fn new(n: usize) -> Self {
        LpProblem {
            objective: vec![0.0; n],
            constraints: Vec::new(),
            bounds: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.constraints.push(LpConstraint {
            row,
            relation: Relation::Le,
            rhs,
        });
        self
    }

    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        let neg = row.iter().map(|x| -x).collect();
        self.add_le(neg, -rhs)
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.constraints.push(LpConstraint {
            row,
            relation: Relation::Eq,
            rhs,
        });
        self
    }

    pub fn set_bound(&mut self, var: usize, bound: Bound) -> &mut Self {
        let n = self.num_vars();
        let b = self.bounds.get_or_insert_with(|| vec![Bound::FREE; n]);
        b[var] = bound;
        self
    }

    pub fn bound(&self, var: usize) -> Bound {
        self.bounds.as_ref().map_or(Bound::FREE, |b| b[var])
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        for c in &self.constraints {
            check_len("LP constraint row", n, c.row.len())?;
            if !c.rhs.is_finite() || c.row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite LP data".into()));
            }
        }
        if let Some(b) = &self.bounds {
            check_len("LP variable bounds", n, b.len())?;
        }
        if self.objective.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite LP objective".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    /// Objective value at the optimum; `+∞` when unbounded, `NaN` when infeasible.
    pub optimal_value: f64,
    /// Primal solution (empty unless optimal).
    pub solution: Vec<f64>,
    /// One multiplier per constraint row. At an optimum these are the dual
    /// prices (non-negative on `≤` rows); on infeasibility they form a Farkas
    /// ray `π` with `Σ πᵢ aᵢ` covered by the variable bounds and a negative
    /// certificate value.
    pub dual_certificate: Vec<f64>,
    /// Per-variable reduced costs `target − Σ πᵢ aᵢ`, where `target` is the
    /// objective (optimal) or zero (Farkas). A positive entry is paid by the
    /// upper bound, a negative one by the lower bound.
    pub bound_duals: Vec<f64>,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Value of the dual objective `Σ πᵢ bᵢ + Σ bound terms`; `None` when a
    /// reduced cost has no bound to pay for it (beyond `tol`).
    pub fn dual_value(&self, p: &LpProblem, tol: f64) -> Option<f64> {
        let mut val: f64 = self
            .dual_certificate
            .iter()
            .zip(&p.constraints)
            .map(|(pi, c)| pi * c.rhs)
            .sum();
        for (j, r) in self.bound_duals.iter().enumerate() {
            let b = p.bound(j);
            let paid_by = if *r > 0.0 {
                b.upper
            } else if *r < 0.0 {
                b.lower
            } else {
                None
            };
            match paid_by {
                Some(v) => val += r * v,
                None if r.abs() > tol => return None,
                None => {}
            }
        }
        Some(val)
    }

    /// Checks the stored row multipliers against `p`: sign conditions on `≤`
    /// rows and consistency of `bound_duals`. Returns the largest violation.
    fn multiplier_defect(&self, p: &LpProblem, target: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (pi, c) in self.dual_certificate.iter().zip(&p.constraints) {
            if c.relation == Relation::Le {
                worst = worst.max(-pi);
            }
        }
        for j in 0..p.num_vars() {
            let g: f64 = self
                .dual_certificate
                .iter()
                .zip(&p.constraints)
                .map(|(pi, c)| pi * c.row[j])
                .sum();
            worst = worst.max((target[j] - g - self.bound_duals[j]).abs());
        }
        worst
    }

    /// Verifies the Farkas ray of an infeasible result: valid multipliers and
    /// a certificate value below `-tol`.
    pub fn verify_farkas(&self, p: &LpProblem, tol: f64) -> bool {
        if self.status != LpStatus::Infeasible {
            return false;
        }
        let zero = vec![0.0; p.num_vars()];
        if self.multiplier_defect(p, &zero) > tol {
            return false;
        }
        matches!(self.dual_value(p, tol), Some(v) if v < -tol)
    }

    /// Max-norm primal feasibility residual of `solution` against `p`.
    pub fn primal_residual(&self, p: &LpProblem) -> f64 {
        primal_residual(p, &self.solution)
    }

    /// Primal residual, dual sign defect and duality gap at an optimum.
    pub fn kkt_residual(&self, p: &LpProblem) -> f64 {
        if self.status != LpStatus::Optimal {
            return f64::INFINITY;
        }
        let primal = self.primal_residual(p);
        let dual = self.multiplier_defect(p, &p.objective);
        let gap = match self.dual_value(p, 1e-9) {
            Some(v) => (v - self.optimal_value).abs() / (1.0 + self.optimal_value.abs()),
            None => f64::INFINITY,
        };
        primal.max(dual).max(gap)
    }
}

pub fn primal_residual(p: &LpProblem, z: &[f64]) -> f64 {
    if z.len() != p.num_vars() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for c in &p.constraints {
        let lhs = dot(&c.row, z);
        let v = match c.relation {
            Relation::Le => (lhs - c.rhs).max(0.0),
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        worst = worst.max(v);
    }
    for (j, x) in z.iter().enumerate() {
        let b = p.bound(j);
        if let Some(l) = b.lower {
            worst = worst.max(l - x);
        }
        if let Some(u) = b.upper {
            worst = worst.max(x - u);
        }
    }
    worst
}

/// How an original variable maps to the non-negative standard-form columns:
/// `z = offset + Σ coef · x_col`.
#[derive(Debug, Clone)]
struct VarMap {
    offset: f64,
    cols: Vec<(usize, f64)>,
}

struct Tableau {
    /// `m × (ncols + 1)`, last column is the right-hand side.
    t: Vec<f64>,
    m: usize,
    width: usize,
    basis: Vec<usize>,
    /// Reduced costs for the current phase (length `ncols`), plus objective.
    cost_row: Vec<f64>,
    obj: f64,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.at(i, c);
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[r * w + j];
            }
        }
        let f = self.cost_row[c];
        if f != 0.0 {
            for j in 0..(w - 1) {
                self.cost_row[j] -= f * self.t[r * w + j];
            }
            self.obj += f * self.rhs(r);
        }
        self.basis[r] = c;
    }

    /// Loads phase costs and prices them out against the current basis.
    fn set_costs(&mut self, costs: &[f64]) {
        self.cost_row = costs.to_vec();
        self.obj = 0.0;
        for i in 0..self.m {
            let cb = costs[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..(self.width - 1) {
                self.cost_row[j] -= cb * self.at(i, j);
            }
            self.obj += cb * self.rhs(i);
        }
    }

    /// Runs Bland-rule pivots minimizing the loaded costs. Columns flagged in
    /// `banned` never enter. Returns `false` when unbounded.
    fn run(&mut self, banned: &[bool], pivots: &mut usize) -> Result<bool> {
        loop {
            let entering = (0..self.width - 1)
                .find(|&j| !banned[j] && self.cost_row[j] < -PIVOT_TOL);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            // Ties are near-exact only: a looser window lets
                            // the leaving row's neighbours go negative.
                            let tie = RATIO_TIE * (1.0 + lr.abs());
                            if ratio < lr - tie
                                || (ratio <= lr + tie && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, c);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(Error::Numerical("simplex pivot limit exceeded".into()));
            }
        }
    }
}

/// Solves `p` exactly up to the pivot tolerance.
pub fn lp_solve(p: &LpProblem) -> Result<LpResult> {
    p.validate()?;
    let n = p.num_vars();

    // Column layout of the non-negative structural variables.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    // Extra rows `x' ≤ u − l` for doubly bounded variables.
    let mut extra_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let b = p.bound(j);
        let map = match (b.lower, b.upper) {
            (Some(l), u) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = u {
                    extra_rows.push((col, u - l));
                }
                VarMap {
                    offset: l,
                    cols: vec![(col, 1.0)],
                }
            }
            (None, Some(u)) => {
                let col = ncols;
                ncols += 1;
                VarMap {
                    offset: u,
                    cols: vec![(col, -1.0)],
                }
            }
            (None, None) => {
                let col = ncols;
                ncols += 2;
                VarMap {
                    offset: 0.0,
                    cols: vec![(col, 1.0), (col + 1, -1.0)],
                }
            }
        };
        maps.push(map);
    }
    let n_struct = ncols;

    // Standard-form rows over the structural columns.
    struct StdRow {
        coeffs: Vec<f64>,
        rhs: f64,
        relation: Relation,
    }
    let mut rows: Vec<StdRow> = Vec::with_capacity(p.constraints.len() + extra_rows.len());
    for c in &p.constraints {
        let mut coeffs = vec![0.0; n_struct];
        let mut rhs = c.rhs;
        for (j, a) in c.row.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            rhs -= a * maps[j].offset;
            for (col, coef) in &maps[j].cols {
                coeffs[*col] += a * coef;
            }
        }
        rows.push(StdRow {
            coeffs,
            rhs,
            relation: c.relation,
        });
    }
    for (col, cap) in &extra_rows {
        let mut coeffs = vec![0.0; n_struct];
        coeffs[*col] = 1.0;
        rows.push(StdRow {
            coeffs,
            rhs: *cap,
            relation: Relation::Le,
        });
    }
    let m = rows.len();

    // Sign-normalize so every right-hand side is non-negative.
    let sigma: Vec<f64> = rows
        .iter()
        .map(|r| if r.rhs < 0.0 { -1.0 } else { 1.0 })
        .collect();
    let n_slack = rows
        .iter()
        .filter(|r| r.relation == Relation::Le)
        .count();
    let needs_art: Vec<bool> = rows
        .iter()
        .zip(&sigma)
        .map(|(r, s)| r.relation == Relation::Eq || *s < 0.0)
        .collect();
    let n_art = needs_art.iter().filter(|x| **x).count();
    let total = n_struct + n_slack + n_art;
    let width = total + 1;

    let mut t = vec![0.0; m * width];
    let mut basis = vec![0usize; m];
    let mut init_col = vec![0usize; m];
    let mut is_art = vec![false; total];
    let mut slack_idx = n_struct;
    let mut art_idx = n_struct + n_slack;
    for (i, r) in rows.iter().enumerate() {
        let s = sigma[i];
        for (j, a) in r.coeffs.iter().enumerate() {
            t[i * width + j] = s * a;
        }
        t[i * width + total] = s * r.rhs;
        if r.relation == Relation::Le {
            t[i * width + slack_idx] = s;
            if s > 0.0 {
                init_col[i] = slack_idx;
            }
            slack_idx += 1;
        }
        if needs_art[i] {
            t[i * width + art_idx] = 1.0;
            is_art[art_idx] = true;
            init_col[i] = art_idx;
            art_idx += 1;
        }
        basis[i] = init_col[i];
    }

    let mut tab = Tableau {
        t,
        m,
        width,
        basis,
        cost_row: vec![0.0; total],
        obj: 0.0,
    };
    let mut pivots = 0usize;

    // Phase 1: minimize the sum of artificials.
    let phase1_costs: Vec<f64> = (0..total)
        .map(|j| if is_art[j] { 1.0 } else { 0.0 })
        .collect();
    if n_art > 0 {
        tab.set_costs(&phase1_costs);
        let no_ban = vec![false; total];
        tab.run(&no_ban, &mut pivots)?;
        let b_scale = 1.0 + rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        if tab.obj > 1e-9 * b_scale {
            let y: Vec<f64> = (0..m)
                .map(|i| phase1_costs[init_col[i]] - tab.cost_row[init_col[i]])
                .collect();
            let pi = user_multipliers(&y, &sigma, p.constraints.len());
            let zero = vec![0.0; n];
            let bound_duals = reduced(p, &pi, &zero);
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                optimal_value: f64::NAN,
                solution: Vec::new(),
                dual_certificate: pi,
                bound_duals,
            });
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if !is_art[tab.basis[i]] {
                continue;
            }
            let scale = max_abs(&tab.t[i * width..i * width + total]).max(1.0);
            if let Some(c) =
                (0..total).find(|&j| !is_art[j] && tab.at(i, j).abs() > PIVOT_TOL * scale)
            {
                tab.pivot(i, c);
            }
        }
    }

    // Phase 2: minimize −objective over the structural columns.
    let mut costs = vec![0.0; total];
    for (j, map) in maps.iter().enumerate() {
        let c = p.objective[j];
        for (col, coef) in &map.cols {
            costs[*col] -= c * coef;
        }
    }
    tab.set_costs(&costs);
    let bounded = tab.run(&is_art, &mut pivots)?;
    if !bounded {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            optimal_value: f64::INFINITY,
            solution: Vec::new(),
            dual_certificate: Vec::new(),
            bound_duals: Vec::new(),
        });
    }

    let mut x = vec![0.0; total];
    for i in 0..m {
        x[tab.basis[i]] = tab.rhs(i);
    }
    let solution: Vec<f64> = maps
        .iter()
        .map(|map| map.offset + map.cols.iter().map(|(c, k)| k * x[*c]).sum::<f64>())
        .collect();
    let optimal_value = dot(&p.objective, &solution);
    let y: Vec<f64> = (0..m)
        .map(|i| costs[init_col[i]] - tab.cost_row[init_col[i]])
        .collect();
    let pi = user_multipliers(&y, &sigma, p.constraints.len());
    let bound_duals = reduced(p, &pi, &p.objective);
    Ok(LpResult {
        status: LpStatus::Optimal,
        optimal_value,
        solution,
        dual_certificate: pi,
        bound_duals,
    })
}

/// Maps standard-form duals `y` back to the caller's rows: `π = −σ ⊙ y`.
fn user_multipliers(y: &[f64], sigma: &[f64], n_user: usize) -> Vec<f64> {
    (0..n_user).map(|i| -sigma[i] * y[i]).collect()
}

fn reduced(p: &LpProblem, pi: &[f64], target: &[f64]) -> Vec<f64> {
    let mut r = target.to_vec();
    for (c, m) in p.constraints.iter().zip(pi) {
        if *m == 0.0 {
            continue;
        }
        for (rj, a) in r.iter_mut().zip(&c.row) {
            *rj -= m * a;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_upper_bound() {
        let mut p = LpProblem::new(1).maximize(vec![1.0]);
        p.add_le(vec![1.0], 1.0);
        let r = lp_solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.optimal_value - 1.0).abs() < 1e-12);
        assert!(r.kkt_residual(&p) < 1e-8);
    }

    #[test]
    fn contradictory_bounds_give_farkas_ray() {
        let mut p = LpProblem::new(1).maximize(vec![1.0]);
        p.add_le(vec![1.0], 1.0);
        p.add_ge(vec![1.0], 2.0);
        let r = lp_solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(r.verify_farkas(&p, 1e-8), "{r:?}");
    }

    #[test]
    fn unbounded_ray() {
        let mut p = LpProblem::new(2).maximize(vec![1.0, 1.0]);
        p.add_le(vec![1.0, -1.0], 0.0);
        assert_eq!(lp_solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible_through_variable_bounds() {
        // z ≥ 0, z ≤ 1 as bounds, z ≥ 3 as a row.
        let mut p = LpProblem::new(1);
        p.set_bound(
            0,
            Bound {
                lower: Some(0.0),
                upper: Some(1.0),
            },
        );
        p.add_ge(vec![1.0], 3.0);
        let r = lp_solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(r.verify_farkas(&p, 1e-8), "{r:?}");
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) with Bland's rule.
        let mut p = LpProblem::new(4).maximize(vec![0.75, -20.0, 0.5, -6.0]);
        for j in 0..4 {
            p.set_bound(j, Bound::NONNEG);
        }
        p.add_le(vec![0.25, -8.0, -1.0, 9.0], 0.0);
        p.add_le(vec![0.5, -12.0, -0.5, 3.0], 0.0);
        p.add_le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        let r = lp_solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.optimal_value - 1.25).abs() < 1e-9);
        assert!(r.kkt_residual(&p) < 1e-8);
    }

    #[test]
    fn dimension_mismatch_is_an_input_error() {
        let mut p = LpProblem::new(2);
        p.add_le(vec![1.0], 1.0);
        assert!(matches!(
            lp_solve(&p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn redundant_equalities() {
        let mut p = LpProblem::new(2).maximize(vec![1.0, 0.0]);
        p.add_eq(vec![1.0, 1.0], 1.0);
        p.add_eq(vec![2.0, 2.0], 2.0);
        p.set_bound(0, Bound::NONNEG).set_bound(1, Bound::NONNEG);
        let r = lp_solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.optimal_value - 1.0).abs() < 1e-12);
        assert!(r.kkt_residual(&p) < 1e-8);
    }
}
