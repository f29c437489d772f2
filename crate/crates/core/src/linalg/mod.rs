//! Dense numerical kernels: simplex LP, Jacobi eigen/SVD, convex QP.

pub mod eigen;
pub mod lp;
pub mod matrix;
pub mod qp;

pub use eigen::{random_orthogonal, svd, sym_eig, Svd, SymEig};
pub use lp::{lp_solve, Bound, LpConstraint, LpProblem, LpResult, LpStatus, Relation};
pub use matrix::{dot, norm, solve, Matrix};
pub use qp::{minimize_quadratic, quad_feasible, QpSolution, QuadFeasibility};
