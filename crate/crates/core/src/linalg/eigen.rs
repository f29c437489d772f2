//! Symmetric eigendecomposition and SVD by Jacobi rotations.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
/// Symmetry tolerance for `sym_eig` inputs, relative to `max(1, ‖M‖_F)`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues in non-increasing order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Thin SVD: `M = U diag(σ) Vᵀ` with `U: m×d`, `V: n×d`, `d = min(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

fn off_diagonal_mass(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    libm::sqrt(s)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius mass drops below `1e-12 · ‖M‖_F`.
pub fn sym_eig(m: &Matrix) -> Result<SymEig> {
    m.check_symmetric(SYMMETRY_TOL)?;
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut q = Matrix::identity(n);
    let target = 1e-12 * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_mass(&a);
        if off <= target || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                // A ← Jᵀ A J on rows/cols p and r.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                a[(p, r)] = 0.0;
                a[(r, p)] = 0.0;
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    if !converged && off_diagonal_mass(&a) > 1e-10 * a.frobenius_norm().max(1.0) {
        return Err(Error::Numerical("Jacobi eigensolver did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = q[(k, src)];
        }
    }
    Ok(SymEig { values, vectors })
}

impl SymEig {
    /// `Q diag(values) Qᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        conjugate_diag(&self.vectors, &self.values)
    }
}

/// `Q diag(d) Qᵀ` for `Q` with `d.len()` columns.
pub fn conjugate_diag(q: &Matrix, d: &[f64]) -> Matrix {
    let n = q.rows();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for (k, dk) in d.iter().enumerate() {
                s += q[(i, k)] * dk * q[(j, k)];
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

/// `U diag(d) Vᵀ` for `U: m×d`, `V: n×d`.
pub fn compose_svd(u: &Matrix, d: &[f64], v: &Matrix) -> Matrix {
    let (m, n) = (u.rows(), v.rows());
    let mut out = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let mut s = 0.0;
            for (k, dk) in d.iter().enumerate() {
                s += u[(i, k)] * dk * v[(j, k)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// One-sided (Hestenes) Jacobi on the columns of a tall matrix `m ≥ n`.
fn svd_tall(m: &Matrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let mut w: Vec<Vec<f64>> = (0..cols).map(|j| m.col(j)).collect();
    let mut v = Matrix::identity(cols);
    let scale = m.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0
                    || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta)
                    || gamma.abs() <= 1e-300
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for k in 0..rows {
                    let wp = w[p][k];
                    let wq = w[q][k];
                    w[p][k] = c * wp - s * wq;
                    w[q][k] = s * wp + c * wq;
                }
                for k in 0..cols {
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = c * vp - s * vq;
                    v[(k, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical("one-sided Jacobi SVD did not converge".into()));
    }

    let sigma: Vec<f64> = w.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut singular_values = Vec::with_capacity(cols);
    let mut v_sorted = Matrix::zeros(cols, cols);
    let mut pending = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..cols {
            v_sorted[(k, dst)] = v[(k, src)];
        }
        let s = sigma[src];
        if s > tiny {
            u_cols.push(w[src].iter().map(|x| x / s).collect());
            singular_values.push(s);
        } else {
            u_cols.push(vec![0.0; rows]);
            singular_values.push(0.0);
            pending.push(dst);
        }
    }
    for dst in pending {
        u_cols[dst] = orthonormal_complement(&u_cols, dst, rows);
    }
    let mut u = Matrix::zeros(rows, cols);
    for (j, c) in u_cols.iter().enumerate() {
        u.set_col(j, c);
    }
    Ok(Svd {
        u,
        singular_values,
        v: v_sorted,
    })
}

/// A unit vector orthogonal to every non-zero column in `cols` except `skip`.
fn orthonormal_complement(cols: &[Vec<f64>], skip: usize, dim: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for e in 0..dim {
        let mut cand = vec![0.0; dim];
        cand[e] = 1.0;
        for _ in 0..2 {
            for (j, c) in cols.iter().enumerate() {
                if j == skip {
                    continue;
                }
                let proj = dot(&cand, c);
                for (x, y) in cand.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let nn = norm(&cand);
        if best.as_ref().is_none_or(|(b, _)| nn > *b) {
            best = Some((nn, cand));
        }
    }
    let (nn, mut v) = best.unwrap_or((1.0, vec![0.0; dim]));
    for x in &mut v {
        *x /= nn;
    }
    v
}

/// Thin singular value decomposition with non-increasing singular values.
pub fn svd(m: &Matrix) -> Result<Svd> {
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    if m.rows() >= m.cols() {
        svd_tall(m)
    } else {
        let t = svd_tall(&m.transpose())?;
        Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        })
    }
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        compose_svd(&self.u, &self.singular_values, &self.v)
    }
}

/// Haar-distributed orthogonal matrix: Gram–Schmidt QR of a standard-normal
/// matrix, columns signed so that `diag(R) > 0`.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            let mut c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            for _ in 0..2 {
                for prev in &cols {
                    let p = dot(&c, prev);
                    for (x, y) in c.iter_mut().zip(prev) {
                        *x -= p * y;
                    }
                }
            }
            let nn = norm(&c);
            if nn < 1e-8 {
                ok = false;
                break;
            }
            for x in &mut c {
                *x /= nn;
            }
            cols.push(c);
        }
        if ok {
            let mut q = Matrix::zeros(n, n);
            for (j, c) in cols.iter().enumerate() {
                q.set_col(j, c);
            }
            return q;
        }
    }
}

/// Standard-normal matrix.
pub fn random_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    Matrix::from_row_major(rows, cols, data).expect("shape matches data")
}

/// Symmetric matrix with standard-normal upper triangle.
pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = random_gaussian(n, n, rng);
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            s[(i, j)] = g[(i, j)];
            s[(j, i)] = g[(i, j)];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_diagonal() {
        let e = sym_eig(&Matrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let e = sym_eig(&Matrix::diag(&[1.0, 3.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
    }

    #[test]
    fn nonsymmetric_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(sym_eig(&m), Err(Error::NotSymmetric));
    }

    #[test]
    fn random_symmetric_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_symmetric(5, &mut rng);
        let e = sym_eig(&m).unwrap();
        let res = m.sub(&e.reconstruct()).unwrap().frobenius_norm();
        assert!(res <= 1e-10 * (1.0 + m.frobenius_norm()), "residual {res}");
        assert!(e.vectors.orthonormality_defect() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_zero_and_diagonal() {
        let z = svd(&Matrix::zeros(3, 2)).unwrap();
        assert!(z.singular_values.iter().all(|s| *s == 0.0));
        assert!(z.u.orthonormality_defect() < 1e-12);
        let d = svd(&Matrix::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(d.singular_values, vec![3.0, 1.0]);
    }

    #[test]
    fn svd_matches_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_gaussian(3, 4, &mut rng);
        let s = svd(&m).unwrap();
        let gram = m.transpose().matmul(&m).unwrap();
        let e = sym_eig(&gram).unwrap();
        for (i, sv) in s.singular_values.iter().enumerate() {
            assert!((sv - libm::sqrt(e.values[i].max(0.0))).abs() < 1e-9);
        }
        // The fourth Gram eigenvalue is the rank deficiency.
        assert!(e.values[3].abs() < 1e-10);
        let res = m.sub(&s.reconstruct()).unwrap().frobenius_norm();
        assert!(res <= 1e-10 * (1.0 + m.frobenius_norm()));
    }

    #[test]
    fn rank_deficient_svd_has_orthonormal_factors() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 0.0, 0.0]])
            .unwrap();
        let s = svd(&m).unwrap();
        assert!(s.u.orthonormality_defect() < 1e-10);
        assert!(s.v.orthonormality_defect() < 1e-10);
        let res = m.sub(&s.reconstruct()).unwrap().frobenius_norm();
        assert!(res <= 1e-10 * (1.0 + m.frobenius_norm()));
    }
}
