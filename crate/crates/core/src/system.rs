//! The five concrete FTvN systems `(V, W, λ)`.
//!
//! `V` is ℝⁿ, the symmetric matrices or the rectangular matrices; `W` is
//! always a real vector space and `λ` sorts, takes absolute values, or
//! extracts eigenvalues / singular values. Each system knows its range cone
//! `K = ran λ`, the polar `K°` as explicit homogeneous rows, the alignment
//! map realizing `⟨c, x⟩ = ⟨λ(c), λ(x)⟩`, its reduced map `μ` on `W`, and
//! how to enumerate or sample orbits `λ⁻¹(u)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::eigen::{compose_svd, conjugate_diag, random_orthogonal};
use crate::linalg::{dot, svd, sym_eig, Matrix};

/// Largest orbit `orbit_enumerate` will materialize.
pub const MAX_ORBIT_POINTS: usize = 1_000_000;

/// A point of `W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointW(pub Vec<f64>);

impl Deref for PointW {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for PointW {
    fn from(v: Vec<f64>) -> Self {
        PointW(v)
    }
}

impl PointW {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A point of `V`: a plain vector or a (symmetric or rectangular) matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum PointV {
    Vector(Vec<f64>),
    Matrix(Matrix),
}

impl PointV {
    /// Entries in row-major order; the inner product on `V` is the dot
    /// product of these (trace inner product for matrices).
    pub fn flat(&self) -> &[f64] {
        match self {
            PointV::Vector(v) => v,
            PointV::Matrix(m) => m.as_slice(),
        }
    }

    pub fn inner(&self, other: &PointV) -> f64 {
        dot(self.flat(), other.flat())
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.inner(self))
    }

    fn map_flat(&self, data: Vec<f64>) -> PointV {
        match self {
            PointV::Vector(_) => PointV::Vector(data),
            PointV::Matrix(m) => PointV::Matrix(
                Matrix::from_row_major(m.rows(), m.cols(), data).expect("same shape"),
            ),
        }
    }

    pub fn scaled(&self, t: f64) -> PointV {
        self.map_flat(self.flat().iter().map(|x| x * t).collect())
    }

    pub fn add(&self, other: &PointV) -> PointV {
        self.map_flat(
            self.flat()
                .iter()
                .zip(other.flat())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &PointV) -> PointV {
        self.map_flat(
            self.flat()
                .iter()
                .zip(other.flat())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `Σ wᵢ xᵢ` over points of a common shape.
    pub fn combination(points: &[PointV], weights: &[f64]) -> Option<PointV> {
        let first = points.first()?;
        let mut acc = vec![0.0; first.flat().len()];
        for (p, w) in points.iter().zip(weights) {
            for (a, x) in acc.iter_mut().zip(p.flat()) {
                *a += w * x;
            }
        }
        Some(first.map_flat(acc))
    }
}

/// Homogeneous description `{y : ⟨aᵢ, y⟩ ≤ 0, ⟨eⱼ, y⟩ = 0}` of a closed convex cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDesc {
    pub ineq: Vec<Vec<f64>>,
    #[serde(default)]
    pub eq: Vec<Vec<f64>>,
}

impl ConeDesc {
    /// Largest constraint violation at `y` (0 when inside).
    pub fn violation(&self, y: &[f64]) -> f64 {
        let a = self
            .ineq
            .iter()
            .map(|r| dot(r, y))
            .fold(0.0f64, f64::max);
        let e = self
            .eq
            .iter()
            .map(|r| dot(r, y).abs())
            .fold(0.0f64, f64::max);
        a.max(e)
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.violation(y) <= tol
    }

    /// Inequality normals with each equality split into `±e`, so that the
    /// cone is `{y : ⟨n, y⟩ ≤ 0 for every returned n}`.
    pub fn split_normals(&self) -> Vec<Vec<f64>> {
        let mut out = self.ineq.clone();
        for e in &self.eq {
            out.push(e.clone());
            out.push(e.iter().map(|x| -x).collect());
        }
        out
    }
}

/// One of the five concrete FTvN systems. Serialized by name, e.g. `"singval:4x3"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectralSystem {
    /// `λ(x) = x↓` on ℝⁿ.
    Reorder(usize),
    /// `λ(x) = |x|` on ℝⁿ.
    Abs(usize),
    /// `λ(x) = |x|↓` on ℝⁿ.
    AbsReorder(usize),
    /// Eigenvalues (non-increasing) of an `n × n` symmetric matrix.
    SymEig(usize),
    /// Singular values (non-increasing) of an `m × n` matrix.
    SingVal(usize, usize),
}

impl fmt::Display for SpectralSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralSystem::Reorder(n) => write!(f, "reorder:{n}"),
            SpectralSystem::Abs(n) => write!(f, "abs:{n}"),
            SpectralSystem::AbsReorder(n) => write!(f, "absreorder:{n}"),
            SpectralSystem::SymEig(n) => write!(f, "symeig:{n}"),
            SpectralSystem::SingVal(m, n) => write!(f, "singval:{m}x{n}"),
        }
    }
}

impl Serialize for SpectralSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SpectralSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = alloc::string::String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl core::str::FromStr for SpectralSystem {
    type Err = Error;

    /// Parses `reorder:N`, `abs:N`, `absreorder:N`, `symeig:N`, `singval:MxN`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unrecognized system `{s}`"));
        let (name, dims) = s.split_once(':').ok_or_else(bad)?;
        let parse = |d: &str| d.trim().parse::<usize>().map_err(|_| bad());
        let sys = match name.trim().to_ascii_lowercase().as_str() {
            "reorder" => SpectralSystem::Reorder(parse(dims)?),
            "abs" => SpectralSystem::Abs(parse(dims)?),
            "absreorder" => SpectralSystem::AbsReorder(parse(dims)?),
            "symeig" => SpectralSystem::SymEig(parse(dims)?),
            "singval" => {
                let (m, n) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
                SpectralSystem::SingVal(parse(m)?, parse(n)?)
            }
            _ => return Err(bad()),
        };
        sys.validate()?;
        Ok(sys)
    }
}

/// Sign with `sign(0) = +1`.
#[inline]
fn sign_plus(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn sort_desc(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// Indices of `v` ordered by non-increasing key; ties keep index order.
fn rank_order(v: &[f64], key: impl Fn(f64) -> f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| key(v[j]).total_cmp(&key(v[i])));
    idx
}

/// Partial-sum normals `(1,…,1,0,…,0)` with `l` leading ones.
fn partial_sum_row(n: usize, l: usize) -> Vec<f64> {
    (0..n).map(|i| if i < l { 1.0 } else { 0.0 }).collect()
}

impl SpectralSystem {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpectralSystem::Reorder(n)
            | SpectralSystem::Abs(n)
            | SpectralSystem::AbsReorder(n)
            | SpectralSystem::SymEig(n) => n > 0,
            SpectralSystem::SingVal(m, n) => m > 0 && n > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("system dimensions must be positive".into()))
        }
    }

    pub fn dim_v(&self) -> usize {
        match *self {
            SpectralSystem::Reorder(n) | SpectralSystem::Abs(n) | SpectralSystem::AbsReorder(n) => n,
            SpectralSystem::SymEig(n) => n * (n + 1) / 2,
            SpectralSystem::SingVal(m, n) => m * n,
        }
    }

    pub fn dim_w(&self) -> usize {
        match *self {
            SpectralSystem::Reorder(n)
            | SpectralSystem::Abs(n)
            | SpectralSystem::AbsReorder(n)
            | SpectralSystem::SymEig(n) => n,
            SpectralSystem::SingVal(m, n) => m.min(n),
        }
    }

    /// All five systems admit a reduced system on `W`.
    pub fn has_reduced_system(&self) -> bool {
        true
    }

    pub fn is_vector(&self) -> bool {
        matches!(
            self,
            SpectralSystem::Reorder(_) | SpectralSystem::Abs(_) | SpectralSystem::AbsReorder(_)
        )
    }

    /// The reduced system `(W, W, μ)`, itself one of the vector systems.
    pub fn reduced(&self) -> SpectralSystem {
        match *self {
            SpectralSystem::SymEig(n) => SpectralSystem::Reorder(n),
            SpectralSystem::SingVal(m, n) => SpectralSystem::AbsReorder(m.min(n)),
            other => other,
        }
    }

    /// Shape of `V` points: `(rows, cols)`; vectors are `(n, 1)`.
    pub fn v_shape(&self) -> (usize, usize) {
        match *self {
            SpectralSystem::Reorder(n) | SpectralSystem::Abs(n) | SpectralSystem::AbsReorder(n) => {
                (n, 1)
            }
            SpectralSystem::SymEig(n) => (n, n),
            SpectralSystem::SingVal(m, n) => (m, n),
        }
    }

    /// Checks that `x` has this system's shape (and symmetry for `SymEig`).
    pub fn check_point(&self, x: &PointV) -> Result<()> {
        match (self, x) {
            (s, PointV::Vector(v)) if s.is_vector() => check_len("vector point", s.dim_w(), v.len()),
            (SpectralSystem::SymEig(n), PointV::Matrix(m)) => {
                check_len("symmetric point rows", *n, m.rows())?;
                check_len("symmetric point cols", *n, m.cols())?;
                m.check_symmetric(crate::linalg::eigen::SYMMETRY_TOL)
            }
            (SpectralSystem::SingVal(r, c), PointV::Matrix(m)) => {
                check_len("matrix point rows", *r, m.rows())?;
                check_len("matrix point cols", *c, m.cols())
            }
            _ => Err(Error::InvalidInput(format!(
                "point kind does not match system {self}"
            ))),
        }
    }

    /// Builds a `V` point from row-major data.
    pub fn point_from_flat(&self, data: Vec<f64>) -> Result<PointV> {
        let p = if self.is_vector() {
            PointV::Vector(data)
        } else {
            let (r, c) = self.v_shape();
            PointV::Matrix(Matrix::from_row_major(r, c, data)?)
        };
        self.check_point(&p)?;
        Ok(p)
    }

    fn check_w(&self, u: &[f64]) -> Result<()> {
        check_len("W point", self.dim_w(), u.len())
    }

    /// The spectral map `λ`.
    pub fn lambda(&self, x: &PointV) -> Result<PointW> {
        self.check_point(x)?;
        let out = match (self, x) {
            (SpectralSystem::Reorder(_), PointV::Vector(v)) => {
                let mut u = v.clone();
                sort_desc(&mut u);
                u
            }
            (SpectralSystem::Abs(_), PointV::Vector(v)) => v.iter().map(|x| x.abs()).collect(),
            (SpectralSystem::AbsReorder(_), PointV::Vector(v)) => {
                let mut u: Vec<f64> = v.iter().map(|x| x.abs()).collect();
                sort_desc(&mut u);
                u
            }
            (SpectralSystem::SymEig(_), PointV::Matrix(m)) => sym_eig(m)?.values,
            (SpectralSystem::SingVal(_, _), PointV::Matrix(m)) => svd(m)?.singular_values,
            _ => unreachable!("checked by check_point"),
        };
        Ok(PointW(out))
    }

    /// `K = ran λ` as homogeneous inequalities.
    pub fn cone_k(&self) -> ConeDesc {
        let n = self.dim_w();
        let mut ineq = Vec::new();
        match self {
            SpectralSystem::Abs(_) => {
                for i in 0..n {
                    let mut r = vec![0.0; n];
                    r[i] = -1.0;
                    ineq.push(r);
                }
            }
            _ => {
                // u_{i+1} − u_i ≤ 0
                for i in 0..n.saturating_sub(1) {
                    let mut r = vec![0.0; n];
                    r[i] = -1.0;
                    r[i + 1] = 1.0;
                    ineq.push(r);
                }
                if self.nonneg_range() {
                    let mut r = vec![0.0; n];
                    r[n - 1] = -1.0;
                    ineq.push(r);
                }
            }
        }
        ConeDesc {
            ineq,
            eq: Vec::new(),
        }
    }

    /// Whether `K` is `(ℝⁿ₊)↓` (as opposed to `ℝⁿ↓` or `ℝⁿ₊`).
    fn nonneg_range(&self) -> bool {
        matches!(
            self,
            SpectralSystem::AbsReorder(_) | SpectralSystem::SingVal(_, _)
        )
    }

    /// Exact polar `K°` of [`cone_k`](Self::cone_k).
    pub fn polar_k(&self) -> ConeDesc {
        let n = self.dim_w();
        match self {
            SpectralSystem::Abs(_) => ConeDesc {
                ineq: (0..n)
                    .map(|i| {
                        let mut r = vec![0.0; n];
                        r[i] = 1.0;
                        r
                    })
                    .collect(),
                eq: Vec::new(),
            },
            SpectralSystem::AbsReorder(_) | SpectralSystem::SingVal(_, _) => ConeDesc {
                ineq: (1..=n).map(|l| partial_sum_row(n, l)).collect(),
                eq: Vec::new(),
            },
            SpectralSystem::Reorder(_) | SpectralSystem::SymEig(_) => ConeDesc {
                ineq: (1..n).map(|l| partial_sum_row(n, l)).collect(),
                eq: vec![partial_sum_row(n, n)],
            },
        }
    }

    pub fn in_cone_k(&self, u: &[f64], tol: f64) -> bool {
        u.len() == self.dim_w() && self.cone_k().contains(u, tol)
    }

    pub fn in_polar_k(&self, y: &[f64], tol: f64) -> bool {
        y.len() == self.dim_w() && self.polar_k().contains(y, tol)
    }

    /// A point `x` with `λ(x) = u` and `⟨c, x⟩ = ⟨λ(c), u⟩`.
    pub fn align(&self, c: &PointV, u: &[f64]) -> Result<PointV> {
        self.check_point(c)?;
        self.check_w(u)?;
        if !self.in_cone_k(u, crate::EPS) {
            return Err(Error::NotInCone);
        }
        let n = self.dim_w();
        Ok(match (self, c) {
            (SpectralSystem::Reorder(_), PointV::Vector(cv)) => {
                let mut x = vec![0.0; n];
                for (k, &i) in rank_order(cv, |v| v).iter().enumerate() {
                    x[i] = u[k];
                }
                PointV::Vector(x)
            }
            (SpectralSystem::Abs(_), PointV::Vector(cv)) => {
                PointV::Vector(cv.iter().zip(u).map(|(ci, ui)| sign_plus(*ci) * ui).collect())
            }
            (SpectralSystem::AbsReorder(_), PointV::Vector(cv)) => {
                let mut x = vec![0.0; n];
                for (k, &i) in rank_order(cv, f64::abs).iter().enumerate() {
                    x[i] = sign_plus(cv[i]) * u[k];
                }
                PointV::Vector(x)
            }
            (SpectralSystem::SymEig(_), PointV::Matrix(cm)) => {
                let e = sym_eig(cm)?;
                PointV::Matrix(conjugate_diag(&e.vectors, u))
            }
            (SpectralSystem::SingVal(_, _), PointV::Matrix(cm)) => {
                let s = svd(cm)?;
                PointV::Matrix(compose_svd(&s.u, u, &s.v))
            }
            _ => unreachable!("checked by check_point"),
        })
    }

    /// The reduced-system map `μ` on `W`: sort, absolute value, or both.
    pub fn reduced_mu(&self, u: &[f64]) -> Result<PointW> {
        self.check_w(u)?;
        let r = self.reduced();
        r.lambda(&PointV::Vector(u.to_vec()))
    }

    /// Every point of the finite orbit `λ⁻¹(u)` (vector systems only).
    pub fn orbit_enumerate(&self, u: &[f64]) -> Result<Vec<PointV>> {
        if !self.is_vector() {
            return Err(Error::Unsupported(format!(
                "orbits of {self} are continua; use orbit_sample"
            )));
        }
        self.check_w(u)?;
        if !self.in_cone_k(u, crate::EPS) {
            return Err(Error::NotInCone);
        }
        Ok(enumerate_vector_orbit(*self, u)?
            .into_iter()
            .map(PointV::Vector)
            .collect())
    }

    /// `count` random points of `λ⁻¹(u)`, deterministic per `seed`.
    pub fn orbit_sample(&self, u: &[f64], count: usize, seed: u64) -> Result<Vec<PointV>> {
        self.check_w(u)?;
        if !self.in_cone_k(u, crate::EPS) {
            return Err(Error::NotInCone);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim_w();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let p = match *self {
                SpectralSystem::Reorder(_) => {
                    let mut x = u.to_vec();
                    x.shuffle(&mut rng);
                    PointV::Vector(x)
                }
                SpectralSystem::Abs(_) => PointV::Vector(
                    u.iter()
                        .map(|v| if rng.random::<bool>() { *v } else { -*v })
                        .collect(),
                ),
                SpectralSystem::AbsReorder(_) => {
                    let mut x: Vec<f64> = u
                        .iter()
                        .map(|v| if rng.random::<bool>() { *v } else { -*v })
                        .collect();
                    x.shuffle(&mut rng);
                    PointV::Vector(x)
                }
                SpectralSystem::SymEig(_) => {
                    let q = random_orthogonal(n, &mut rng);
                    PointV::Matrix(conjugate_diag(&q, u))
                }
                SpectralSystem::SingVal(r, c) => {
                    let uo = random_orthogonal(r, &mut rng);
                    let vo = random_orthogonal(c, &mut rng);
                    let mut ut = Matrix::zeros(r, n);
                    let mut vt = Matrix::zeros(c, n);
                    for j in 0..n {
                        ut.set_col(j, &uo.col(j));
                        vt.set_col(j, &vo.col(j));
                    }
                    PointV::Matrix(compose_svd(&ut, u, &vt))
                }
            };
            out.push(p);
        }
        Ok(out)
    }

    /// Standard-normal point of `V` (symmetrized for `SymEig`).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> PointV {
        match *self {
            SpectralSystem::SymEig(n) => {
                PointV::Matrix(crate::linalg::eigen::random_symmetric(n, rng))
            }
            SpectralSystem::SingVal(m, n) => {
                PointV::Matrix(crate::linalg::eigen::random_gaussian(m, n, rng))
            }
            _ => PointV::Vector(
                (0..self.dim_w())
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            ),
        }
    }

    /// Standard-normal point of `W` mapped into `K` by `μ`.
    pub fn random_k_point<R: Rng + ?Sized>(&self, rng: &mut R) -> PointW {
        let w: Vec<f64> = (0..self.dim_w())
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        self.reduced_mu(&w).expect("length matches")
    }
}

/// Advances `v` to the next lexicographic permutation under `total_cmp`;
/// returns `false` after the last one.
fn next_permutation(v: &mut [f64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1].total_cmp(&v[i]).is_ge() {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j].total_cmp(&v[i - 1]).is_le() {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Number of distinct permutations of a multiset.
fn multiset_permutations(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut denom = 1.0;
    let mut run = 1usize;
    for w in sorted.windows(2) {
        if w[0].total_cmp(&w[1]).is_eq() {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    denom *= factorial(run);
    factorial(values.len()) / denom
}

/// Canonical `+0.0` for zeros so exact comparisons see one zero.
fn canon(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn enumerate_vector_orbit(sys: SpectralSystem, u: &[f64]) -> Result<Vec<Vec<f64>>> {
    let u: Vec<f64> = u.iter().map(|x| canon(*x)).collect();
    let permute = matches!(
        sys,
        SpectralSystem::Reorder(_) | SpectralSystem::AbsReorder(_)
    );
    let sign = matches!(sys, SpectralSystem::Abs(_) | SpectralSystem::AbsReorder(_));
    let nonzero = u.iter().filter(|x| **x != 0.0).count();
    let perms = if permute {
        multiset_permutations(&u)
    } else {
        1.0
    };
    let signs = if sign { libm::pow(2.0, nonzero as f64) } else { 1.0 };
    if perms * signs > MAX_ORBIT_POINTS as f64 {
        return Err(Error::Resource(format!(
            "orbit of size {} exceeds the {} point budget",
            perms * signs,
            MAX_ORBIT_POINTS
        )));
    }

    let mut bases = Vec::new();
    if permute {
        let mut cur = u.clone();
        cur.sort_by(f64::total_cmp);
        loop {
            bases.push(cur.clone());
            if !next_permutation(&mut cur) {
                break;
            }
        }
    } else {
        bases.push(u.clone());
    }
    if !sign {
        return Ok(bases);
    }
    let mut out = Vec::with_capacity(bases.len() << nonzero);
    for b in bases {
        let nz: Vec<usize> = (0..b.len()).filter(|&i| b[i] != 0.0).collect();
        for mask in 0u64..(1u64 << nz.len()) {
            let mut x = b.clone();
            for (bit, &i) in nz.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    x[i] = -x[i];
                }
            }
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> PointV {
        PointV::Vector(x.to_vec())
    }

    #[test]
    fn lambda_examples() {
        let r = SpectralSystem::Reorder(2);
        assert_eq!(r.lambda(&v(&[0.0, 1.0])).unwrap().0, vec![1.0, 0.0]);
        let s = SpectralSystem::SymEig(2);
        let x = PointV::Matrix(Matrix::diag(&[1.0, 3.0]));
        assert_eq!(s.lambda(&x).unwrap().0, vec![3.0, 1.0]);
        let sv = SpectralSystem::SingVal(2, 2);
        let x = PointV::Matrix(Matrix::from_rows(&[vec![0.0, -3.0], vec![1.0, 0.0]]).unwrap());
        let l = sv.lambda(&x).unwrap();
        assert!((l[0] - 3.0).abs() < 1e-12 && (l[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_membership_examples() {
        let r = SpectralSystem::Reorder(2);
        assert!(r.in_polar_k(&[-1.0, 1.0], 1e-12));
        assert!(!r.in_polar_k(&[1.0, -1.0], 1e-12));
        assert!(SpectralSystem::Abs(2).in_polar_k(&[-1.0, -2.0], 0.0));
        assert!(SpectralSystem::AbsReorder(3).in_polar_k(&[-1.0, 0.5, 0.4], 1e-12));
        assert!(r.in_cone_k(&[1.0, 0.0], 0.0));
        assert!(!r.in_cone_k(&[1.0, 2.0], 1e-9));
        for sys in [
            SpectralSystem::Reorder(3),
            SpectralSystem::Abs(3),
            SpectralSystem::AbsReorder(3),
            SpectralSystem::SymEig(3),
            SpectralSystem::SingVal(2, 3),
        ] {
            assert!(sys.in_polar_k(&vec![0.0; sys.dim_w()], 0.0));
        }
    }

    #[test]
    fn align_examples() {
        let x = SpectralSystem::Reorder(2)
            .align(&v(&[0.0, 1.0]), &[3.0, 1.0])
            .unwrap();
        assert_eq!(x, v(&[1.0, 3.0]));
        let x = SpectralSystem::Abs(2)
            .align(&v(&[-1.0, 2.0]), &[4.0, 5.0])
            .unwrap();
        assert_eq!(x, v(&[-4.0, 5.0]));
        assert_eq!(
            SpectralSystem::Reorder(2).align(&v(&[0.0, 1.0]), &[1.0, 3.0]),
            Err(Error::NotInCone)
        );
    }

    #[test]
    fn align_ties_use_index_order() {
        let x = SpectralSystem::Reorder(3)
            .align(&v(&[1.0, 1.0, 0.0]), &[3.0, 2.0, 1.0])
            .unwrap();
        assert_eq!(x, v(&[3.0, 2.0, 1.0]));
    }

    #[test]
    fn mu_examples() {
        let r = SpectralSystem::Reorder(3);
        assert_eq!(r.reduced_mu(&[1.0, 3.0, 2.0]).unwrap().0, vec![3.0, 2.0, 1.0]);
        let s = SpectralSystem::SingVal(2, 2);
        assert_eq!(s.reduced_mu(&[-2.0, 1.0]).unwrap().0, vec![2.0, 1.0]);
        assert_eq!(SpectralSystem::Abs(2).reduced_mu(&[-2.0, 1.0]).unwrap().0, vec![2.0, 1.0]);
    }

    #[test]
    fn orbit_enumeration_sizes() {
        let o = SpectralSystem::Reorder(2).orbit_enumerate(&[1.0, 0.0]).unwrap();
        assert_eq!(o.len(), 2);
        assert!(o.contains(&v(&[1.0, 0.0])) && o.contains(&v(&[0.0, 1.0])));
        assert_eq!(SpectralSystem::Abs(2).orbit_enumerate(&[1.0, 1.0]).unwrap().len(), 4);
        assert_eq!(
            SpectralSystem::AbsReorder(2)
                .orbit_enumerate(&[2.0, 1.0])
                .unwrap()
                .len(),
            8
        );
        // Repeated entries and zeros collapse.
        assert_eq!(
            SpectralSystem::AbsReorder(3)
                .orbit_enumerate(&[1.0, 1.0, 0.0])
                .unwrap()
                .len(),
            12
        );
        assert!(matches!(
            SpectralSystem::SymEig(2).orbit_enumerate(&[1.0, 0.0]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn orbit_samples() {
        let s = SpectralSystem::SymEig(3);
        assert!(s.orbit_sample(&[1.0, 1.0, 1.0], 0, 1).unwrap().is_empty());
        for x in s.orbit_sample(&[1.0, 1.0, 1.0], 10, 3).unwrap() {
            let d = x.sub(&PointV::Matrix(Matrix::identity(3))).norm();
            assert!(d < 1e-12);
        }
        let a = SpectralSystem::SymEig(2).orbit_sample(&[2.0, 0.0], 5, 9).unwrap();
        let b = SpectralSystem::SymEig(2).orbit_sample(&[2.0, 0.0], 5, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["reorder:3", "abs:2", "absreorder:4", "symeig:3", "singval:4x2"] {
            let sys: SpectralSystem = s.parse().unwrap();
            assert_eq!(alloc::format!("{sys}"), s);
        }
        assert!("reorder:0".parse::<SpectralSystem>().is_err());
        assert!("foo:3".parse::<SpectralSystem>().is_err());
    }
}
