//! Random instances: systems, finite sets, query points.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spectral_hull_core::sets::{feasible_body, ConvexBody, SetSpec};
use spectral_hull_core::linalg::Matrix;
use spectral_hull_core::{PointV, PointW, Result, SpectralSystem};

pub type Rng8 = ChaCha8Rng;

/// Standard normal sample.
pub fn normal(rng: &mut Rng8) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vec(rng: &mut Rng8, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

/// The three vector systems at dimension `n`.
pub fn vector_systems(n: usize) -> [SpectralSystem; 3] {
    [
        SpectralSystem::Reorder(n),
        SpectralSystem::Abs(n),
        SpectralSystem::AbsReorder(n),
    ]
}

/// One of the five systems, chosen by `slot`, with random dimensions:
/// vectors `2..=4`, matrices `2..=5`.
pub fn system_for(slot: usize, rng: &mut Rng8) -> SpectralSystem {
    let n = rng.random_range(2..=4);
    let m = rng.random_range(2..=5);
    let p = rng.random_range(2..=5);
    match slot % 5 {
        0 => SpectralSystem::Reorder(n),
        1 => SpectralSystem::Abs(n),
        2 => SpectralSystem::AbsReorder(n),
        3 => SpectralSystem::SymEig(m),
        _ => SpectralSystem::SingVal(m, p),
    }
}

/// A vector system chosen by `slot` with `n ∈ 2..=max_n`.
pub fn vector_system_for(slot: usize, max_n: usize, rng: &mut Rng8) -> SpectralSystem {
    let n = rng.random_range(2..=max_n);
    vector_systems(n)[slot % 3]
}

/// A random finite set of `2..=max_size` points; at least one lies in `K`.
pub fn finite_set(sys: &SpectralSystem, max_size: usize, rng: &mut Rng8) -> Vec<PointW> {
    let d = sys.dim_w();
    let size = rng.random_range(2..=max_size.max(2));
    let mut pts = Vec::with_capacity(size);
    for i in 0..size {
        let g = gaussian_vec(rng, d);
        let p = if i == 0 || rng.random::<bool>() {
            sys.reduced_mu(&g).expect("length matches").0
        } else {
            g
        };
        pts.push(PointW(p));
    }
    pts
}

pub fn finite_spec(pts: &[PointW]) -> SetSpec {
    SetSpec::FinitePoints {
        points: pts.to_vec(),
    }
}

/// Convex weights from normalized exponentials.
pub fn simplex_weights(rng: &mut Rng8, m: usize) -> Vec<f64> {
    let t: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = t.iter().sum();
    t.into_iter().map(|x| x / s).collect()
}

pub fn combine(points: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; points[0].len()];
    for (p, wi) in points.iter().zip(w) {
        for (o, x) in out.iter_mut().zip(p) {
            *o += wi * x;
        }
    }
    out
}

/// Point of `V` with `λ(x) = u`, in a random position of the orbit.
pub fn orbit_point(sys: &SpectralSystem, u: &[f64], rng: &mut Rng8) -> Result<PointV> {
    let seed = rng.random::<u64>();
    Ok(sys.orbit_sample(u, 1, seed)?.remove(0))
}

/// Query points around `conv λ⁻¹(C)`: a third are convex combinations of
/// orbit points of `C ∩ K` (members), a third are orbit points of scaled
/// hull points, a third are Gaussian at the scale of `C ∩ K`.
pub fn query_points(
    sys: &SpectralSystem,
    set: &SetSpec,
    count: usize,
    rng: &mut Rng8,
) -> Result<Vec<PointV>> {
    let ConvexBody::VPolytope { vertices } = feasible_body(sys, set)? else {
        return spectral_hull_core::relax::sample_points(sys, set, count, rng.random());
    };
    let verts: Vec<Vec<f64>> = vertices.iter().map(|v| v.0.clone()).collect();
    let scale = verts
        .iter()
        .map(|v| spectral_hull_core::linalg::norm(v))
        .fold(0.3f64, f64::max);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let x = match i % 3 {
            0 => {
                let k = rng.random_range(1..=3);
                let mut pts = Vec::with_capacity(k);
                for _ in 0..k {
                    let v = verts.choose(rng).expect("nonempty");
                    pts.push(orbit_point(sys, v, rng)?);
                }
                let w = simplex_weights(rng, k);
                PointV::combination(&pts, &w).expect("nonempty")
            }
            1 => {
                let w = simplex_weights(rng, verts.len());
                let s = 0.6 + 0.8 * rng.random::<f64>();
                let u: Vec<f64> = combine(&verts, &w).iter().map(|x| x * s).collect();
                orbit_point(sys, &u, rng)?
            }
            _ => sys.random_point(rng).scaled(scale * 0.8),
        };
        out.push(x);
    }
    Ok(out)
}

/// Positive definite `n × n` matrix `GᵀG/n + I/2`.
pub fn pd_matrix(n: usize, rng: &mut Rng8) -> Matrix {
    let g = Matrix::from_row_major(n, n, gaussian_vec(rng, n * n)).expect("square");
    let mut a = g.transpose().matmul(&g).expect("square").scaled(1.0 / n as f64);
    for i in 0..n {
        a[(i, i)] += 0.5;
    }
    a
}

/// `{u : ‖u‖₀ ≤ k, uᵀAu ≤ 1}` with random positive definite `A`.
pub fn ellipsoid_spec(n: usize, k: usize, rng: &mut Rng8) -> SetSpec {
    SetSpec::SparseEllipsoid {
        a: pd_matrix(n, rng),
        k,
    }
}

/// A random point of an ordered ellipsoid slice, on its boundary when
/// `radius = 1`.
pub fn ellipsoid_point(q: &Matrix, k: usize, n: usize, radius: f64, rng: &mut Rng8) -> Vec<f64> {
    let mut v: Vec<f64> = gaussian_vec(rng, k).into_iter().map(f64::abs).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let s = q.quad_form(&v).expect("k matches").sqrt();
    let mut u: Vec<f64> = v.iter().map(|x| radius * x / s).collect();
    u.resize(n, 0.0);
    u
}

/// Any of the five systems with `dim W ∈ 2..=max_dim`, chosen by `slot`.
pub fn small_system(slot: usize, max_dim: usize, rng: &mut Rng8) -> SpectralSystem {
    let n = rng.random_range(2..=max_dim.max(2));
    match slot % 5 {
        0 => SpectralSystem::Reorder(n),
        1 => SpectralSystem::Abs(n),
        2 => SpectralSystem::AbsReorder(n),
        3 => SpectralSystem::SymEig(n),
        _ => SpectralSystem::SingVal(n, rng.random_range(n..=n + 1)),
    }
}

/// `count` points of `K`.
pub fn cone_points(sys: &SpectralSystem, count: usize, rng: &mut Rng8) -> Vec<PointW> {
    (0..count).map(|_| sys.random_k_point(rng)).collect()
}

/// A point of `V` whose spectrum is `u ∈ K`.
pub fn lift(sys: &SpectralSystem, u: &[f64], rng: &mut Rng8) -> Result<PointV> {
    let c = sys.random_point(rng);
    sys.align(&c, u)
}
