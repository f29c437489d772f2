//! Reduced systems `(W, W, μ)` and the identities available for sets that
//! are unions of `μ`-orbits.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::{member_conv_hull_of_convex_d, member_conv_hull_tol, member_via_conv_c_tol};
use crate::sets::{convex_weights, dedup_exact, intersect_with_k, is_invariant, ConvexBody, SetSpec};
use crate::system::{PointV, PointW, SpectralSystem};
use crate::EPS;

/// The reduced system of a parent system: `μ` acts on `W` and fixes `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedSystem {
    pub parent: SpectralSystem,
}

impl ReducedSystem {
    pub fn new(parent: SpectralSystem) -> Self {
        ReducedSystem { parent }
    }

    /// The vector system whose spectral map is `μ`.
    pub fn as_system(&self) -> SpectralSystem {
        self.parent.reduced()
    }

    pub fn mu(&self, u: &[f64]) -> Result<PointW> {
        self.parent.reduced_mu(u)
    }
}

fn points_of(set: &SetSpec) -> Result<&[PointW]> {
    match set {
        SetSpec::FinitePoints { points } => Ok(points),
        _ => Err(Error::Unsupported("invariance is decided for finite sets".into())),
    }
}

fn require_invariant<'a>(sys: &SpectralSystem, set: &'a SetSpec) -> Result<&'a [PointW]> {
    set.validate(sys)?;
    let pts = points_of(set)?;
    if !is_invariant(sys, pts)? {
        return Err(Error::NotInvariant);
    }
    Ok(pts)
}

/// `μ(C)`, which equals `C ∩ K` for invariant `C`.
pub fn mu_image(sys: &SpectralSystem, set: &SetSpec) -> Result<Vec<PointW>> {
    let pts = require_invariant(sys, set)?;
    let mut img = Vec::new();
    for p in pts {
        img.push(sys.reduced_mu(p)?);
    }
    let img = dedup_exact(&img);
    let ConvexBody::VPolytope { vertices } = intersect_with_k(sys, set)? else {
        unreachable!("finite sets intersect to point lists");
    };
    let same = img.len() == vertices.len() && img.iter().all(|p| vertices.contains(p));
    if !same {
        return Err(Error::Numerical("μ(C) differs from C ∩ K".into()));
    }
    Ok(img)
}

/// Checks `v − μ(u) ∈ K°` for every `v` in the `μ`-orbit of `u`.
pub fn check_orbit_in_mu_polar(sys: &SpectralSystem, u: &[f64]) -> Result<bool> {
    let red = sys.reduced();
    let mu = red.reduced_mu(u)?;
    for v in red.orbit_enumerate(&mu)? {
        let d: Vec<f64> = v.flat().iter().zip(mu.iter()).map(|(a, b)| a - b).collect();
        if !sys.in_polar_k(&d, EPS) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides `x ∈ conv λ⁻¹(C)` as `λ(x) ∈ conv C`, valid for invariant `C`.
pub fn transfer_conv_member(sys: &SpectralSystem, set: &SetSpec, x: &PointV) -> Result<bool> {
    transfer_conv_member_tol(sys, set, x, EPS)
}

pub fn transfer_conv_member_tol(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
    tol: f64,
) -> Result<bool> {
    let pts = require_invariant(sys, set)?;
    let w = sys.lambda(x)?;
    Ok(convex_weights(&dedup_exact(pts), &w, tol)?.is_some())
}

/// Agreement counts between sandwiched `D` and the hull of `λ⁻¹(C)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DInsensitivityReport {
    pub bodies: usize,
    pub queries: usize,
    pub skipped_boundary: usize,
    pub disagreements: usize,
    /// Disagreements of the upper endpoint `(conv C) ∩ K`.
    pub upper_disagreements: usize,
}

/// Samples convex `D` with `conv(C∩K) ⊆ D ⊆ (conv C)∩K` and checks that
/// `λ⁻¹(D + K°)` matches the hull of `λ⁻¹(C)` on random points.
///
/// `D` is the hull of `C ∩ K` plus `μ(w)` for random convex combinations
/// `w` of `C`; for invariant `C` these lie in `conv C` because `conv C` is
/// closed under the reduced group.
pub fn corollary_d_insensitivity(
    sys: &SpectralSystem,
    set: &SetSpec,
    trials: usize,
    seed: u64,
) -> Result<DInsensitivityReport> {
    let pts = dedup_exact(require_invariant(sys, set)?);
    let ConvexBody::VPolytope { vertices: cap } = intersect_with_k(sys, set)? else {
        unreachable!("finite sets intersect to point lists");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DInsensitivityReport::default();
    let d = sys.dim_w();
    let scale = pts
        .iter()
        .flat_map(|p| p.iter().map(|x| x.abs()))
        .fold(1.0f64, f64::max);
    for trial in 0..trials {
        let mut gens = cap.clone();
        let extra = if trial == 0 { 0 } else { rng.random_range(1..=4) };
        for _ in 0..extra {
            let t: Vec<f64> = (0..pts.len())
                .map(|_| -libm::log(1.0 - rng.random::<f64>()))
                .collect();
            let s: f64 = t.iter().sum();
            let mut w = alloc::vec![0.0; d];
            for (p, ti) in pts.iter().zip(&t) {
                for (wi, pi) in w.iter_mut().zip(p.iter()) {
                    *wi += ti / s * pi;
                }
            }
            gens.push(sys.reduced_mu(&w)?);
        }
        let body = ConvexBody::VPolytope { vertices: gens };
        report.bodies += 1;
        for _ in 0..4 {
            let x = PointV::Vector(
                (0..d)
                    .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * 1.2 * scale)
                    .collect(),
            );
            let x = if sys.is_vector() {
                x
            } else {
                sys.align(&sys.random_point(&mut rng), &sys.reduced_mu(x.flat())?)?
            };
            let inner = member_conv_hull_tol(sys, set, &x, -1e-6)?.verdict;
            let outer = member_conv_hull_tol(sys, set, &x, 1e-6)?.verdict;
            if inner != outer {
                report.skipped_boundary += 1;
                continue;
            }
            report.queries += 1;
            if member_conv_hull_of_convex_d(sys, &body, &x)?.verdict != inner {
                report.disagreements += 1;
            }
            if member_via_conv_c_tol(sys, set, &x, EPS)? != inner {
                report.upper_disagreements += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sib() -> SetSpec {
        SetSpec::finite(vec![vec![1.0, 0.0], vec![0.0, 1.0]])
    }

    #[test]
    fn mu_image_examples() {
        let r = SpectralSystem::Reorder(2);
        assert_eq!(mu_image(&r, &sib()).unwrap(), vec![PointW(vec![1.0, 0.0])]);
        let two = SetSpec::finite(vec![vec![1.0, 0.0], vec![1.0, 2.0]]);
        assert_eq!(mu_image(&r, &two), Err(Error::NotInvariant));
        let signs = SetSpec::finite(vec![vec![1.0, -2.0], vec![-1.0, 2.0], vec![1.0, 2.0], vec![-1.0, -2.0]]);
        assert_eq!(
            mu_image(&SpectralSystem::Abs(2), &signs).unwrap(),
            vec![PointW(vec![1.0, 2.0])]
        );
    }

    #[test]
    fn orbit_in_polar_examples() {
        let r = SpectralSystem::Reorder(2);
        assert!(check_orbit_in_mu_polar(&r, &[1.0, 3.0]).unwrap());
        assert!(check_orbit_in_mu_polar(&SpectralSystem::AbsReorder(3), &[-1.0, 0.5, 2.0]).unwrap());
    }

    #[test]
    fn transfer_examples() {
        let r = SpectralSystem::Reorder(2);
        assert!(transfer_conv_member(&r, &sib(), &PointV::Vector(vec![0.5, 0.5])).unwrap());
        assert!(!transfer_conv_member(&r, &sib(), &PointV::Vector(vec![1.0, 1.0])).unwrap());
    }

    #[test]
    fn sandwich_agrees() {
        let r = SpectralSystem::AbsReorder(2);
        let c = SetSpec::FinitePoints {
            points: crate::sets::orbit_closure(&r, &[PointW(vec![2.0, 0.5]), PointW(vec![1.0, 1.0])])
                .unwrap(),
        };
        let rep = corollary_d_insensitivity(&r, &c, 30, 5).unwrap();
        assert_eq!(rep.disagreements, 0);
        assert_eq!(rep.upper_disagreements, 0);
        assert!(rep.queries > 0);
    }
}
