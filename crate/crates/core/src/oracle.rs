//! Brute-force reference for vector systems: the hull of `λ⁻¹(C)` is the
//! hull of every orbit point of every `u ∈ C ∩ K`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sets::{convex_weights, intersect_with_k, ConvexBody, SetSpec};
use crate::system::{PointV, PointW, SpectralSystem, MAX_ORBIT_POINTS};
use crate::EPS;

/// Largest `n` accepted by the brute-force path.
pub const BRUTE_MAX_DIM: usize = 7;

/// All orbit points of the finite set `C ∩ K`, as points of `V = ℝⁿ`.
pub fn orbit_points(sys: &SpectralSystem, set: &SetSpec) -> Result<Vec<PointW>> {
    if !sys.is_vector() {
        return Err(Error::Unsupported(format!(
            "brute-force hulls need finite orbits; {sys} has continua"
        )));
    }
    if sys.dim_w() > BRUTE_MAX_DIM {
        return Err(Error::Resource(format!(
            "brute force limited to n ≤ {BRUTE_MAX_DIM}"
        )));
    }
    let ConvexBody::VPolytope { vertices } = intersect_with_k(sys, set)? else {
        return Err(Error::Unsupported("brute force needs a finite set".into()));
    };
    if vertices.is_empty() {
        return Err(Error::Infeasible);
    }
    let mut out = Vec::new();
    for u in &vertices {
        for p in sys.orbit_enumerate(u)? {
            out.push(PointW(p.flat().to_vec()));
            if out.len() > MAX_ORBIT_POINTS {
                return Err(Error::Resource("orbit points exceed budget".into()));
            }
        }
    }
    Ok(out)
}

/// Decides `x ∈ conv λ⁻¹(C)` by one LP over all orbit points.
pub fn brute_conv_member(sys: &SpectralSystem, set: &SetSpec, x: &PointV) -> Result<bool> {
    brute_conv_member_tol(sys, set, x, EPS)
}

pub fn brute_conv_member_tol(
    sys: &SpectralSystem,
    set: &SetSpec,
    x: &PointV,
    tol: f64,
) -> Result<bool> {
    let pts = orbit_points(sys, set)?;
    sys.check_point(x)?;
    Ok(convex_weights(&pts, x.flat(), tol)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_example() {
        let r = SpectralSystem::Reorder(2);
        let c = SetSpec::finite(alloc::vec![alloc::vec![1.0, 0.0], alloc::vec![1.0, 2.0]]);
        assert!(brute_conv_member(&r, &c, &PointV::Vector(alloc::vec![0.3, 0.7])).unwrap());
        assert!(brute_conv_member(&r, &c, &PointV::Vector(alloc::vec![0.0, 1.0])).unwrap());
        assert!(!brute_conv_member(&r, &c, &PointV::Vector(alloc::vec![1.0, 1.0])).unwrap());
        assert!(matches!(
            brute_conv_member(&SpectralSystem::SymEig(2), &c, &PointV::Vector(alloc::vec![])),
            Err(Error::Unsupported(_))
        ));
    }
}
