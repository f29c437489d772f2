use spectral_hull_core::hull::{
    check_condition_a, hyperbola_member, member_clconv, member_conv_hull, member_via_conv_c,
    spectral_sup, SupStatus,
};
use spectral_hull_core::invariance::{check_orbit_in_mu_polar, mu_image, transfer_conv_member};
use spectral_hull_core::linalg::Matrix;
use spectral_hull_core::oracle::orbit_points;
use spectral_hull_core::sets::SetSpec;
use spectral_hull_core::{Error, PointV, SpectralSystem};

fn v(x: &[f64]) -> PointV {
    PointV::Vector(x.to_vec())
}

fn two_pt() -> SetSpec {
    SetSpec::finite(vec![vec![1.0, 0.0], vec![1.0, 2.0]])
}

#[test]
fn two_point_set_gives_the_segment() {
    let sys = SpectralSystem::Reorder(2);
    let c = two_pt();
    for x in [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.25, 0.75]] {
        let cert = member_conv_hull(&sys, &c, &v(&x)).unwrap();
        assert!(cert.verdict, "{x:?}");
        assert!(cert.closedness_certified);
    }
    for x in [[1.0, 1.0], [0.5, 0.6], [2.0, -1.0], [1.0, 2.0]] {
        let cert = member_conv_hull(&sys, &c, &v(&x)).unwrap();
        assert!(!cert.verdict, "{x:?}");
        let sep = cert.separator_c.unwrap();
        let sup = spectral_sup(&sys, &sep, &c).unwrap();
        assert!(sep.inner(&v(&x)) > sup.value);
    }
}

#[test]
fn convexifying_first_differs() {
    let sys = SpectralSystem::Reorder(2);
    let gap = v(&[1.0, 1.0]);
    assert!(member_via_conv_c(&sys, &two_pt(), &gap).unwrap());
    assert!(!member_conv_hull(&sys, &two_pt(), &gap).unwrap().verdict);
    let sibling = SetSpec::finite(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    assert!(!member_via_conv_c(&sys, &sibling, &gap).unwrap());
    assert!(check_condition_a(&sys, &sibling).unwrap().holds);
    let a = check_condition_a(&sys, &two_pt()).unwrap();
    assert!(!a.holds && a.exact);
    assert!(a.counterexample.is_some());
}

#[test]
fn hyperbola_hull_is_not_closed() {
    let t = 1e3;
    for e in 1..=6 {
        let cert = hyperbola_member([t, -t + 10f64.powi(-e)]);
        assert!(cert.verdict);
        assert!(!cert.closedness_certified);
    }
    assert!(!hyperbola_member([t, -t]).verdict);
}

#[test]
fn closed_hull_matches_for_polytopes() {
    let sys = SpectralSystem::AbsReorder(3);
    let c = SetSpec::finite(vec![vec![3.0, 1.0, 0.0], vec![2.0, 2.0, 1.0]]);
    for x in [[0.0, 1.0, -3.0], [1.5, -1.5, 0.5], [3.0, 3.0, 0.0]] {
        let a = member_conv_hull(&sys, &c, &v(&x)).unwrap();
        let b = member_clconv(&sys, &c, &v(&x)).unwrap();
        assert_eq!(a.verdict, b.verdict, "{x:?}");
        assert!(b.closedness_certified);
    }
}

#[test]
fn symmetric_matrices() {
    let sys = SpectralSystem::SymEig(2);
    let c = SetSpec::finite(vec![vec![1.0, -1.0]]);
    // Trace zero with eigenvalues inside [-1, 1].
    let inside = PointV::Matrix(Matrix::from_rows(&[vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap());
    assert!(member_conv_hull(&sys, &c, &inside).unwrap().verdict);
    let outside = PointV::Matrix(Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, -2.0]]).unwrap());
    assert!(!member_conv_hull(&sys, &c, &outside).unwrap().verdict);
    let bad = PointV::Matrix(Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap());
    assert!(matches!(member_conv_hull(&sys, &c, &bad), Err(Error::NotSymmetric)));
}

#[test]
fn sparse_ellipsoid_in_singular_values() {
    let sys = SpectralSystem::SingVal(3, 3);
    let set = SetSpec::SparseEllipsoid { a: Matrix::identity(3), k: 1 };
    // Unit nuclear-norm ball, so diag(0.5, 0.4, 0) is inside and diag(0.7, 0.7, 0) is not.
    let inside = PointV::Matrix(Matrix::diag(&[0.5, 0.4, 0.0]));
    let outside = PointV::Matrix(Matrix::diag(&[0.7, 0.7, 0.0]));
    assert!(member_conv_hull(&sys, &set, &inside).unwrap().verdict);
    assert!(!member_conv_hull(&sys, &set, &outside).unwrap().verdict);
    assert!(matches!(
        member_conv_hull(&SpectralSystem::Reorder(3), &set, &v(&[0.0, 0.0, 0.0])),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn errors_for_bad_input() {
    let sys = SpectralSystem::Reorder(2);
    assert!(matches!(
        member_conv_hull(&sys, &two_pt(), &v(&[1.0, 0.0, 0.0])),
        Err(Error::DimensionMismatch { .. })
    ));
    let empty = SetSpec::HPolyhedron {
        a: Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap(),
        b: vec![-1.0],
    };
    assert!(matches!(member_conv_hull(&sys, &empty, &v(&[0.0, 0.0])), Err(Error::Infeasible)));
    assert!("reorder:0".parse::<SpectralSystem>().is_err());
    assert!("singval:2".parse::<SpectralSystem>().is_err());
    assert_eq!("singval:2x3".parse::<SpectralSystem>().unwrap(), SpectralSystem::SingVal(2, 3));
}

#[test]
fn unbounded_support() {
    let sys = SpectralSystem::Reorder(2);
    let half = SetSpec::HPolyhedron {
        a: Matrix::from_rows(&[vec![-1.0, 0.0]]).unwrap(),
        b: vec![0.0],
    };
    let s = spectral_sup(&sys, &v(&[1.0, 0.0]), &half).unwrap();
    assert_eq!(s.status, SupStatus::Unbounded);
}

#[test]
fn invariant_sets_transfer() {
    let sys = SpectralSystem::Abs(2);
    let c = SetSpec::finite(vec![vec![1.0, 2.0], vec![-1.0, 2.0], vec![1.0, -2.0], vec![-1.0, -2.0]]);
    assert_eq!(mu_image(&sys, &c).unwrap().len(), 1);
    for x in [[0.5, 1.0], [1.0, 2.0], [1.5, 0.0], [0.0, -2.5]] {
        assert_eq!(
            transfer_conv_member(&sys, &c, &v(&x)).unwrap(),
            member_conv_hull(&sys, &c, &v(&x)).unwrap().verdict,
            "{x:?}"
        );
    }
    let not_inv = SetSpec::finite(vec![vec![1.0, 2.0]]);
    assert!(matches!(transfer_conv_member(&sys, &not_inv, &v(&[0.0, 0.0])), Err(Error::NotInvariant)));
    assert!(check_orbit_in_mu_polar(&sys, &[-3.0, 0.5]).unwrap());
}

#[test]
fn orbit_of_a_finite_set() {
    let pts = orbit_points(&SpectralSystem::AbsReorder(2), &SetSpec::finite(vec![vec![2.0, 1.0]])).unwrap();
    assert_eq!(pts.len(), 8);
}
