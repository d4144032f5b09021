use std::f64::consts::PI;

use page_geometry::connection;
use page_geometry::geometry::Coord;
use page_geometry::submanifolds::{self, FamilyId, SubmanifoldSpec};
use page_geometry::{ChartPoint, PageMetric, ProfileSet};
use proptest::prelude::*;

fn metric() -> PageMetric {
    PageMetric::einstein(ProfileSet::new().unwrap())
}

fn interior() -> impl Strategy<Value = f64> {
    0.02..PI - 0.02
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn einstein_everywhere(r in interior(), phi in 0.0..2.0 * PI, psi in 0.0..4.0 * PI, theta in interior()) {
        let m = metric();
        let k = connection::curvature(&m, &ChartPoint::new(r, phi, psi, theta).unwrap()).unwrap();
        prop_assert!((k.scalar - m.einstein_scalar()).abs() < 1e-8);
        prop_assert!(k.einstein_residual() < 1e-8);
        prop_assert!(k.symmetry_residual() < 1e-8);
    }

    #[test]
    fn killing_directions_leave_curvature_unchanged(r in interior(), theta in interior(), phi in 0.0..2.0 * PI, psi in 0.0..4.0 * PI) {
        let m = metric();
        let a = connection::curvature(&m, &ChartPoint::new(r, 0.0, 0.0, theta).unwrap()).unwrap();
        let b = connection::curvature(&m, &ChartPoint::new(r, phi, psi, theta).unwrap()).unwrap();
        prop_assert!((a.ricci - b.ricci).abs().max() < 1e-10);
    }

    #[test]
    fn s2_and_s5_are_totally_geodesic(r in interior(), t in interior(), psi in 0.0..4.0 * PI) {
        let m = metric();
        let s2 = SubmanifoldSpec::family(FamilyId::S2);
        prop_assert!(submanifolds::second_fundamental_form(&m, &s2, &[r, t]).unwrap().max_abs() < 1e-8);
        let s5 = SubmanifoldSpec::family(FamilyId::S5);
        prop_assert!(submanifolds::second_fundamental_form(&m, &s5, &[r, psi]).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn s1_and_s3_are_flat(r0 in interior(), t0 in interior(), u in 0.0..4.0 * PI, v in interior()) {
        let m = metric();
        let s1 = SubmanifoldSpec::family(FamilyId::S1).with_fixed(Coord::R, r0).unwrap().with_fixed(Coord::Theta, t0).unwrap();
        prop_assert!(submanifolds::induced_curvature(&m, &s1, &[u, 1.0]).unwrap().gaussian().unwrap().abs() < 1e-9);
        let s3 = SubmanifoldSpec::family(FamilyId::S3).with_fixed(Coord::R, r0).unwrap();
        prop_assert!(submanifolds::induced_curvature(&m, &s3, &[u, v]).unwrap().gaussian().unwrap().abs() < 1e-9);
    }
}

#[test]
fn normalizations_differ_only_in_the_fiber() {
    let p = ProfileSet::new().unwrap();
    let e = PageMetric::einstein(p.clone());
    let q = PageMetric::as_printed(p);
    assert!((q.fiber_constant() / e.fiber_constant() - 4.0).abs() < 1e-14);
    let x = ChartPoint::new(1.0, 0.2, 0.3, 0.9).unwrap().vector();
    let (ge, gq) = (e.metric_components(&x), q.metric_components(&x));
    assert_eq!(ge[(0, 0)], gq[(0, 0)]);
    assert_eq!(ge[(3, 3)], gq[(3, 3)]);
    assert!((gq[(2, 2)] / ge[(2, 2)] - 4.0).abs() < 1e-12);
}

#[test]
fn printed_normalization_is_not_einstein() {
    let m = PageMetric::as_printed(ProfileSet::new().unwrap());
    let k = connection::curvature(&m, &ChartPoint::new(1.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
    assert!(k.einstein_residual() > 1e-2);
}
