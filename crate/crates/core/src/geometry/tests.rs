use std::f64::consts::PI;

use super::*;
use proptest::prelude::*;

fn s3_point_scenario(delta0: f64) -> (Manifold, Submanifold, Vec<f64>) {
    let m = Manifold::sphere(3, 1.0);
    let q = Submanifold::point(vec![1.0, 0.0, 0.0, 0.0]);
    let x1 = vec![delta0.cos(), delta0.sin(), 0.0, 0.0];
    (m, q, x1)
}

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn torus_point_single_geodesic() {
    let m = Manifold::standard_torus(3);
    let q = Submanifold::point(vec![0.0; 3]);
    let x1 = vec![0.3, 0.0, 0.0];
    let c = HomotopyClass::lattice(vec![1, 0, 0]);
    let geos = enumerate_geodesics(&m, &q, &x1, &c, 5.0).unwrap();
    assert_eq!(geos.len(), 1);
    assert_close(geos[0].length, 1.3, 1e-12);
    assert_eq!(geos[0].morse_index, 0);
    assert!(geos[0].focal_times.is_empty());
    assert!(same_point(&m, &geodesic_endpoint(&m, &geos[0]), &x1, 1e-12));
}

#[test]
fn torus_cap_is_respected() {
    let m = Manifold::standard_torus(3);
    let q = Submanifold::point(vec![0.0; 3]);
    let c = HomotopyClass::lattice(vec![1, 0, 0]);
    assert!(enumerate_geodesics(&m, &q, &[0.3, 0.0, 0.0], &c, 1.0).unwrap().is_empty());
}

#[test]
fn sphere_point_lengths_and_indices() {
    let (m, q, x1) = s3_point_scenario(1.0);
    let geos = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, 8.0).unwrap();
    let lengths: Vec<f64> = geos.iter().map(|g| g.length).collect();
    let indices: Vec<usize> = geos.iter().map(|g| g.morse_index).collect();
    assert_eq!(geos.len(), 3);
    assert_close(lengths[0], 1.0, 1e-12);
    assert_close(lengths[1], 2.0 * PI - 1.0, 1e-12);
    assert_close(lengths[2], 2.0 * PI + 1.0, 1e-12);
    assert_eq!(indices, vec![0, 2, 4]);
    for g in &geos {
        assert!(same_point(&m, &geodesic_endpoint(&m, g), &x1, 1e-12));
        assert_close(norm(&g.initial_covector), 1.0, 1e-12);
        // Tangent to the sphere at the start.
        assert_close(dot(&g.initial_covector, &g.start), 0.0, 1e-12);
    }
}

#[test]
fn subtorus_vertical_geodesic() {
    let m = Manifold::standard_torus(2);
    let q = Submanifold::Subtorus { directions: vec![vec![1, 0]], offset: vec![0.0, 0.0] };
    let x1 = vec![0.5, 0.25];
    let geos = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::lattice(vec![0, 0]), 3.0).unwrap();
    assert_eq!(geos.len(), 1);
    assert_close(geos[0].length, 0.25, 1e-12);
    assert_eq!(geos[0].morse_index, 0);
    assert_close(geos[0].initial_covector[0], 0.0, 1e-12);
    assert_close(geos[0].initial_covector[1].abs(), 1.0, 1e-12);
    assert!(same_point(&m, &geodesic_endpoint(&m, &geos[0]), &x1, 1e-12));
    // Translates along Q land in the same class.
    let other = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::lattice(vec![7, 0]), 3.0).unwrap();
    assert_eq!(other[0].homotopy_class, geos[0].homotopy_class);
    assert_close(other[0].length, 0.25, 1e-12);
    let up = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::lattice(vec![0, 1]), 3.0).unwrap();
    assert_close(up[0].length, 1.25, 1e-12);
}

#[test]
fn morse_index_closed_form() {
    let (m, q, x1) = s3_point_scenario(1.0);
    let geos = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, 8.0).unwrap();
    assert_eq!(morse_index(&m, &q, &geos[1]).unwrap(), 2);

    let m2 = Manifold::sphere(2, 1.0);
    let q2 = Submanifold::point(vec![1.0, 0.0, 0.0]);
    let x2 = vec![1f64.cos(), 1f64.sin(), 0.0];
    let geos2 = enumerate_geodesics(&m2, &q2, &x2, &HomotopyClass::Trivial, 8.0).unwrap();
    assert_close(geos2[1].length, 2.0 * PI - 1.0, 1e-12);
    assert_eq!(morse_index(&m2, &q2, &geos2[1]).unwrap(), 1);

    let t = Manifold::standard_torus(2);
    let tq = Submanifold::point(vec![0.0, 0.0]);
    let tg = enumerate_geodesics(&t, &tq, &[0.2, 0.7], &HomotopyClass::lattice(vec![3, -1]), 10.0).unwrap();
    assert_eq!(morse_index(&t, &tq, &tg[0]).unwrap(), 0);
}

#[test]
fn jacobi_oracle_examples() {
    let (m, q, x1) = s3_point_scenario(1.0);
    let geos = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, 8.0).unwrap();
    let short = jacobi_oracle(&m, &q, &geos[0], DEFAULT_JACOBI_STEPS).unwrap();
    assert_eq!(short.index, 0);
    assert!(short.focal_times.is_empty());
    let long = jacobi_oracle(&m, &q, &geos[2], DEFAULT_JACOBI_STEPS).unwrap();
    assert_eq!(long.index, 4);
    assert_eq!(long.focal_times.len(), 2);
    let l = 2.0 * PI + 1.0;
    assert_close(long.focal_times[0].t, PI / l, 1e-8);
    assert_close(long.focal_times[1].t, 2.0 * PI / l, 1e-8);
    assert_eq!(long.focal_times[0].multiplicity, 2);
    assert_eq!(long.focal_times[1].multiplicity, 2);

    let t = Manifold::standard_torus(3);
    let tq = Submanifold::point(vec![0.0; 3]);
    let tg = enumerate_geodesics(&t, &tq, &[0.3, 0.0, 0.0], &HomotopyClass::lattice(vec![1, 0, 0]), 5.0).unwrap();
    let flat = jacobi_oracle(&t, &tq, &tg[0], DEFAULT_JACOBI_STEPS).unwrap();
    assert_eq!(flat.index, 0);
    assert!(flat.focal_times.is_empty());
}

#[test]
fn jacobi_oracle_rejects_few_steps() {
    let (m, q, x1) = s3_point_scenario(1.0);
    let geos = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, 2.0).unwrap();
    assert!(matches!(jacobi_oracle(&m, &q, &geos[0], 10), Err(Error::BadParameters(_))));
}

fn great_circle_in_s3() -> (Manifold, Submanifold, Vec<f64>) {
    let m = Manifold::sphere(3, 1.0);
    let q = Submanifold::GreatSubsphere { span: vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]] };
    let a: f64 = 0.4;
    let x1 = vec![a.cos() * 0.6, a.cos() * 0.8, a.sin(), 0.0];
    (m, q, x1)
}

#[test]
fn great_subsphere_geodesics() {
    let (m, q, x1) = great_circle_in_s3();
    let geos = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, 7.0).unwrap();
    let expected = [0.4, PI - 0.4, PI + 0.4, 2.0 * PI - 0.4, 2.0 * PI + 0.4];
    assert_eq!(geos.len(), expected.len());
    for (g, e) in geos.iter().zip(expected) {
        assert_close(g.length, e, 1e-12);
        assert!(same_point(&m, &geodesic_endpoint(&m, g), &x1, 1e-12), "length {}", g.length);
        let jac = jacobi_oracle(&m, &q, g, DEFAULT_JACOBI_STEPS).unwrap();
        assert_eq!(jac.index, g.morse_index);
    }
    // d = 1, n = 3: tangent focal angles π/2 + jπ (mult 1), transverse jπ (mult 1).
    let indices: Vec<usize> = geos.iter().map(|g| g.morse_index).collect();
    assert_eq!(indices, vec![0, 1, 2, 3, 4]);
}

#[test]
fn great_subsphere_pole_is_focal() {
    let (m, q, _) = great_circle_in_s3();
    let pole = vec![0.0, 0.0, 1.0, 0.0];
    assert!(matches!(
        enumerate_geodesics(&m, &q, &pole, &HomotopyClass::Trivial, 5.0),
        Err(Error::FocalPointEndpoint(_))
    ));
}

#[test]
fn antipodal_endpoint_is_focal() {
    let (m, q, _) = s3_point_scenario(1.0);
    assert!(matches!(
        enumerate_geodesics(&m, &q, &[-1.0, 0.0, 0.0, 0.0], &HomotopyClass::Trivial, 5.0),
        Err(Error::FocalPointEndpoint(_))
    ));
    assert!(matches!(
        enumerate_geodesics(&m, &q, &[1.0, 0.0, 0.0, 0.0], &HomotopyClass::Trivial, 5.0),
        Err(Error::EndpointOnSubmanifold)
    ));
}

#[test]
fn endpoint_on_subtorus_rejected() {
    let m = Manifold::standard_torus(2);
    let q = Submanifold::Subtorus { directions: vec![vec![1, 0]], offset: vec![0.0, 0.0] };
    assert!(matches!(
        enumerate_geodesics(&m, &q, &[0.3, 2.0], &HomotopyClass::lattice(vec![0, 0]), 3.0),
        Err(Error::EndpointOnSubmanifold)
    ));
}

#[test]
fn mismatched_families_unsupported() {
    let m = Manifold::standard_torus(2);
    let q = Submanifold::GreatSubsphere { span: vec![vec![1.0, 0.0], vec![0.0, 1.0]] };
    assert!(matches!(
        enumerate_geodesics(&m, &q, &[0.3, 0.2], &HomotopyClass::lattice(vec![0, 0]), 3.0),
        Err(Error::UnsupportedFamily(_))
    ));
    let s = Manifold::sphere(1, 1.0);
    assert!(matches!(s.validate(), Err(Error::UnsupportedFamily(_))));
}

#[test]
fn singular_lattice_rejected() {
    let m = Manifold::FlatTorus { dimensions: 2, lattice: vec![vec![1.0, 2.0], vec![2.0, 4.0]] };
    assert!(matches!(m.validate(), Err(Error::BadParameters(_))));
}

#[test]
fn product_with_whole_factor_matches_left_factor() {
    let (s3, q, x1) = s3_point_scenario(1.0);
    let base = enumerate_geodesics(&s3, &q, &x1, &HomotopyClass::Trivial, 12.0).unwrap();
    let m = Manifold::product(s3.clone(), Manifold::standard_torus(2));
    let pq = Submanifold::product(q.clone(), Submanifold::Whole);
    let mut px1 = x1.clone();
    px1.extend([0.4, 0.1]);
    let c = HomotopyClass::product(HomotopyClass::Trivial, HomotopyClass::lattice(vec![0, 0]));
    let prod = enumerate_geodesics(&m, &pq, &px1, &c, 12.0).unwrap();
    assert_eq!(prod.len(), base.len());
    for (p, b) in prod.iter().zip(&base) {
        assert_close(p.length, b.length, 1e-12);
        assert_eq!(p.morse_index, b.morse_index);
        assert_eq!(&p.initial_covector[4..], &[0.0, 0.0]);
        assert!(same_point(&m, &geodesic_endpoint(&m, p), &px1, 1e-12));
        let jac = jacobi_oracle(&m, &pq, p, DEFAULT_JACOBI_STEPS).unwrap();
        assert_eq!(jac.index, p.morse_index);
    }
}

#[test]
fn product_of_point_submanifolds() {
    let (s3, q, x1) = s3_point_scenario(1.0);
    let m = Manifold::product(s3, Manifold::standard_torus(2));
    let pq = Submanifold::product(q, Submanifold::point(vec![0.0, 0.0]));
    let mut px1 = x1.clone();
    px1.extend([0.3, 0.4]);
    let c = HomotopyClass::product(HomotopyClass::Trivial, HomotopyClass::lattice(vec![0, 0]));
    let geos = enumerate_geodesics(&m, &pq, &px1, &c, 8.0).unwrap();
    assert_eq!(geos.len(), 3);
    assert_close(geos[0].length, (1.0f64 + 0.25).sqrt(), 1e-12);
    for g in &geos {
        assert!(same_point(&m, &geodesic_endpoint(&m, g), &px1, 1e-12));
        assert_close(norm(&g.initial_covector), 1.0, 1e-12);
        assert_eq!(jacobi_oracle(&m, &pq, g, DEFAULT_JACOBI_STEPS).unwrap().index, g.morse_index);
    }
    // Focal times shrink toward zero as the flat factor adds length: same angles, same index.
    assert_eq!(geos.iter().map(|g| g.morse_index).collect::<Vec<_>>(), vec![0, 2, 4]);
}

#[test]
fn product_with_sphere_factor_on_submanifold_is_focal() {
    let (s3, q, _) = s3_point_scenario(1.0);
    let m = Manifold::product(s3, Manifold::standard_torus(1));
    let pq = Submanifold::product(q, Submanifold::point(vec![0.0]));
    let x1 = vec![1.0, 0.0, 0.0, 0.0, 0.5];
    let c = HomotopyClass::product(HomotopyClass::Trivial, HomotopyClass::lattice(vec![0]));
    assert!(matches!(enumerate_geodesics(&m, &pq, &x1, &c, 5.0), Err(Error::FocalPointEndpoint(_))));
}

#[test]
fn minimizer_has_index_zero() {
    for delta0 in [0.2, 1.0, 2.5, 3.0] {
        let (m, q, x1) = s3_point_scenario(delta0);
        let geos = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, 20.0).unwrap();
        assert_eq!(geos[0].morse_index, 0);
        assert_close(geos[0].length, delta0, 1e-12);
    }
    let (m, q, x1) = great_circle_in_s3();
    assert_eq!(enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, 20.0).unwrap()[0].morse_index, 0);
}

#[test]
fn shape_operators_vanish() {
    let (m, q, _) = great_circle_in_s3();
    let s = shape_operator(&m, &q).unwrap();
    assert_eq!(s.nrows(), 1);
    assert_eq!(s, s.transpose());
    assert!(s.iter().all(|&x| x == 0.0));
}

#[test]
fn assumption_on_s3() {
    let (m, q, x1) = s3_point_scenario(1.0);
    let report = check_assumption(&m, &q, &x1, &HomotopyClass::Trivial, 0, 1.0).unwrap();
    assert!(report.holds);
    assert_close(report.l_k.unwrap(), 1.0, 1e-12);
    assert_close(report.max_length.unwrap(), 2.0 * PI - 1.0, 1e-12);
    assert_close(report.horizon, 2.0 * PI, 1e-12);
}

#[test]
fn assumption_on_torus_point_fails_codimension_two() {
    let m = Manifold::standard_torus(2);
    let q = Submanifold::point(vec![0.0, 0.0]);
    let x1 = [0.3, 0.4];
    let c = HomotopyClass::lattice(vec![0, 0]);
    let report = assess_assumption(&m, &q, &x1, &c, 0, 5.0).unwrap();
    assert!(!report.holds);
    let failing: Vec<&str> = report.clauses.iter().filter(|c| !c.holds).map(|c| c.clause.as_str()).collect();
    assert_eq!(failing, vec!["iv"]);
    match check_assumption(&m, &q, &x1, &c, 0, 5.0) {
        Err(Error::AssumptionViolated { clause, .. }) => assert_eq!(clause, "iv"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn assumption_on_torus_subtorus_holds() {
    let m = Manifold::standard_torus(2);
    let q = Submanifold::Subtorus { directions: vec![vec![1, 0]], offset: vec![0.0, 0.0] };
    let report = check_assumption(&m, &q, &[0.5, 0.25], &HomotopyClass::lattice(vec![0, 0]), 0, 3.0).unwrap();
    assert!(report.holds);
    assert_close(report.l_k.unwrap(), 0.25, 1e-12);
    assert!(report.index_k_plus_2_geodesics.is_empty());
}

#[test]
fn k_equal_one_never_holds() {
    let (m, q, x1) = s3_point_scenario(1.0);
    let report = assess_assumption(&m, &q, &x1, &HomotopyClass::Trivial, 1, 5.0).unwrap();
    assert!(!report.holds);
    assert!(report.clauses.iter().any(|c| c.clause == "iii" && !c.holds));
}

#[test]
fn s2_point_violates_index_gap() {
    let m = Manifold::sphere(2, 1.0);
    let q = Submanifold::point(vec![1.0, 0.0, 0.0]);
    let x1 = [1f64.cos(), 1f64.sin(), 0.0];
    let report = assess_assumption(&m, &q, &x1, &HomotopyClass::Trivial, 0, 5.0).unwrap();
    assert!(report.clauses.iter().any(|c| c.clause == "iii" && !c.holds));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubling_cap_only_appends(delta0 in 0.05f64..3.0, cap in 0.5f64..30.0) {
        let (m, q, x1) = s3_point_scenario(delta0);
        let small = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, cap).unwrap();
        let large = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::Trivial, 2.0 * cap).unwrap();
        prop_assert!(large.len() >= small.len());
        prop_assert_eq!(&large[..small.len()], &small[..]);
        for g in &large[small.len()..] {
            prop_assert!(g.length > cap);
        }
    }

    #[test]
    fn torus_classes_canonicalize(k0 in -5i64..5, k1 in -5i64..5, shift in -5i64..5) {
        let m = Manifold::standard_torus(2);
        let q = Submanifold::Subtorus { directions: vec![vec![1, 1]], offset: vec![0.1, 0.0] };
        let x1 = [0.5, 0.2];
        let a = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::lattice(vec![k0, k1]), 100.0).unwrap();
        let b = enumerate_geodesics(&m, &q, &x1, &HomotopyClass::lattice(vec![k0 + shift, k1 + shift]), 100.0).unwrap();
        prop_assert_eq!(&a[0].homotopy_class, &b[0].homotopy_class);
        prop_assert!((a[0].length - b[0].length).abs() < 1e-9);
        prop_assert!(same_point(&m, &geodesic_endpoint(&m, &a[0]), &x1, 1e-9));
    }
}
