use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use super::*;

fn hexagon() -> SpaceDescriptor {
    SpaceDescriptor::polytope_vertices(vec![
        vec![1.0, 0.0],
        vec![-1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.0, -1.0],
        vec![1.0, 1.0],
        vec![-1.0, -1.0],
    ])
}

fn sample_spaces() -> Vec<Space> {
    vec![
        Space::euclidean(3),
        Space::l1(3),
        Space::linf(3),
        Space::new(hexagon()).unwrap(),
        Space::new(SpaceDescriptor::direct_sum(SpaceDescriptor::l1(2), SpaceDescriptor::euclidean(2))).unwrap(),
    ]
}

#[test]
fn euclidean_is_self_dual() {
    let s = build_space(SpaceDescriptor::euclidean(2)).unwrap();
    assert_eq!(s.dim(), 2);
    assert_eq!(dual_space(&s).descriptor(), s.descriptor());
    assert!(matches!(s.dual_ball_vertices(), Err(Error::NotPolytopal(_))));
}

#[test]
fn linf_dual_vertices_are_signed_basis() {
    let v = dual_ball_vertices(&Space::linf(2)).unwrap();
    assert_eq!(v.len(), 4);
    for e in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
        assert!(v.iter().any(|p| p.as_slice() == e));
    }
    assert_eq!(Space::l1(3).dual_ball_vertices().unwrap().len(), 8);
}

#[test]
fn direct_sum_dimension() {
    let d = SpaceDescriptor::direct_sum(SpaceDescriptor::l1(5), SpaceDescriptor::euclidean(5));
    assert_eq!(build_space(d).unwrap().dim(), 10);
}

#[test]
fn rejects_bad_descriptors() {
    let asym = SpaceDescriptor::polytope_vertices(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    assert!(matches!(Space::new(asym), Err(Error::InvalidDescriptor(_))));
    let flat = SpaceDescriptor::polytope_vertices(vec![vec![1.0, 1.0], vec![-1.0, -1.0]]);
    assert!(matches!(Space::new(flat), Err(Error::InvalidDescriptor(_))));
    assert!(Space::new(SpaceDescriptor::euclidean(0)).is_err());
}

#[test]
fn vector_norm_examples() {
    assert_eq!(vector_norm(&Space::l1(2), &[1.0, -1.0]).unwrap(), 2.0);
    let sum = Space::new(SpaceDescriptor::direct_sum(SpaceDescriptor::l1(2), SpaceDescriptor::euclidean(2))).unwrap();
    assert!((sum.norm(&[1.0, 0.0, 3.0, 4.0]).unwrap() - 26f64.sqrt()).abs() < 1e-12);
    let hex = Space::new(hexagon()).unwrap();
    assert!((hex.norm(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(hex.norm(&[1.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn gauge_lp_agrees_with_facets() {
    let hex = Space::new(hexagon()).unwrap();
    let capped = hex.recapped(1);
    for p in [[1.0, 1.0], [0.3, -0.7], [2.0, -1.0]] {
        let v = DVector::from_column_slice(&p);
        let (lp, f) = capped.gauge_lp(&v);
        assert!((lp - hex.eval(&v)).abs() < 1e-9);
        assert!((f.dot(&v) - lp).abs() < 1e-9);
    }
}

#[test]
fn dual_descriptor_mapping() {
    assert_eq!(Space::linf(3).dual().descriptor(), &SpaceDescriptor::l1(3));
    assert_eq!(Space::euclidean(4).dual().descriptor(), &SpaceDescriptor::euclidean(4));
    let s = Space::new(SpaceDescriptor::direct_sum(SpaceDescriptor::l1(2), SpaceDescriptor::euclidean(2))).unwrap();
    assert_eq!(
        s.dual().descriptor(),
        &SpaceDescriptor::direct_sum(SpaceDescriptor::linf(2), SpaceDescriptor::euclidean(2))
    );
}

#[test]
fn dual_vertex_cache_is_normalized() {
    for s in sample_spaces() {
        let (Ok(duals), Ok(verts)) = (s.half_dual_vertices(), s.half_ball_vertices()) else {
            continue;
        };
        for f in duals {
            let top = verts.iter().map(|v| f.dot(v).abs()).fold(0.0, f64::max);
            assert!((top - 1.0).abs() < 1e-9, "{s:?}");
        }
    }
}

#[test]
fn vertex_cap_is_enforced() {
    let s = Space::l1(17);
    assert!(matches!(
        s.dual_ball_vertices(),
        Err(Error::CombinatorialBlowup { count, .. }) if count == 1 << 17
    ));
}

#[test]
fn circle_net_size_and_covering() {
    let net = Space::euclidean(2).dual_ball_net(0.1).unwrap();
    let needed = (2.0 * std::f64::consts::PI / (2.0 * 0.05f64.asin())).ceil() as usize;
    assert!(net.points().len() >= needed);
    for f in net.points() {
        assert!((f.norm() - 1.0).abs() < 1e-12);
    }
    let exact = Space::linf(2).dual_ball_net(0.5).unwrap();
    assert!(exact.is_exact());
    assert_eq!(exact.points().len(), 4);
}

#[test]
fn direct_sum_net_covers_extreme_points() {
    use rand::{Rng, SeedableRng};
    let s = Space::new(SpaceDescriptor::direct_sum(SpaceDescriptor::linf(2), SpaceDescriptor::euclidean(2))).unwrap();
    let net = s.ball_net(0.2).unwrap();
    let pts = net.points();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for _ in 0..300 {
        let t: f64 = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
        let a: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let sa = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let sb = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let p = DVector::from_vec(vec![sa * t.cos(), sb * t.cos(), t.sin() * a.cos(), t.sin() * a.sin()]);
        let d = pts.iter().map(|q| s.eval(&(&p - q))).fold(f64::INFINITY, f64::min);
        assert!(d <= net.delta + 1e-12, "distance {d} > {}", net.delta);
    }
}

#[test]
fn complex_linf_net_is_phase_grid() {
    let s = Space::linf(2).descriptor().clone().complex();
    let s = Space::new(s).unwrap();
    let net = s.complex_dual_ball_net(0.1, false).unwrap();
    // Dual is complex l1: points are phase multiples of basis vectors.
    for p in &net.points {
        assert_eq!(p.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert!((s.dual().eval_complex(p).unwrap() - 1.0).abs() < 1e-12);
    }
    let phases = net.points.len() / 2;
    let step = std::f64::consts::TAU / phases as f64;
    assert!(2.0 * (step / 4.0).sin() <= 0.1 + 1e-12);
}

#[test]
fn operator_norm_examples() {
    let id = OperatorMap::identity(Space::euclidean(3));
    assert!((operator_norm(&id).unwrap().upper - 1.0).abs() < 1e-12);
    let phi = OperatorMap::from_rows(Space::linf(2), Space::l1(2), &[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
    let est = operator_norm(&phi).unwrap();
    assert_eq!((est.lower, est.upper), (2.0, 2.0));
    let zero = OperatorMap::zero(Space::l1(2), Space::euclidean(3)).unwrap();
    assert_eq!(operator_norm(&zero).unwrap().upper, 0.0);
}

#[test]
fn net_operator_norm_brackets_exact_value() {
    // Euclidean domain into a direct sum: neither side is polytopal.
    let y = Space::new(SpaceDescriptor::direct_sum(SpaceDescriptor::l1(1), SpaceDescriptor::euclidean(2))).unwrap();
    let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.5, -0.3, 2.0, 0.7, 0.1]);
    let phi = OperatorMap::new(Space::euclidean(2), y, m.clone()).unwrap();
    let est = operator_norm_with_test(&phi);
    // ⊕₂ of l1(1) and euclidean(2) is euclidean(3): spectral norm oracle.
    let exact = crate::linalg::spectral_norm(&m);
    assert!(est.lower <= exact + 1e-9 && exact <= est.upper + 1e-9);
    assert!(est.upper - est.lower < 1e-2);
}

fn operator_norm_with_test(phi: &OperatorMap) -> crate::NormEstimate {
    operator::operator_norm_with(phi, Some(0.05)).unwrap()
}

#[test]
fn complex_operator_norm_bracket() {
    let x = Space::new(SpaceDescriptor::linf(2).complex()).unwrap();
    let y = Space::new(SpaceDescriptor::l1(2).complex()).unwrap();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(1.0, 0.2),
            Complex64::new(-0.4, 0.9),
            Complex64::new(0.3, -0.5),
            Complex64::new(0.8, 0.1),
        ],
    );
    let phi = OperatorMap::new_complex(x, y.clone(), m.clone()).unwrap();
    let est = operator_norm(&phi).unwrap();
    let mut brute: f64 = 0.0;
    for i in 0..20000 {
        let t = std::f64::consts::TAU * i as f64 / 20000.0;
        let p = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, t)]);
        brute = brute.max(y.eval_complex(&(&m * p)).unwrap());
    }
    assert!(est.lower >= brute - 1e-9 && est.upper >= est.lower);
    assert!(est.upper <= brute * (1.0 + 2e-3));
}

#[test]
fn descriptor_json_roundtrip() {
    let d = SpaceDescriptor::direct_sum(hexagon(), SpaceDescriptor::euclidean(3));
    let js = serde_json::to_string(&d).unwrap();
    let back: SpaceDescriptor = serde_json::from_str(&js).unwrap();
    assert_eq!(back, d);
    let parsed: SpaceDescriptor = serde_json::from_str(r#"{"kind":"l1","dim":3}"#).unwrap();
    assert_eq!(parsed, SpaceDescriptor::l1(3));
    assert!(serde_json::from_str::<SpaceDescriptor>(r#"{"kind":"ball","dim":3}"#).is_err());
}

#[test]
fn tensor_eps_h_dual_vertices_are_products() {
    let a = OperatorMap::from_rows(Space::linf(2), Space::euclidean(1), &[vec![1.0, 2.0]]).unwrap();
    let b = OperatorMap::from_rows(Space::linf(3), Space::euclidean(1), &[vec![0.5, 0.0, 1.0]]).unwrap();
    let t = a.tensor_eps_h(&b).unwrap();
    assert_eq!(t.domain().dim(), 6);
    assert_eq!(t.domain().dual_ball_vertices().unwrap().len(), 12);
    // The injective product of two l∞ spaces is l∞ of the product.
    let z = [0.3, -1.0, 0.2, 0.9, 0.0, -0.4];
    assert!((t.domain().norm(&z).unwrap() - 1.0).abs() < 1e-12);
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0f64..3.0, dim)
}

proptest! {
    #[test]
    fn norm_axioms(x in point(4), y in point(4), t in -5.0f64..5.0) {
        let spaces = [
            Space::euclidean(4),
            Space::l1(4),
            Space::linf(4),
            Space::new(SpaceDescriptor::direct_sum(SpaceDescriptor::linf(2), SpaceDescriptor::euclidean(2))).unwrap(),
        ];
        for s in &spaces {
            let nx = s.norm(&x).unwrap();
            let ny = s.norm(&y).unwrap();
            let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            prop_assert!(s.norm(&sum).unwrap() <= nx + ny + 1e-12);
            let scaled: Vec<f64> = x.iter().map(|a| t * a).collect();
            prop_assert!((s.norm(&scaled).unwrap() - t.abs() * nx).abs() <= 1e-12 * (1.0 + nx * t.abs()));
        }
    }

    #[test]
    fn bipolar_and_double_dual(x in point(2)) {
        for s in [Space::new(hexagon()).unwrap(), Space::l1(2), Space::linf(2)] {
            let v = DVector::from_column_slice(&x);
            let via_dual = s.half_dual_vertices().unwrap().iter().map(|f| f.dot(&v).abs()).fold(0.0, f64::max);
            prop_assert!((via_dual - s.eval(&v)).abs() <= 1e-9);
            prop_assert!((s.dual().dual().eval(&v) - s.eval(&v)).abs() <= 1e-9);
        }
    }

    #[test]
    fn norming_functional_is_dual_unit(x in point(4)) {
        let v = DVector::from_column_slice(&x);
        for s in [Space::l1(4), Space::linf(4), Space::euclidean(4)] {
            let f = s.norming_functional(&v);
            prop_assert!((f.dot(&v) - s.eval(&v)).abs() <= 1e-9);
            prop_assert!(s.dual().eval(&f) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn operator_norm_submultiplicative(a in point(4), b in point(4)) {
        let x = Space::linf(2);
        let y = Space::l1(2);
        let z = Space::new(hexagon()).unwrap();
        let p = OperatorMap::new(x, y.clone(), DMatrix::from_row_slice(2, 2, &a)).unwrap();
        let q = OperatorMap::new(y, z, DMatrix::from_row_slice(2, 2, &b)).unwrap();
        let np = operator_norm(&p).unwrap().upper;
        let nq = operator_norm(&q).unwrap().upper;
        let nqp = operator_norm(&q.compose(&p).unwrap()).unwrap().lower;
        prop_assert!(nqp <= np * nq + 1e-9);
    }
}
