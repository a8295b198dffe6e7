use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use super::*;
use crate::spaces::SpaceDescriptor;

fn e(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn identity2() -> DenseTensor {
    DenseTensor::from_matrix(Space::euclidean(2), Space::euclidean(2), &DMatrix::identity(2, 2)).unwrap()
}

#[test]
fn elementary_product_has_single_entry() {
    let a = DenseTensor::elementary(vec![Space::euclidean(2)], &[e(2, 0)]).unwrap();
    let b = DenseTensor::elementary(vec![Space::euclidean(2)], &[e(2, 1)]).unwrap();
    let t = tensor_product(&a, &b).unwrap();
    assert_eq!(t.order(), 2);
    assert_eq!(t.real().unwrap(), &[0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn square_of_identity() {
    let z = identity2();
    let zz = tensor_product(&z, &z).unwrap();
    assert_eq!(zz.order(), 4);
    assert!((hilbert_norm(&zz).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn operator_power_examples() {
    let z = identity2();
    let id = OperatorMap::identity(Space::euclidean(2));
    assert_eq!(apply_operator_power(&id, 2, &z).unwrap(), z);
    let d = OperatorMap::new(Space::euclidean(2), Space::euclidean(2), DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]))).unwrap();
    let x = DenseTensor::elementary(vec![Space::euclidean(2); 2], &[e(2, 0), e(2, 1)]).unwrap();
    let y = apply_operator_power(&d, 2, &x).unwrap();
    assert_eq!(y.real().unwrap(), &[0.0, 6.0, 0.0, 0.0]);
    assert!(matches!(apply_operator_power(&d, 3, &x), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn hs_of_tensor_power_via_basis() {
    let m = DMatrix::from_row_slice(2, 3, &[1.0, -2.0, 0.5, 0.3, 0.0, 1.5]);
    let phi = OperatorMap::new(Space::euclidean(3), Space::euclidean(2), m.clone()).unwrap();
    for k in 1..=3 {
        let mut total = 0.0;
        for flat in 0..3usize.pow(k as u32) {
            let mut data = vec![0.0; 3usize.pow(k as u32)];
            data[flat] = 1.0;
            let b = DenseTensor::new(vec![Space::euclidean(3); k], data).unwrap();
            total += hilbert_norm(&apply_operator_power(&phi, k, &b).unwrap()).unwrap().powi(2);
        }
        assert!((total.sqrt() - m.norm().powi(k as i32)).abs() < 1e-10);
    }
}

#[test]
fn hilbert_norm_examples() {
    let z = DenseTensor::elementary(vec![Space::euclidean(2); 2], &[e(2, 0), e(2, 0)]).unwrap();
    assert_eq!(hilbert_norm(&z).unwrap(), 1.0);
    assert!((hilbert_norm(&identity2()).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    let l1 = z.with_factors(vec![Space::l1(2), Space::euclidean(2)]).unwrap();
    assert!(matches!(hilbert_norm(&l1), Err(Error::NonEuclidean(_))));
}

#[test]
fn injective_examples() {
    let x = DVector::from_vec(vec![0.6, 0.8]);
    let r1 = DenseTensor::elementary(vec![Space::euclidean(2), Space::l1(2)], &[x, DVector::from_vec(vec![0.5, -0.5])]).unwrap();
    let est = injective_norm(&r1).unwrap();
    assert!((est.lower - 1.0).abs() < 1e-12 && (est.upper - 1.0).abs() < 1e-12);

    let est = injective_norm(&identity2()).unwrap();
    assert!((est.upper - 1.0).abs() < 1e-12 && est.is_exact(1e-12));

    let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
    let z = DenseTensor::from_matrix(Space::linf(2), Space::linf(2), &m).unwrap();
    let est = injective_norm(&z).unwrap();
    assert_eq!((est.lower, est.upper), (4.0, 4.0));
    assert_eq!(est.certificate, crate::Certificate::ExactEnumeration);
}

#[test]
fn witness_reproduces_lower_bound() {
    let z = DenseTensor::new(vec![Space::l1(2), Space::linf(3), Space::euclidean(2)], (0..12).map(|i| ((i * 7 % 5) as f64) - 2.0).collect()).unwrap();
    let est = injective_norm(&z).unwrap();
    let Some(crate::Witness::Functionals(a)) = &est.witness else { panic!("functional witness") };
    let alphas: Vec<DVector<f64>> = a.iter().map(|v| DVector::from_column_slice(v)).collect();
    for (f, al) in z.factors().iter().zip(&alphas) {
        assert!(f.dual().eval(al) <= 1.0 + 1e-12);
    }
    assert!((z.pair(&alphas).unwrap().abs() - est.lower).abs() < 1e-9);
}

#[test]
fn net_bounds_bracket_ascent_on_euclidean_cubes() {
    let data: Vec<f64> = (0..27).map(|i| ((i * 13 % 11) as f64 - 5.0) / 3.0).collect();
    let z = DenseTensor::new(vec![Space::euclidean(3); 3], data).unwrap();
    let est = injective_norm(&z).unwrap();
    assert_eq!(est.certificate, crate::Certificate::Net);
    let (asc, _) = injective::ascent_lower(&z, &InjectiveOptions { multistarts: 64, ..Default::default() }).unwrap();
    assert!(est.lower >= asc - 1e-9);
    assert!(est.upper >= est.lower);
    assert!(est.upper <= est.lower * 1.05, "{est:?}");
    assert!(est.upper <= z.coefficient_norm() + 1e-12);
}

#[test]
fn direct_sum_factor_uses_net() {
    let s = Space::new(SpaceDescriptor::direct_sum(SpaceDescriptor::linf(1), SpaceDescriptor::euclidean(1))).unwrap();
    // linf(1) ⊕₂ euclidean(1) is euclidean(2).
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 0.7]);
    let z = DenseTensor::from_matrix(s.clone(), s, &m).unwrap();
    let est = injective_norm(&z).unwrap();
    let exact = crate::linalg::spectral_norm(&m);
    assert!(est.lower <= exact + 1e-9 && exact <= est.upper + 1e-9);
}

#[test]
fn blowup_for_large_polytopal_enumeration() {
    let z = DenseTensor::zeros(vec![Space::l1(4); 4]).unwrap();
    let z = DenseTensor::new(z.factors().to_vec(), vec![1.0; 256]).unwrap();
    let opts = InjectiveOptions { leaf_budget: 100, ..Default::default() };
    assert!(matches!(injective_norm_with(&z, &opts), Err(Error::CombinatorialBlowup { .. })));
}

#[test]
fn memory_guard() {
    let err = DenseTensor::zeros(vec![Space::euclidean(10); 8]).unwrap_err();
    assert!(matches!(err, Error::MemoryGuard { .. }));
}

#[test]
fn json_roundtrip() {
    let z = DenseTensor::new(vec![Space::l1(2), Space::euclidean(3)], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    let js = serde_json::to_string(&z).unwrap();
    assert!(js.contains("\"shape\":[2,3]"));
    let back: DenseTensor = serde_json::from_str(&js).unwrap();
    assert_eq!(back, z);
}

fn tensor(factors: Vec<Space>) -> impl Strategy<Value = DenseTensor> {
    let len: usize = factors.iter().map(|f| f.dim()).product();
    proptest::collection::vec(-2.0f64..2.0, len).prop_map(move |d| DenseTensor::new(factors.clone(), d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn injective_multiplicative_on_polytopal_factors(
        a in tensor(vec![Space::linf(2), Space::l1(2)]),
        b in tensor(vec![Space::l1(3)]),
    ) {
        let ab = tensor_product(&a, &b).unwrap();
        let (na, nb, nab) = (injective_norm(&a).unwrap(), injective_norm(&b).unwrap(), injective_norm(&ab).unwrap());
        prop_assert!(nab.is_exact(1e-12));
        prop_assert!((nab.upper - na.upper * nb.upper).abs() <= 1e-9 * (1.0 + nab.upper));
    }

    #[test]
    fn ascent_never_exceeds_enumeration(z in tensor(vec![Space::l1(3), Space::linf(2), Space::l1(2)])) {
        let exact = injective_norm(&z).unwrap();
        let (asc, _) = injective::ascent_lower(&z, &InjectiveOptions::default()).unwrap();
        prop_assert!(asc <= exact.upper + 1e-9);
    }

    #[test]
    fn injective_below_hilbert(z in tensor(vec![Space::euclidean(2); 3])) {
        let est = injective_norm(&z).unwrap();
        prop_assert!(est.lower <= est.upper + 1e-12);
        prop_assert!(est.lower <= hilbert_norm(&z).unwrap() + 1e-12);
    }
}
