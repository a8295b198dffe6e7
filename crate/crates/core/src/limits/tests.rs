use approx::assert_abs_diff_eq;
use nalgebra::{dmatrix, DMatrix};

use super::*;
use crate::ideal::{gamma2_star, pi2};
use crate::linalg::nuclear_norm;

fn map(x: Space, y: Space, m: DMatrix<f64>) -> OperatorMap {
    OperatorMap::new(x, y, m).unwrap()
}

#[test]
fn eps_to_h_examples() {
    let e = Space::euclidean(2);
    let rank1 = map(e.clone(), e.clone(), dmatrix![0.3, 0.4; 0.6, 0.8]);
    let est = norm_eps_to_h(&rank1, 1).unwrap();
    assert_abs_diff_eq!(est.lower, est.upper, epsilon = 1e-12);
    assert_abs_diff_eq!(est.upper, 0.5 * 5f64.sqrt(), epsilon = 1e-9);

    let id = OperatorMap::identity(e);
    let est = norm_eps_to_h(&id, 2).unwrap();
    assert!(est.lower >= 2f64.sqrt() - 1e-9, "{}", est.lower);
    assert_abs_diff_eq!(est.upper, 2.0, epsilon = 1e-9);
}

#[test]
fn eps_to_h_upper_is_pi2_power() {
    let phi = map(Space::linf(2), Space::euclidean(2), dmatrix![1.0, 0.5; -0.2, 0.7]);
    let p = pi2(&phi).unwrap().upper;
    for k in 2..=3 {
        let est = norm_eps_to_h(&phi, k).unwrap();
        assert!((est.upper - p.powi(k as i32)).abs() <= 1e-9 * est.upper);
        assert!(est.lower <= est.upper);
    }
}

#[test]
fn h_to_pi_examples() {
    let e = Space::euclidean(2);
    let phi = map(e.clone(), Space::l1(2), dmatrix![1.2, -0.3; 0.4, 0.9]);
    let op = operator_norm(&phi).unwrap();
    let est = norm_h_to_pi(&phi, 1).unwrap();
    assert_abs_diff_eq!(est.upper, op.upper, epsilon = 1e-9);
    assert_abs_diff_eq!(est.lower, op.lower, epsilon = 1e-9);

    // π₂ of the formal identity linf(2) -> euclidean(2) is √2: the Pietsch
    // constraint diag(w) ⪰ I forces w = (1, 1).
    let formal = map(e.clone(), Space::l1(2), DMatrix::identity(2, 2));
    let target = pair_target(&formal, Pair::HToPi, &IdealOptions::default()).unwrap();
    assert_abs_diff_eq!(target.upper, 2f64.sqrt(), epsilon = 1e-6);

    let zero = OperatorMap::zero(e, Space::l1(2)).unwrap();
    assert_eq!(norm_h_to_pi(&zero, 2).unwrap().upper, 0.0);
}

#[test]
fn eps_to_pi_identity_k2_is_two() {
    let id = OperatorMap::identity(Space::euclidean(2));
    let est = norm_eps_to_pi(&id, 2).unwrap();
    assert_abs_diff_eq!(est.lower, 2.0, epsilon = 1e-6);
    assert_abs_diff_eq!(est.upper, 2.0, epsilon = 1e-6);
    // The witness I₂ has nuclear norm 2 and spectral norm 1.
    assert_abs_diff_eq!(nuclear_norm(&DMatrix::identity(2, 2)), 2.0, epsilon = 1e-12);
}

#[test]
fn eps_to_pi_roots_below_gamma2_star() {
    let phi = map(Space::linf(2), Space::l1(2), dmatrix![1.0, 0.4; -0.5, 0.8]);
    let g = gamma2_star(&phi).unwrap().upper;
    for k in 1..=3 {
        let est = norm_eps_to_pi(&phi, k).unwrap();
        assert!(est.lower.powf(1.0 / k as f64) <= g + 1e-5);
        assert!(est.lower <= est.upper + 1e-9);
    }
}

#[test]
fn identity_report() {
    let id = OperatorMap::identity(Space::euclidean(2));
    let rep = regularization_report(&id, 4, Pair::EpsToPi).unwrap();
    assert_abs_diff_eq!(rep.target, 2.0, epsilon = 1e-5);
    let mut prev = 0.0;
    for r in &rep.rows {
        assert!(r.root_lower <= 2.0 + 1e-5);
        assert!(r.lower <= r.upper * (1.0 + 1e-9));
        assert!(r.fekete_lower >= prev);
        prev = r.fekete_lower;
    }
    assert_abs_diff_eq!(rep.rows[1].lower, 2.0, epsilon = 1e-6);
    let csv = rep.to_csv();
    assert!(csv.starts_with("k,lower,upper,root_lower,root_upper,fekete_lower,target"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn rank_one_reports_collapse() {
    let e = Space::euclidean(2);
    let rank1 = map(e.clone(), e, dmatrix![0.3, 0.4; 0.6, 0.8]);
    let norm = 0.5 * 5f64.sqrt();
    for pair in [Pair::EpsToH, Pair::HToPi, Pair::EpsToPi] {
        let rep = regularization_report(&rank1, 3, pair).unwrap();
        for r in &rep.rows {
            assert!((r.root_lower - norm).abs() <= 1e-6, "{pair} k={} lower root {}", r.k, r.root_lower);
            assert!((r.root_upper - norm).abs() <= 1e-6, "{pair} k={} upper root {}", r.k, r.root_upper);
        }
    }
}

#[test]
fn zero_report() {
    let zero = OperatorMap::zero(Space::linf(2), Space::euclidean(2)).unwrap();
    let rep = regularization_report(&zero, 3, Pair::EpsToH).unwrap();
    assert_eq!(rep.target, 0.0);
    assert!(rep.rows.iter().all(|r| r.lower == 0.0 && r.upper == 0.0));
}

#[test]
fn supermultiplicative_lower_bounds() {
    let phi = map(Space::l1(2), Space::euclidean(2), dmatrix![1.0, 0.2; 0.3, -0.6]);
    let rep = regularization_report(&phi, 4, Pair::EpsToH).unwrap();
    let low: Vec<f64> = rep.rows.iter().map(|r| r.lower).collect();
    for k in 1..=4 {
        for l in 1..=4 - k {
            assert!(low[k + l - 1] >= low[k - 1] * low[l - 1] - 1e-6);
        }
    }
}

#[test]
fn euclidean_eps_to_h_roots_stay_below_hs() {
    let e = Space::euclidean(2);
    let phi = map(e.clone(), e, dmatrix![1.0, 0.0; 0.0, 0.5]);
    let hs = phi.frobenius();
    let rep = regularization_report(&phi, 4, Pair::EpsToH).unwrap();
    for r in &rep.rows {
        assert!(r.root_lower <= hs + 1e-9);
    }
}

#[test]
fn pair_parsing() {
    assert_eq!("epi".parse::<Pair>().unwrap(), Pair::EpsToPi);
    assert!("xx".parse::<Pair>().is_err());
    assert_eq!(Pair::HToPi.to_string(), "hpi");
}
