use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use super::Outputs;
use crate::ideal::{gamma2, gamma2_star, IdealOptions};
use crate::limits::{regularization_report_with, LimitOptions, Pair};
use crate::random::trial_rng;
use crate::spaces::{operator_norm, operator_norm_with, OperatorMap, Space, SpaceDescriptor};
use crate::Result;

pub(super) fn identity(n: usize, kmax: usize, seed: u64, tol: f64) -> Result<Outputs> {
    let phi = OperatorMap::identity(Space::euclidean(n));
    let opts = LimitOptions { seed, ..LimitOptions::default() };
    let report = regularization_report_with(&phi, kmax, Pair::EpsToPi, &opts)?;
    let nf = n as f64;
    let mut out = Outputs::default();
    out.bound("target", crate::experiments::Bounds { lower: report.target_lower, upper: report.target });
    out.value("fekete_lower", report.fekete_lower());
    out.check("target_equals_dim", report.target_lower >= nf - tol && report.target <= nf + tol);
    out.check("roots_below_dim", report.rows.iter().all(|r| r.root_lower <= nf + tol));
    out.check("sandwich", report.rows.iter().all(|r| r.lower <= r.upper * (1.0 + 1e-9) + tol));
    out.check("fekete_monotone", report.rows.windows(2).all(|w| w[1].fekete_lower >= w[0].fekete_lower));
    if let Some(r) = report.rows.get(1) {
        // id ⊗ id is the identity matrix, whose nuclear/spectral ratio is n.
        out.check("k2_exact", (r.lower - nf).abs() <= 1e-6 && r.upper <= nf + 1e-6);
    }
    out.data = json!({ "rows": report.rows, "csv": report.to_csv() });
    Ok(out)
}

pub(super) fn radius(m: usize, tol: f64) -> Result<Outputs> {
    let n = 2 * m;
    let l1 = Space::l1(m);
    let e = Space::euclidean(m);
    // l1(m) is 1-complemented in X, so d_X >= γ₂(id_{l1(m)}); likewise
    // γ₂*(id_X) >= γ₂*(id_{euclidean(m)}).
    let d = gamma2(&OperatorMap::identity(l1))?;
    let g = gamma2_star(&OperatorMap::identity(e))?;
    let product = d.lower * g.lower;
    let mf = m as f64;
    let mut out = Outputs::default();
    out.value("dim", n as f64);
    out.bound("gamma2_id_l1", &d);
    out.bound("gamma2_star_id_euclidean", &g);
    out.value("product_lower", product);
    out.check("gamma2_matches_sqrt_m", (d.lower - mf.sqrt()).abs() <= tol * (1.0 + mf.sqrt()));
    out.check("gamma2_star_matches_m", (g.lower - mf).abs() <= tol * (1.0 + mf));
    let strict = product > n as f64;
    out.flag("strict", strict);
    if mf.powf(1.5) > 2.0 * mf * (1.0 + 1e-3) {
        out.check("strict_certified", strict);
    }
    out.notes.push(format!(
        "X = {}; certified lower bound d_X·γ₂*(id_X) >= {product:.6} against dim X = {n}",
        SpaceDescriptor::direct_sum(SpaceDescriptor::l1(m), SpaceDescriptor::euclidean(m)).label()
    ));
    Ok(out)
}

pub(super) fn hfp_complex(trials: usize, seed: u64, tol: f64, net_delta: f64) -> Result<Outputs> {
    let cx = Space::new(SpaceDescriptor::linf(2).complex())?;
    let cy = Space::new(SpaceDescriptor::l1(2).complex())?;
    let rx = Space::linf(2);
    let ry = Space::l1(2);
    let mut complex_ratios = Vec::with_capacity(trials);
    let mut real_ratios = Vec::with_capacity(trials);
    let mut rail = true;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let mut g = || -> f64 { rng.sample(StandardNormal) };
        let cm = DMatrix::from_fn(2, 2, |_, _| Complex64::new(g(), g()));
        let rm = DMatrix::from_fn(2, 2, |_, _| g());

        let phi = OperatorMap::new_complex(cx.clone(), cy.clone(), cm)?;
        let norm = operator_norm_with(&phi, Some(net_delta))?;
        let gam = gamma2(&phi)?;
        // Certified: γ₂ <= upper and ‖φ‖ >= lower.
        complex_ratios.push(gam.upper / norm.lower);

        let psi = OperatorMap::new(rx.clone(), ry.clone(), rm)?;
        let rnorm = operator_norm(&psi)?;
        let rgam = gamma2(&psi)?;
        real_ratios.push(rgam.lower / rnorm.upper);
        rail &= rgam.lower <= std::f64::consts::SQRT_2 * rnorm.upper * (1.0 + 1e-6);
    }
    let max_c = complex_ratios.iter().copied().fold(0.0, f64::max);
    let max_r = real_ratios.iter().copied().fold(0.0, f64::max);
    let mut out = Outputs::default();
    out.value("net_delta", net_delta);
    out.value("max_complex_ratio", max_c);
    out.value("max_real_ratio", max_r);
    out.check("complex_ratio_within_tolerance", max_c <= 1.0 + tol);
    out.check("real_ratio_exceeds_one", max_r > 1.01);
    out.check("real_grothendieck_rail", rail);
    out.data = json!({ "complex_ratios": complex_ratios, "real_ratios": real_ratios });
    Ok(out)
}

pub(super) fn hfp_nonstrict(tol: f64) -> Result<Outputs> {
    // x₁ = (1, 1), x₂ = (1, -1) on the flat face x₁ = 1 of the linf ball;
    // f = e₁*, g = e₂*; φ(x) = ((f+g)/2)(x)·y₁ + ((f-g)/2)(x)·y₂ with
    // y₁ = e₁, y₂ = e₂ in l1(2).
    let phi = OperatorMap::from_rows(Space::linf(2), Space::l1(2), &[vec![0.5, 0.5], vec![0.5, -0.5]])?;
    let norm = operator_norm(&phi)?;
    let diff = phi.apply(&[0.0, 2.0])?;
    let eps = Space::l1(2).norm(diff.as_slice())?;
    let gam = crate::ideal::gamma2_with(&phi, &IdealOptions::default())?;
    let target = (1.0 + eps * eps / 4.0).sqrt();
    let mut out = Outputs::default();
    out.bound("operator_norm", &norm);
    out.bound("gamma2", &gam);
    out.value("epsilon", eps);
    out.value("gamma2_lower_target", target);
    out.check("norm_is_one", (norm.lower - 1.0).abs() <= 1e-9 && (norm.upper - 1.0).abs() <= 1e-9);
    out.check("gamma2_above_target", gam.lower >= target - tol);
    out.check("grothendieck_rail", gam.lower <= std::f64::consts::SQRT_2 * norm.upper + tol);
    out.data = json!({ "matrix": [[0.5, 0.5], [0.5, -0.5]] });
    Ok(out)
}
