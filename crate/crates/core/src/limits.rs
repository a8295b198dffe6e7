//! Bounds on `‖φ^{⊗k}‖` for the norm pairs ε→h, h→π and ε→π, and
//! regularization reports built from them.
//!
//! Lower bounds come from explicit tensors `z`: the image norm is evaluated
//! exactly (h) or from below (π, via its dual certificate), and `‖z‖_ε` from
//! above, so every ratio is certified. Upper bounds come from ideal norms:
//! `π₂(φ)^k` for ε→h, `π₂(φ*)^k` for h→π and `γ₂*(φ)^k` (or the
//! dimensional bound `‖φ‖^k d^{k-1}`) for ε→π.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimate::{Certificate, NormEstimate, Witness};
use crate::ideal::{gamma2_star_with, pi2_sup_argmax, pi2_with, IdealOptions};
use crate::projective::{projective_norm_with, ProjectiveOptions};
use crate::random::gaussian_in;
use crate::spaces::{operator_norm, OperatorMap, Space};
use crate::tensor::{
    apply_operator_power, check_entries, hilbert_norm, injective_norm_with, tensor_product, DenseTensor,
    InjectiveOptions,
};
use crate::{Error, Result};

/// Norm pair of a tensor-power estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pair {
    #[serde(rename = "eh")]
    EpsToH,
    #[serde(rename = "hpi")]
    HToPi,
    #[serde(rename = "epi")]
    EpsToPi,
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pair::EpsToH => "eh",
            Pair::HToPi => "hpi",
            Pair::EpsToPi => "epi",
        })
    }
}

impl FromStr for Pair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eh" => Ok(Pair::EpsToH),
            "hpi" => Ok(Pair::HToPi),
            "epi" => Ok(Pair::EpsToPi),
            _ => Err(Error::arg(format!("unknown norm pair '{s}' (expected eh, hpi or epi)"))),
        }
    }
}

/// Knobs for the tensor-power estimators.
#[derive(Debug, Clone)]
pub struct LimitOptions {
    /// Gaussian candidate tensors per `k`.
    pub trials: usize,
    pub seed: u64,
    pub ideal: IdealOptions,
    pub injective: InjectiveOptions,
    pub projective: ProjectiveOptions,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            trials: 4,
            seed: 0x5eed,
            ideal: IdealOptions { net_delta: Some(0.1), ..IdealOptions::default() },
            injective: InjectiveOptions::default(),
            projective: ProjectiveOptions::default(),
        }
    }
}

/// A per-`k` estimate with a short label for the lower-bound witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub k: usize,
    pub estimate: NormEstimate,
    pub witness_label: String,
    pub witness: Option<DenseTensor>,
}

fn guard(space: &Space, k: usize) -> Result<()> {
    check_entries(std::iter::repeat_n(space.dim(), k)).map(|_| ())
}

fn zero_power(k: usize, method: &str) -> PowerEstimate {
    PowerEstimate {
        k,
        estimate: NormEstimate::exact(0.0, None, Certificate::Analytic, method),
        witness_label: "zero".into(),
        witness: None,
    }
}

/// `x^{⊗k}` for the norming point of `φ`, with its exact ratio
/// `(‖φx‖ / ‖x‖)^k` (both crossnorms are exact on elementary tensors).
fn elementary_candidate(phi: &OperatorMap, k: usize) -> Result<Option<(f64, DenseTensor)>> {
    let op = operator_norm(phi)?;
    let Some(Witness::Point(p)) = op.witness else { return Ok(None) };
    let x = DVector::from_vec(p);
    let nx = phi.domain().norm(x.as_slice())?;
    if nx <= 0.0 {
        return Ok(None);
    }
    let ny = phi.codomain().norm(phi.apply(x.as_slice())?.as_slice())?;
    let z = DenseTensor::elementary(vec![phi.domain().clone(); k], &vec![x; k])?;
    Ok(Some(((ny / nx).powi(k as i32), z)))
}

/// Candidate tensors on `domain^{⊗k}` shared by the estimators.
fn candidates(phi: &OperatorMap, k: usize, opts: &LimitOptions, seeds: &[DenseTensor]) -> Result<Vec<(String, DenseTensor)>> {
    let x = phi.domain();
    let mut out = Vec::new();
    if k >= 2 {
        out.push(("diagonal".to_string(), DenseTensor::diagonal(x, k)?));
    }
    for t in 0..opts.trials as u64 {
        out.push((format!("gaussian#{t}"), gaussian_in(x, k, opts.seed ^ ((k as u64) << 32), t)?.tensor));
    }
    for (i, s) in seeds.iter().enumerate() {
        if s.order() == k && s.factors().iter().all(|f| f == x) {
            out.push((format!("product#{i}"), s.clone()));
        }
    }
    Ok(out)
}

fn pick_best(scored: Vec<(f64, String, DenseTensor)>, floor: Option<(f64, DenseTensor)>) -> (f64, String, Option<DenseTensor>) {
    let mut best: (f64, String, Option<DenseTensor>) = match floor {
        Some((r, z)) => (r, "elementary".into(), Some(z)),
        None => (0.0, "none".into(), None),
    };
    for (r, label, z) in scored {
        if r > best.0 {
            best = (r, label, Some(z));
        }
    }
    best
}

/// `‖φ^{⊗k}: X^{⊗_ε k} -> H^{⊗_h k}‖` with default options.
pub fn norm_eps_to_h(phi: &OperatorMap, k: usize) -> Result<NormEstimate> {
    Ok(norm_eps_to_h_with(phi, k, &LimitOptions::default(), &[])?.estimate)
}

/// ε→h estimate. The upper bound is `π₂(φ)^k` (`‖φ‖` at `k = 1`); the
/// lower bound is the best certified ratio over elementary, diagonal,
/// Gaussian and seed tensors and pushes `Λ^{⊗k}(w)` of diagonal and
/// Gaussian `w` by the maximizer `Λ` of the `π₂` sup formula.
pub fn norm_eps_to_h_with(phi: &OperatorMap, k: usize, opts: &LimitOptions, seeds: &[DenseTensor]) -> Result<PowerEstimate> {
    check_k(k)?;
    if !phi.codomain().is_euclidean() {
        return Err(Error::NonEuclidean("ε→h estimates (codomain)".into()));
    }
    guard(phi.domain(), k)?;
    guard(phi.codomain(), k)?;
    if phi.is_zero() {
        return Ok(zero_power(k, "eps-to-h"));
    }
    if k == 1 {
        let op = operator_norm(phi)?;
        let witness = op.witness.clone();
        return Ok(PowerEstimate { k, estimate: op, witness_label: "operator-norm".into(), witness: witness_tensor(phi, witness)? });
    }
    let pi2 = pi2_with(phi, &opts.ideal)?;
    let upper = pi2.upper.powi(k as i32);

    let mut cands = candidates(phi, k, opts, seeds)?;
    if !phi.is_complex() {
        let n = phi.domain().dim();
        let (_, lam) = pi2_sup_argmax(phi, 4)?;
        let h = Space::euclidean(n);
        let push = OperatorMap::new(h.clone(), phi.domain().clone(), lam)?;
        cands.push(("sup-push-diagonal".into(), apply_operator_power(&push, k, &DenseTensor::diagonal(&h, k)?)?));
        for t in 0..opts.trials.min(2) as u64 {
            let g = gaussian_in(&h, k, opts.seed ^ 0xa5a5 ^ ((k as u64) << 32), t)?.tensor;
            cands.push((format!("sup-push-gaussian#{t}"), apply_operator_power(&push, k, &g)?));
        }
    }
    let scored: Vec<(f64, String, DenseTensor)> = cands
        .into_par_iter()
        .map(|(label, z)| {
            let eps = injective_norm_with(&z, &opts.injective)?.upper;
            let image = hilbert_norm(&apply_operator_power(phi, k, &z)?)?;
            Ok((if eps > 0.0 { image / eps } else { 0.0 }, label, z))
        })
        .collect::<Result<_>>()?;
    let (lower, label, z) = pick_best(scored, elementary_candidate(phi, k)?);
    let mut est = NormEstimate::bounds(lower.min(upper), upper, Certificate::IdealNormBound, "eps-to-h");
    if let Some(w) = pi2.upper_witness {
        est = est.with_upper_witness(w);
    }
    if let Some(z) = &z {
        est = est.with_witness(Witness::Tensor(z.clone()));
    }
    Ok(PowerEstimate { k, estimate: est, witness_label: label, witness: z })
}

fn witness_tensor(phi: &OperatorMap, w: Option<Witness>) -> Result<Option<DenseTensor>> {
    match w {
        Some(Witness::Point(p)) => Ok(Some(DenseTensor::elementary(vec![phi.domain().clone()], &[DVector::from_vec(p)])?)),
        _ => Ok(None),
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::arg("tensor powers need k >= 1"));
    }
    Ok(())
}

/// `‖φ^{⊗k}: H^{⊗_h k} -> Y^{⊗_π k}‖` with default options.
pub fn norm_h_to_pi(phi: &OperatorMap, k: usize) -> Result<NormEstimate> {
    Ok(norm_h_to_pi_with(phi, k, &LimitOptions::default(), &[])?.estimate)
}

/// h→π estimate through the ε→h estimate of the adjoint `φ*: Y* -> H`,
/// using `(Y^{⊗_π k})* = (Y*)^{⊗_ε k}` in finite dimensions. Witnesses and
/// seeds live on `(Y*)^{⊗k}`.
pub fn norm_h_to_pi_with(phi: &OperatorMap, k: usize, opts: &LimitOptions, seeds: &[DenseTensor]) -> Result<PowerEstimate> {
    if !phi.domain().is_euclidean() {
        return Err(Error::NonEuclidean("h→π estimates (domain)".into()));
    }
    let mut out = norm_eps_to_h_with(&phi.adjoint(), k, opts, seeds)?;
    out.estimate.method = "h-to-pi (adjoint eps-to-h)".into();
    Ok(out)
}

/// `‖φ^{⊗k}: X^{⊗_ε k} -> Y^{⊗_π k}‖` with default options.
pub fn norm_eps_to_pi(phi: &OperatorMap, k: usize) -> Result<NormEstimate> {
    Ok(norm_eps_to_pi_with(phi, k, &LimitOptions::default(), &[])?.estimate)
}

/// ε→π estimate. Upper bound `min(γ₂*(φ)^k, ‖φ‖^k min(dim X, dim Y)^{k-1})`
/// (the second from an Auerbach basis in each factor); lower bound from
/// candidate tensors with the projective norm of the image bounded below by
/// its dual certificate.
pub fn norm_eps_to_pi_with(phi: &OperatorMap, k: usize, opts: &LimitOptions, seeds: &[DenseTensor]) -> Result<PowerEstimate> {
    check_k(k)?;
    guard(phi.domain(), k)?;
    guard(phi.codomain(), k)?;
    if phi.is_complex() {
        return Err(Error::ComplexUnsupported("ε→π tensor-power estimates"));
    }
    if phi.is_zero() {
        return Ok(zero_power(k, "eps-to-pi"));
    }
    let op = operator_norm(phi)?;
    if k == 1 {
        let witness = op.witness.clone();
        return Ok(PowerEstimate { k, estimate: op, witness_label: "operator-norm".into(), witness: witness_tensor(phi, witness)? });
    }
    let d = phi.domain().dim().min(phi.codomain().dim()) as f64;
    let mut upper = op.upper.powi(k as i32) * d.powi(k as i32 - 1);
    let mut cert = Certificate::Comparison;
    match gamma2_star_with(phi, &opts.ideal) {
        Ok(g) => {
            let u = g.estimate.upper.powi(k as i32);
            if u < upper {
                upper = u;
                cert = Certificate::IdealNormBound;
            }
        }
        Err(e) => log::debug!("ε→π upper falls back to the dimensional bound: {e}"),
    }

    let cands = candidates(phi, k, opts, seeds)?;
    let scored: Vec<(f64, String, DenseTensor)> = cands
        .into_par_iter()
        .map(|(label, z)| {
            let eps = injective_norm_with(&z, &opts.injective)?.upper;
            let image = apply_operator_power(phi, k, &z)?;
            let pi = projective_norm_with(&image, &opts.projective)?;
            Ok((if eps > 0.0 { pi.estimate.lower / eps } else { 0.0 }, label, z))
        })
        .collect::<Result<_>>()?;
    let (lower, label, z) = pick_best(scored, elementary_candidate(phi, k)?);
    let mut est = NormEstimate::bounds(lower.min(upper), upper, cert, "eps-to-pi");
    if let Some(z) = &z {
        est = est.with_witness(Witness::Tensor(z.clone()));
    }
    Ok(PowerEstimate { k, estimate: est, witness_label: label, witness: z })
}

/// One `k` of a [`ConvergenceReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: usize,
    /// Certified lower bound, including products of lower bounds at
    /// smaller `k` (witnesses tensorize).
    pub lower: f64,
    /// Lower bound from the candidates evaluated at this `k` alone.
    pub direct_lower: f64,
    pub upper: f64,
    pub root_lower: f64,
    pub root_upper: f64,
    /// `max_{j <= k} lower(j)^{1/j}`: the best lower bound on the limit
    /// using the powers up to `k`.
    pub fekete_lower: f64,
    pub witness: String,
}

/// Tensor-power bounds for `k = 1..=kmax` against the single-letter target.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub pair: Pair,
    pub operator: OperatorMap,
    /// Certified upper bound on the limit value (`π₂(φ)`, `π₂(φ*)` or
    /// `γ₂*(φ)`).
    pub target: f64,
    pub target_lower: f64,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,lower,upper,root_lower,root_upper,fekete_lower,target,witness\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}\n",
                r.k, r.lower, r.upper, r.root_lower, r.root_upper, r.fekete_lower, self.target, r.witness
            ));
        }
        s
    }

    /// Best certified lower bound on the limit.
    pub fn fekete_lower(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.fekete_lower)
    }
}

/// Target value of a pair: `π₂(φ)`, `π₂(φ*)` or `γ₂*(φ)`.
pub fn pair_target(phi: &OperatorMap, pair: Pair, opts: &IdealOptions) -> Result<NormEstimate> {
    match pair {
        Pair::EpsToH => pi2_with(phi, opts),
        Pair::HToPi => pi2_with(&phi.adjoint(), opts),
        Pair::EpsToPi => Ok(gamma2_star_with(phi, opts)?.estimate),
    }
}

/// Runs the per-`k` estimator for `k = 1..=kmax`, seeding each `k` with
/// products of the best witnesses at `j` and `k - j`, and combines lower
/// bounds over all partitions of `k`.
pub fn regularization_report(phi: &OperatorMap, kmax: usize, pair: Pair) -> Result<ConvergenceReport> {
    regularization_report_with(phi, kmax, pair, &LimitOptions::default())
}

pub fn regularization_report_with(phi: &OperatorMap, kmax: usize, pair: Pair, opts: &LimitOptions) -> Result<ConvergenceReport> {
    check_k(kmax)?;
    let target = pair_target(phi, pair, &opts.ideal)?;
    let mut witnesses: Vec<Option<DenseTensor>> = vec![None];
    let mut combined = vec![1.0f64];
    let mut rows: Vec<ReportRow> = Vec::with_capacity(kmax);
    let mut fekete = 0.0f64;
    for k in 1..=kmax {
        let mut seeds = Vec::new();
        for j in 1..=k / 2 {
            if let (Some(a), Some(b)) = (&witnesses[j], &witnesses[k - j]) {
                seeds.push(tensor_product(a, b)?);
            }
        }
        let est = match pair {
            Pair::EpsToH => norm_eps_to_h_with(phi, k, opts, &seeds)?,
            Pair::HToPi => norm_h_to_pi_with(phi, k, opts, &seeds)?,
            Pair::EpsToPi => norm_eps_to_pi_with(phi, k, opts, &seeds)?,
        };
        let direct = est.estimate.lower;
        let mut lower = direct;
        for j in 1..k {
            lower = lower.max(combined[j] * combined[k - j]);
        }
        let upper = est.estimate.upper;
        if lower > upper * (1.0 + 1e-9) + 1e-12 {
            log::warn!("{pair} k={k}: certified lower {lower} exceeds upper {upper}");
        }
        combined.push(lower);
        witnesses.push(est.witness.clone());
        let kf = k as f64;
        let root_lower = lower.powf(1.0 / kf);
        fekete = fekete.max(root_lower);
        rows.push(ReportRow {
            k,
            lower,
            direct_lower: direct,
            upper,
            root_lower,
            root_upper: upper.powf(1.0 / kf),
            fekete_lower: fekete,
            witness: est.witness_label,
        });
        log::info!("{pair} k={k}: [{lower:.6}, {upper:.6}] roots [{root_lower:.6}, {:.6}]", upper.powf(1.0 / kf));
    }
    Ok(ConvergenceReport { pair, operator: phi.clone(), target: target.upper, target_lower: target.lower, rows })
}

#[cfg(test)]
mod tests;
