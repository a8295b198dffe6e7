//! Gaussian random tensors and Monte Carlo estimates over them.
//!
//! Trial `i` of a run with seed `s` draws from stream `i` of a ChaCha8
//! generator seeded with `s`, so results do not depend on scheduling.
//! Per-trial values are collected in trial order before any summation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spaces::{OperatorMap, Space};
use crate::tensor::{apply_operator_power, check_entries, hilbert_norm, injective_norm_with, DenseTensor, InjectiveOptions};
use crate::{Error, Result};

/// A reproducible standard Gaussian tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianSample {
    pub tensor: DenseTensor,
    pub seed: u64,
    pub stream: u64,
    pub k: usize,
    pub n: usize,
}

/// Generator for trial `stream` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard Gaussian tensor on `euclidean(n)^{⊗k}`.
pub fn sample_gaussian_tensor(n: usize, k: usize, seed: u64) -> Result<GaussianSample> {
    if n == 0 || k == 0 {
        return Err(Error::arg("Gaussian tensors need n >= 1 and k >= 1"));
    }
    gaussian_in(&Space::euclidean(n), k, seed, 0)
}

/// Standard Gaussian tensor on `space^{⊗k}` from the given stream. Complex
/// spaces get independent real and imaginary parts of variance 1/2.
pub fn gaussian_in(space: &Space, k: usize, seed: u64, stream: u64) -> Result<GaussianSample> {
    let n = space.dim();
    let len = check_entries(std::iter::repeat_n(n, k))?;
    let mut rng = trial_rng(seed, stream);
    let factors = vec![space.clone(); k];
    let tensor = if space.is_complex() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let data = (0..len)
            .map(|_| Complex64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        DenseTensor::new_complex(factors, data)?
    } else {
        DenseTensor::new(factors, (0..len).map(|_| rng.sample(StandardNormal)).collect())?
    };
    Ok(GaussianSample { tensor, seed, stream, k, n })
}

/// Sample moments of `‖φ^{⊗k}(g)‖` over Gaussian `g`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentRecord {
    pub k: usize,
    pub trials: usize,
    pub mean_sq: f64,
    /// Standard error of `mean_sq`.
    pub se_sq: f64,
    pub mean: f64,
    pub se: f64,
    pub mean_fourth: f64,
    pub se_fourth: f64,
    /// `hs(φ)^k`.
    pub hs_target: f64,
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo moments of `‖φ^{⊗k}(g)‖` for a map between euclidean spaces.
pub fn mc_expected_norms(phi: &OperatorMap, k: usize, trials: usize, seed: u64) -> Result<MomentRecord> {
    if !phi.domain().is_euclidean() || !phi.codomain().is_euclidean() {
        return Err(Error::NonEuclidean("Gaussian moment estimates".into()));
    }
    if trials == 0 || k == 0 {
        return Err(Error::arg("need at least one trial and k >= 1"));
    }
    check_entries(std::iter::repeat_n(phi.domain().dim(), k))?;
    check_entries(std::iter::repeat_n(phi.codomain().dim(), k))?;
    let norms: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g = gaussian_in(phi.domain(), k, seed, t)?;
            hilbert_norm(&apply_operator_power(phi, k, &g.tensor)?)
        })
        .collect::<Result<_>>()?;
    let sq: Vec<f64> = norms.iter().map(|v| v * v).collect();
    let fourth: Vec<f64> = sq.iter().map(|v| v * v).collect();
    let (mean_sq, se_sq) = mean_se(&sq);
    let (mean, se) = mean_se(&norms);
    let (mean_fourth, se_fourth) = mean_se(&fourth);
    Ok(MomentRecord {
        k,
        trials,
        mean_sq,
        se_sq,
        mean,
        se,
        mean_fourth,
        se_fourth,
        hs_target: phi.frobenius().powi(k as i32),
    })
}

/// One row of [`mc_eps_growth`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRow {
    pub k: usize,
    pub mean_eps_upper: f64,
    pub se: f64,
    /// `mean_eps_upper / sqrt(k log k)`.
    pub ratio: f64,
}

/// Average certified injective-norm upper bounds of Gaussian tensors on
/// `euclidean(n)^{⊗k}` for `k = 2..=kmax`.
pub fn mc_eps_growth(n: usize, kmax: usize, trials: usize, seed: u64) -> Result<Vec<GrowthRow>> {
    mc_eps_growth_with(n, kmax, trials, seed, &InjectiveOptions::default())
}

pub fn mc_eps_growth_with(n: usize, kmax: usize, trials: usize, seed: u64, opts: &InjectiveOptions) -> Result<Vec<GrowthRow>> {
    if trials == 0 || n == 0 {
        return Err(Error::arg("need n >= 1 and at least one trial"));
    }
    let space = Space::euclidean(n);
    (2..=kmax)
        .map(|k| {
            check_entries(std::iter::repeat_n(n, k))?;
            let vals: Vec<f64> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let g = gaussian_in(&space, k, seed ^ ((k as u64) << 40), t)?;
                    Ok(injective_norm_with(&g.tensor, opts)?.upper)
                })
                .collect::<Result<_>>()?;
            let (mean, se) = mean_se(&vals);
            let kf = k as f64;
            Ok(GrowthRow { k, mean_eps_upper: mean, se, ratio: mean / (kf * kf.ln()).sqrt() })
        })
        .collect()
}

/// Best Gaussian witness for `‖φ^{⊗k}‖_{ε→h}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessSearch {
    pub tensor: DenseTensor,
    /// `‖φ^{⊗k} z‖_h / ‖z‖_ε-upper`, a certified lower bound.
    pub ratio: f64,
    pub stream: u64,
}

/// Draws `trials` Gaussian tensors on `domain^{⊗k}` and keeps the one with
/// the largest certified ratio `‖φ^{⊗k} z‖_h / ‖z‖_ε`.
pub fn search_witness_tensor(phi: &OperatorMap, k: usize, trials: usize, seed: u64) -> Result<WitnessSearch> {
    search_witness_tensor_with(phi, k, trials, seed, &InjectiveOptions::default())
}

pub fn search_witness_tensor_with(
    phi: &OperatorMap,
    k: usize,
    trials: usize,
    seed: u64,
    opts: &InjectiveOptions,
) -> Result<WitnessSearch> {
    if !phi.codomain().is_euclidean() {
        return Err(Error::NonEuclidean("witness search (codomain)".into()));
    }
    if trials == 0 || k == 0 {
        return Err(Error::arg("need at least one trial and k >= 1"));
    }
    check_entries(std::iter::repeat_n(phi.codomain().dim(), k))?;
    let scored: Vec<(f64, GaussianSample)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let g = gaussian_in(phi.domain(), k, seed, t)?;
            let eps = injective_norm_with(&g.tensor, opts)?.upper;
            let image = hilbert_norm(&apply_operator_power(phi, k, &g.tensor)?)?;
            Ok((if eps > 0.0 { image / eps } else { 0.0 }, g))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, GaussianSample)> = None;
    for (r, g) in scored {
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, g));
        }
    }
    let (ratio, g) = best.expect("at least one trial");
    log::debug!("witness search k={k}: best ratio {ratio:.6} at stream {}", g.stream);
    Ok(WitnessSearch { tensor: g.tensor, ratio, stream: g.stream })
}
