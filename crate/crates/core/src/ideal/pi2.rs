use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{IdealOptions, PietschWitness};
use crate::convex::{Relation, SdpProblem, Sense, SolverSettings};
use crate::estimate::{Certificate, NormEstimate, Witness};
use crate::linalg::{max_eigenvalue, symmetrize};
use crate::spaces::{operator_norm, OperatorMap, Space};
use crate::{Error, Result};

/// Optimal discrete Pietsch measure for `A ⪯ Σ w_j f_j f_jᵀ`.
pub(crate) struct PietschFit {
    /// Certified `min Σ w` (re-verified from the extracted measure).
    pub upper: f64,
    /// Dual objective of the SDP.
    pub lower: f64,
    pub weights: Vec<f64>,
    /// `Σ w_j f_j f_jᵀ` at the certified scale.
    pub domination: DMatrix<f64>,
}

/// Solves `min Σ w  s.t.  Σ_j w_j f_j f_jᵀ ⪰ A, w ≥ 0` for a PSD `A`.
pub(crate) fn pietsch_fit(a: &DMatrix<f64>, points: &[DVector<f64>], settings: &SolverSettings) -> Result<PietschFit> {
    let n = a.nrows();
    if a.iter().all(|v| *v == 0.0) {
        let k = points.len().max(1);
        return Ok(PietschFit {
            upper: 0.0,
            lower: 0.0,
            weights: vec![1.0 / k as f64; points.len()],
            domination: DMatrix::zeros(n, n),
        });
    }
    let mut sdp = SdpProblem::new(Sense::Minimize);
    let w: Vec<_> = points.iter().map(|_| sdp.add_nonneg()).collect();
    let z = sdp.add_psd(n);
    for r in 0..n {
        for c in r..n {
            let mut terms: Vec<_> = points
                .iter()
                .zip(&w)
                .map(|(f, &v)| (v, f[r] * f[c]))
                .filter(|(_, coef)| *coef != 0.0)
                .collect();
            terms.push((z.at(r, c), -1.0));
            sdp.add_constraint(terms, Relation::Eq, a[(r, c)]);
        }
    }
    sdp.set_objective(w.iter().map(|&v| (v, 1.0)).collect());
    let sol = sdp.solve_sdp(settings)?.require_optimal()?;

    // Re-certify: normalize the weights, mix in a sliver of uniform mass so
    // the moment matrix is invertible, then find the exact scale.
    let raw: Vec<f64> = w.iter().map(|&v| sol.value(v).max(0.0)).collect();
    let total: f64 = raw.iter().sum();
    let k = points.len() as f64;
    let mix = 1e-10;
    let lambda: Vec<f64> = raw
        .iter()
        .map(|x| if total > 0.0 { (1.0 - mix) * x / total + mix / k } else { 1.0 / k })
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for (l, f) in lambda.iter().zip(points) {
        m += *l * f * f.transpose();
    }
    let scale = generalized_max(a, &m)?;
    Ok(PietschFit {
        upper: scale,
        lower: sol.dual_objective.max(0.0).min(scale),
        weights: lambda,
        domination: m * scale,
    })
}

/// Smallest `t` with `A ⪯ t M` for positive definite `M`.
fn generalized_max(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<f64> {
    let chol = symmetrize(m)
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure { message: "Pietsch moment matrix is singular".into(), condition: f64::INFINITY })?;
    let l = chol.l();
    let li = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NumericalFailure { message: "Pietsch moment matrix is singular".into(), condition: f64::INFINITY })?;
    let b = &li * a * li.transpose();
    // Tiny relative inflation so the domination survives the eigen round-off.
    Ok(max_eigenvalue(&symmetrize(&b)).max(0.0) * (1.0 + 1e-12))
}

/// 2-summing norm with the default options (no net fallback).
pub fn pi2(phi: &OperatorMap) -> Result<NormEstimate> {
    pi2_with(phi, &IdealOptions::default())
}

/// 2-summing norm of a map into a euclidean space.
///
/// Euclidean domains use `π₂ = hs`. Polytopal dual balls give an exact SDP
/// whose optimal measure is returned as a [`PietschWitness`]. Other domains
/// need `opts.net_delta`: the SDP over a `δ`-net of dual extreme points is a
/// valid Pietsch measure (upper bound), and the net shrinks weak 2-norms by
/// at most `1 - δ` (lower bound).
pub fn pi2_with(phi: &OperatorMap, opts: &IdealOptions) -> Result<NormEstimate> {
    let x = phi.domain();
    if !phi.codomain().is_euclidean() {
        return Err(Error::NonEuclidean("2-summing norms into non-euclidean codomains".into()));
    }
    if x.is_euclidean() {
        let v = phi.frobenius();
        return Ok(NormEstimate::exact(v, None, Certificate::Analytic, "hilbert-schmidt"));
    }
    if phi.is_complex() {
        return Err(Error::ComplexUnsupported("2-summing norm of complex maps off euclidean domains"));
    }
    let m = phi.real()?;
    let a = m.transpose() * m;
    let (points, shrink): (Vec<DVector<f64>>, f64) = match x.half_dual_vertices() {
        Ok(v) => (v.to_vec(), 1.0),
        Err(e @ Error::CombinatorialBlowup { .. }) if opts.net_delta.is_none() => return Err(e),
        Err(_) => {
            let delta = opts.net_delta.ok_or_else(|| Error::NotPolytopal(x.dual().label()))?;
            let net = x.dual_ball_net(delta)?;
            let shrink = if x.dual().is_euclidean() {
                1.0 - net.delta * net.delta / 2.0
            } else {
                1.0 - net.delta
            };
            (net.half, shrink)
        }
    };
    let fit = pietsch_fit(&a, &points, &opts.settings)?;
    let upper = fit.upper.sqrt();
    let lower = (fit.lower.sqrt() * shrink).min(upper);
    let witness = PietschWitness {
        weights: fit.weights,
        points: points.iter().map(|p| p.as_slice().to_vec()).collect(),
        scale: fit.upper,
    };
    let (cert, method) = if shrink == 1.0 { (Certificate::Sdp, "pietsch-sdp") } else { (Certificate::Net, "pietsch-sdp-net") };
    Ok(NormEstimate::bounds(lower, upper, cert, method).with_upper_witness(Witness::Pietsch(witness)))
}

/// Lower bound on `π₂(φ)` from `sup { hs(φλ) : λ: ℓ₂ -> X, ‖λ‖ ≤ 1 }`.
///
/// Each start is improved by gradient ascent on `hs(φΛ)² / g_p(Λ)`, where
/// `g_p` smooths `‖Λ‖² = max_f ‖Λᵀf‖²` by an `ℓ_p` mean over dual points.
/// The returned value divides by the certified operator norm of `Λ`, so it
/// is a valid lower bound whatever the ascent does.
pub fn pi2_sup_lower(phi: &OperatorMap, starts: usize) -> Result<f64> {
    Ok(pi2_sup_argmax(phi, starts)?.0)
}

/// [`pi2_sup_lower`] together with a maximizing `Λ: ℓ₂^n -> X`, scaled to
/// operator norm at most 1.
pub(crate) fn pi2_sup_argmax(phi: &OperatorMap, starts: usize) -> Result<(f64, DMatrix<f64>)> {
    if !phi.codomain().is_euclidean() {
        return Err(Error::NonEuclidean("2-summing norms into non-euclidean codomains".into()));
    }
    if phi.is_complex() {
        return Err(Error::ComplexUnsupported("2-summing lower bounds of complex maps"));
    }
    let x = phi.domain().clone();
    let n = x.dim();
    let m = phi.real()?;
    if m.iter().all(|v| *v == 0.0) {
        return Ok((0.0, DMatrix::zeros(n, n)));
    }
    let a = m.transpose() * m;
    let h = Space::euclidean(n);
    let points: Option<Vec<DVector<f64>>> = if x.is_euclidean() {
        None
    } else if let Ok(v) = x.half_dual_vertices() {
        Some(v.to_vec())
    } else {
        Some(x.dual_ball_net(0.2)?.half)
    };

    let mut inits = vec![DMatrix::identity(n, n)];
    if let Some(Witness::Point(p)) = operator_norm(phi)?.witness {
        let mut l = DMatrix::zeros(n, n);
        l.set_column(0, &DVector::from_vec(p));
        inits.push(l);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    while inits.len() < starts.max(2) {
        inits.push(DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng)));
    }

    let mut best = (0.0f64, DMatrix::zeros(n, n));
    for init in inits {
        let improved = ascend(&a, init.clone(), points.as_deref());
        for lam in [init, improved] {
            let norm = operator_norm(&OperatorMap::new(h.clone(), x.clone(), lam.clone())?)?.upper;
            if norm > 0.0 && (m * &lam).norm() / norm > best.0 {
                best = ((m * &lam).norm() / norm, lam / norm);
            }
        }
    }
    Ok(best)
}

/// Smoothed constraint `g_p(Λ)` and its gradient.
fn smoothed(lam: &DMatrix<f64>, points: Option<&[DVector<f64>]>, p: f64) -> (f64, DMatrix<f64>) {
    let (dirs, s): (Vec<DVector<f64>>, Vec<f64>) = match points {
        Some(f) => f.iter().map(|f| (f.clone(), (lam.transpose() * f).norm_squared())).unzip(),
        None => {
            let eig = SymmetricEigen::new(lam * lam.transpose());
            (0..lam.nrows())
                .map(|i| (eig.eigenvectors.column(i).into_owned(), eig.eigenvalues[i].max(0.0)))
                .unzip()
        }
    };
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax <= 0.0 {
        return (0.0, DMatrix::zeros(lam.nrows(), lam.ncols()));
    }
    let sum: f64 = s.iter().map(|v| (v / smax).powf(p)).sum();
    let g = smax * sum.powf(1.0 / p);
    let mut d = DMatrix::zeros(lam.nrows(), lam.nrows());
    for (f, v) in dirs.iter().zip(&s) {
        let w = (v / smax).powf(p - 1.0);
        if w > 1e-300 {
            d += w * f * f.transpose();
        }
    }
    let grad = 2.0 * sum.powf(1.0 / p - 1.0) * d * lam;
    (g, grad)
}

fn ascend(a: &DMatrix<f64>, mut lam: DMatrix<f64>, points: Option<&[DVector<f64>]>) -> DMatrix<f64> {
    let ratio = |l: &DMatrix<f64>, p: f64| {
        let (g, _) = smoothed(l, points, p);
        if g > 0.0 {
            (l.transpose() * a * l).trace() / g
        } else {
            0.0
        }
    };
    for p in [4.0, 16.0, 64.0, 256.0] {
        let mut step = 0.1;
        let mut cur = ratio(&lam, p);
        for _ in 0..200 {
            let (g, dg) = smoothed(&lam, points, p);
            if g <= 0.0 {
                break;
            }
            let num = (lam.transpose() * a * &lam).trace();
            let grad = (2.0 * a * &lam * g - dg * num) / (g * g);
            let gn = grad.norm();
            if gn < 1e-12 {
                break;
            }
            let scale = lam.norm() / gn;
            let mut improved = false;
            while step > 1e-10 {
                let mut cand = &lam + &grad * (step * scale);
                let nrm = cand.norm();
                cand /= nrm;
                let val = ratio(&cand, p);
                if val > cur {
                    let gain = val - cur;
                    lam = cand;
                    cur = val;
                    step *= 1.5;
                    improved = gain > 1e-13 * cur.abs();
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
    }
    lam
}
