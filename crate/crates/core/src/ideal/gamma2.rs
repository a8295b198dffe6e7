use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gram::{complex_quadratic_sup, quadratic_sup, Bound, Gram};
use super::pi2::pietsch_fit;
use super::{HilbertFactorization, IdealOptions, LegMeasure};
use crate::convex::{SdpProblem, SdpSolution, Sense, SolverSettings};
use crate::estimate::{Certificate, NormEstimate, Witness};
use crate::linalg::{min_eigenvalue, psd_pinv, psd_sqrt, symmetrize};
use crate::spaces::{OperatorMap, Space, SpaceDescriptor};
use crate::{Error, Result};

/// Extreme points feeding one family of Gram constraints. Long lists are
/// handled by cutting planes: only `active` vertices enter the SDP, and the
/// most violated of the rest are added between solves.
struct Side {
    ball: Space,
    full: Option<Vec<DVector<f64>>>,
    active: Vec<bool>,
}

impl Side {
    fn new(ball: Space, complex: bool, opts: &IdealOptions, salt: u64) -> Result<Side> {
        if complex || (ball.is_euclidean() && ball.dim() > 1) {
            return Ok(Side { ball, full: None, active: vec![] });
        }
        let full = ball.half_ball_vertices()?.to_vec();
        let mut active = vec![true; full.len()];
        if full.len() > opts.vertex_budget {
            active = vec![false; full.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ salt);
            for i in sample(&mut rng, full.len(), opts.vertex_budget) {
                active[i] = true;
            }
        }
        Ok(Side { ball, full: Some(full), active })
    }

    fn vertices(&self) -> Option<Vec<DVector<f64>>> {
        self.full
            .as_ref()
            .map(|f| f.iter().zip(&self.active).filter(|(_, a)| **a).map(|(v, _)| v.clone()).collect())
    }

    fn constrain(&self, sdp: &mut SdpProblem, gram: &Gram, off: usize, bound: Bound) -> Result<()> {
        let v = self.vertices();
        gram.bound_ball(sdp, off, &self.ball, bound, v.as_deref())
    }

    /// Activates up to 32 of the most violated vertices; returns whether any.
    fn add_cuts(&mut self, h: &DMatrix<f64>, bound: f64) -> bool {
        let Some(full) = &self.full else { return false };
        let limit = bound * (1.0 + 1e-7) + 1e-9;
        let mut viol: Vec<(f64, usize)> = full
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.active[*i])
            .map(|(i, v)| (v.dot(&(h * v)), i))
            .filter(|(val, _)| *val > limit)
            .collect();
        viol.sort_by(|a, b| b.0.total_cmp(&a.0));
        for &(_, i) in viol.iter().take(32) {
            self.active[i] = true;
        }
        !viol.is_empty()
    }
}

fn principal(h: &DMatrix<Complex64>, off: usize, d: usize) -> DMatrix<Complex64> {
    h.view((off, off), (d, d)).into_owned()
}

fn re(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    h.map(|z| z.re)
}

fn zero_estimate(method: &str) -> NormEstimate {
    NormEstimate::exact(0.0, None, Certificate::Analytic, method)
}

/// Factorization constant `γ₂` with default options.
pub fn gamma2(phi: &OperatorMap) -> Result<NormEstimate> {
    gamma2_with(phi, &IdealOptions::default())
}

/// Factorization constant through Hilbert space.
///
/// Minimizes `t` over Gram matrices `[[P, Φ*], [Φ, Q]] ⪰ 0` with
/// `sup_{B_X} x*Px ≤ t` and `sup_{B_{Y*}} f*Qf ≤ t`. The lower bound is the
/// SDP dual objective; the upper bound is the product of exactly evaluated
/// leg norms of the factorization `φ₁ = D^{1/2}U*`, `φ₂ = ΦUD^{-1/2}` read
/// off the eigendecomposition `P = UDU*`.
pub fn gamma2_with(phi: &OperatorMap, opts: &IdealOptions) -> Result<NormEstimate> {
    let (x, y) = (phi.domain().clone(), phi.codomain().clone());
    let (n, m) = (x.dim(), y.dim());
    let complex = phi.is_complex();
    let mut xs = Side::new(x.clone(), complex, opts, 1)?;
    let mut ys = Side::new(y.dual(), complex, opts, 2)?;
    if phi.is_zero() {
        return Ok(zero_estimate("gamma2-zero"));
    }
    let target = phi.complex_matrix();

    let mut round = 0;
    let (sol, gram, t) = loop {
        let mut sdp = SdpProblem::new(Sense::Minimize);
        let gram = Gram::new(&mut sdp, n + m, complex);
        let t = sdp.add_nonneg();
        for i in 0..m {
            for j in 0..n {
                gram.fix(&mut sdp, n + i, j, target[(i, j)]);
            }
        }
        xs.constrain(&mut sdp, &gram, 0, Bound::Var(t))?;
        ys.constrain(&mut sdp, &gram, n, Bound::Var(t))?;
        sdp.set_objective(vec![(t, 1.0)]);
        let sol = solve(&sdp, &opts.settings)?;
        let h = gram.value(&sol);
        let tv = sol.value(t);
        let cut_x = xs.add_cuts(&re(&principal(&h, 0, n)), tv);
        let cut_y = ys.add_cuts(&re(&principal(&h, n, m)), tv);
        round += 1;
        if !(cut_x || cut_y) || round > opts.cutting_rounds {
            break (sol, gram, tv);
        }
    };

    let h = gram.value(&sol);
    let fac = factorize(phi, &principal(&h, 0, n), t)?;
    let upper = fac.bound();
    let lower = sol.dual_objective.max(0.0).min(upper);
    log::debug!("gamma2: t = {t:.9}, dual = {:.9}, certified = {upper:.9}", sol.dual_objective);
    Ok(NormEstimate::bounds(lower, upper, Certificate::Sdp, "gamma2-sdp").with_upper_witness(Witness::Factorization(fac)))
}

fn solve(sdp: &SdpProblem, settings: &SolverSettings) -> Result<SdpSolution> {
    let sol = sdp.solve_sdp(settings)?;
    if sol.status == crate::convex::SolveStatus::MaxIterations && sol.primal_residual < 1e-6 && sol.dual_residual < 1e-6 {
        log::warn!("SDP stopped at the iteration budget with gap {:.3e}", sol.gap);
        return Ok(sol);
    }
    sol.require_optimal()
}

fn euclidean_like(n: usize, complex: bool) -> Space {
    let d = SpaceDescriptor::euclidean(n);
    Space::new(if complex { d.complex() } else { d }).expect("euclidean descriptor is valid")
}

/// Builds and balances the factorization extracted from the Gram block `P`.
fn factorize(phi: &OperatorMap, p: &DMatrix<Complex64>, t: f64) -> Result<HilbertFactorization> {
    let (x, y) = (phi.domain(), phi.codomain());
    let n = x.dim();
    let complex = phi.is_complex();
    let eps = 1e-9 * t.abs().max(1e-12);
    let herm = (p + p.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let d: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0) + eps).collect();
    let u = eig.eigenvectors;
    let sq = DMatrix::from_diagonal(&DVector::from_iterator(n, d.iter().map(|v| Complex64::new(v.sqrt(), 0.0))));
    let isq = DMatrix::from_diagonal(&DVector::from_iterator(n, d.iter().map(|v| Complex64::new(1.0 / v.sqrt(), 0.0))));
    let mut f1 = sq * u.adjoint();
    let mut f2 = phi.complex_matrix() * &u * isq;

    let sup = |ball: &Space, g: DMatrix<Complex64>| -> Result<f64> {
        if complex {
            complex_quadratic_sup(ball, &g)
        } else {
            quadratic_sup(ball, &symmetrize(&re(&g)))
        }
    };
    let s1 = sup(x, f1.adjoint() * &f1)?;
    let s2 = sup(&y.dual(), &f2 * f2.adjoint())?;
    let c = if s1 > 0.0 && s2 > 0.0 { (s2 / s1).powf(0.25) } else { 1.0 };
    f1 *= Complex64::new(c, 0.0);
    f2 /= Complex64::new(c, 0.0);
    let leg = (s1 * s2).sqrt().sqrt();

    let h = euclidean_like(n, complex);
    let (phi1, phi2) = if complex {
        (OperatorMap::new_complex(x.clone(), h.clone(), f1)?, OperatorMap::new_complex(h, y.clone(), f2)?)
    } else {
        (OperatorMap::new(x.clone(), h.clone(), re(&f1))?, OperatorMap::new(h, y.clone(), re(&f2))?)
    };
    Ok(HilbertFactorization { inner_dim: n, phi1, phi2, measure: LegMeasure::OperatorNorm, norm1: leg, norm2: leg })
}

/// `γ₂*` bounds from the trace-duality SDP and the factorization search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Gamma2StarResult {
    pub estimate: NormEstimate,
    /// Certified value of the best dual operator found by the SDP.
    pub sdp_lower: f64,
    /// Dual objective of the trace-duality SDP.
    pub sdp_upper: f64,
    /// `min π₂(φ₁)·π₂(φ₂*)` over the factorizations visited.
    pub cross_check_upper: Option<f64>,
    pub factorization: Option<HilbertFactorization>,
}

/// `γ₂*` with default options.
pub fn gamma2_star(phi: &OperatorMap) -> Result<NormEstimate> {
    Ok(gamma2_star_with(phi, &IdealOptions::default())?.estimate)
}

/// The 2-dominated norm `γ₂*(φ) = sup { |Tr(φψ)| : γ₂(ψ: Y -> X) ≤ 1 }`.
///
/// The supremum is one SDP over Gram matrices `[[P, Ψ*], [Ψ, Q]] ⪰ 0` with
/// `sup_{B_Y} v*Pv ≤ 1` and `sup_{B_{X*}} f*Qf ≤ 1`. Its primal solution is
/// rescaled until feasible against every vertex (lower bound); its dual
/// objective is the upper bound, tightened by alternating minimization of
/// `π₂(φ₁)·π₂(φ₂*)` over factorizations `φ = φ₂φ₁`.
pub fn gamma2_star_with(phi: &OperatorMap, opts: &IdealOptions) -> Result<Gamma2StarResult> {
    if phi.is_complex() {
        return Err(Error::ComplexUnsupported("2-dominated norm of complex maps"));
    }
    let (x, y) = (phi.domain().clone(), phi.codomain().clone());
    let (n, m) = (x.dim(), y.dim());
    let mut ys = Side::new(y.clone(), false, opts, 3)?;
    let mut xs = Side::new(x.dual(), false, opts, 4)?;
    if phi.is_zero() {
        return Ok(Gamma2StarResult {
            estimate: zero_estimate("gamma2-star-zero"),
            sdp_lower: 0.0,
            sdp_upper: 0.0,
            cross_check_upper: Some(0.0),
            factorization: None,
        });
    }
    let a = phi.real()?.clone();

    let mut round = 0;
    let (sol, gram) = loop {
        let mut sdp = SdpProblem::new(Sense::Maximize);
        let gram = Gram::new(&mut sdp, m + n, false);
        ys.constrain(&mut sdp, &gram, 0, Bound::Const(1.0))?;
        xs.constrain(&mut sdp, &gram, m, Bound::Const(1.0))?;
        let mut obj = Vec::with_capacity(m * n);
        for i in 0..m {
            for k in 0..n {
                if a[(i, k)] != 0.0 {
                    obj.push((gram.re(m + k, i), a[(i, k)]));
                }
            }
        }
        sdp.set_objective(obj);
        let sol = solve(&sdp, &opts.settings)?;
        let w = gram.real_value(&sol);
        let cut_y = ys.add_cuts(&w.view((0, 0), (m, m)).into_owned(), 1.0);
        let cut_x = xs.add_cuts(&w.view((m, m), (n, n)).into_owned(), 1.0);
        round += 1;
        if !(cut_x || cut_y) || round > opts.cutting_rounds {
            break (sol, gram);
        }
    };

    // Make the Gram matrix exactly PSD, then rescale so every vertex
    // constraint holds; the value at the rescaled point is a lower bound.
    let mut w = symmetrize(&gram.real_value(&sol));
    let shift = (-min_eigenvalue(&w)).max(0.0);
    for i in 0..m + n {
        w[(i, i)] += shift;
    }
    let p = w.view((0, 0), (m, m)).into_owned();
    let q = w.view((m, m), (n, n)).into_owned();
    let s = quadratic_sup(&y, &p)?.max(quadratic_sup(&x.dual(), &q)?);
    let value: f64 = (0..m).flat_map(|i| (0..n).map(move |k| (i, k))).map(|(i, k)| a[(i, k)] * w[(m + k, i)]).sum();
    let sdp_lower = if s > 0.0 { value.abs() / s } else { 0.0 };
    let sdp_upper = sol.dual_objective.max(sdp_lower);

    let cross = match cross_check(phi, &opts.settings) {
        Ok(c) => Some(c),
        Err(e) => {
            log::debug!("gamma2* cross-check unavailable: {e}");
            None
        }
    };
    let cross_check_upper = cross.as_ref().map(|f| f.bound());
    let upper = cross_check_upper.map_or(sdp_upper, |c| c.min(sdp_upper)).max(sdp_lower);
    let mut estimate = NormEstimate::bounds(sdp_lower, upper, Certificate::Sdp, "gamma2-star-sdp");
    if let Some(f) = &cross {
        estimate = estimate.with_upper_witness(Witness::Factorization(f.clone()));
    }
    Ok(Gamma2StarResult { estimate, sdp_lower, sdp_upper, cross_check_upper, factorization: cross })
}

/// `π₂(φ₁)²` for `φ₁: X -> ℓ₂` with `φ₁ᵀφ₁ = M`, and the optimal moment
/// matrix `Σ w f fᵀ`.
fn pi2_sq_gram(m: &DMatrix<f64>, x: &Space, settings: &SolverSettings) -> Result<(f64, DMatrix<f64>)> {
    if x.is_euclidean() {
        return Ok((m.trace().max(0.0), m.clone()));
    }
    let fit = pietsch_fit(m, x.half_dual_vertices()?, settings)?;
    Ok((fit.upper, fit.domination))
}

/// Alternating minimization of `π₂(φ₁)·π₂(φ₂*)` over `φ₁ = M^{1/2}`,
/// `φ₂ = Φ M^{-1/2}`.
fn cross_check(phi: &OperatorMap, settings: &SolverSettings) -> Result<HilbertFactorization> {
    let (x, y) = (phi.domain(), phi.codomain());
    let n = x.dim();
    let a = phi.real()?;
    let ydual = y.dual();
    let ridge = |mut mm: DMatrix<f64>| {
        let top = crate::linalg::max_eigenvalue(&mm).max(1e-300);
        for i in 0..n {
            mm[(i, i)] += 1e-9 * top;
        }
        symmetrize(&mm)
    };
    let evaluate = |mm: &DMatrix<f64>| -> Result<(f64, f64, DMatrix<f64>, DMatrix<f64>)> {
        let (ax, dx) = pi2_sq_gram(mm, x, settings)?;
        let inv = psd_pinv(mm, 1e-14);
        let (ay, dy) = pi2_sq_gram(&symmetrize(&(a * inv * a.transpose())), &ydual, settings)?;
        Ok(((ax * ay).sqrt(), ax, dx, dy))
    };

    let starts = [DMatrix::identity(n, n), ridge(psd_sqrt(&(a.transpose() * a)))];
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for start in starts {
        let mut mm = start;
        let mut prev = f64::INFINITY;
        for _ in 0..8 {
            let (val, _, dx, dy) = evaluate(&mm)?;
            if best.as_ref().is_none_or(|(b, _)| val < *b) {
                best = Some((val, mm.clone()));
            }
            // Grow M to the X-side moment matrix (free on that side, helps
            // the other), then shrink it to what the Y side needs.
            let grown = ridge(dx);
            let (val2, ..) = evaluate(&grown)?;
            if best.as_ref().is_none_or(|(b, _)| val2 < *b) {
                best = Some((val2, grown.clone()));
            }
            if a.nrows() != n || val2 > prev * (1.0 - 1e-9) {
                break;
            }
            prev = val2;
            let dyi = psd_pinv(&dy, 1e-14);
            mm = ridge(a.transpose() * dyi * a);
        }
    }
    let (val, mm) = best.ok_or_else(|| Error::NumericalFailure { message: "no factorization evaluated".into(), condition: f64::NAN })?;
    // Balance the legs at the optimum.
    let (_, ax, _, _) = evaluate(&mm)?;
    let ay: f64 = if ax > 0.0 { val * val / ax } else { 0.0 };
    let f1 = psd_sqrt(&mm);
    let f2 = a * psd_pinv(&f1, 1e-14);
    let h = Space::euclidean(n);
    Ok(HilbertFactorization {
        inner_dim: n,
        phi1: OperatorMap::new(x.clone(), h.clone(), f1)?,
        phi2: OperatorMap::new(h, y.clone(), f2)?,
        measure: LegMeasure::Pi2,
        norm1: ax.sqrt(),
        norm2: ay.sqrt(),
    })
}
