//! Operator ideal norms: Hilbert-Schmidt, 2-summing (`π₂`), factorization
//! through Hilbert space (`γ₂`) and its trace dual (`γ₂*`).
//!
//! `π₂`, `γ₂` and `γ₂*` are small semidefinite programs whose constraints
//! range over the extreme points of the relevant balls, so they need
//! polytopal or euclidean balls (with a net fallback for `π₂`). Upper bounds
//! are re-certified from the extracted witnesses rather than taken from the
//! solver's primal objective.

mod gamma2;
mod gram;
mod pi2;
mod twirl;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::convex::SolverSettings;
use crate::linalg::{min_eigenvalue, symmetrize};
use crate::spaces::OperatorMap;
use crate::{Error, Result};

pub use gamma2::{gamma2, gamma2_star, gamma2_star_with, gamma2_with, Gamma2StarResult};
pub use pi2::{pi2, pi2_sup_lower, pi2_with};
pub(crate) use pi2::pi2_sup_argmax;
pub use twirl::haar_twirl;

/// Solver knobs shared by the ideal norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealOptions {
    pub settings: SolverSettings,
    /// Net resolution for `π₂` when the domain's dual ball is not polytopal.
    /// `None` turns the fallback off.
    pub net_delta: Option<f64>,
    /// Largest vertex list handed to a single SDP; longer lists start from a
    /// random subsample and are completed by cutting planes.
    pub vertex_budget: usize,
    pub cutting_rounds: usize,
    pub seed: u64,
}

impl Default for IdealOptions {
    fn default() -> Self {
        IdealOptions {
            settings: SolverSettings::default(),
            net_delta: None,
            vertex_budget: 256,
            cutting_rounds: 12,
            seed: 0x5eed,
        }
    }
}

/// Discrete Pietsch measure: `ΦᵀΦ ⪯ scale · Σ_j weights_j f_j f_jᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PietschWitness {
    /// Probability weights.
    pub weights: Vec<f64>,
    /// Dual-ball points `f_j` carrying the weights.
    pub points: Vec<Vec<f64>>,
    /// Equals `π₂²` for an optimal measure.
    pub scale: f64,
}

impl PietschWitness {
    /// Smallest eigenvalue of `scale · Σ λ_j f_j f_jᵀ - ΦᵀΦ`.
    pub fn domination_residual(&self, phi: &OperatorMap) -> Result<f64> {
        let m = phi.real()?;
        let n = m.ncols();
        if self.points.iter().any(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: self.points.first().map_or(0, |p| p.len()) });
        }
        let mut d = -(m.transpose() * m);
        for (w, p) in self.weights.iter().zip(&self.points) {
            let f = DVector::from_column_slice(p);
            d += (self.scale * w) * &f * f.transpose();
        }
        Ok(min_eigenvalue(&symmetrize(&d)))
    }
}

/// How the leg sizes of a [`HilbertFactorization`] are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LegMeasure {
    OperatorNorm,
    Pi2,
}

/// `φ = φ₂ ∘ φ₁` with `φ₁: X -> ℓ₂^N` and `φ₂: ℓ₂^N -> Y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HilbertFactorization {
    pub inner_dim: usize,
    pub phi1: OperatorMap,
    pub phi2: OperatorMap,
    pub measure: LegMeasure,
    pub norm1: f64,
    pub norm2: f64,
}

impl HilbertFactorization {
    pub fn bound(&self) -> f64 {
        self.norm1 * self.norm2
    }

    /// Largest entrywise deviation of `φ₂ φ₁` from `φ`.
    pub fn reconstruction_error(&self, phi: &OperatorMap) -> Result<f64> {
        let prod = self.phi2.compose(&self.phi1)?.complex_matrix();
        let target = phi.complex_matrix();
        if prod.shape() != target.shape() {
            return Err(Error::arg("factorization shape differs from the operator"));
        }
        Ok(prod.iter().zip(target.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

/// Hilbert-Schmidt norm of a map between euclidean spaces.
pub fn hs_norm(phi: &OperatorMap) -> Result<f64> {
    if !phi.domain().is_euclidean() || !phi.codomain().is_euclidean() {
        return Err(Error::NonEuclidean("the Hilbert-Schmidt norm".into()));
    }
    Ok(phi.frobenius())
}
