use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ideal::{HilbertFactorization, PietschWitness};
use crate::projective::Decomposition;
use crate::tensor::DenseTensor;

/// How an upper bound was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Maximum over a complete list of extreme points.
    ExactEnumeration,
    /// Closed form (singular values, Frobenius norm).
    Analytic,
    /// Maximum over a net, inflated by the net correction factor.
    Net,
    /// Bound inherited from an operator ideal norm.
    IdealNormBound,
    /// Dual objective of a semidefinite or linear program.
    Sdp,
    /// Column generation stopped on a heuristic pricing step.
    HeuristicTerminated,
    /// Crude norm-equivalence bound.
    Comparison,
}

/// Object whose re-evaluation reproduces a claimed bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type", content = "value")]
pub enum Witness {
    Point(Vec<f64>),
    ComplexPoint(Vec<Complex64>),
    /// One dual functional per tensor factor.
    Functionals(Vec<Vec<f64>>),
    Functional(Vec<f64>),
    Tensor(DenseTensor),
    Decomposition(Decomposition),
    Pietsch(PietschWitness),
    Factorization(HilbertFactorization),
}

/// Two-sided bound on a norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub witness: Option<Witness>,
    pub upper_witness: Option<Witness>,
    pub certificate: Certificate,
    pub method: String,
}

impl NormEstimate {
    pub fn exact(value: f64, witness: Option<Witness>, certificate: Certificate, method: &str) -> Self {
        NormEstimate {
            lower: value,
            upper: value,
            witness,
            upper_witness: None,
            certificate,
            method: method.to_string(),
        }
    }

    pub fn bounds(lower: f64, upper: f64, certificate: Certificate, method: &str) -> Self {
        NormEstimate {
            lower,
            upper,
            witness: None,
            upper_witness: None,
            certificate,
            method: method.to_string(),
        }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn with_upper_witness(mut self, w: Witness) -> Self {
        self.upper_witness = Some(w);
        self
    }

    pub fn is_exact(&self, tol: f64) -> bool {
        self.upper - self.lower <= tol * (1.0 + self.upper.abs())
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// The estimate for `s * norm` with `s >= 0`.
    pub fn scaled(mut self, s: f64) -> Self {
        self.lower *= s;
        self.upper *= s;
        self
    }
}
