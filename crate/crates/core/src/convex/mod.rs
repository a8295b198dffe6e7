//! Dense linear and semidefinite programming.
//!
//! Problems are stated in primal form with symmetric PSD matrix variables,
//! nonnegative or free scalars, and linear constraints on their entries (see
//! [`SdpProblem`]). Semidefinite problems go through a primal-dual
//! path-following interior point method (HKM direction with Mehrotra
//! predictor-corrector); scalar-only problems can also go through a two-phase
//! dense simplex that returns a basic solution with duals.

mod ipm;
mod problem;
mod sdpa;
mod simplex;

pub use problem::{
    Constraint, ConstraintId, PsdBlock, Relation, SdpProblem, Sense, Var,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Tolerances and iteration budget for [`SdpProblem::solve_sdp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Relative duality gap `|p - d| / (1 + |p| + |d|)`.
    pub gap_tol: f64,
    /// Relative primal and dual residuals.
    pub feas_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            gap_tol: 1e-7,
            feas_tol: 1e-8,
            max_iterations: 150,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// The dual is infeasible: the primal objective is unbounded.
    Unbounded,
    MaxIterations,
}

/// Farkas-type improving ray returned when infeasibility is detected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FarkasCertificate {
    /// Multipliers `y` (one per constraint, standard-form equalities) with
    /// `b'y = 1` and `sum_i y_i A_i` negative semidefinite, so no `X >= 0`
    /// can satisfy `A(X) = b`.
    Primal { y: Vec<f64>, max_eigenvalue: f64 },
    /// A direction `X >= 0` with `A(X) = 0` and `<C, X> = -1`.
    Dual { residual: f64 },
}

/// Result of a solve. Values are reported in the user's objective sense.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Primal objective value.
    pub objective: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Absolute duality gap `|primal - dual|`.
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    /// One multiplier per user constraint, signed so that
    /// `sum_i duals[i] * rhs[i]` equals the dual objective.
    pub duals: Vec<f64>,
    pub certificate: Option<FarkasCertificate>,
    psd_values: Vec<DMatrix<f64>>,
    dual_slacks: Vec<DMatrix<f64>>,
    scalar_values: Vec<f64>,
    scalar_reduced_costs: Vec<f64>,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Value of a single variable.
    pub fn value(&self, v: Var) -> f64 {
        match v {
            Var::Entry { block, row, col } => self.psd_values[block][(row, col)],
            Var::Scalar(i) => self.scalar_values[i],
        }
    }

    /// Evaluates a linear expression at the primal solution.
    pub fn eval(&self, terms: &[(Var, f64)]) -> f64 {
        terms.iter().map(|&(v, c)| c * self.value(v)).sum()
    }

    pub fn psd(&self, block: &PsdBlock) -> &DMatrix<f64> {
        &self.psd_values[block.id()]
    }

    /// Dual slack matrix `S = C - A^T(y)` of a PSD block, in the internal
    /// minimization sense.
    pub fn dual_slack(&self, block: &PsdBlock) -> &DMatrix<f64> {
        &self.dual_slacks[block.id()]
    }

    /// Reduced cost of a nonnegative scalar (internal minimization sense).
    pub fn reduced_cost(&self, v: Var) -> Option<f64> {
        match v {
            Var::Scalar(i) => self.scalar_reduced_costs.get(i).copied(),
            _ => None,
        }
    }

    pub fn scalars(&self) -> &[f64] {
        &self.scalar_values
    }

    /// Converts non-optimal outcomes into errors.
    pub fn require_optimal(self) -> crate::Result<Self> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            SolveStatus::Infeasible => Err(crate::Error::Infeasible),
            SolveStatus::Unbounded => Err(crate::Error::Unbounded),
            SolveStatus::MaxIterations => Err(crate::Error::SolverFailure(format!(
                "iteration budget exhausted (gap {:.3e}, residuals {:.3e}/{:.3e})",
                self.gap, self.primal_residual, self.dual_residual
            ))),
        }
    }
}
