//! Planar ellipse sandwich search.
//!
//! Minimizes `λ` over `M ⪰ 0` subject to `(Tv)ᵀM(Tv) <= λ` for the vertices
//! `v` of `K` and `[[M, f], [fᵀ, 1]] ⪰ 0` for the facets `f` of `L`. The
//! second family says `sup_{xᵀMx <= 1} f(x) <= 1`, i.e. the ellipse
//! `{xᵀMx <= 1}` lies in `L`. An ellipse between `T(K)` and `L` exists iff
//! `λ* <= 1`; the dual objective certifies `λ* > 1` when it exceeds one.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Outputs;
use crate::convex::{Relation, SdpProblem, Sense, SolveStatus, SolverSettings};
use crate::linalg::min_eigenvalue;
use crate::spaces::{Space, SpaceDescriptor};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EllipseOutcome {
    /// A verified ellipse matrix was found.
    Feasible,
    /// The dual bound proves that no ellipse fits.
    Infeasible,
    Inconclusive,
}

pub(super) fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(Error::arg("T must be a 2×2 matrix"));
    }
    Ok(DMatrix::from_fn(2, 2, |i, j| rows[i][j]))
}

pub(super) fn check_inputs(k: &[Vec<f64>], l: &[Vec<f64>], t: &[Vec<f64>]) -> Result<()> {
    matrix(t)?;
    for (name, pts) in [("K", k), ("L", l)] {
        if pts.iter().any(|p| p.len() != 2) {
            return Err(Error::arg(format!("{name} must be given by planar points")));
        }
    }
    // Validates symmetry and finiteness.
    Space::new(SpaceDescriptor::polytope_vertices(k.to_vec()))?;
    Space::new(SpaceDescriptor::polytope_facets(l.to_vec()))?;
    Ok(())
}

fn quad(m: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    (w.transpose() * m * w)[(0, 0)]
}

pub(super) fn sandwich(k: &[Vec<f64>], l: &[Vec<f64>], t: &DMatrix<f64>, tol: f64) -> Result<Outputs> {
    let rows: Vec<Vec<f64>> = (0..2).map(|i| vec![t[(i, 0)], t[(i, 1)]]).collect();
    check_inputs(k, l, &rows)?;
    let images: Vec<DVector<f64>> = k.iter().map(|v| t * DVector::from_column_slice(v)).collect();
    let facets: Vec<DVector<f64>> = l.iter().map(|f| DVector::from_column_slice(f)).collect();
    let worst = images
        .iter()
        .flat_map(|w| facets.iter().map(move |f| f.dot(w).abs()))
        .fold(0.0, f64::max);
    if worst > 1.0 + 1e-9 {
        return Err(Error::NotContained(worst));
    }

    let mut sdp = SdpProblem::new(Sense::Minimize);
    let m = sdp.add_psd(2);
    let lambda = sdp.add_nonneg();
    for w in &images {
        sdp.add_constraint(
            vec![
                (m.at(0, 0), w[0] * w[0]),
                (m.at(1, 1), w[1] * w[1]),
                (m.at(0, 1), 2.0 * w[0] * w[1]),
                (lambda, -1.0),
            ],
            Relation::Le,
            0.0,
        );
    }
    for f in &facets {
        let z = sdp.add_psd(3);
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            sdp.add_constraint(vec![(z.at(i, j), 1.0), (m.at(i, j), -1.0)], Relation::Eq, 0.0);
        }
        sdp.add_constraint(vec![(z.at(0, 2), 1.0)], Relation::Eq, f[0]);
        sdp.add_constraint(vec![(z.at(1, 2), 1.0)], Relation::Eq, f[1]);
        sdp.add_constraint(vec![(z.at(2, 2), 1.0)], Relation::Eq, 1.0);
    }
    sdp.set_objective(vec![(lambda, 1.0)]);
    let settings = SolverSettings { max_iterations: 200, ..SolverSettings::default() };
    let sol = sdp.solve_sdp(&settings)?;
    if matches!(sol.status, SolveStatus::Infeasible | SolveStatus::Unbounded) {
        return Err(Error::SolverFailure(format!("ellipse program reported {:?}", sol.status)));
    }

    // Repair the primal matrix so that M ⪰ ffᵀ holds exactly for every
    // facet, then re-evaluate the vertex side directly.
    let mut mat = sol.psd(&m).clone();
    let slack = facets
        .iter()
        .map(|f| min_eigenvalue(&(&mat - f * f.transpose())))
        .fold(f64::INFINITY, f64::min);
    if slack < 0.0 {
        mat += DMatrix::identity(2, 2) * (-slack * (1.0 + 1e-9) + 1e-15);
    }
    let lambda_upper = images.iter().map(|w| quad(&mat, w)).fold(0.0, f64::max);
    let lambda_lower = if sol.dual_residual <= 1e-6 { sol.dual_objective.max(0.0) } else { 0.0 };

    let outcome = if lambda_upper <= 1.0 + 1e-12 {
        EllipseOutcome::Feasible
    } else if lambda_lower > 1.0 + tol {
        EllipseOutcome::Infeasible
    } else {
        EllipseOutcome::Inconclusive
    };
    let mut out = Outputs::default();
    out.value("containment_worst", worst);
    out.bound("lambda", super::Bounds { lower: lambda_lower, upper: lambda_upper });
    // √λ* is the smallest s with an ellipse between T(K) and s·L.
    out.bound("sandwich_factor", super::Bounds { lower: lambda_lower.sqrt(), upper: lambda_upper.sqrt() });
    out.flag("feasible", outcome == EllipseOutcome::Feasible);
    out.check("conclusive", outcome != EllipseOutcome::Inconclusive);
    out.notes.push("exploratory evidence; a single instance settles nothing in general".into());
    let ellipse = if outcome == EllipseOutcome::Feasible {
        Some(vec![vec![mat[(0, 0)], mat[(0, 1)]], vec![mat[(1, 0)], mat[(1, 1)]]])
    } else {
        None
    };
    out.data = json!({
        "outcome": outcome,
        "ellipse_matrix": ellipse,
        "vertex_multipliers": &sol.duals[..images.len()],
        "dual_objective": sol.dual_objective,
        "solver_status": format!("{:?}", sol.status),
    });
    Ok(out)
}
