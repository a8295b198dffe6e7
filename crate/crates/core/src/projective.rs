//! Projective tensor norm by column generation over elementary tensors.
//!
//! The master problem is the linear program
//! `min Σ|c_j|  s.t.  Σ c_j a_j = z` over a pool of unit elementary tensors
//! `a_j = x_1 ⊗ ... ⊗ x_k`. Its dual multipliers `w` give the lower bound
//! `|<w, z>| / ‖w‖_ε` (injective norm over the dual factors), and the
//! pricing step asks the injective-norm oracle for an elementary tensor with
//! `|<w, a>| > 1`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::convex::{Relation, SdpProblem, Sense, SolverSettings};
use crate::estimate::{Certificate, NormEstimate, Witness};
use crate::spaces::Space;
use crate::tensor::{injective_norm_with, outer, DenseTensor, InjectiveOptions};
use crate::{Error, Result};

/// Largest number of coefficients handled by the master LP.
pub const MAX_COEFFICIENTS: usize = 4096;

/// One term `c · x_1 ⊗ ... ⊗ x_k` with unit-norm points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub coefficient: f64,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Decomposition {
    pub atoms: Vec<Atom>,
    /// Coefficient norm of `z - Σ atoms` at the time of construction.
    pub residual: f64,
}

impl Decomposition {
    /// `Σ |c_j|`, the claimed upper bound.
    pub fn weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.coefficient.abs()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectiveStatus {
    /// Pricing was exact and found no improving atom: lower = upper.
    Certified,
    /// Pricing heuristics found no improving atom but could not prove it.
    HeuristicTerminated,
    /// Iteration budget exhausted or pricing returned a known atom.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct ProjectiveOptions {
    pub max_iterations: usize,
    /// An atom enters when its pricing value exceeds `1 + acceptance`.
    pub acceptance: f64,
    pub pricing: InjectiveOptions,
}

impl Default for ProjectiveOptions {
    fn default() -> Self {
        ProjectiveOptions {
            max_iterations: 300,
            acceptance: 1e-7,
            pricing: InjectiveOptions {
                multistarts: 16,
                ..InjectiveOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectiveResult {
    pub estimate: NormEstimate,
    pub decomposition: Decomposition,
    pub status: ProjectiveStatus,
    pub iterations: usize,
    /// Best dual tensor `w` (pairs with `z` to the lower bound times
    /// `‖w‖_ε`).
    pub dual: Option<DenseTensor>,
}

pub fn projective_norm(z: &DenseTensor) -> Result<NormEstimate> {
    Ok(projective_norm_with(z, &ProjectiveOptions::default())?.estimate)
}

struct Pool {
    atoms: Vec<Vec<DVector<f64>>>,
    flats: Vec<Vec<f64>>,
}

impl Pool {
    fn push(&mut self, factors: &[Space], points: Vec<DVector<f64>>) -> bool {
        let mut unit = Vec::with_capacity(points.len());
        for (f, p) in factors.iter().zip(points) {
            let n = f.eval(&p);
            if n <= 1e-300 {
                return false;
            }
            unit.push(p / n);
        }
        let mut flat = vec![1.0];
        for p in &unit {
            flat = outer(&flat, p.as_slice());
        }
        let scale = flat.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let dup = self.flats.iter().any(|g| {
            flat.iter().zip(g).all(|(a, b)| (a - b).abs() <= 1e-10 * scale)
                || flat.iter().zip(g).all(|(a, b)| (a + b).abs() <= 1e-10 * scale)
        });
        if dup {
            return false;
        }
        self.atoms.push(unit);
        self.flats.push(flat);
        true
    }
}

pub fn projective_norm_with(z: &DenseTensor, opts: &ProjectiveOptions) -> Result<ProjectiveResult> {
    let data = z.real()?;
    let factors = z.factors().to_vec();
    if data.len() > MAX_COEFFICIENTS {
        return Err(Error::MemoryGuard {
            entries: data.len() as u128,
            limit: MAX_COEFFICIENTS as u128,
        });
    }
    if data.iter().all(|x| *x == 0.0) {
        let d = Decomposition::default();
        return Ok(ProjectiveResult {
            estimate: NormEstimate::exact(0.0, Some(Witness::Decomposition(d.clone())), Certificate::Analytic, "zero"),
            decomposition: d,
            status: ProjectiveStatus::Certified,
            iterations: 0,
            dual: None,
        });
    }
    let mut pool = Pool { atoms: Vec::new(), flats: Vec::new() };
    for atom in greedy_peel(z, 2 * z.order() * z.shape().into_iter().max().unwrap_or(1)) {
        pool.push(&factors, atom);
    }
    for atom in basis_atoms(&factors) {
        pool.push(&factors, atom);
    }
    let dual_factors: Vec<Space> = factors.iter().map(|f| f.dual()).collect();

    let mut best_lower = 0.0f64;
    let mut best_dual = None;
    let mut status = ProjectiveStatus::Stalled;
    let mut iterations = 0;
    let mut last_coeffs = Vec::new();
    while iterations < opts.max_iterations {
        iterations += 1;
        let (_, coeffs, duals) = master_lp(data, &pool.flats)?;
        last_coeffs = coeffs;
        let w = DenseTensor::new(dual_factors.clone(), duals)?;
        let price = injective_norm_with(&w, &opts.pricing)?;
        let pairing: f64 = w.real()?.iter().zip(data).map(|(a, b)| a * b).sum();
        if price.upper > 0.0 {
            let lower = pairing.abs() / price.upper;
            if lower > best_lower {
                best_lower = lower;
                best_dual = Some(w.clone());
            }
        }
        if price.lower <= 1.0 + opts.acceptance {
            status = if price.is_exact(1e-12) {
                ProjectiveStatus::Certified
            } else {
                ProjectiveStatus::HeuristicTerminated
            };
            break;
        }
        let Some(Witness::Functionals(points)) = price.witness else {
            break;
        };
        let points = points.into_iter().map(DVector::from_vec).collect();
        if !pool.push(&factors, points) {
            break;
        }
    }
    let mut atoms = Vec::new();
    for (c, a) in last_coeffs.iter().zip(&pool.atoms) {
        if c.abs() > 1e-14 {
            atoms.push(Atom {
                coefficient: *c,
                points: a.iter().map(|p| p.as_slice().to_vec()).collect(),
            });
        }
    }
    let mut decomposition = Decomposition { atoms, residual: 0.0 };
    decomposition.residual = verify_decomposition(z, &decomposition)?;
    // Absorb the LP residual with the coordinate bound
    // ‖r‖_π <= Σ_I |r_I| Π_j ‖e_{i_j}‖.
    let upper = decomposition.weight() + residual_bound(z, &decomposition)?;
    let lower = best_lower.min(upper);
    let certificate = match status {
        ProjectiveStatus::Certified => Certificate::Sdp,
        _ => Certificate::HeuristicTerminated,
    };
    let method = match status {
        ProjectiveStatus::Certified => "column-generation",
        ProjectiveStatus::HeuristicTerminated => "column-generation(heuristic-terminated)",
        ProjectiveStatus::Stalled => "column-generation(stalled)",
    };
    let mut estimate = NormEstimate::bounds(lower, upper.max(lower), certificate, method)
        .with_upper_witness(Witness::Decomposition(decomposition.clone()));
    if let Some(w) = &best_dual {
        estimate = estimate.with_witness(Witness::Tensor(w.clone()));
    }
    Ok(ProjectiveResult {
        estimate,
        decomposition,
        status,
        iterations,
        dual: best_dual,
    })
}

fn master_lp(z: &[f64], flats: &[Vec<f64>]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let mut lp = SdpProblem::new(Sense::Minimize);
    let plus: Vec<_> = flats.iter().map(|_| lp.add_nonneg()).collect();
    let minus: Vec<_> = flats.iter().map(|_| lp.add_nonneg()).collect();
    lp.set_objective(plus.iter().chain(&minus).map(|&v| (v, 1.0)).collect());
    for (i, &zi) in z.iter().enumerate() {
        let mut terms = Vec::new();
        for (j, a) in flats.iter().enumerate() {
            if a[i] != 0.0 {
                terms.push((plus[j], a[i]));
                terms.push((minus[j], -a[i]));
            }
        }
        lp.add_constraint(terms, Relation::Eq, zi);
    }
    let sol = match lp.solve_lp() {
        Ok(sol) => sol,
        // Highly degenerate masters can defeat the dense simplex; the
        // interior point method gives an optimal (central) dual instead.
        Err(Error::SolverFailure(msg)) => {
            log::debug!("master LP falls back to the interior point method: {msg}");
            lp.solve_sdp(&SolverSettings::default())?.require_optimal()?
        }
        Err(e) => return Err(e),
    };
    let coeffs = plus.iter().zip(&minus).map(|(&p, &m)| sol.value(p) - sol.value(m)).collect();
    Ok((sol.objective, coeffs, sol.duals))
}

/// Unit elementary tensors along coordinate directions; they span the
/// tensor space, so the master LP is always feasible.
fn basis_atoms(factors: &[Space]) -> Vec<Vec<DVector<f64>>> {
    let shape: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let total: usize = shape.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; shape.len()];
    for _ in 0..total {
        out.push(
            idx.iter()
                .zip(&shape)
                .map(|(&i, &n)| {
                    let mut e = DVector::zeros(n);
                    e[i] = 1.0;
                    e
                })
                .collect(),
        );
        for p in (0..shape.len()).rev() {
            idx[p] += 1;
            if idx[p] < shape[p] {
                break;
            }
            idx[p] = 0;
        }
    }
    out
}

/// Greedy rank-one peeling: repeatedly subtracts a best Euclidean rank-one
/// approximation (higher-order power iteration).
fn greedy_peel(z: &DenseTensor, max_atoms: usize) -> Vec<Vec<DVector<f64>>> {
    let k = z.order();
    let euclid: Vec<Space> = z.factors().iter().map(|f| Space::euclidean(f.dim())).collect();
    let mut residual = DenseTensor::new(euclid.clone(), z.real().expect("real").to_vec()).expect("same shape");
    let start = residual.coefficient_norm();
    let mut atoms = Vec::new();
    for _ in 0..max_atoms {
        if residual.coefficient_norm() <= 1e-12 * start {
            break;
        }
        let d = residual.real().expect("real");
        let (flat, _) = d.iter().enumerate().fold((0, 0.0f64), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
        let shape = residual.shape();
        let mut rem = flat;
        let mut us: Vec<DVector<f64>> = vec![DVector::zeros(0); k];
        for p in (0..k).rev() {
            let mut e = DVector::zeros(shape[p]);
            e[rem % shape[p]] = 1.0;
            rem /= shape[p];
            us[p] = e;
        }
        let mut sigma = 0.0;
        for _ in 0..100 {
            for i in 0..k {
                let w = residual.contract_except(i, &us);
                let n = w.norm();
                if n > 0.0 {
                    us[i] = w / n;
                }
            }
            let s = residual.pair(&us).expect("shapes agree");
            if (s - sigma).abs() <= 1e-13 * s.abs() {
                sigma = s;
                break;
            }
            sigma = s;
        }
        let rank1 = DenseTensor::elementary(euclid.clone(), &us).expect("shapes agree").scaled(sigma);
        residual = residual.sub(&rank1).expect("same shape");
        atoms.push(us);
    }
    atoms
}

fn reconstruct(z: &DenseTensor, d: &Decomposition) -> Result<Vec<f64>> {
    let shape = z.shape();
    let mut total = vec![0.0; z.len()];
    for a in &d.atoms {
        if a.points.len() != shape.len() {
            return Err(Error::DimensionMismatch { expected: shape.len(), got: a.points.len() });
        }
        let mut flat = vec![a.coefficient];
        for (p, &n) in a.points.iter().zip(&shape) {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            flat = outer(&flat, p);
        }
        for (t, x) in total.iter_mut().zip(flat) {
            *t += x;
        }
    }
    Ok(total)
}

/// Coefficient norm `‖z - Σ c_j x_1 ⊗ ... ⊗ x_k‖_2`, after checking that
/// every point has unit norm in its factor (to 1e-9).
pub fn verify_decomposition(z: &DenseTensor, d: &Decomposition) -> Result<f64> {
    let total = reconstruct(z, d)?;
    for a in &d.atoms {
        for (p, f) in a.points.iter().zip(z.factors()) {
            let n = f.norm(p)?;
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::arg(format!("atom point has norm {n}, expected 1")));
            }
        }
    }
    let data = z.real()?;
    Ok(data.iter().zip(&total).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

fn residual_bound(z: &DenseTensor, d: &Decomposition) -> Result<f64> {
    let total = reconstruct(z, d)?;
    let data = z.real()?;
    let shape = z.shape();
    let basis_norms: Vec<Vec<f64>> = z
        .factors()
        .iter()
        .map(|f| {
            (0..f.dim())
                .map(|i| {
                    let mut e = DVector::zeros(f.dim());
                    e[i] = 1.0;
                    f.eval(&e)
                })
                .collect()
        })
        .collect();
    let mut bound = 0.0;
    let mut idx = vec![0usize; shape.len()];
    for (a, b) in data.iter().zip(&total) {
        let w: f64 = idx.iter().enumerate().map(|(p, &i)| basis_norms[p][i]).product();
        bound += (a - b).abs() * w;
        for p in (0..shape.len()).rev() {
            idx[p] += 1;
            if idx[p] < shape[p] {
                break;
            }
            idx[p] = 0;
        }
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    use super::*;
    use crate::linalg;

    #[test]
    fn rank_one_unit_tensor() {
        let z = DenseTensor::elementary(
            vec![Space::euclidean(2), Space::l1(2)],
            &[DVector::from_vec(vec![0.6, 0.8]), DVector::from_vec(vec![0.5, -0.5])],
        )
        .unwrap();
        let r = projective_norm_with(&z, &ProjectiveOptions::default()).unwrap();
        assert!((r.estimate.upper - 1.0).abs() < 1e-9 && (r.estimate.lower - 1.0).abs() < 1e-7);
        assert_eq!(r.decomposition.atoms.len(), 1);
    }

    #[test]
    fn identity_nuclear_norm() {
        let z = DenseTensor::from_matrix(Space::euclidean(2), Space::euclidean(2), &DMatrix::identity(2, 2)).unwrap();
        let r = projective_norm_with(&z, &ProjectiveOptions::default()).unwrap();
        assert!((r.estimate.upper - 2.0).abs() < 1e-9);
        assert!((r.estimate.lower - 2.0).abs() < 1e-6);
        assert_eq!(r.status, ProjectiveStatus::Certified);
    }

    #[test]
    fn l1_diagonal() {
        let z = DenseTensor::from_matrix(Space::l1(2), Space::l1(2), &DMatrix::identity(2, 2)).unwrap();
        let r = projective_norm_with(&z, &ProjectiveOptions::default()).unwrap();
        assert!((r.estimate.upper - 2.0).abs() < 1e-9 && (r.estimate.lower - 2.0).abs() < 1e-9);
        assert_eq!(r.decomposition.atoms.len(), 2);
    }

    #[test]
    fn verify_decomposition_examples() {
        let z = DenseTensor::from_matrix(Space::l1(2), Space::l1(2), &DMatrix::identity(2, 2)).unwrap();
        let exact = Decomposition {
            atoms: vec![
                Atom { coefficient: 1.0, points: vec![vec![1.0, 0.0], vec![1.0, 0.0]] },
                Atom { coefficient: 1.0, points: vec![vec![0.0, 1.0], vec![0.0, 1.0]] },
            ],
            residual: 0.0,
        };
        assert_eq!(verify_decomposition(&z, &exact).unwrap(), 0.0);
        let mut perturbed = exact.clone();
        perturbed.atoms[0].coefficient += 1e-3;
        let r = verify_decomposition(&z, &perturbed).unwrap();
        assert!(r > 0.0 && r <= 1e-2);
        let empty = Decomposition::default();
        assert!((verify_decomposition(&z, &empty).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let mut bad = exact;
        bad.atoms[0].points[0] = vec![2.0, 0.0];
        assert!(verify_decomposition(&z, &bad).is_err());
    }

    #[test]
    fn decomposition_json_roundtrip() {
        let z = DenseTensor::from_matrix(Space::l1(2), Space::linf(2), &DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.5, 2.0])).unwrap();
        let r = projective_norm_with(&z, &ProjectiveOptions::default()).unwrap();
        let js = serde_json::to_string(&r.decomposition).unwrap();
        let back: Decomposition = serde_json::from_str(&js).unwrap();
        assert!(verify_decomposition(&z, &back).unwrap() < 1e-7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn euclidean_order_two_is_nuclear(d in proptest::collection::vec(-2.0f64..2.0, 9)) {
            let m = DMatrix::from_row_slice(3, 3, &d);
            let z = DenseTensor::from_matrix(Space::euclidean(3), Space::euclidean(3), &m).unwrap();
            let r = projective_norm_with(&z, &ProjectiveOptions::default()).unwrap();
            let nuc = linalg::nuclear_norm(&m);
            prop_assert!(r.estimate.lower <= r.estimate.upper + 1e-12);
            prop_assert!((r.estimate.upper - nuc).abs() <= 1e-6 * (1.0 + nuc), "upper {} vs {}", r.estimate.upper, nuc);
            prop_assert!((r.estimate.lower - nuc).abs() <= 1e-6 * (1.0 + nuc), "lower {} vs {}", r.estimate.lower, nuc);
        }

        #[test]
        fn multiplicative_on_split_tensors(a in proptest::collection::vec(-2.0f64..2.0, 4), b in proptest::collection::vec(-2.0f64..2.0, 2)) {
            let za = DenseTensor::new(vec![Space::l1(2), Space::linf(2)], a).unwrap();
            let zb = DenseTensor::new(vec![Space::linf(2)], b).unwrap();
            let zab = crate::tensor::tensor_product(&za, &zb).unwrap();
            let (ra, rb, rab) = (
                projective_norm_with(&za, &ProjectiveOptions::default()).unwrap(),
                projective_norm_with(&zb, &ProjectiveOptions::default()).unwrap(),
                projective_norm_with(&zab, &ProjectiveOptions::default()).unwrap(),
            );
            prop_assert!(rab.estimate.upper <= ra.estimate.upper * rb.estimate.upper + 1e-6);
            if ra.status == ProjectiveStatus::Certified && rb.status == ProjectiveStatus::Certified {
                prop_assert!(rab.estimate.lower >= ra.estimate.lower * rb.estimate.lower - 1e-6);
            }
        }
    }
}
