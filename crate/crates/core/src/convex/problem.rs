use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{ipm, simplex, SdpSolution, SolverSettings};
use crate::{Error, Result};

/// A decision variable: one entry of a symmetric PSD block or a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// Entry `(row, col)` of a symmetric block, normalized so `row <= col`.
    Entry { block: usize, row: usize, col: usize },
    Scalar(usize),
}

/// Handle to a PSD matrix variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsdBlock {
    id: usize,
    size: usize,
}

impl PsdBlock {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn at(&self, i: usize, j: usize) -> Var {
        assert!(i < self.size && j < self.size, "entry outside block");
        let (row, col) = if i <= j { (i, j) } else { (j, i) };
        Var::Entry { block: self.id, row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintId(pub usize);

#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(Var, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarKind {
    NonNeg,
    Free,
}

/// A linear program over PSD blocks and scalars.
///
/// Off-diagonal terms refer to a single symmetric entry: the coefficient `c`
/// on `block.at(i, j)` contributes `c * X[i][j]` (not `2c`).
#[derive(Debug, Clone)]
pub struct SdpProblem {
    sense: Sense,
    psd_sizes: Vec<usize>,
    scalars: Vec<ScalarKind>,
    constraints: Vec<Constraint>,
    objective: Vec<(Var, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum ScalarSlot {
    NonNeg(usize),
    Free(usize, usize),
}

/// Sparse symmetric entry `(block, row <= col, value)` of a constraint
/// matrix; the matrix holds `value` at both `(row, col)` and `(col, row)`.
pub(crate) type SymEntry = (usize, usize, usize, f64);

#[derive(Debug, Clone, Default)]
pub(crate) struct Row {
    pub psd: Vec<SymEntry>,
    pub lp: Vec<(usize, f64)>,
}

/// `min <C, X> s.t. <A_i, X> = b_i, X >= 0` with a diagonal (LP) block.
#[derive(Debug, Clone)]
pub(crate) struct StandardForm {
    pub psd_sizes: Vec<usize>,
    pub lp_len: usize,
    pub c_psd: Vec<DMatrix<f64>>,
    pub c_lp: DVector<f64>,
    pub rows: Vec<Row>,
    pub b: DVector<f64>,
    /// `+1` for minimization, `-1` when the user maximizes.
    pub obj_sign: f64,
    pub scalar_slots: Vec<ScalarSlot>,
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        SdpProblem {
            sense,
            psd_sizes: Vec::new(),
            scalars: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn add_psd(&mut self, size: usize) -> PsdBlock {
        assert!(size > 0, "PSD block must be nonempty");
        self.psd_sizes.push(size);
        PsdBlock {
            id: self.psd_sizes.len() - 1,
            size,
        }
    }

    pub fn add_nonneg(&mut self) -> Var {
        self.scalars.push(ScalarKind::NonNeg);
        Var::Scalar(self.scalars.len() - 1)
    }

    pub fn add_free(&mut self) -> Var {
        self.scalars.push(ScalarKind::Free);
        Var::Scalar(self.scalars.len() - 1)
    }

    pub fn add_constraint(
        &mut self,
        terms: Vec<(Var, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> ConstraintId {
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
        ConstraintId(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, terms: Vec<(Var, f64)>) {
        self.objective = terms;
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_psd_blocks(&self) -> usize {
        self.psd_sizes.len()
    }

    pub fn num_scalars(&self) -> usize {
        self.scalars.len()
    }

    fn check_var(&self, v: Var) -> Result<()> {
        match v {
            Var::Entry { block, row, col } => {
                let n = *self
                    .psd_sizes
                    .get(block)
                    .ok_or_else(|| Error::arg(format!("unknown PSD block {block}")))?;
                if row > col || col >= n {
                    return Err(Error::arg(format!(
                        "entry ({row},{col}) invalid for block of size {n}"
                    )));
                }
            }
            Var::Scalar(i) => {
                if i >= self.scalars.len() {
                    return Err(Error::arg(format!("unknown scalar {i}")));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn standard_form(&self) -> Result<StandardForm> {
        let mut slots = Vec::with_capacity(self.scalars.len());
        let mut lp_len = 0usize;
        for kind in &self.scalars {
            match kind {
                ScalarKind::NonNeg => {
                    slots.push(ScalarSlot::NonNeg(lp_len));
                    lp_len += 1;
                }
                ScalarKind::Free => {
                    slots.push(ScalarSlot::Free(lp_len, lp_len + 1));
                    lp_len += 2;
                }
            }
        }
        let mut rows = Vec::with_capacity(self.constraints.len());
        let mut b = Vec::with_capacity(self.constraints.len());
        for con in &self.constraints {
            let mut row = self.compile_terms(&con.terms, &slots)?;
            match con.relation {
                Relation::Eq => {}
                Relation::Le => {
                    row.lp.push((lp_len, 1.0));
                    lp_len += 1;
                }
                Relation::Ge => {
                    row.lp.push((lp_len, -1.0));
                    lp_len += 1;
                }
            }
            if !con.rhs.is_finite() {
                return Err(Error::arg("non-finite right-hand side"));
            }
            rows.push(row);
            b.push(con.rhs);
        }
        let obj_sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let obj = self.compile_terms(&self.objective, &slots)?;
        let mut c_psd: Vec<DMatrix<f64>> = self
            .psd_sizes
            .iter()
            .map(|&n| DMatrix::zeros(n, n))
            .collect();
        for &(blk, r, c, v) in &obj.psd {
            c_psd[blk][(r, c)] += obj_sign * v;
            if r != c {
                c_psd[blk][(c, r)] += obj_sign * v;
            }
        }
        let mut c_lp = DVector::zeros(lp_len);
        for &(i, v) in &obj.lp {
            c_lp[i] += obj_sign * v;
        }
        Ok(StandardForm {
            psd_sizes: self.psd_sizes.clone(),
            lp_len,
            c_psd,
            c_lp,
            rows,
            b: DVector::from_vec(b),
            obj_sign,
            scalar_slots: slots,
        })
    }

    fn compile_terms(&self, terms: &[(Var, f64)], slots: &[ScalarSlot]) -> Result<Row> {
        let mut psd: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        let mut lp: BTreeMap<usize, f64> = BTreeMap::new();
        for &(v, coef) in terms {
            self.check_var(v)?;
            if !coef.is_finite() {
                return Err(Error::arg("non-finite coefficient"));
            }
            match v {
                Var::Entry { block, row, col } => {
                    let val = if row == col { coef } else { 0.5 * coef };
                    *psd.entry((block, row, col)).or_insert(0.0) += val;
                }
                Var::Scalar(i) => match slots[i] {
                    ScalarSlot::NonNeg(k) => *lp.entry(k).or_insert(0.0) += coef,
                    ScalarSlot::Free(p, n) => {
                        *lp.entry(p).or_insert(0.0) += coef;
                        *lp.entry(n).or_insert(0.0) -= coef;
                    }
                },
            }
        }
        Ok(Row {
            psd: psd
                .into_iter()
                .filter(|(_, v)| *v != 0.0)
                .map(|((b, r, c), v)| (b, r, c, v))
                .collect(),
            lp: lp.into_iter().filter(|(_, v)| *v != 0.0).collect(),
        })
    }

    /// Solves with the interior point method.
    pub fn solve_sdp(&self, settings: &SolverSettings) -> Result<SdpSolution> {
        let sf = self.standard_form()?;
        let raw = ipm::solve(&sf, settings)?;
        Ok(self.assemble(&sf, raw))
    }

    /// Solves a scalar-only problem with the simplex method. The result is a
    /// basic optimal solution; infeasible and unbounded problems are errors.
    pub fn solve_lp(&self) -> Result<SdpSolution> {
        if !self.psd_sizes.is_empty() {
            return Err(Error::arg("solve_lp called on a problem with PSD blocks"));
        }
        let sf = self.standard_form()?;
        let raw = simplex::solve(&sf)?;
        Ok(self.assemble(&sf, raw))
    }

    fn assemble(&self, sf: &StandardForm, raw: RawSolution) -> SdpSolution {
        let scalar_values = sf
            .scalar_slots
            .iter()
            .map(|slot| match *slot {
                ScalarSlot::NonNeg(k) => raw.x_lp[k],
                ScalarSlot::Free(p, n) => raw.x_lp[p] - raw.x_lp[n],
            })
            .collect();
        let scalar_reduced_costs = sf
            .scalar_slots
            .iter()
            .map(|slot| match *slot {
                ScalarSlot::NonNeg(k) | ScalarSlot::Free(k, _) => raw.s_lp[k],
            })
            .collect();
        let pobj = sf.obj_sign * raw.primal_objective;
        let dobj = sf.obj_sign * raw.dual_objective;
        SdpSolution {
            status: raw.status,
            objective: pobj,
            primal_objective: pobj,
            dual_objective: dobj,
            gap: (pobj - dobj).abs(),
            primal_residual: raw.primal_residual,
            dual_residual: raw.dual_residual,
            iterations: raw.iterations,
            duals: raw.y.iter().map(|y| sf.obj_sign * y).collect(),
            certificate: raw.certificate,
            psd_values: raw.x_psd,
            dual_slacks: raw.s_psd,
            scalar_values,
            scalar_reduced_costs,
        }
    }

    /// Writes the standard form in SDPA sparse format (see the README).
    pub fn write_sdpa<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        let sf = self.standard_form()?;
        super::sdpa::write(&sf, out)
    }
}

/// Solver output in standard-form (minimization) terms.
#[derive(Debug, Clone)]
pub(crate) struct RawSolution {
    pub status: super::SolveStatus,
    pub x_psd: Vec<DMatrix<f64>>,
    pub x_lp: DVector<f64>,
    pub y: DVector<f64>,
    pub s_psd: Vec<DMatrix<f64>>,
    pub s_lp: DVector<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub certificate: Option<super::FarkasCertificate>,
}

impl StandardForm {
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// `A(X)` for possibly non-symmetric block matrices.
    pub fn apply(&self, x_psd: &[DMatrix<f64>], x_lp: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.rows.iter().map(|row| {
                let mut acc = 0.0;
                for &(blk, r, c, v) in &row.psd {
                    let x = &x_psd[blk];
                    acc += if r == c {
                        v * x[(r, r)]
                    } else {
                        v * (x[(r, c)] + x[(c, r)])
                    };
                }
                for &(k, v) in &row.lp {
                    acc += v * x_lp[k];
                }
                acc
            }),
        )
    }

    /// `A^T(y)`.
    pub fn adjoint(&self, y: &DVector<f64>) -> (Vec<DMatrix<f64>>, DVector<f64>) {
        let mut mats: Vec<DMatrix<f64>> = self
            .psd_sizes
            .iter()
            .map(|&n| DMatrix::zeros(n, n))
            .collect();
        let mut lp = DVector::zeros(self.lp_len);
        for (row, &yi) in self.rows.iter().zip(y.iter()) {
            if yi == 0.0 {
                continue;
            }
            for &(blk, r, c, v) in &row.psd {
                mats[blk][(r, c)] += yi * v;
                if r != c {
                    mats[blk][(c, r)] += yi * v;
                }
            }
            for &(k, v) in &row.lp {
                lp[k] += yi * v;
            }
        }
        (mats, lp)
    }
}
