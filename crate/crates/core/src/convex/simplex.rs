//! Two-phase dense tableau simplex for scalar-only problems.

use nalgebra::{DMatrix, DVector};

use super::problem::{RawSolution, StandardForm};
use super::SolveStatus;
use crate::{Error, Result};

const EPS: f64 = 1e-10;
const MAX_PIVOTS: usize = 200_000;
/// Consecutive degenerate pivots before switching to Bland's rule for the
/// rest of the phase.
const DEGENERATE_SWITCH: usize = 50;

struct Tableau {
    t: DMatrix<f64>,
    obj: DVector<f64>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[(i, self.ncols)]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[(row, col)];
        let width = self.ncols + 1;
        for j in 0..width {
            self.t[(row, j)] /= p;
        }
        for i in 0..self.t.nrows() {
            if i != row {
                let f = self.t[(i, col)];
                if f != 0.0 {
                    for j in 0..width {
                        let v = self.t[(row, j)];
                        self.t[(i, j)] -= f * v;
                    }
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for j in 0..width {
                self.obj[j] -= f * self.t[(row, j)];
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations over columns `0..allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<bool> {
        let mut degenerate = 0usize;
        let mut bland = false;
        for _ in 0..MAX_PIVOTS {
            bland |= degenerate >= DEGENERATE_SWITCH;
            let mut enter = None;
            let mut best = -EPS;
            for j in 0..allowed {
                let rc = self.obj[j];
                if rc < -EPS {
                    if bland {
                        enter = Some(j);
                        break;
                    }
                    if rc < best {
                        best = rc;
                        enter = Some(j);
                    }
                }
            }
            let Some(col) = enter else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.nrows() {
                let a = self.t[(i, col)];
                if a > EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - EPS
                                || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(false);
            };
            if ratio.abs() <= EPS {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(row, col);
        }
        Err(Error::SolverFailure("simplex pivot budget exhausted".into()))
    }
}

pub(crate) fn solve(sf: &StandardForm) -> Result<RawSolution> {
    let m = sf.m();
    let n = sf.lp_len;
    let ncols = n + m;
    let mut t = DMatrix::zeros(m, ncols + 1);
    let mut flip = vec![1.0; m];
    for (i, row) in sf.rows.iter().enumerate() {
        if sf.b[i] < 0.0 {
            flip[i] = -1.0;
        }
        for &(k, v) in &row.lp {
            t[(i, k)] += flip[i] * v;
        }
        t[(i, n + i)] = 1.0;
        t[(i, ncols)] = flip[i] * sf.b[i];
    }
    // Phase I: minimize the sum of artificials.
    let mut obj = DVector::zeros(ncols + 1);
    for i in 0..m {
        for j in 0..n {
            obj[j] -= t[(i, j)];
        }
        obj[ncols] -= t[(i, ncols)];
    }
    let mut tab = Tableau {
        t,
        obj,
        basis: (n..n + m).collect(),
        ncols,
    };
    tab.optimize(n)?;
    let infeas: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i))
        .sum();
    if infeas > 1e-9 * (1.0 + sf.b.norm()) {
        return Err(Error::Infeasible);
    }
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[(i, j)].abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
    }
    // Phase II.
    let mut obj = DVector::zeros(ncols + 1);
    for j in 0..n {
        obj[j] = sf.c_lp[j];
    }
    for i in 0..m {
        let cb = if tab.basis[i] < n { sf.c_lp[tab.basis[i]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..=ncols {
                obj[j] -= cb * tab.t[(i, j)];
            }
        }
    }
    tab.obj = obj;
    if !tab.optimize(n)? {
        return Err(Error::Unbounded);
    }

    let mut x = DVector::zeros(n);
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    // Artificial columns hold B^-1, so their reduced costs are -y.
    let y = DVector::from_iterator(m, (0..m).map(|i| -tab.obj[n + i] * flip[i]));
    let mut rc = sf.c_lp.clone();
    for (i, row) in sf.rows.iter().enumerate() {
        for &(k, v) in &row.lp {
            rc[k] -= y[i] * v;
        }
    }
    let pobj = sf.c_lp.dot(&x);
    let dobj = sf.b.dot(&y);
    let ax = sf.apply(&[], &x);
    Ok(RawSolution {
        status: SolveStatus::Optimal,
        x_psd: vec![],
        x_lp: x,
        y,
        s_psd: vec![],
        s_lp: rc.clone(),
        primal_objective: pobj,
        dual_objective: dobj,
        primal_residual: (&sf.b - ax).norm() / (1.0 + sf.b.norm()),
        dual_residual: rc.iter().map(|r| (-r).max(0.0)).fold(0.0, f64::max),
        iterations: 0,
        certificate: None,
    })
}
