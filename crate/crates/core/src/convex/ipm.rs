//! Infeasible-start primal-dual path following (HKM direction, Mehrotra
//! predictor-corrector) for block-diagonal SDPs with a diagonal LP block.

use nalgebra::{DMatrix, DVector};

use super::problem::{RawSolution, StandardForm};
use super::{FarkasCertificate, SolveStatus, SolverSettings};
use crate::linalg::{max_eigenvalue, max_psd_step, symmetrize};
use crate::{Error, Result};

const INFEAS_TOL: f64 = 1e-8;
const DIVERGENCE: f64 = 1e6;

struct Iterate {
    x: Vec<DMatrix<f64>>,
    xl: DVector<f64>,
    y: DVector<f64>,
    s: Vec<DMatrix<f64>>,
    sl: DVector<f64>,
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dxl: DVector<f64>,
    dy: DVector<f64>,
    ds: Vec<DMatrix<f64>>,
    dsl: DVector<f64>,
}

/// Per-block sparse constraint data: `(row, entries)`.
type BlockRows = Vec<(usize, Vec<(usize, usize, f64)>)>;

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn sparse_inner(entries: &[(usize, usize, f64)], g: &DMatrix<f64>) -> f64 {
    entries
        .iter()
        .map(|&(r, c, v)| {
            if r == c {
                v * g[(r, r)]
            } else {
                v * (g[(r, c)] + g[(c, r)])
            }
        })
        .sum()
}

fn dense_of(n: usize, entries: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for &(r, c, v) in entries {
        a[(r, c)] += v;
        if r != c {
            a[(c, r)] += v;
        }
    }
    a
}

fn lp_max_step(x: &DVector<f64>, dx: &DVector<f64>, cap: f64) -> f64 {
    let mut a = cap;
    for (xi, di) in x.iter().zip(dx.iter()) {
        if *di < 0.0 {
            a = a.min(-xi / di);
        }
    }
    a
}

pub(crate) fn solve(sf: &StandardForm, st: &SolverSettings) -> Result<RawSolution> {
    let m = sf.m();
    let nb = sf.psd_sizes.len();
    let nl = sf.lp_len;

    let mut block_rows: Vec<BlockRows> = vec![Vec::new(); nb];
    for (i, row) in sf.rows.iter().enumerate() {
        let mut per: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); nb];
        for &(blk, r, c, v) in &row.psd {
            per[blk].push((r, c, v));
        }
        for (blk, e) in per.into_iter().enumerate() {
            if !e.is_empty() {
                block_rows[blk].push((i, e));
            }
        }
    }
    let mut lp_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nl];
    for (i, row) in sf.rows.iter().enumerate() {
        for &(k, v) in &row.lp {
            lp_cols[k].push((i, v));
        }
    }

    let b = &sf.b;
    let bnorm = b.norm();
    let cnorm = (sf.c_psd.iter().map(|c| c.norm_squared()).sum::<f64>()
        + sf.c_lp.norm_squared())
    .sqrt();
    let ntot = (sf.psd_sizes.iter().sum::<usize>() + nl).max(1) as f64;

    // Starting point scaled to the data.
    let mut it = {
        let mut x = Vec::with_capacity(nb);
        let mut s = Vec::with_capacity(nb);
        for (blk, &n) in sf.psd_sizes.iter().enumerate() {
            let rn = (n as f64).sqrt();
            let mut xi: f64 = 10f64.max(rn);
            let mut eta: f64 = 10f64.max(rn).max(sf.c_psd[blk].norm());
            for (i, e) in &block_rows[blk] {
                let an = dense_of(n, e).norm();
                xi = xi.max(rn * (1.0 + b[*i].abs()) / (1.0 + an));
                eta = eta.max(an);
            }
            x.push(DMatrix::identity(n, n) * xi);
            s.push(DMatrix::identity(n, n) * eta);
        }
        let (mut xil, mut etal) = (10.0f64, 10.0f64.max(sf.c_lp.amax()));
        let rl = (nl as f64).sqrt();
        xil = xil.max(rl);
        etal = etal.max(rl);
        for (k, col) in lp_cols.iter().enumerate() {
            let _ = k;
            for &(i, v) in col {
                xil = xil.max((1.0 + b[i].abs()) / (1.0 + v.abs()));
                etal = etal.max(v.abs());
            }
        }
        Iterate {
            x,
            xl: DVector::from_element(nl, xil),
            y: DVector::zeros(m),
            s,
            sl: DVector::from_element(nl, etal),
        }
    };

    let mut status = SolveStatus::MaxIterations;
    let mut certificate = None;
    let mut iterations = 0;
    let mut last = (0.0, 0.0, f64::INFINITY, f64::INFINITY);

    for iter in 0..=st.max_iterations {
        iterations = iter;
        let ax = sf.apply(&it.x, &it.xl);
        let rp = b - &ax;
        let (aty, atyl) = sf.adjoint(&it.y);
        let rd: Vec<DMatrix<f64>> = (0..nb)
            .map(|k| &sf.c_psd[k] - &aty[k] - &it.s[k])
            .collect();
        let rdl = &sf.c_lp - &atyl - &it.sl;
        let pobj = inner(&sf.c_psd, &it.x) + sf.c_lp.dot(&it.xl);
        let dobj = b.dot(&it.y);
        let xs = inner(&it.x, &it.s) + it.xl.dot(&it.sl);
        let mu = xs / ntot;
        let pinf = rp.norm() / (1.0 + bnorm);
        let dinf = (rd.iter().map(|r| r.norm_squared()).sum::<f64>() + rdl.norm_squared())
            .sqrt()
            / (1.0 + cnorm);
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        last = (pobj, dobj, pinf, dinf);
        log::trace!(
            "ipm {iter:3} pobj {pobj:+.10e} dobj {dobj:+.10e} gap {relgap:.2e} pinf {pinf:.2e} dinf {dinf:.2e}"
        );
        if relgap <= st.gap_tol && pinf <= st.feas_tol && dinf <= st.feas_tol {
            status = SolveStatus::Optimal;
            break;
        }
        if let Some(cert) = primal_infeasibility(sf, &it, dobj, cnorm) {
            status = SolveStatus::Infeasible;
            certificate = Some(cert);
            break;
        }
        if let Some(cert) = dual_infeasibility(sf, &it, pobj, bnorm) {
            status = SolveStatus::Unbounded;
            certificate = Some(cert);
            break;
        }
        if iter == st.max_iterations {
            break;
        }

        let mut sinv = Vec::with_capacity(nb);
        let mut xchol = Vec::with_capacity(nb);
        let mut schol = Vec::with_capacity(nb);
        let mut broken = false;
        for k in 0..nb {
            match (it.s[k].clone().cholesky(), it.x[k].clone().cholesky()) {
                (Some(sc), Some(xc)) => {
                    sinv.push(sc.inverse());
                    schol.push(sc.l());
                    xchol.push(xc.l());
                }
                _ => {
                    broken = true;
                    break;
                }
            }
        }
        if broken {
            log::debug!("ipm: iterate lost definiteness at iteration {iter}");
            break;
        }

        // Schur complement M_pq = <A_p, X A_q S^-1>.
        let mut mmat = DMatrix::<f64>::zeros(m, m);
        for k in 0..nb {
            let n = sf.psd_sizes[k];
            for (q, eq) in &block_rows[k] {
                let g = &it.x[k] * dense_of(n, eq) * &sinv[k];
                for (p, ep) in &block_rows[k] {
                    mmat[(*p, *q)] += sparse_inner(ep, &g);
                }
            }
        }
        for (k, col) in lp_cols.iter().enumerate() {
            let d = it.xl[k] / it.sl[k];
            for &(p, vp) in col {
                for &(q, vq) in col {
                    mmat[(p, q)] += vp * vq * d;
                }
            }
        }
        let mmat = symmetrize(&mmat);
        let chol = factor_schur(&mmat)?;

        let xrds: Vec<DMatrix<f64>> = (0..nb).map(|k| &it.x[k] * &rd[k] * &sinv[k]).collect();
        let xrdsl = it.xl.component_mul(&rdl).component_div(&it.sl);

        let solve_dir = |t: &[DMatrix<f64>], tl: &DVector<f64>| -> Direction {
            let g: Vec<DMatrix<f64>> = (0..nb).map(|k| &t[k] * &sinv[k] - &xrds[k]).collect();
            let gl = tl.component_div(&it.sl) - &xrdsl;
            let rhs = b - sf.apply(&g, &gl);
            let dy = chol.solve(&rhs);
            let (atdy, atdyl) = sf.adjoint(&dy);
            let ds: Vec<DMatrix<f64>> = (0..nb).map(|k| &rd[k] - &atdy[k]).collect();
            let dsl = &rdl - &atdyl;
            let dx: Vec<DMatrix<f64>> = (0..nb)
                .map(|k| {
                    let raw = &t[k] * &sinv[k] - &it.x[k] - &it.x[k] * &ds[k] * &sinv[k];
                    symmetrize(&raw)
                })
                .collect();
            let dxl = tl.component_div(&it.sl) - &it.xl - it.xl.component_mul(&dsl).component_div(&it.sl);
            Direction {
                dx,
                dxl,
                dy,
                ds,
                dsl,
            }
        };
        let steps = |d: &Direction, cap: f64| -> (f64, f64) {
            let mut ap = lp_max_step(&it.xl, &d.dxl, cap);
            let mut ad = lp_max_step(&it.sl, &d.dsl, cap);
            for k in 0..nb {
                ap = ap.min(max_psd_step(&xchol[k], &d.dx[k], cap));
                ad = ad.min(max_psd_step(&schol[k], &d.ds[k], cap));
            }
            (ap, ad)
        };

        // Predictor.
        let zeros: Vec<DMatrix<f64>> = sf.psd_sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        let aff = solve_dir(&zeros, &DVector::zeros(nl));
        let (apa, ada) = steps(&aff, 1.0);
        let xs_aff: f64 = (0..nb)
            .map(|k| (&it.x[k] + &aff.dx[k] * apa).dot(&(&it.s[k] + &aff.ds[k] * ada)))
            .sum::<f64>()
            + (&it.xl + &aff.dxl * apa).dot(&(&it.sl + &aff.dsl * ada));
        let sigma = if mu > 0.0 {
            (xs_aff / ntot / mu).clamp(0.0, 1.0).powi(3)
        } else {
            0.0
        };

        // Corrector.
        let t: Vec<DMatrix<f64>> = (0..nb)
            .map(|k| {
                let n = sf.psd_sizes[k];
                DMatrix::identity(n, n) * (sigma * mu) - &aff.dx[k] * &aff.ds[k]
            })
            .collect();
        let tl = DVector::from_element(nl, sigma * mu) - aff.dxl.component_mul(&aff.dsl);
        let dir = solve_dir(&t, &tl);
        let gamma = 0.9 + 0.09 * apa.min(ada);
        let (ap, ad) = steps(&dir, f64::INFINITY);
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            log::debug!("ipm: stalled at iteration {iter}");
            break;
        }
        for k in 0..nb {
            it.x[k] += &dir.dx[k] * ap;
            it.s[k] += &dir.ds[k] * ad;
            it.x[k] = symmetrize(&it.x[k]);
            it.s[k] = symmetrize(&it.s[k]);
        }
        it.xl += &dir.dxl * ap;
        it.sl += &dir.dsl * ad;
        it.y += &dir.dy * ad;
    }

    let (pobj, dobj, pinf, dinf) = last;
    Ok(RawSolution {
        status,
        x_psd: it.x,
        x_lp: it.xl,
        y: it.y,
        s_psd: it.s,
        s_lp: it.sl,
        primal_objective: pobj,
        dual_objective: dobj,
        primal_residual: pinf,
        dual_residual: dinf,
        iterations,
        certificate,
    })
}

fn factor_schur(mmat: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if let Some(c) = mmat.clone().cholesky() {
        return Ok(c);
    }
    let scale = mmat.diagonal().amax().max(1e-300);
    for shift in [1e-14, 1e-12, 1e-10, 1e-8] {
        let reg = mmat + DMatrix::identity(mmat.nrows(), mmat.nrows()) * (shift * scale);
        if let Some(c) = reg.cholesky() {
            log::debug!("ipm: Schur complement regularized by {shift:e}");
            return Ok(c);
        }
    }
    let sv = crate::linalg::singular_values(mmat);
    let hi = sv.iter().cloned().fold(0.0, f64::max);
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Err(Error::NumericalFailure {
        message: "Schur complement is not positive definite".into(),
        condition: if lo > 0.0 { hi / lo } else { f64::INFINITY },
    })
}

fn primal_infeasibility(
    sf: &StandardForm,
    it: &Iterate,
    dobj: f64,
    cnorm: f64,
) -> Option<FarkasCertificate> {
    if !(dobj > DIVERGENCE * (1.0 + cnorm)) {
        return None;
    }
    let yhat = &it.y / dobj;
    let (z, zl) = sf.adjoint(&yhat);
    let mut lam = zl.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for zk in &z {
        lam = lam.max(max_eigenvalue(zk));
    }
    if lam <= INFEAS_TOL {
        Some(FarkasCertificate::Primal {
            y: yhat.iter().cloned().collect(),
            max_eigenvalue: lam,
        })
    } else {
        None
    }
}

fn dual_infeasibility(
    sf: &StandardForm,
    it: &Iterate,
    pobj: f64,
    bnorm: f64,
) -> Option<FarkasCertificate> {
    if !(-pobj > DIVERGENCE * (1.0 + bnorm)) {
        return None;
    }
    let scale = -pobj;
    let xh: Vec<DMatrix<f64>> = it.x.iter().map(|x| x / scale).collect();
    let xhl = &it.xl / scale;
    let r = sf.apply(&xh, &xhl).norm();
    if r <= INFEAS_TOL {
        Some(FarkasCertificate::Dual { residual: r })
    } else {
        None
    }
}
