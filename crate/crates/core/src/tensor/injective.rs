use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{contract_front, DenseTensor};
use crate::estimate::{Certificate, NormEstimate, Witness};
use crate::spaces::{Space, SpaceKind};
use crate::{linalg, Error, Result};

/// Knobs for [`injective_norm_with`].
#[derive(Debug, Clone)]
pub struct InjectiveOptions {
    /// Number of alternating-ascent starts.
    pub multistarts: usize,
    /// Net resolution for non-polytopal factors; `None` picks the finest
    /// resolution that fits `leaf_budget`.
    pub net_delta: Option<f64>,
    /// Largest number of enumerated functional tuples.
    pub leaf_budget: u128,
    pub seed: u64,
    /// Relative improvement below which a sweep ends the ascent.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for InjectiveOptions {
    fn default() -> Self {
        InjectiveOptions {
            multistarts: 32,
            net_delta: None,
            leaf_budget: 1 << 22,
            seed: 0x5eed,
            tolerance: 1e-10,
            max_sweeps: 500,
        }
    }
}

const DELTA_LADDER: [f64; 14] = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05, 0.03, 0.02];

/// Injective norm with default options.
pub fn injective_norm(z: &DenseTensor) -> Result<NormEstimate> {
    injective_norm_with(z, &InjectiveOptions::default())
}

/// One enumerated axis: its list of dual functionals and the factor by
/// which a net on it can undershoot the supremum.
struct Axis {
    axis: usize,
    list: Vec<DVector<f64>>,
    shrink: f64,
}

/// Injective norm `sup |<α_1 ⊗ ... ⊗ α_k, z>|` over dual unit balls.
///
/// Factors with polytopal duals are enumerated over their dual vertices
/// (half lists, ties broken by the first tuple in lexicographic order). One
/// factor is left free and handled by its norm, or two euclidean factors by
/// the spectral norm. Remaining factors are covered by nets, which makes the
/// upper bound net-certified; the lower bound then comes from alternating
/// ascent.
pub fn injective_norm_with(z: &DenseTensor, opts: &InjectiveOptions) -> Result<NormEstimate> {
    let data = z.real()?;
    let k = z.order();
    let factors = z.factors();
    if data.iter().all(|x| *x == 0.0) {
        let zero: Vec<DVector<f64>> = factors.iter().map(|f| DVector::zeros(f.dim())).collect();
        return Ok(NormEstimate::exact(0.0, Some(functionals_witness(&zero)), Certificate::Analytic, "zero"));
    }
    if k == 1 {
        let v = DVector::from_column_slice(data);
        let f = factors[0].norming_functional(&v);
        let val = factors[0].eval(&v);
        return Ok(NormEstimate::exact(val, Some(functionals_witness(&[f])), Certificate::Analytic, "norm"));
    }

    let polytopal: Vec<bool> = factors.iter().map(|f| f.has_polytopal_dual()).collect();
    let free = choose_free(factors, &polytopal);
    let others: Vec<usize> = (0..k).filter(|i| !free.contains(i)).collect();
    let exact_lists: u128 = others
        .iter()
        .filter(|&&i| polytopal[i])
        .map(|&i| factors[i].half_dual_vertices().map(|v| v.len() as u128).unwrap_or(1))
        .product();
    let netted: Vec<usize> = others.iter().copied().filter(|&i| !polytopal[i]).collect();

    if netted.is_empty() && exact_lists > opts.leaf_budget {
        return Err(Error::CombinatorialBlowup { count: exact_lists, cap: opts.leaf_budget });
    }

    let crude = crude_upper(z)?;
    let axes = match build_axes(factors, &others, &polytopal, exact_lists, opts)? {
        Some(a) => a,
        None => {
            let (lower, alphas) = ascent_lower(z, opts)?;
            return Ok(NormEstimate {
                lower,
                upper: crude.max(lower),
                witness: Some(functionals_witness(&alphas)),
                upper_witness: None,
                certificate: Certificate::Comparison,
                method: "comparison+ascent".into(),
            });
        }
    };

    let (best, tuple) = enumerate(z, &axes, &free)?;
    let alphas = complete_witness(z, &axes, &tuple, &free);
    let shrink: f64 = axes.iter().map(|a| a.shrink).product();
    if netted.is_empty() {
        let value = z.pair(&alphas)?.abs().max(best);
        let method = if free.len() == 2 { "exact-enumeration+svd" } else { "exact-enumeration" };
        let cert = if axes.is_empty() { Certificate::Analytic } else { Certificate::ExactEnumeration };
        return Ok(NormEstimate::exact(value, Some(functionals_witness(&alphas)), cert, method));
    }
    let net_upper = best / shrink;
    let (mut lower, mut witness) = ascent_lower(z, opts)?;
    let net_lower = z.pair(&alphas)?.abs();
    if net_lower > lower {
        lower = net_lower;
        witness = alphas;
    }
    let (upper, certificate) = if crude < net_upper { (crude, Certificate::Comparison) } else { (net_upper, Certificate::Net) };
    let delta = axes
        .iter()
        .filter(|a| !polytopal[a.axis])
        .map(|a| a.shrink)
        .fold(1.0, f64::min);
    Ok(NormEstimate {
        lower,
        upper: upper.max(lower),
        witness: Some(functionals_witness(&witness)),
        upper_witness: None,
        certificate,
        method: format!("net(min shrink={delta:.4})+ascent"),
    })
}

fn functionals_witness(alphas: &[DVector<f64>]) -> Witness {
    Witness::Functionals(alphas.iter().map(|a| a.as_slice().to_vec()).collect())
}

/// Axes left out of enumeration: a pair of non-polytopal euclidean
/// factors if there is one, otherwise the factor that is most expensive to
/// enumerate.
fn choose_free(factors: &[Space], polytopal: &[bool]) -> Vec<usize> {
    let eu: Vec<usize> = (0..factors.len())
        .filter(|&i| factors[i].is_euclidean() && factors[i].dim() > 1)
        .collect();
    if eu.len() >= 2 {
        return vec![eu[eu.len() - 2], eu[eu.len() - 1]];
    }
    let cost = |i: usize| -> u128 {
        if !polytopal[i] {
            u128::MAX
        } else {
            factors[i].half_dual_vertices().map(|v| v.len() as u128).unwrap_or(u128::MAX)
        }
    };
    // Last index among equal costs keeps the leading axes enumerated.
    let best = (0..factors.len()).rev().max_by_key(|&i| cost(i)).expect("order >= 2");
    vec![best]
}

fn build_axes(
    factors: &[Space],
    others: &[usize],
    polytopal: &[bool],
    exact_lists: u128,
    opts: &InjectiveOptions,
) -> Result<Option<Vec<Axis>>> {
    let netted: Vec<usize> = others.iter().copied().filter(|&i| !polytopal[i]).collect();
    let nets_for = |delta: f64| -> Result<Option<Vec<(usize, crate::spaces::Net)>>> {
        let mut out = Vec::new();
        let mut count = exact_lists;
        for &i in &netted {
            let net = match factors[i].dual_ball_net(delta) {
                Ok(n) => n,
                Err(Error::CombinatorialBlowup { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            count = count.saturating_mul(net.half.len() as u128);
            if count > opts.leaf_budget {
                return Ok(None);
            }
            out.push((i, net));
        }
        Ok(Some(out))
    };
    let nets = match opts.net_delta {
        Some(d) => match nets_for(d)? {
            Some(n) => n,
            None => return Ok(None),
        },
        None => {
            let mut chosen = None;
            for &d in DELTA_LADDER.iter() {
                match nets_for(d)? {
                    Some(n) => chosen = Some(n),
                    None => break,
                }
                if netted.is_empty() {
                    break;
                }
            }
            match chosen {
                Some(n) => n,
                None => return Ok(None),
            }
        }
    };
    let mut axes = Vec::new();
    for &i in others {
        if polytopal[i] {
            axes.push(Axis { axis: i, list: factors[i].half_dual_vertices()?.to_vec(), shrink: 1.0 });
        } else {
            let net = &nets.iter().find(|(j, _)| *j == i).expect("net built").1;
            let d = net.delta;
            let shrink = if factors[i].is_euclidean() { 1.0 - d * d / 2.0 } else { 1.0 - d };
            axes.push(Axis { axis: i, list: net.half.clone(), shrink });
        }
    }
    Ok(Some(axes))
}

/// `sup` over the coefficient-norm comparison `|<⊗α, z>| <= Π ‖α_i‖_2 ‖z‖_2`.
fn crude_upper(z: &DenseTensor) -> Result<f64> {
    let mut c = z.coefficient_norm();
    for f in z.factors() {
        c *= dual_ball_radius(f);
    }
    Ok(c)
}

/// Largest Euclidean norm of a point of the dual unit ball.
fn dual_ball_radius(s: &Space) -> f64 {
    match s.kind() {
        SpaceKind::Euclidean => 1.0,
        SpaceKind::L1 => (s.dim() as f64).sqrt(),
        SpaceKind::Linf => 1.0,
        SpaceKind::DirectSum2(..) => {
            let (a, b) = s.summands().expect("direct sum");
            dual_ball_radius(a).max(dual_ball_radius(b))
        }
        _ => match s.half_dual_vertices() {
            Ok(v) => v.iter().map(|f| f.norm()).fold(0.0, f64::max),
            // ‖f‖_2 <= √n max_i |f(e_i)| <= √n max_i ‖e_i‖.
            Err(_) => (0..s.dim())
                .map(|i| {
                    let mut e = DVector::zeros(s.dim());
                    e[i] = 1.0;
                    s.eval(&e)
                })
                .fold(0.0, f64::max)
                * (s.dim() as f64).sqrt(),
        },
    }
}

/// Moves the enumerated axes to the front (in the given order) and the free
/// axes to the back.
fn permuted(z: &DenseTensor, order: &[usize]) -> Vec<f64> {
    let shape = z.shape();
    let data = z.real().expect("real tensor");
    let k = shape.len();
    let mut strides = vec![1usize; k];
    for i in (0..k - 1).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    let new_shape: Vec<usize> = order.iter().map(|&a| shape[a]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut idx = vec![0usize; k];
    for _ in 0..data.len() {
        let src: usize = idx.iter().zip(order).map(|(&i, &a)| i * strides[a]).sum();
        out.push(data[src]);
        for p in (0..k).rev() {
            idx[p] += 1;
            if idx[p] < new_shape[p] {
                break;
            }
            idx[p] = 0;
        }
    }
    out
}

fn leaf_value(rest: &[f64], z: &DenseTensor, free: &[usize]) -> f64 {
    let factors = z.factors();
    if free.len() == 1 {
        factors[free[0]].eval(&DVector::from_column_slice(rest))
    } else {
        let (r, c) = (factors[free[0]].dim(), factors[free[1]].dim());
        spectral(&DMatrix::from_row_slice(r, c, rest))
    }
}

fn spectral(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 2 && m.ncols() == 2 {
        let f2 = m.norm_squared();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
        ((f2 + disc) / 2.0).sqrt()
    } else {
        linalg::spectral_norm(m)
    }
}

fn enumerate(z: &DenseTensor, axes: &[Axis], free: &[usize]) -> Result<(f64, Vec<usize>)> {
    let order: Vec<usize> = axes.iter().map(|a| a.axis).chain(free.iter().copied()).collect();
    let data = permuted(z, &order);
    if axes.is_empty() {
        return Ok((leaf_value(&data, z, free), vec![]));
    }
    let results: Vec<(f64, Vec<usize>)> = axes[0]
        .list
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let reduced = contract_front(&data, a.as_slice());
            let mut path = vec![i];
            let mut best = (f64::NEG_INFINITY, Vec::new());
            dfs(&reduced, &axes[1..], z, free, &mut path, &mut best);
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for r in results {
        if r.0 > best.0 {
            best = r;
        }
    }
    Ok(best)
}

fn dfs(
    data: &[f64],
    axes: &[Axis],
    z: &DenseTensor,
    free: &[usize],
    path: &mut Vec<usize>,
    best: &mut (f64, Vec<usize>),
) {
    if axes.is_empty() {
        let v = leaf_value(data, z, free);
        if v > best.0 {
            *best = (v, path.clone());
        }
        return;
    }
    for (i, a) in axes[0].list.iter().enumerate() {
        let reduced = contract_front(data, a.as_slice());
        path.push(i);
        dfs(&reduced, &axes[1..], z, free, path, best);
        path.pop();
    }
}

/// Functionals on every axis realizing the best enumerated tuple.
fn complete_witness(z: &DenseTensor, axes: &[Axis], tuple: &[usize], free: &[usize]) -> Vec<DVector<f64>> {
    let factors = z.factors();
    let mut alphas: Vec<DVector<f64>> = factors.iter().map(|f| DVector::zeros(f.dim())).collect();
    for (a, &t) in axes.iter().zip(tuple) {
        alphas[a.axis] = a.list[t].clone();
    }
    let order: Vec<usize> = axes.iter().map(|a| a.axis).chain(free.iter().copied()).collect();
    let mut rest = permuted(z, &order);
    for a in axes {
        rest = contract_front(&rest, alphas[a.axis].as_slice());
    }
    if free.len() == 1 {
        let v = DVector::from_vec(rest);
        alphas[free[0]] = factors[free[0]].norming_functional(&v);
    } else {
        let (r, c) = (factors[free[0]].dim(), factors[free[1]].dim());
        let (_, u, v) = linalg::top_singular_pair(&DMatrix::from_row_slice(r, c, &rest));
        alphas[free[0]] = u;
        alphas[free[1]] = v;
    }
    alphas
}

/// Multistart alternating ascent; returns `|<⊗α, z>|` and the functionals.
///
/// Each step replaces one `α_i` by a norming functional of the contraction
/// of `z` with the others, which maximizes over that factor exactly.
pub fn ascent_lower(z: &DenseTensor, opts: &InjectiveOptions) -> Result<(f64, Vec<DVector<f64>>)> {
    let data = z.real()?;
    let factors = z.factors();
    let k = z.order();
    let starts = initial_points(z, data, opts);
    let runs: Vec<(f64, Vec<DVector<f64>>)> = starts
        .into_par_iter()
        .map(|mut alphas| {
            let mut value = z.pair(&alphas).map(f64::abs).unwrap_or(0.0);
            for _ in 0..opts.max_sweeps {
                for i in 0..k {
                    let w = z.contract_except(i, &alphas);
                    alphas[i] = factors[i].norming_functional(&w);
                }
                let next = z.pair(&alphas).map(f64::abs).unwrap_or(0.0);
                let improved = next - value > opts.tolerance * value.max(1e-300);
                value = value.max(next);
                if !improved {
                    break;
                }
            }
            (z.pair(&alphas).map(f64::abs).unwrap_or(0.0), alphas)
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for r in runs {
        if r.0 > best.0 {
            best = r;
        }
    }
    Ok(best)
}

fn initial_points(z: &DenseTensor, data: &[f64], opts: &InjectiveOptions) -> Vec<Vec<DVector<f64>>> {
    let factors = z.factors();
    let shape = z.shape();
    let k = shape.len();
    let n_basis = (opts.multistarts / 2).max(1).min(data.len());
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&a, &b| data[b].abs().total_cmp(&data[a].abs()).then(a.cmp(&b)));
    let normalize = |f: &Space, mut v: DVector<f64>| {
        let n = f.dual().eval(&v);
        if n > 0.0 {
            v /= n;
        }
        v
    };
    let mut starts = Vec::new();
    for &flat in order.iter().take(n_basis) {
        let mut rem = flat;
        let mut idx = vec![0usize; k];
        for p in (0..k).rev() {
            idx[p] = rem % shape[p];
            rem /= shape[p];
        }
        starts.push(
            (0..k)
                .map(|p| {
                    let mut e = DVector::zeros(shape[p]);
                    e[idx[p]] = 1.0;
                    normalize(&factors[p], e)
                })
                .collect(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.multistarts.max(1) {
        starts.push(
            (0..k)
                .map(|p| {
                    let g = DVector::from_fn(shape[p], |_, _| StandardNormal.sample(&mut rng));
                    normalize(&factors[p], g)
                })
                .collect(),
        );
    }
    starts
}
