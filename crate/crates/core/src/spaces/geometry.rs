//! Extreme points, facets and nets of centrally symmetric bodies.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Upper limit on the number of candidate bases tried by [`symmetric_facets`].
pub(crate) const BASIS_SEARCH_CAP: u128 = 1 << 22;

/// Keeps one representative of each `±p` pair, first occurrence wins.
pub(crate) fn half_list(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for p in points {
        if p.iter().all(|x| x.abs() <= 1e-14) {
            continue;
        }
        let dup = out.iter().any(|q| {
            let scale = 1e-9 * (1.0 + q.amax());
            (p - q).amax() <= scale || (p + q).amax() <= scale
        });
        if !dup {
            out.push(p.clone());
        }
    }
    out
}

/// Doubles a half list into the full symmetric list `h_1, -h_1, h_2, ...`.
pub(crate) fn symmetrize_list(half: &[DVector<f64>]) -> Vec<DVector<f64>> {
    half.iter().flat_map(|h| [h.clone(), -h]).collect()
}

pub(crate) fn rank(points: &[DVector<f64>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let m = DMatrix::from_columns(points);
    let sv = m.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-10 * top.max(1e-300)).count()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Facet functionals of the symmetric hull `conv(±points)`, as a half list.
///
/// Every returned `f` satisfies `max_p |<f, p>| = 1` with equality on
/// `dim` linearly independent points. Fails with `CombinatorialBlowup` when
/// the basis search would exceed [`BASIS_SEARCH_CAP`].
pub(crate) fn symmetric_facets(half: &[DVector<f64>], dim: usize) -> Result<Vec<DVector<f64>>> {
    let m = half.len();
    if rank(half) < dim {
        return Err(Error::InvalidDescriptor(
            "points do not span the space".into(),
        ));
    }
    if dim == 1 {
        let top = half.iter().map(|p| p[0].abs()).fold(0.0, f64::max);
        return Ok(vec![DVector::from_element(1, 1.0 / top)]);
    }
    let combos = binomial(m, dim).saturating_mul(1u128 << (dim - 1).min(100));
    if combos > BASIS_SEARCH_CAP {
        return Err(Error::CombinatorialBlowup {
            count: combos,
            cap: BASIS_SEARCH_CAP,
        });
    }
    let mut found: Vec<DVector<f64>> = Vec::new();
    let ones = DVector::from_element(dim, 1.0);
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let base = DMatrix::from_fn(dim, dim, |r, c| half[idx[r]][c]);
        if base.clone().svd(false, false).singular_values.min() > 1e-10 {
            for signs in 0..(1usize << (dim - 1)) {
                let mut rows = base.clone();
                for r in 1..dim {
                    if signs >> (r - 1) & 1 == 1 {
                        rows.row_mut(r).neg_mut();
                    }
                }
                let Some(f) = rows.lu().solve(&ones) else {
                    continue;
                };
                let worst = half.iter().map(|p| p.dot(&f).abs()).fold(0.0, f64::max);
                if worst <= 1.0 + 1e-9 {
                    found.push(f);
                }
            }
        }
        if !next_combination(&mut idx, m) {
            break;
        }
    }
    let mut facets = half_list(&found);
    facets.sort_by(lex_cmp);
    Ok(facets)
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub(crate) fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Uniform grid of `[-1, 1]` with `m + 1` points.
fn grid(m: usize) -> Vec<f64> {
    (0..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect()
}

/// Number of unit vectors in [`sphere_net`] for the given parameters.
pub(crate) fn sphere_net_size(dim: usize, delta: f64) -> u128 {
    match dim {
        1 => 1,
        2 => circle_points(delta) as u128 / 2,
        _ => {
            let m = cube_steps(dim, delta) as u128;
            (m + 1).saturating_pow(dim as u32 - 1).saturating_mul(dim as u128)
        }
    }
}

/// Covering radius actually achieved by [`sphere_net`]; in the plane the
/// requested `delta` is the spacing, so the radius is about half of it.
pub(crate) fn sphere_net_delta(dim: usize, delta: f64) -> f64 {
    match dim {
        1 => 0.0,
        2 => 2.0 * (std::f64::consts::PI / (2.0 * circle_points(delta) as f64)).sin(),
        _ => delta,
    }
}

fn circle_points(delta: f64) -> usize {
    let n = (2.0 * std::f64::consts::PI / (2.0 * (delta / 2.0).asin())).ceil() as usize;
    // Even count so the half list covers the circle exactly.
    n + n % 2
}

fn cube_steps(dim: usize, delta: f64) -> usize {
    let h = 2.0 * delta / ((dim - 1) as f64).sqrt();
    (2.0 / h).ceil() as usize
}

/// Half list of unit vectors of `R^dim` such that every unit vector lies
/// within Euclidean distance `delta` of `±` some member.
///
/// In the plane the points are equally spaced angles; in higher dimension a
/// grid on the surface of the cube `[-1,1]^dim` is pushed radially to the
/// sphere (radial projection is 1-Lipschitz outside the unit ball).
pub(crate) fn sphere_net(dim: usize, delta: f64) -> Vec<DVector<f64>> {
    match dim {
        1 => vec![DVector::from_element(1, 1.0)],
        2 => {
            let n = circle_points(delta);
            (0..n / 2)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    DVector::from_vec(vec![t.cos(), t.sin()])
                })
                .collect()
        }
        _ => {
            let g = grid(cube_steps(dim, delta));
            let mut out = Vec::new();
            // Face x_axis = +1; the opposite face is covered by negation.
            for axis in 0..dim {
                let mut counter = vec![0usize; dim - 1];
                loop {
                    let mut p = DVector::zeros(dim);
                    let mut c = 0;
                    for j in 0..dim {
                        if j == axis {
                            p[j] = 1.0;
                        } else {
                            p[j] = g[counter[c]];
                            c += 1;
                        }
                    }
                    // Points on an edge shared with an earlier face (either
                    // sign) are emitted there already, up to negation.
                    if (0..axis).all(|j| p[j].abs() < 1.0 - 1e-12) {
                        let n = p.norm();
                        out.push(p / n);
                    }
                    if !advance(&mut counter, g.len()) {
                        break;
                    }
                }
            }
            out
        }
    }
}

fn advance(counter: &mut [usize], base: usize) -> bool {
    for c in counter.iter_mut() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn hexagon_facets() {
        let half = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])];
        let f = symmetric_facets(&half, 2).unwrap();
        assert_eq!(f.len(), 3);
        for g in &f {
            let top = half.iter().map(|p| p.dot(g).abs()).fold(0.0, f64::max);
            assert!((top - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_facets_are_coordinate_functionals() {
        let mut half = Vec::new();
        for s in 0..4 {
            half.push(v(&[1.0, if s & 1 == 1 { -1.0 } else { 1.0 }, if s & 2 == 2 { -1.0 } else { 1.0 }]));
        }
        let f = symmetric_facets(&half, 3).unwrap();
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn sphere_nets_cover() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (dim, delta) in [(2, 0.1), (3, 0.2), (4, 0.35)] {
            let net = sphere_net(dim, delta);
            for _ in 0..500 {
                let mut u = DVector::from_fn(dim, |_, _| rng.random::<f64>() - 0.5);
                u /= u.norm();
                let d = net
                    .iter()
                    .map(|g| (&u - g).norm().min((&u + g).norm()))
                    .fold(f64::INFINITY, f64::min);
                assert!(d <= delta + 1e-12, "dim {dim}: distance {d}");
            }
        }
    }
}
