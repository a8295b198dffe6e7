use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::spaces::{Coefficients, OperatorMap, Space, SpaceDescriptor};
use crate::{Error, Result};

/// Haar-random orthogonal matrix: QR of a Gaussian matrix with the signs of
/// `R`'s diagonal moved into `Q`.
fn haar_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn haar_unitary(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Monte Carlo average of `u (βφα) u⁻¹` over Haar-random orthogonal (or,
/// for complex maps, unitary) `u`, as an operator on `ℓ₂^N`.
///
/// `α: ℓ₂^N -> X`, `φ: X -> Y`, `β: Y -> ℓ₂^N`. Sample `i` draws from
/// stream `i` of a ChaCha generator seeded with `seed`, and the sum is
/// reduced in sample order, so the result does not depend on thread count.
pub fn haar_twirl(phi: &OperatorMap, alpha: &OperatorMap, beta: &OperatorMap, samples: usize, seed: u64) -> Result<OperatorMap> {
    let t = beta.compose(&phi.compose(alpha)?)?;
    let n = t.domain().dim();
    if t.codomain().dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: t.codomain().dim() });
    }
    if samples == 0 {
        return Err(Error::arg("haar_twirl needs at least one sample"));
    }
    let draw = |i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        rng
    };
    let complex = t.is_complex();
    let h = if complex {
        Space::new(SpaceDescriptor::euclidean(n).complex())?
    } else {
        Space::euclidean(n)
    };
    match t.coefficients() {
        Coefficients::Real(m) => {
            let terms: Vec<DMatrix<f64>> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let u = haar_orthogonal(n, &mut draw(i));
                    &u * m * u.transpose()
                })
                .collect();
            let sum = terms.into_iter().fold(DMatrix::zeros(n, n), |acc, x| acc + x);
            OperatorMap::new(h.clone(), h, sum / samples as f64)
        }
        Coefficients::Complex(m) => {
            let terms: Vec<DMatrix<Complex64>> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let u = haar_unitary(n, &mut draw(i));
                    &u * m * u.adjoint()
                })
                .collect();
            let sum = terms.into_iter().fold(DMatrix::zeros(n, n), |acc, x| acc + x);
            OperatorMap::new_complex(h.clone(), h, sum / Complex64::new(samples as f64, 0.0))
        }
    }
}
