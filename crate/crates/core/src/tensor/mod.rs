//! Dense tensors over tagged factor spaces.
//!
//! Coefficients are stored flat in row-major order: axis `i` belongs to
//! factor `i` and the last axis varies fastest.

mod injective;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spaces::{OperatorMap, Scalar, Space};
use crate::{Error, Result};

pub use injective::{injective_norm, injective_norm_with, InjectiveOptions};

/// Largest number of coefficients a tensor may hold.
pub const MEMORY_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// An order-k tensor with one factor space per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    factors: Vec<Space>,
    data: TensorData,
}

pub(crate) fn check_entries(dims: impl IntoIterator<Item = usize>) -> Result<usize> {
    let mut total: u128 = 1;
    for d in dims {
        total = total.saturating_mul(d as u128);
    }
    if total > MEMORY_LIMIT {
        return Err(Error::MemoryGuard {
            entries: total,
            limit: MEMORY_LIMIT,
        });
    }
    Ok(total as usize)
}

impl DenseTensor {
    pub fn new(factors: Vec<Space>, data: Vec<f64>) -> Result<Self> {
        Self::build(factors, TensorData::Real(data))
    }

    pub fn new_complex(factors: Vec<Space>, data: Vec<Complex64>) -> Result<Self> {
        Self::build(factors, TensorData::Complex(data))
    }

    fn build(factors: Vec<Space>, data: TensorData) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::arg("a tensor needs at least one factor"));
        }
        let scalar = factors[0].scalar();
        if factors.iter().any(|f| f.scalar() != scalar) {
            return Err(Error::ScalarMismatch);
        }
        if matches!(data, TensorData::Complex(_)) && scalar != Scalar::Complex {
            return Err(Error::ScalarMismatch);
        }
        let len = check_entries(factors.iter().map(|f| f.dim()))?;
        let got = match &data {
            TensorData::Real(d) => d.len(),
            TensorData::Complex(d) => d.len(),
        };
        if got != len {
            return Err(Error::DimensionMismatch { expected: len, got });
        }
        Ok(DenseTensor { factors, data })
    }

    pub fn zeros(factors: Vec<Space>) -> Result<Self> {
        let len = check_entries(factors.iter().map(|f| f.dim()))?;
        Self::new(factors, vec![0.0; len])
    }

    /// The elementary tensor `x_1 ⊗ ... ⊗ x_k`.
    pub fn elementary(factors: Vec<Space>, vectors: &[DVector<f64>]) -> Result<Self> {
        if vectors.len() != factors.len() {
            return Err(Error::DimensionMismatch { expected: factors.len(), got: vectors.len() });
        }
        for (f, v) in factors.iter().zip(vectors) {
            if f.dim() != v.len() {
                return Err(Error::DimensionMismatch { expected: f.dim(), got: v.len() });
            }
        }
        check_entries(factors.iter().map(|f| f.dim()))?;
        let mut data = vec![1.0];
        for v in vectors {
            data = outer(&data, v.as_slice());
        }
        Self::new(factors, data)
    }

    /// Order-2 tensor with coefficients `m[(i, j)]`.
    pub fn from_matrix(a: Space, b: Space, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != a.dim() || m.ncols() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim() * b.dim(), got: m.len() });
        }
        let data = (0..m.nrows()).flat_map(|i| m.row(i).iter().copied().collect::<Vec<_>>()).collect();
        Self::new(vec![a, b], data)
    }

    /// `Σ_i e_i ⊗ ... ⊗ e_i` over a single space (needs equal dimensions).
    pub fn diagonal(space: &Space, k: usize) -> Result<Self> {
        let n = space.dim();
        let len = check_entries(std::iter::repeat_n(n, k))?;
        let mut data = vec![0.0; len];
        let stride: usize = (0..k).map(|j| n.pow(j as u32)).sum();
        for i in 0..n {
            data[i * stride] = 1.0;
        }
        Self::new(vec![space.clone(); k], data)
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Space] {
        &self.factors
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim()).collect()
    }

    pub fn len(&self) -> usize {
        match &self.data {
            TensorData::Real(d) => d.len(),
            TensorData::Complex(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.data, TensorData::Complex(_))
    }

    /// Real coefficients; `ComplexUnsupported` for complex tensors.
    pub fn real(&self) -> Result<&[f64]> {
        match &self.data {
            TensorData::Real(d) => Ok(d),
            TensorData::Complex(_) => Err(Error::ComplexUnsupported("this real-only routine")),
        }
    }

    pub fn complex_data(&self) -> Vec<Complex64> {
        match &self.data {
            TensorData::Real(d) => d.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            TensorData::Complex(d) => d.clone(),
        }
    }

    /// Same coefficients over other factor spaces of the same dimensions.
    pub fn with_factors(&self, factors: Vec<Space>) -> Result<Self> {
        if factors.len() != self.order() {
            return Err(Error::DimensionMismatch { expected: self.order(), got: factors.len() });
        }
        for (a, b) in factors.iter().zip(&self.factors) {
            if a.dim() != b.dim() {
                return Err(Error::DimensionMismatch { expected: b.dim(), got: a.dim() });
            }
        }
        Self::build(factors, self.data.clone())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let data = match &self.data {
            TensorData::Real(d) => TensorData::Real(d.iter().map(|x| x * s).collect()),
            TensorData::Complex(d) => TensorData::Complex(d.iter().map(|x| x * s).collect()),
        };
        DenseTensor { factors: self.factors.clone(), data }
    }

    /// `Σ z_I w_I` over real coefficients.
    pub fn dot(&self, other: &DenseTensor) -> Result<f64> {
        let (a, b) = (self.real()?, other.real()?);
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
    }

    /// Coefficient-wise `self - other` (factors of `self`).
    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        let data = match (&self.data, &other.data) {
            (TensorData::Real(a), TensorData::Real(b)) => {
                TensorData::Real(a.iter().zip(b).map(|(x, y)| x - y).collect())
            }
            _ => TensorData::Complex(
                self.complex_data().iter().zip(other.complex_data()).map(|(x, y)| x - y).collect(),
            ),
        };
        Ok(DenseTensor { factors: self.factors.clone(), data })
    }

    /// Euclidean norm of the coefficient array, whatever the factors.
    pub fn coefficient_norm(&self) -> f64 {
        match &self.data {
            TensorData::Real(d) => d.iter().map(|x| x * x).sum::<f64>().sqrt(),
            TensorData::Complex(d) => d.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    /// Pairing `<α_1 ⊗ ... ⊗ α_k, z>` of a real tensor.
    pub fn pair(&self, functionals: &[DVector<f64>]) -> Result<f64> {
        if functionals.len() != self.order() {
            return Err(Error::DimensionMismatch { expected: self.order(), got: functionals.len() });
        }
        let mut data = self.real()?.to_vec();
        for (f, a) in self.factors.iter().zip(functionals) {
            if a.len() != f.dim() {
                return Err(Error::DimensionMismatch { expected: f.dim(), got: a.len() });
            }
            data = contract_front(&data, a.as_slice());
        }
        Ok(data[0])
    }

    /// The vector along `axis` left after pairing every other axis with the
    /// given functionals (the entry at `axis` is ignored).
    pub(crate) fn contract_except(&self, axis: usize, functionals: &[DVector<f64>]) -> DVector<f64> {
        let mut data = self.real().expect("real tensor").to_vec();
        for a in &functionals[..axis] {
            data = contract_front(&data, a.as_slice());
        }
        for a in functionals[axis + 1..].iter().rev() {
            data = contract_back(&data, a.as_slice());
        }
        DVector::from_vec(data)
    }

    /// Matrix unfolding with rows indexed by the first `split` axes.
    pub fn unfold(&self, split: usize) -> Result<DMatrix<f64>> {
        let d = self.real()?;
        let rows: usize = self.shape()[..split].iter().product();
        let cols = d.len() / rows;
        Ok(DMatrix::from_row_slice(rows, cols, d))
    }
}

pub(crate) fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

/// Pairs the first axis of a flat row-major array with `a`.
pub(crate) fn contract_front(data: &[f64], a: &[f64]) -> Vec<f64> {
    let rest = data.len() / a.len();
    let mut out = vec![0.0; rest];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (o, x) in out.iter_mut().zip(&data[i * rest..(i + 1) * rest]) {
            *o += ai * x;
        }
    }
    out
}

/// Pairs the last axis of a flat row-major array with `a`.
pub(crate) fn contract_back(data: &[f64], a: &[f64]) -> Vec<f64> {
    let n = a.len();
    data.chunks_exact(n)
        .map(|c| c.iter().zip(a).map(|(x, y)| x * y).sum())
        .collect()
}

/// `z_1 ⊗ z_2`: factors concatenated, coefficients the outer product.
pub fn tensor_product(z1: &DenseTensor, z2: &DenseTensor) -> Result<DenseTensor> {
    let factors: Vec<Space> = z1.factors.iter().chain(&z2.factors).cloned().collect();
    check_entries(factors.iter().map(|f| f.dim()))?;
    match (&z1.data, &z2.data) {
        (TensorData::Real(a), TensorData::Real(b)) => DenseTensor::new(factors, outer(a, b)),
        _ => {
            let (a, b) = (z1.complex_data(), z2.complex_data());
            let mut out = Vec::with_capacity(a.len() * b.len());
            for x in &a {
                out.extend(b.iter().map(|y| x * y));
            }
            DenseTensor::new_complex(factors, out)
        }
    }
}

/// Applies `m` along `axis` of a flat row-major array of the given shape.
fn mode_apply<T: ComplexField + Copy>(data: &[T], shape: &[usize], axis: usize, m: &DMatrix<T>) -> Vec<T> {
    let n_in = shape[axis];
    let n_out = m.nrows();
    let outer_len: usize = shape[..axis].iter().product();
    let inner_len: usize = shape[axis + 1..].iter().product();
    let mut out = vec![T::zero(); outer_len * n_out * inner_len];
    for o in 0..outer_len {
        let src = &data[o * n_in * inner_len..(o + 1) * n_in * inner_len];
        let dst = &mut out[o * n_out * inner_len..(o + 1) * n_out * inner_len];
        for r in 0..n_out {
            let row = &mut dst[r * inner_len..(r + 1) * inner_len];
            for c in 0..n_in {
                let w = m[(r, c)];
                if w == T::zero() {
                    continue;
                }
                for (d, s) in row.iter_mut().zip(&src[c * inner_len..(c + 1) * inner_len]) {
                    *d += w * *s;
                }
            }
        }
    }
    out
}

/// `(φ_1 ⊗ ... ⊗ φ_k) z`, one map per axis.
pub fn apply_operators(ops: &[&OperatorMap], z: &DenseTensor) -> Result<DenseTensor> {
    if ops.len() != z.order() {
        return Err(Error::DimensionMismatch { expected: z.order(), got: ops.len() });
    }
    for (op, f) in ops.iter().zip(&z.factors) {
        if op.domain().dim() != f.dim() {
            return Err(Error::DimensionMismatch { expected: op.domain().dim(), got: f.dim() });
        }
    }
    let factors: Vec<Space> = ops.iter().map(|op| op.codomain().clone()).collect();
    check_entries(factors.iter().map(|f| f.dim()))?;
    let complex = z.is_complex() || ops.iter().any(|op| op.is_complex());
    let mut shape = z.shape();
    if complex {
        let mut data = z.complex_data();
        for (axis, op) in ops.iter().enumerate() {
            data = mode_apply(&data, &shape, axis, &op.complex_matrix());
            shape[axis] = op.codomain().dim();
        }
        DenseTensor::new_complex(factors, data)
    } else {
        let mut data = z.real()?.to_vec();
        for (axis, op) in ops.iter().enumerate() {
            data = mode_apply(&data, &shape, axis, op.real()?);
            shape[axis] = op.codomain().dim();
        }
        DenseTensor::new(factors, data)
    }
}

/// `φ^{⊗k} z`; every factor of `z` must be the domain of `φ`.
pub fn apply_operator_power(phi: &OperatorMap, k: usize, z: &DenseTensor) -> Result<DenseTensor> {
    if z.order() != k {
        return Err(Error::DimensionMismatch { expected: k, got: z.order() });
    }
    for f in &z.factors {
        if f.dim() != phi.domain().dim() {
            return Err(Error::DimensionMismatch { expected: phi.domain().dim(), got: f.dim() });
        }
        if f.descriptor() != phi.domain().descriptor() {
            return Err(Error::arg(format!(
                "tensor factor {} is not the domain {} of the map",
                f.label(),
                phi.domain().label()
            )));
        }
    }
    apply_operators(&vec![phi; k], z)
}

/// Hilbertian norm; all factors must be euclidean.
pub fn hilbert_norm(z: &DenseTensor) -> Result<f64> {
    if let Some(f) = z.factors.iter().find(|f| !f.is_euclidean()) {
        return Err(Error::NonEuclidean(format!("the Hilbertian norm (factor {})", f.label())));
    }
    Ok(z.coefficient_norm())
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    factors: Vec<Space>,
    shape: Vec<usize>,
    data: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    imag: Option<Vec<f64>>,
}

impl Serialize for DenseTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (data, imag) = match &self.data {
            TensorData::Real(d) => (d.clone(), None),
            TensorData::Complex(d) => (d.iter().map(|z| z.re).collect(), Some(d.iter().map(|z| z.im).collect())),
        };
        TensorJson { factors: self.factors.clone(), shape: self.shape(), data, imag }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = TensorJson::deserialize(d)?;
        let shape: Vec<usize> = j.factors.iter().map(|f| f.dim()).collect();
        if shape != j.shape {
            return Err(D::Error::custom(format!("shape {:?} does not match factors {:?}", j.shape, shape)));
        }
        match j.imag {
            None => DenseTensor::new(j.factors, j.data),
            Some(im) => {
                if im.len() != j.data.len() {
                    return Err(D::Error::custom("real and imaginary parts differ in length"));
                }
                let data = j.data.iter().zip(&im).map(|(&r, &i)| Complex64::new(r, i)).collect();
                DenseTensor::new_complex(j.factors, data)
            }
        }
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests;
