use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Space, SpaceDescriptor, SpaceKind};
use crate::estimate::{Certificate, NormEstimate, Witness};
use crate::linalg;
use crate::{Error, Result};

/// Matrix entries of an [`OperatorMap`].
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// A linear map between two spaces, stored as a dense
/// `dim(codomain) x dim(domain)` matrix acting on coordinate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMap {
    domain: Space,
    codomain: Space,
    coefficients: Coefficients,
}

impl OperatorMap {
    pub fn new(domain: Space, codomain: Space, matrix: DMatrix<f64>) -> Result<Self> {
        Self::build(domain, codomain, Coefficients::Real(matrix))
    }

    pub fn new_complex(domain: Space, codomain: Space, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::build(domain, codomain, Coefficients::Complex(matrix))
    }

    fn build(domain: Space, codomain: Space, coefficients: Coefficients) -> Result<Self> {
        let (r, c) = match &coefficients {
            Coefficients::Real(m) => m.shape(),
            Coefficients::Complex(m) => m.shape(),
        };
        if r != codomain.dim() {
            return Err(Error::DimensionMismatch { expected: codomain.dim(), got: r });
        }
        if c != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: c });
        }
        if domain.scalar() != codomain.scalar() {
            return Err(Error::ScalarMismatch);
        }
        if matches!(coefficients, Coefficients::Complex(_)) && !domain.is_complex() {
            return Err(Error::ScalarMismatch);
        }
        Ok(OperatorMap { domain, codomain, coefficients })
    }

    /// Builds a real map from matrix rows.
    pub fn from_rows(domain: Space, codomain: Space, rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::arg("ragged matrix rows"));
        }
        Self::new(domain, codomain, DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn identity(space: Space) -> Self {
        let n = space.dim();
        let coefficients = if space.is_complex() {
            Coefficients::Complex(DMatrix::identity(n, n))
        } else {
            Coefficients::Real(DMatrix::identity(n, n))
        };
        OperatorMap { domain: space.clone(), codomain: space, coefficients }
    }

    pub fn zero(domain: Space, codomain: Space) -> Result<Self> {
        let m = DMatrix::zeros(codomain.dim(), domain.dim());
        if domain.is_complex() {
            Self::new_complex(domain, codomain, m.map(|x: f64| Complex64::new(x, 0.0)))
        } else {
            Self::new(domain, codomain, m)
        }
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.coefficients, Coefficients::Complex(_))
    }

    /// The real matrix; `ComplexUnsupported` for complex maps.
    pub fn real(&self) -> Result<&DMatrix<f64>> {
        match &self.coefficients {
            Coefficients::Real(m) => Ok(m),
            Coefficients::Complex(_) => Err(Error::ComplexUnsupported("this real-only routine")),
        }
    }

    /// The matrix over the complex field (real maps are promoted).
    pub fn complex_matrix(&self) -> DMatrix<Complex64> {
        match &self.coefficients {
            Coefficients::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            Coefficients::Complex(m) => m.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.coefficients {
            Coefficients::Real(m) => m.iter().all(|x| *x == 0.0),
            Coefficients::Complex(m) => m.iter().all(|x| x.norm_sqr() == 0.0),
        }
    }

    /// Same matrix between other spaces of the same dimensions.
    pub fn with_spaces(&self, domain: Space, codomain: Space) -> Result<Self> {
        Self::build(domain, codomain, self.coefficients.clone())
    }

    /// Frobenius norm of the matrix.
    pub fn frobenius(&self) -> f64 {
        match &self.coefficients {
            Coefficients::Real(m) => m.norm(),
            Coefficients::Complex(m) => m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    /// The adjoint `codomain* -> domain*` (transpose, no conjugation: the
    /// duality pairing is bilinear).
    pub fn adjoint(&self) -> Self {
        let coefficients = match &self.coefficients {
            Coefficients::Real(m) => Coefficients::Real(m.transpose()),
            Coefficients::Complex(m) => Coefficients::Complex(m.transpose()),
        };
        OperatorMap {
            domain: self.codomain.dual(),
            codomain: self.domain.dual(),
            coefficients,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &OperatorMap) -> Result<Self> {
        if inner.codomain.dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim(),
                got: inner.codomain.dim(),
            });
        }
        let coefficients = match (&self.coefficients, &inner.coefficients) {
            (Coefficients::Real(a), Coefficients::Real(b)) => Coefficients::Real(a * b),
            _ => Coefficients::Complex(self.complex_matrix() * inner.complex_matrix()),
        };
        Self::build(inner.domain.clone(), self.codomain.clone(), coefficients)
    }

    pub fn apply(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.domain.dim() {
            return Err(Error::DimensionMismatch { expected: self.domain.dim(), got: x.len() });
        }
        Ok(self.real()? * DVector::from_column_slice(x))
    }

    pub fn apply_complex(&self, x: &[Complex64]) -> Result<DVector<Complex64>> {
        if x.len() != self.domain.dim() {
            return Err(Error::DimensionMismatch { expected: self.domain.dim(), got: x.len() });
        }
        Ok(self.complex_matrix() * DVector::from_column_slice(x))
    }

    /// `self ⊗ other` from the injective product of the domains into the
    /// Hilbertian product of the (euclidean) codomains.
    ///
    /// The domain is described by facets: its dual-ball vertices are the
    /// elementary products `f ⊗ g` of dual-ball vertices of the factors.
    /// Index `(i, j)` of the product maps to `i * dim_2 + j`.
    pub fn tensor_eps_h(&self, other: &OperatorMap) -> Result<Self> {
        if !self.codomain.is_euclidean() || !other.codomain.is_euclidean() {
            return Err(Error::NonEuclidean("the Hilbertian codomain product".into()));
        }
        let fa = self.domain.half_dual_vertices()?;
        let fb = other.domain.dual_ball_vertices()?;
        let count = fa.len() as u128 * fb.len() as u128;
        let cap = self.domain.vertex_cap().max(other.domain.vertex_cap());
        if count > cap {
            return Err(Error::CombinatorialBlowup { count, cap });
        }
        let facets: Vec<Vec<f64>> = fa
            .iter()
            .flat_map(|f| {
                fb.iter().map(move |g| {
                    linalg::kron(
                        &DMatrix::from_column_slice(f.len(), 1, f.as_slice()),
                        &DMatrix::from_column_slice(g.len(), 1, g.as_slice()),
                    )
                    .as_slice()
                    .to_vec()
                })
            })
            .collect();
        let domain = Space::with_vertex_cap(SpaceDescriptor::polytope_facets(facets), cap)?;
        let codomain = Space::euclidean(self.codomain.dim() * other.codomain.dim());
        Self::new(domain, codomain, linalg::kron(self.real()?, other.real()?))
    }
}

/// JSON form of an operator: `{"domain", "codomain", "matrix", "imag"?}`,
/// matrices as lists of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct OperatorJson {
    domain: Space,
    codomain: Space,
    matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    imag: Option<Vec<Vec<f64>>>,
}

impl Serialize for OperatorMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
        };
        let (matrix, imag) = match &self.coefficients {
            Coefficients::Real(m) => (rows(m), None),
            Coefficients::Complex(m) => (rows(&m.map(|z| z.re)), Some(rows(&m.map(|z| z.im)))),
        };
        OperatorJson {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix,
            imag,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = OperatorJson::deserialize(d)?;
        let re = OperatorMap::from_rows(j.domain.clone(), j.codomain.clone(), &j.matrix)
            .map_err(D::Error::custom)?;
        match j.imag {
            None => Ok(re),
            Some(im) => {
                let im = OperatorMap::from_rows(j.domain.clone(), j.codomain.clone(), &im)
                    .map_err(D::Error::custom)?;
                let m = re
                    .real()
                    .map_err(D::Error::custom)?
                    .zip_map(im.real().map_err(D::Error::custom)?, Complex64::new);
                OperatorMap::new_complex(j.domain, j.codomain, m).map_err(D::Error::custom)
            }
        }
    }
}

/// Operator norm `‖φ : X -> Y‖` with a certified two-sided bound.
///
/// Exact when the domain ball or the codomain dual ball has a finite vertex
/// list, or when both spaces are euclidean. Otherwise a net of the domain
/// ball gives the upper bound and alternating ascent the lower bound.
pub fn operator_norm(phi: &OperatorMap) -> Result<NormEstimate> {
    operator_norm_with(phi, None)
}

/// [`operator_norm`] with an explicit net resolution for the fallback path.
pub fn operator_norm_with(phi: &OperatorMap, net_delta: Option<f64>) -> Result<NormEstimate> {
    if phi.is_zero() {
        return Ok(NormEstimate::exact(0.0, None, Certificate::Analytic, "zero"));
    }
    if phi.is_complex() || phi.domain.is_complex() {
        return complex_operator_norm(phi, net_delta);
    }
    let m = phi.real()?;
    let (x, y) = (&phi.domain, &phi.codomain);
    if x.is_euclidean() && y.is_euclidean() {
        let (s, _, v) = linalg::top_singular_pair(m);
        return Ok(NormEstimate::exact(s, Some(Witness::Point(v.as_slice().to_vec())), Certificate::Analytic, "svd"));
    }
    let primal = x.half_ball_vertices().ok();
    let dual = y.half_dual_vertices().ok();
    let use_primal = match (primal, dual) {
        (Some(p), Some(d)) => p.len() <= d.len(),
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => return net_operator_norm(phi, m, net_delta),
    };
    if use_primal {
        let (v, val) = argmax(primal.expect("checked"), |v| y.eval(&(m * v)));
        Ok(NormEstimate::exact(val, Some(Witness::Point(v.as_slice().to_vec())), Certificate::ExactEnumeration, "domain-vertices"))
    } else {
        let xd = x.dual();
        let mt = m.transpose();
        let (f, val) = argmax(dual.expect("checked"), |f| xd.eval(&(&mt * f)));
        Ok(NormEstimate::exact(val, Some(Witness::Functional(f.as_slice().to_vec())), Certificate::ExactEnumeration, "codomain-dual-vertices"))
    }
}

/// First maximizer of `score` over the list, with its value.
pub(crate) fn argmax(
    list: &[DVector<f64>],
    score: impl Fn(&DVector<f64>) -> f64,
) -> (&DVector<f64>, f64) {
    let mut best = (&list[0], f64::NEG_INFINITY);
    for v in list {
        let s = score(v);
        if s > best.1 {
            best = (v, s);
        }
    }
    best
}

fn pick_delta(space: &Space, requested: Option<f64>) -> Result<super::Net> {
    if let Some(d) = requested {
        return space.ball_net(d);
    }
    let mut d = 0.02;
    loop {
        match space.ball_net(d) {
            Ok(n) if n.half.len() <= 1 << 16 || d >= 0.5 => return Ok(n),
            Ok(_) | Err(Error::CombinatorialBlowup { .. }) if d < 0.5 => d = (d * 1.5).min(0.5),
            other => return other,
        }
    }
}

fn net_operator_norm(phi: &OperatorMap, m: &DMatrix<f64>, net_delta: Option<f64>) -> Result<NormEstimate> {
    let (x, y) = (&phi.domain, &phi.codomain);
    let net = pick_delta(x, net_delta)?;
    let (g, net_max) = argmax(&net.half, |v| y.eval(&(m * v)));
    // On a euclidean ball a linear functional loses at most a factor
    // 1 - delta^2 / 2 at a net point; in general 1 - delta.
    let factor = if x.is_euclidean() { 1.0 - net.delta * net.delta / 2.0 } else { 1.0 - net.delta };
    let upper = net_max / factor;
    let (lower, point) = ascent_lower(m, x, y, g.clone());
    let (lower, point) = if lower >= net_max { (lower, point) } else { (net_max, g.clone()) };
    Ok(NormEstimate {
        lower,
        upper: upper.max(lower),
        witness: Some(Witness::Point(point.as_slice().to_vec())),
        upper_witness: None,
        certificate: Certificate::Net,
        method: format!("net(delta={:.3e})", net.delta),
    })
}

/// Alternating maximization of `f(Φx)` over `x ∈ B_X`, `f ∈ B_{Y*}`.
fn ascent_lower(m: &DMatrix<f64>, x: &Space, y: &Space, start: DVector<f64>) -> (f64, DVector<f64>) {
    let xd = x.dual();
    let mt = m.transpose();
    let mut point = start;
    let mut best = y.eval(&(m * &point));
    for _ in 0..200 {
        let f = y.norming_functional(&(m * &point));
        let next = xd.norming_functional(&(&mt * &f));
        let val = y.eval(&(m * &next));
        if val <= best * (1.0 + 1e-12) {
            break;
        }
        best = val;
        point = next;
    }
    (best, point)
}

fn complex_operator_norm(phi: &OperatorMap, net_delta: Option<f64>) -> Result<NormEstimate> {
    let m = phi.complex_matrix();
    let (x, y) = (&phi.domain, &phi.codomain);
    let col = |j: usize| m.column(j).into_owned();
    if x.is_euclidean() && y.is_euclidean() {
        let svd = m.clone().svd(false, true);
        let s = svd.singular_values.max();
        return Ok(NormEstimate::exact(s, None, Certificate::Analytic, "svd"));
    }
    if matches!(x.kind(), SpaceKind::L1) {
        let mut best = (0, f64::NEG_INFINITY);
        for j in 0..x.dim() {
            let v = y.eval_complex(&col(j))?;
            if v > best.1 {
                best = (j, v);
            }
        }
        let mut e = vec![Complex64::new(0.0, 0.0); x.dim()];
        e[best.0] = Complex64::new(1.0, 0.0);
        return Ok(NormEstimate::exact(best.1, Some(Witness::ComplexPoint(e)), Certificate::ExactEnumeration, "domain-vertices"));
    }
    if matches!(y.kind(), SpaceKind::Linf) {
        let xd = x.dual();
        let mut best = f64::NEG_INFINITY;
        for i in 0..y.dim() {
            best = best.max(xd.eval_complex(&m.row(i).transpose())?);
        }
        return Ok(NormEstimate::exact(best, None, Certificate::ExactEnumeration, "codomain-dual-vertices"));
    }
    let delta = net_delta.unwrap_or(if x.dim() <= 2 { 1e-3 } else { 0.05 });
    let net = x.complex_ball_net(delta, true)?;
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in net.points.iter().enumerate() {
        let v = y.eval_complex(&(&m * p))?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let upper = best.1 / (1.0 - net.delta);
    let mut point = net.points[best.0].clone();
    let mut lower = best.1;
    if matches!(x.kind(), SpaceKind::Linf) && x.dim() == 2 {
        // One free phase: refine the best grid angle by golden-section search.
        let theta0 = point[1].arg();
        let h = 4.0 * (net.delta / 2.0).asin();
        let eval = |t: f64| {
            let p = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, t)]);
            y.eval_complex(&(&m * p)).unwrap_or(0.0)
        };
        let t = golden_max(eval, theta0 - h, theta0 + h, 80);
        let v = eval(t);
        if v > lower {
            lower = v;
            point = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, t)]);
        }
    }
    Ok(NormEstimate {
        lower,
        upper: upper.max(lower),
        witness: Some(Witness::ComplexPoint(point.as_slice().to_vec())),
        upper_witness: None,
        certificate: Certificate::Net,
        method: format!("complex-net(delta={:.3e})", net.delta),
    })
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd { c } else { d }
}
