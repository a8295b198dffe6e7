//! Finite-dimensional normed spaces and linear maps between them.
//!
//! A [`Space`] is built from a [`SpaceDescriptor`] and answers norm, dual
//! norm, extreme-point and net queries. Extreme-point lists of the ball and
//! of the dual ball are computed on first use and cached; they are stored as
//! half lists (one representative per `±` pair).

mod descriptor;
mod geometry;
mod operator;

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convex::{Relation, SdpProblem, Sense};
use crate::{Error, Result};

pub use descriptor::{Scalar, SpaceDescriptor, SpaceKind};
pub(crate) use geometry::{half_list, symmetrize_list};
pub use operator::{operator_norm, operator_norm_with, Coefficients, OperatorMap};

/// Default cap on the size of an extreme-point list.
pub const DEFAULT_VERTEX_CAP: u128 = 1 << 16;

/// Cap on the number of points in a net.
pub const NET_CAP: u128 = 1 << 22;

/// Cloneable copy of the errors an extreme-point enumeration can raise.
#[derive(Debug, Clone)]
enum VertexError {
    NotPolytopal(String),
    Blowup { count: u128, cap: u128 },
    Invalid(String),
}

impl From<VertexError> for Error {
    fn from(e: VertexError) -> Self {
        match e {
            VertexError::NotPolytopal(s) => Error::NotPolytopal(s),
            VertexError::Blowup { count, cap } => Error::CombinatorialBlowup { count, cap },
            VertexError::Invalid(s) => Error::InvalidDescriptor(s),
        }
    }
}

impl From<Error> for VertexError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPolytopal(s) => VertexError::NotPolytopal(s),
            Error::CombinatorialBlowup { count, cap } => VertexError::Blowup { count, cap },
            other => VertexError::Invalid(other.to_string()),
        }
    }
}

type VertexCache = OnceLock<std::result::Result<Vec<DVector<f64>>, VertexError>>;

struct Inner {
    desc: SpaceDescriptor,
    vertex_cap: u128,
    summands: Option<(Space, Space)>,
    dual: OnceLock<Space>,
    dual_vertices: VertexCache,
    ball_vertices: VertexCache,
}

/// An immutable finite-dimensional normed space. Cloning is cheap.
#[derive(Clone)]
pub struct Space {
    inner: Arc<Inner>,
}

/// Points approximating the extreme points of a ball.
///
/// `half` holds one representative per `±` pair. Every extreme point of the
/// ball lies within `delta` (in the norm of the ball) of `±` some member;
/// `delta == 0` means the list is the exact extreme-point set.
#[derive(Debug, Clone)]
pub struct Net {
    pub half: Vec<DVector<f64>>,
    pub delta: f64,
}

impl Net {
    pub fn is_exact(&self) -> bool {
        self.delta == 0.0
    }

    /// The full symmetric point list.
    pub fn points(&self) -> Vec<DVector<f64>> {
        symmetrize_list(&self.half)
    }
}

/// Complex analogue of [`Net`]. Points are listed up to a unimodular
/// factor unless the net was requested with phases.
#[derive(Debug, Clone)]
pub struct ComplexNet {
    pub points: Vec<DVector<Complex64>>,
    pub delta: f64,
}

/// Builds a [`Space`] after validating the descriptor.
pub fn build_space(desc: SpaceDescriptor) -> Result<Space> {
    Space::new(desc)
}

pub fn vector_norm(s: &Space, v: &[f64]) -> Result<f64> {
    s.norm(v)
}

pub fn dual_space(s: &Space) -> Space {
    s.dual()
}

pub fn dual_ball_vertices(s: &Space) -> Result<Vec<DVector<f64>>> {
    s.dual_ball_vertices()
}

pub fn dual_ball_net(s: &Space, delta: f64) -> Result<Net> {
    s.dual_ball_net(delta)
}

impl Space {
    pub fn new(desc: SpaceDescriptor) -> Result<Space> {
        Space::with_vertex_cap(desc, DEFAULT_VERTEX_CAP)
    }

    pub fn with_vertex_cap(desc: SpaceDescriptor, vertex_cap: u128) -> Result<Space> {
        desc.validate_shape()?;
        match &desc.kind {
            SpaceKind::PolytopeVertices(p) | SpaceKind::PolytopeFacets(p) => {
                let pts: Vec<DVector<f64>> =
                    p.iter().map(|x| DVector::from_column_slice(x)).collect();
                if geometry::rank(&pts) < desc.dim {
                    return Err(Error::InvalidDescriptor(
                        "point list does not span the space (degenerate ball)".into(),
                    ));
                }
            }
            _ => {}
        }
        let summands = match &desc.kind {
            SpaceKind::DirectSum2(l, r) => Some((
                Space::with_vertex_cap((**l).clone(), vertex_cap)?,
                Space::with_vertex_cap((**r).clone(), vertex_cap)?,
            )),
            _ => None,
        };
        Ok(Space {
            inner: Arc::new(Inner {
                desc,
                vertex_cap,
                summands,
                dual: OnceLock::new(),
                dual_vertices: OnceLock::new(),
                ball_vertices: OnceLock::new(),
            }),
        })
    }

    /// `euclidean(n)`; panics when `n == 0`.
    pub fn euclidean(n: usize) -> Space {
        Space::new(SpaceDescriptor::euclidean(n)).expect("positive dimension")
    }

    /// `l1(n)`; panics when `n == 0`.
    pub fn l1(n: usize) -> Space {
        Space::new(SpaceDescriptor::l1(n)).expect("positive dimension")
    }

    /// `linf(n)`; panics when `n == 0`.
    pub fn linf(n: usize) -> Space {
        Space::new(SpaceDescriptor::linf(n)).expect("positive dimension")
    }

    pub fn descriptor(&self) -> &SpaceDescriptor {
        &self.inner.desc
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.inner.desc.kind
    }

    pub fn dim(&self) -> usize {
        self.inner.desc.dim
    }

    pub fn scalar(&self) -> Scalar {
        self.inner.desc.scalar
    }

    pub fn is_complex(&self) -> bool {
        self.scalar() == Scalar::Complex
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind(), SpaceKind::Euclidean)
    }

    pub fn label(&self) -> String {
        self.inner.desc.label()
    }

    pub fn vertex_cap(&self) -> u128 {
        self.inner.vertex_cap
    }

    pub fn summands(&self) -> Option<(&Space, &Space)> {
        self.inner.summands.as_ref().map(|(a, b)| (a, b))
    }

    /// Same descriptor, with the given cap on extreme-point lists.
    pub fn recapped(&self, cap: u128) -> Space {
        Space::with_vertex_cap(self.inner.desc.clone(), cap).expect("descriptor already validated")
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }

    /// Norm of a real point.
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v.len())?;
        Ok(self.eval(&DVector::from_column_slice(v)))
    }

    /// Norm of a point whose length is known to match.
    pub(crate) fn eval(&self, v: &DVector<f64>) -> f64 {
        debug_assert_eq!(v.len(), self.dim());
        match self.kind() {
            SpaceKind::Euclidean => v.norm(),
            SpaceKind::L1 => v.lp_norm(1),
            SpaceKind::Linf => v.amax(),
            SpaceKind::PolytopeFacets(f) => f
                .iter()
                .map(|g| g.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>().abs())
                .fold(0.0, f64::max),
            SpaceKind::PolytopeVertices(_) => match self.half_dual_vertices() {
                Ok(facets) => facets.iter().map(|f| f.dot(v).abs()).fold(0.0, f64::max),
                Err(_) => self.gauge_lp(v).0,
            },
            SpaceKind::DirectSum2(..) => {
                let (a, b) = self.summands().expect("direct sum has summands");
                let na = a.eval(&v.rows(0, a.dim()).into_owned());
                let nb = b.eval(&v.rows(a.dim(), b.dim()).into_owned());
                na.hypot(nb)
            }
        }
    }

    /// Norm of a complex point. Polytopal balls are real only.
    pub fn norm_complex(&self, v: &[Complex64]) -> Result<f64> {
        self.check_dim(v.len())?;
        self.eval_complex(&DVector::from_column_slice(v))
    }

    pub(crate) fn eval_complex(&self, v: &DVector<Complex64>) -> Result<f64> {
        Ok(match self.kind() {
            SpaceKind::Euclidean => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            SpaceKind::L1 => v.iter().map(|z| z.norm()).sum(),
            SpaceKind::Linf => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            SpaceKind::PolytopeFacets(_) | SpaceKind::PolytopeVertices(_) => {
                return Err(Error::ComplexUnsupported("polytopal norms"))
            }
            SpaceKind::DirectSum2(..) => {
                let (a, b) = self.summands().expect("direct sum has summands");
                let na = a.eval_complex(&v.rows(0, a.dim()).into_owned())?;
                let nb = b.eval_complex(&v.rows(a.dim(), b.dim()).into_owned())?;
                na.hypot(nb)
            }
        })
    }

    /// Norm of a functional in the dual space.
    pub fn dual_norm(&self, f: &[f64]) -> Result<f64> {
        self.dual().norm(f)
    }

    /// Gauge of `conv(±vertices)` by linear programming; also returns an
    /// optimal dual functional (a norming functional of `v`).
    fn gauge_lp(&self, v: &DVector<f64>) -> (f64, DVector<f64>) {
        let SpaceKind::PolytopeVertices(pts) = self.kind() else {
            unreachable!("gauge LP only for vertex-described balls")
        };
        let n = self.dim();
        let mut lp = SdpProblem::new(Sense::Minimize);
        let vars: Vec<_> = pts.iter().map(|_| lp.add_nonneg()).collect();
        lp.set_objective(vars.iter().map(|&x| (x, 1.0)).collect());
        for i in 0..n {
            let terms = vars.iter().zip(pts).map(|(&x, p)| (x, p[i])).collect();
            lp.add_constraint(terms, Relation::Eq, v[i]);
        }
        // The list is symmetric and spans, so the LP is feasible and bounded.
        let sol = lp.solve_lp().expect("gauge LP of a spanning symmetric list");
        (sol.objective, DVector::from_vec(sol.duals))
    }

    /// A functional `f` with `‖f‖_* <= 1` and `f(v) = ‖v‖`. Zero for `v = 0`.
    pub fn norming_functional(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        if v.iter().all(|x| *x == 0.0) {
            return DVector::zeros(n);
        }
        match self.kind() {
            SpaceKind::Euclidean => v / v.norm(),
            SpaceKind::L1 => v.map(|x| if x < 0.0 { -1.0 } else { 1.0 }),
            SpaceKind::Linf => {
                let i = v.iamax();
                let mut f = DVector::zeros(n);
                f[i] = v[i].signum();
                f
            }
            SpaceKind::PolytopeFacets(fs) => {
                let (best, val) = fs
                    .iter()
                    .map(|g| g.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>())
                    .enumerate()
                    .fold((0, 0.0f64), |acc, (i, s)| if s.abs() > acc.1.abs() { (i, s) } else { acc });
                DVector::from_column_slice(&fs[best]) * val.signum()
            }
            SpaceKind::PolytopeVertices(_) => match self.half_dual_vertices() {
                Ok(facets) => {
                    let (best, val) = facets
                        .iter()
                        .map(|f| f.dot(v))
                        .enumerate()
                        .fold((0, 0.0f64), |acc, (i, s)| if s.abs() > acc.1.abs() { (i, s) } else { acc });
                    &facets[best] * val.signum()
                }
                Err(_) => self.gauge_lp(v).1,
            },
            SpaceKind::DirectSum2(..) => {
                let (a, b) = self.summands().expect("direct sum has summands");
                let va = v.rows(0, a.dim()).into_owned();
                let vb = v.rows(a.dim(), b.dim()).into_owned();
                let (na, nb) = (a.eval(&va), b.eval(&vb));
                let total = na.hypot(nb);
                let mut f = DVector::zeros(n);
                f.rows_mut(0, a.dim())
                    .copy_from(&(a.norming_functional(&va) * (na / total)));
                f.rows_mut(a.dim(), b.dim())
                    .copy_from(&(b.norming_functional(&vb) * (nb / total)));
                f
            }
        }
    }

    /// The dual space, with the same vertex cap.
    pub fn dual(&self) -> Space {
        self.inner
            .dual
            .get_or_init(|| {
                Space::with_vertex_cap(dual_descriptor(&self.inner.desc), self.inner.vertex_cap)
                    .expect("dual of a valid descriptor is valid")
            })
            .clone()
    }

    /// Predicted size of the full dual-ball vertex list without enumerating.
    /// `None` when the ball is not polytopal or the count is only known after
    /// facet enumeration.
    pub fn dual_vertex_count(&self) -> Option<u128> {
        if self.is_complex() {
            return None;
        }
        let n = self.dim();
        match self.kind() {
            SpaceKind::Euclidean if n == 1 => Some(2),
            SpaceKind::L1 => Some(1u128.checked_shl(n as u32).unwrap_or(u128::MAX)),
            SpaceKind::Linf => Some(2 * n as u128),
            SpaceKind::PolytopeFacets(f) => Some(f.len() as u128),
            _ => None,
        }
    }

    /// Predicted size of the full ball vertex list without enumerating.
    pub fn ball_vertex_count(&self) -> Option<u128> {
        self.dual().dual_vertex_count()
    }

    /// Extreme points of the dual ball, as a half list.
    pub fn half_dual_vertices(&self) -> Result<&[DVector<f64>]> {
        self.inner
            .dual_vertices
            .get_or_init(|| self.compute_half_dual_vertices().map_err(VertexError::from))
            .as_deref()
            .map_err(|e| e.clone().into())
    }

    /// Extreme points of the unit ball, as a half list.
    pub fn half_ball_vertices(&self) -> Result<&[DVector<f64>]> {
        self.inner
            .ball_vertices
            .get_or_init(|| {
                self.dual()
                    .compute_half_dual_vertices()
                    .map_err(VertexError::from)
            })
            .as_deref()
            .map_err(|e| e.clone().into())
    }

    /// All extreme points of the dual ball.
    pub fn dual_ball_vertices(&self) -> Result<Vec<DVector<f64>>> {
        Ok(symmetrize_list(self.half_dual_vertices()?))
    }

    /// All extreme points of the unit ball.
    pub fn ball_vertices(&self) -> Result<Vec<DVector<f64>>> {
        Ok(symmetrize_list(self.half_ball_vertices()?))
    }

    pub fn has_polytopal_dual(&self) -> bool {
        self.half_dual_vertices().is_ok()
    }

    pub fn has_polytopal_ball(&self) -> bool {
        self.half_ball_vertices().is_ok()
    }

    fn check_cap(&self, count: u128) -> Result<()> {
        if count > self.inner.vertex_cap {
            return Err(Error::CombinatorialBlowup {
                count,
                cap: self.inner.vertex_cap,
            });
        }
        Ok(())
    }

    fn compute_half_dual_vertices(&self) -> Result<Vec<DVector<f64>>> {
        let n = self.dim();
        if self.is_complex() {
            return Err(Error::NotPolytopal(format!("{} (circled ball)", self.label())));
        }
        if let Some(c) = self.dual_vertex_count() {
            self.check_cap(c)?;
        }
        match self.kind() {
            SpaceKind::Euclidean if n == 1 => Ok(vec![DVector::from_element(1, 1.0)]),
            SpaceKind::Euclidean | SpaceKind::DirectSum2(..) => Err(Error::NotPolytopal(self.label())),
            SpaceKind::Linf => Ok((0..n)
                .map(|i| {
                    let mut e = DVector::zeros(n);
                    e[i] = 1.0;
                    e
                })
                .collect()),
            SpaceKind::L1 => Ok((0..1usize << (n - 1))
                .map(|mask| {
                    DVector::from_fn(n, |i, _| {
                        if i > 0 && (mask >> (i - 1)) & 1 == 1 {
                            -1.0
                        } else {
                            1.0
                        }
                    })
                })
                .collect()),
            SpaceKind::PolytopeFacets(f) => Ok(half_list(
                &f.iter().map(|g| DVector::from_column_slice(g)).collect::<Vec<_>>(),
            )),
            SpaceKind::PolytopeVertices(v) => {
                let half = half_list(&v.iter().map(|g| DVector::from_column_slice(g)).collect::<Vec<_>>());
                let facets = geometry::symmetric_facets(&half, n)?;
                self.check_cap(2 * facets.len() as u128)?;
                Ok(facets)
            }
        }
    }

    /// Net of the extreme points of the unit ball (see [`Net`]).
    /// Polytopal balls return their exact vertex list regardless of `delta`.
    pub fn ball_net(&self, delta: f64) -> Result<Net> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::arg(format!("net resolution {delta} outside (0, 1)")));
        }
        if self.is_complex() {
            return Err(Error::ComplexUnsupported("real nets (use complex_ball_net)"));
        }
        if let Ok(v) = self.half_ball_vertices() {
            return Ok(Net {
                half: v.to_vec(),
                delta: 0.0,
            });
        }
        match self.kind() {
            SpaceKind::Euclidean => {
                let size = geometry::sphere_net_size(self.dim(), delta);
                if size > NET_CAP {
                    return Err(Error::CombinatorialBlowup { count: size, cap: NET_CAP });
                }
                Ok(Net {
                    half: geometry::sphere_net(self.dim(), delta),
                    delta: geometry::sphere_net_delta(self.dim(), delta),
                })
            }
            SpaceKind::DirectSum2(..) => {
                let (a, b) = self.summands().expect("direct sum has summands");
                let na = a.ball_net(delta / 2.0)?;
                let nb = b.ball_net(delta / 2.0)?;
                // Extreme points are (cos t a, sin t b) with a, b extreme.
                // An angle step of delta moves a point by at most delta / 2.
                let steps = (std::f64::consts::FRAC_PI_2 / delta).ceil() as usize;
                let full_b = nb.points();
                let size = (na.half.len() as u128 * full_b.len() as u128)
                    .saturating_mul(steps.saturating_sub(1) as u128)
                    + na.half.len() as u128
                    + nb.half.len() as u128;
                if size > NET_CAP {
                    return Err(Error::CombinatorialBlowup { count: size, cap: NET_CAP });
                }
                let (da, db) = (a.dim(), b.dim());
                let join = |x: &DVector<f64>, y: &DVector<f64>, c: f64, s: f64| {
                    let mut p = DVector::zeros(da + db);
                    p.rows_mut(0, da).copy_from(&(x * c));
                    p.rows_mut(da, db).copy_from(&(y * s));
                    p
                };
                let mut half = Vec::new();
                let za = DVector::zeros(da);
                let zb = DVector::zeros(db);
                for x in &na.half {
                    half.push(join(x, &zb, 1.0, 0.0));
                }
                for y in &nb.half {
                    half.push(join(&za, y, 0.0, 1.0));
                }
                for s in 1..steps {
                    let t = std::f64::consts::FRAC_PI_2 * s as f64 / steps as f64;
                    for x in &na.half {
                        for y in &full_b {
                            half.push(join(x, y, t.cos(), t.sin()));
                        }
                    }
                }
                let achieved = (std::f64::consts::FRAC_PI_2 / steps as f64) / 2.0 + na.delta.max(nb.delta);
                Ok(Net { half, delta: achieved })
            }
            _ => Err(Error::NotPolytopal(self.label())),
        }
    }

    /// Net of the extreme points of the dual ball.
    pub fn dual_ball_net(&self, delta: f64) -> Result<Net> {
        self.dual().ball_net(delta)
    }

    /// Net of the extreme points of a complex ball.
    ///
    /// With `modulo_phase` the points are listed up to a unimodular factor,
    /// which is enough for suprema of circled seminorms; otherwise the phases
    /// are discretized as well and `delta` covers them.
    pub fn complex_ball_net(&self, delta: f64, modulo_phase: bool) -> Result<ComplexNet> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::arg(format!("net resolution {delta} outside (0, 1)")));
        }
        let n = self.dim();
        // |e^{ia} - e^{ib}| <= delta whenever |a - b| <= 2 asin(delta / 2).
        let phases = (std::f64::consts::PI / (2.0 * (delta / 2.0).asin())).ceil() as usize;
        let phase = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / phases as f64);
        let basis = |j: usize, z: Complex64| {
            let mut e = DVector::from_element(n, Complex64::new(0.0, 0.0));
            e[j] = z;
            e
        };
        let points: Vec<DVector<Complex64>> = match self.kind() {
            SpaceKind::L1 => {
                let reps = if modulo_phase { 1 } else { phases };
                (0..n)
                    .flat_map(|j| (0..reps).map(move |k| (j, k)))
                    .map(|(j, k)| basis(j, phase(k)))
                    .collect()
            }
            SpaceKind::Linf => {
                let free = if modulo_phase { n - 1 } else { n };
                let size = (phases as u128).saturating_pow(free as u32);
                if size > NET_CAP {
                    return Err(Error::CombinatorialBlowup { count: size, cap: NET_CAP });
                }
                let mut out = Vec::with_capacity(size as usize);
                let mut counter = vec![0usize; free];
                loop {
                    let mut p = DVector::from_element(n, Complex64::new(1.0, 0.0));
                    for (i, &c) in counter.iter().enumerate() {
                        p[n - free + i] = phase(c);
                    }
                    out.push(p);
                    let mut i = 0;
                    loop {
                        if i == free {
                            break;
                        }
                        counter[i] += 1;
                        if counter[i] < phases {
                            break;
                        }
                        counter[i] = 0;
                        i += 1;
                    }
                    if i == free {
                        break;
                    }
                }
                out
            }
            SpaceKind::Euclidean => {
                let real = geometry::sphere_net(2 * n, delta);
                let mut pts: Vec<DVector<Complex64>> = real
                    .iter()
                    .map(|r| DVector::from_fn(n, |i, _| Complex64::new(r[i], r[n + i])))
                    .collect();
                if !modulo_phase {
                    let neg: Vec<_> = pts.iter().map(|p| -p).collect();
                    pts.extend(neg);
                }
                pts
            }
            _ => return Err(Error::ComplexUnsupported("complex nets of this ball")),
        };
        let exact = modulo_phase && matches!(self.kind(), SpaceKind::L1);
        Ok(ComplexNet {
            points,
            delta: if exact { 0.0 } else { delta },
        })
    }

    /// Complex net of the dual ball's extreme points.
    pub fn complex_dual_ball_net(&self, delta: f64, modulo_phase: bool) -> Result<ComplexNet> {
        self.dual().complex_ball_net(delta, modulo_phase)
    }
}

/// Descriptor of the dual space.
pub fn dual_descriptor(d: &SpaceDescriptor) -> SpaceDescriptor {
    let kind = match &d.kind {
        SpaceKind::Euclidean => SpaceKind::Euclidean,
        SpaceKind::L1 => SpaceKind::Linf,
        SpaceKind::Linf => SpaceKind::L1,
        SpaceKind::PolytopeVertices(v) => SpaceKind::PolytopeFacets(v.clone()),
        SpaceKind::PolytopeFacets(f) => SpaceKind::PolytopeVertices(f.clone()),
        SpaceKind::DirectSum2(l, r) => {
            SpaceKind::DirectSum2(Box::new(dual_descriptor(l)), Box::new(dual_descriptor(r)))
        }
    };
    SpaceDescriptor {
        kind,
        dim: d.dim,
        scalar: d.scalar,
    }
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({})", self.label())
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.desc == other.inner.desc
    }
}

impl Serialize for Space {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.inner.desc.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let desc = SpaceDescriptor::deserialize(d)?;
        Space::new(desc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests;
