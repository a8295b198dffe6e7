use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scalar {
    #[default]
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    Euclidean,
    L1,
    Linf,
    /// Ball is the convex hull of the listed points.
    PolytopeVertices(Vec<Vec<f64>>),
    /// Ball is `{x : |f(x)| <= 1}` over the listed functionals.
    PolytopeFacets(Vec<Vec<f64>>),
    /// `left ⊕₂ right`, coordinates of `left` first.
    DirectSum2(Box<SpaceDescriptor>, Box<SpaceDescriptor>),
}

/// Declarative description of a finite-dimensional normed space.
///
/// JSON form: `{"kind", "dim", "scalar", "vertices"?, "facets"?, "summands"?}`
/// with kinds `euclidean`, `l1`, `linf`, `polytope-vertices`,
/// `polytope-facets` and `direct-sum-2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DescriptorJson", into = "DescriptorJson")]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    pub dim: usize,
    pub scalar: Scalar,
}

impl SpaceDescriptor {
    pub fn euclidean(n: usize) -> Self {
        Self::simple(SpaceKind::Euclidean, n)
    }

    pub fn l1(n: usize) -> Self {
        Self::simple(SpaceKind::L1, n)
    }

    pub fn linf(n: usize) -> Self {
        Self::simple(SpaceKind::Linf, n)
    }

    pub fn polytope_vertices(points: Vec<Vec<f64>>) -> Self {
        let dim = points.first().map_or(0, |p| p.len());
        Self::simple(SpaceKind::PolytopeVertices(points), dim)
    }

    pub fn polytope_facets(functionals: Vec<Vec<f64>>) -> Self {
        let dim = functionals.first().map_or(0, |p| p.len());
        Self::simple(SpaceKind::PolytopeFacets(functionals), dim)
    }

    pub fn direct_sum(left: SpaceDescriptor, right: SpaceDescriptor) -> Self {
        let dim = left.dim + right.dim;
        let scalar = left.scalar;
        SpaceDescriptor {
            kind: SpaceKind::DirectSum2(Box::new(left), Box::new(right)),
            dim,
            scalar,
        }
    }

    /// Same space over the complex field.
    pub fn complex(mut self) -> Self {
        self.scalar = Scalar::Complex;
        if let SpaceKind::DirectSum2(l, r) = &mut self.kind {
            **l = l.as_ref().clone().complex();
            **r = r.as_ref().clone().complex();
        }
        self
    }

    fn simple(kind: SpaceKind, dim: usize) -> Self {
        SpaceDescriptor {
            kind,
            dim,
            scalar: Scalar::Real,
        }
    }

    /// Checks the descriptor invariants that do not need geometry.
    pub(crate) fn validate_shape(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidDescriptor("dimension must be positive".into()));
        }
        match &self.kind {
            SpaceKind::PolytopeVertices(pts) | SpaceKind::PolytopeFacets(pts) => {
                if self.scalar == Scalar::Complex {
                    return Err(Error::InvalidDescriptor(
                        "polytopal balls are real only".into(),
                    ));
                }
                if pts.is_empty() {
                    return Err(Error::InvalidDescriptor("empty point list".into()));
                }
                for p in pts {
                    if p.len() != self.dim {
                        return Err(Error::InvalidDescriptor(format!(
                            "point of length {} in a space of dimension {}",
                            p.len(),
                            self.dim
                        )));
                    }
                    if p.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidDescriptor("non-finite coordinate".into()));
                    }
                }
                if !closed_under_negation(pts) {
                    return Err(Error::InvalidDescriptor(
                        "point list is not closed under negation".into(),
                    ));
                }
            }
            SpaceKind::DirectSum2(l, r) => {
                l.validate_shape()?;
                r.validate_shape()?;
                if l.dim + r.dim != self.dim {
                    return Err(Error::InvalidDescriptor(format!(
                        "direct sum of dimensions {} and {} declared as {}",
                        l.dim, r.dim, self.dim
                    )));
                }
                if l.scalar != self.scalar || r.scalar != self.scalar {
                    return Err(Error::InvalidDescriptor("summand scalar fields differ".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Short human-readable label, e.g. `l1(3)` or `linf(2,C)`.
    pub fn label(&self) -> String {
        let c = if self.scalar == Scalar::Complex { ",C" } else { "" };
        match &self.kind {
            SpaceKind::Euclidean => format!("euclidean({}{c})", self.dim),
            SpaceKind::L1 => format!("l1({}{c})", self.dim),
            SpaceKind::Linf => format!("linf({}{c})", self.dim),
            SpaceKind::PolytopeVertices(p) => format!("polytope-vertices({}, {} pts)", self.dim, p.len()),
            SpaceKind::PolytopeFacets(p) => format!("polytope-facets({}, {} facets)", self.dim, p.len()),
            SpaceKind::DirectSum2(l, r) => format!("({} ⊕₂ {})", l.label(), r.label()),
        }
    }
}

/// Short form `kind:dim[:complex]` for the standard spaces, or a JSON
/// descriptor when the text starts with `{`.
impl std::str::FromStr for SpaceDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::InvalidDescriptor(e.to_string()));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidDescriptor(format!("expected kind:dim[:complex], got {s:?}"));
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let dim: usize = parts[1].parse().map_err(|_| bad())?;
        let desc = match parts[0] {
            "euclidean" | "l2" => Self::euclidean(dim),
            "l1" => Self::l1(dim),
            "linf" => Self::linf(dim),
            other => return Err(Error::InvalidDescriptor(format!("unknown space kind {other:?}"))),
        };
        match parts.get(2) {
            None | Some(&"real") => Ok(desc),
            Some(&"complex") | Some(&"c") => Ok(desc.complex()),
            Some(_) => Err(bad()),
        }
    }
}

fn closed_under_negation(pts: &[Vec<f64>]) -> bool {
    pts.iter().all(|p| {
        pts.iter()
            .any(|q| p.iter().zip(q).all(|(a, b)| (a + b).abs() <= 1e-9 * (1.0 + a.abs())))
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DescriptorJson {
    kind: String,
    dim: usize,
    #[serde(default)]
    scalar: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    facets: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    summands: Option<Vec<SpaceDescriptor>>,
}

impl TryFrom<DescriptorJson> for SpaceDescriptor {
    type Error = Error;

    fn try_from(j: DescriptorJson) -> Result<Self> {
        let kind = match j.kind.as_str() {
            "euclidean" => SpaceKind::Euclidean,
            "l1" => SpaceKind::L1,
            "linf" => SpaceKind::Linf,
            "polytope-vertices" => SpaceKind::PolytopeVertices(
                j.vertices
                    .ok_or_else(|| Error::InvalidDescriptor("missing \"vertices\"".into()))?,
            ),
            "polytope-facets" => SpaceKind::PolytopeFacets(
                j.facets
                    .ok_or_else(|| Error::InvalidDescriptor("missing \"facets\"".into()))?,
            ),
            "direct-sum-2" => {
                let mut s = j
                    .summands
                    .ok_or_else(|| Error::InvalidDescriptor("missing \"summands\"".into()))?;
                if s.len() != 2 {
                    return Err(Error::InvalidDescriptor(
                        "direct-sum-2 needs exactly two summands".into(),
                    ));
                }
                let r = s.pop().expect("two summands");
                let l = s.pop().expect("two summands");
                SpaceKind::DirectSum2(Box::new(l), Box::new(r))
            }
            other => return Err(Error::InvalidDescriptor(format!("unknown kind {other:?}"))),
        };
        let d = SpaceDescriptor {
            kind,
            dim: j.dim,
            scalar: j.scalar,
        };
        d.validate_shape()?;
        Ok(d)
    }
}

impl From<SpaceDescriptor> for DescriptorJson {
    fn from(d: SpaceDescriptor) -> Self {
        let mut j = DescriptorJson {
            kind: String::new(),
            dim: d.dim,
            scalar: d.scalar,
            vertices: None,
            facets: None,
            summands: None,
        };
        j.kind = match d.kind {
            SpaceKind::Euclidean => "euclidean".into(),
            SpaceKind::L1 => "l1".into(),
            SpaceKind::Linf => "linf".into(),
            SpaceKind::PolytopeVertices(v) => {
                j.vertices = Some(v);
                "polytope-vertices".into()
            }
            SpaceKind::PolytopeFacets(f) => {
                j.facets = Some(f);
                "polytope-facets".into()
            }
            SpaceKind::DirectSum2(l, r) => {
                j.summands = Some(vec![*l, *r]);
                "direct-sum-2".into()
            }
        };
        j
    }
}
