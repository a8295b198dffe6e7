//! Building blocks for Gram-matrix SDPs: a PSD block viewed as a real
//! symmetric or (through the real embedding) Hermitian matrix, and the
//! constraint `sup_{x ∈ B} x* H x <= bound` for principal sub-blocks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::convex::{PsdBlock, Relation, SdpProblem, SdpSolution, Var};
use crate::spaces::{Space, SpaceKind};
use crate::{Error, Result};

/// A Gram variable of order `n`. Complex Grams `H = A + iB` are stored as
/// the real `2n x 2n` block `[[A, -B], [B, A]]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Gram {
    pub block: PsdBlock,
    pub n: usize,
    pub complex: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Bound {
    Var(Var),
    Const(f64),
}

impl Bound {
    /// Moves the bound to the left-hand side: returns extra terms and rhs.
    fn split(self, scale: f64) -> (Vec<(Var, f64)>, f64) {
        match self {
            Bound::Var(v) => (vec![(v, -scale)], 0.0),
            Bound::Const(c) => (vec![], c * scale),
        }
    }
}

impl Gram {
    pub fn new(sdp: &mut SdpProblem, n: usize, complex: bool) -> Self {
        let block = sdp.add_psd(if complex { 2 * n } else { n });
        let g = Gram { block, n, complex };
        if complex {
            for i in 0..n {
                for j in i..n {
                    sdp.add_constraint(vec![(block.at(i, j), 1.0), (block.at(n + i, n + j), -1.0)], Relation::Eq, 0.0);
                    let terms = if i == j {
                        vec![(block.at(n + i, i), 1.0)]
                    } else {
                        vec![(block.at(n + i, j), 1.0), (block.at(n + j, i), 1.0)]
                    };
                    sdp.add_constraint(terms, Relation::Eq, 0.0);
                }
            }
        }
        g
    }

    /// Real part of entry `(i, j)`.
    pub fn re(&self, i: usize, j: usize) -> Var {
        self.block.at(i, j)
    }

    /// Imaginary part of entry `(i, j)` (complex Grams only).
    pub fn im(&self, i: usize, j: usize) -> Var {
        debug_assert!(self.complex);
        self.block.at(self.n + i, j)
    }

    /// Fixes entry `(i, j)` to `value`.
    pub fn fix(&self, sdp: &mut SdpProblem, i: usize, j: usize, value: Complex64) {
        sdp.add_constraint(vec![(self.re(i, j), 1.0)], Relation::Eq, value.re);
        if self.complex {
            sdp.add_constraint(vec![(self.im(i, j), 1.0)], Relation::Eq, value.im);
        } else {
            debug_assert!(value.im == 0.0);
        }
    }

    /// Entry of the real embedding of the principal sub-block starting at
    /// `off` of order `d`, for `a <= b < 2d` (or `< d` when real), as a
    /// signed variable.
    fn embedded(&self, off: usize, d: usize, a: usize, b: usize) -> (Var, f64) {
        if !self.complex || (a < d && b < d) {
            (self.re(off + a, off + b), 1.0)
        } else if a >= d && b >= d {
            (self.re(off + a - d, off + b - d), 1.0)
        } else {
            // a < d <= b: upper-right block is -B, and -B[a][b-d] = B[b-d][a].
            (self.im(off + b - d, off + a), 1.0)
        }
    }

    /// Adds `sup_{x ∈ B} x* H x <= bound` for the principal sub-block `H`
    /// at `off` of order `ball.dim()`, using the ball's extreme points.
    ///
    /// `vertices` overrides the vertex list of a real polytopal ball.
    pub fn bound_ball(
        &self,
        sdp: &mut SdpProblem,
        off: usize,
        ball: &Space,
        bound: Bound,
        vertices: Option<&[DVector<f64>]>,
    ) -> Result<()> {
        let d = ball.dim();
        if ball.is_euclidean() && d > 1 {
            return self.bound_spectral(sdp, off, d, bound);
        }
        if self.complex {
            return match ball.kind() {
                SpaceKind::L1 => {
                    for j in 0..d {
                        let (mut terms, rhs) = bound.split(1.0);
                        terms.push((self.re(off + j, off + j), 1.0));
                        sdp.add_constraint(terms, Relation::Le, rhs);
                    }
                    Ok(())
                }
                SpaceKind::Euclidean => self.bound_spectral(sdp, off, d, bound),
                SpaceKind::Linf if d == 1 => {
                    let (mut terms, rhs) = bound.split(1.0);
                    terms.push((self.re(off, off), 1.0));
                    sdp.add_constraint(terms, Relation::Le, rhs);
                    Ok(())
                }
                SpaceKind::Linf if d == 2 => {
                    // sup over the torus of x*Hx is H11 + H22 + 2|H12|;
                    // |a + ib| <= s  <=>  [[s + a, b], [b, s - a]] >= 0.
                    let k = sdp.add_psd(2);
                    sdp.add_constraint(
                        vec![(k.at(0, 0), 0.5), (k.at(1, 1), -0.5), (self.re(off, off + 1), -1.0)],
                        Relation::Eq,
                        0.0,
                    );
                    sdp.add_constraint(vec![(k.at(0, 1), 1.0), (self.im(off, off + 1), -1.0)], Relation::Eq, 0.0);
                    let (mut terms, rhs) = bound.split(1.0);
                    terms.extend([
                        (self.re(off, off), 1.0),
                        (self.re(off + 1, off + 1), 1.0),
                        (k.at(0, 0), 1.0),
                        (k.at(1, 1), 1.0),
                    ]);
                    sdp.add_constraint(terms, Relation::Le, rhs);
                    Ok(())
                }
                _ => Err(Error::ComplexUnsupported("Gram constraints for this complex ball")),
            };
        }
        let owned;
        let verts = match vertices {
            Some(v) => v,
            None => {
                owned = ball.half_ball_vertices()?.to_vec();
                &owned
            }
        };
        for v in verts {
            let (mut terms, rhs) = bound.split(1.0);
            for a in 0..d {
                if v[a] == 0.0 {
                    continue;
                }
                for b in a..d {
                    let c = if a == b { v[a] * v[a] } else { 2.0 * v[a] * v[b] };
                    if c != 0.0 {
                        terms.push((self.re(off + a, off + b), c));
                    }
                }
            }
            sdp.add_constraint(terms, Relation::Le, rhs);
        }
        Ok(())
    }

    /// `H ⪯ bound · I` through a PSD slack block.
    fn bound_spectral(&self, sdp: &mut SdpProblem, off: usize, d: usize, bound: Bound) -> Result<()> {
        let size = if self.complex { 2 * d } else { d };
        let s = sdp.add_psd(size);
        for a in 0..size {
            for b in a..size {
                let (v, sign) = self.embedded(off, d, a, b);
                let mut terms = vec![(s.at(a, b), 1.0), (v, sign)];
                let mut rhs = 0.0;
                if a == b {
                    let (extra, r) = bound.split(1.0);
                    terms.extend(extra);
                    rhs = r;
                }
                sdp.add_constraint(terms, Relation::Eq, rhs);
            }
        }
        Ok(())
    }

    /// The solved Gram matrix as a complex Hermitian matrix.
    pub fn value(&self, sol: &SdpSolution) -> DMatrix<Complex64> {
        let r = sol.psd(&self.block);
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| {
            if self.complex {
                Complex64::new(0.5 * (r[(i, j)] + r[(n + i, n + j)]), 0.5 * (r[(n + i, j)] - r[(n + j, i)]))
            } else {
                Complex64::new(r[(i, j)], 0.0)
            }
        })
    }

    /// The solved Gram matrix (real part).
    pub fn real_value(&self, sol: &SdpSolution) -> DMatrix<f64> {
        self.value(sol).map(|z| z.re)
    }
}

/// `sup_{x ∈ B} x^T H x` for a real symmetric `H` over a polytopal or
/// euclidean ball.
pub(crate) fn quadratic_sup(ball: &Space, h: &DMatrix<f64>) -> Result<f64> {
    if ball.is_euclidean() {
        return Ok(crate::linalg::max_eigenvalue(h).max(0.0));
    }
    let v = ball.half_ball_vertices()?;
    Ok(v.iter().map(|x| x.dot(&(h * x))).fold(0.0, f64::max))
}

/// `sup_{x ∈ B} x^H H x` for a Hermitian `H` over a complex ball.
pub(crate) fn complex_quadratic_sup(ball: &Space, h: &DMatrix<Complex64>) -> Result<f64> {
    let d = ball.dim();
    match ball.kind() {
        SpaceKind::Euclidean => {
            let eig = h.clone().symmetric_eigenvalues();
            Ok(eig.iter().fold(0.0f64, |a, b| a.max(*b)))
        }
        SpaceKind::L1 => Ok((0..d).map(|j| h[(j, j)].re).fold(0.0, f64::max)),
        SpaceKind::Linf if d == 1 => Ok(h[(0, 0)].re.max(0.0)),
        SpaceKind::Linf if d == 2 => Ok(h[(0, 0)].re + h[(1, 1)].re + 2.0 * h[(0, 1)].norm()),
        _ => Err(Error::ComplexUnsupported("quadratic suprema over this complex ball")),
    }
}
