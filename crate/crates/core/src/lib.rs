//! Tensor norms, operator ideal norms and tensor-power regularization
//! estimates on finite-dimensional normed spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`spaces`] declares finite-dimensional normed spaces with norm, dual and
//!   extreme-point oracles, plus linear maps between them.
//! * [`convex`] is a small dense LP (simplex) and SDP (primal-dual interior
//!   point) solver used by every ideal-norm computation.
//! * [`tensor`] and [`projective`] compute injective, Hilbertian and
//!   projective tensor norms with witnesses and certificates.
//! * [`ideal`] computes Hilbert-Schmidt, 2-summing, factorization and
//!   2-dominated norms.
//! * [`random`] holds the Gaussian random tensor machinery.
//! * [`limits`] estimates norms of tensor-power operators and assembles
//!   regularization reports.
//! * [`experiments`] wires everything into reproducible studies and the `tnl`
//!   command line tool.

pub mod convex;
pub mod error;
pub mod estimate;
pub mod experiments;
pub mod ideal;
pub mod limits;
pub mod linalg;
pub mod projective;
pub mod random;
pub mod spaces;
pub mod tensor;

pub use error::{Error, Result};
pub use estimate::{Certificate, NormEstimate, Witness};
pub use spaces::{OperatorMap, Scalar, Space, SpaceDescriptor};
pub use tensor::DenseTensor;
