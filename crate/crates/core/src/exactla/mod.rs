//! Exact linear algebra over the rationals or a prime field.

mod diagram;
mod matrix;
mod scalar;
mod subspace;

pub use diagram::{
    colimit_of_edges, finite_colimit, finite_limit, limit_of_edges, Colimit, FiniteDiagram, Limit,
};
pub use matrix::Matrix;
pub use scalar::{is_prime, Fp, Scalar, Q, SUPPORTED_PRIMES};
pub use subspace::{complement_section, image, kernel, quotient_projection, Subspace};
