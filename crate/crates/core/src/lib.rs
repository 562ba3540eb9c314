//! Exact construction of ideal (Hermite) projectors onto D-invariant
//! polynomial subspaces, together with the perturbed Lagrange point sets
//! whose interpolation projectors converge to them.

pub mod cli;
pub mod dinvariant;
pub mod error;
pub mod example5;
pub mod functionals;
pub mod linalg;
pub mod multipoly;
pub mod parse;
pub mod problem;
pub mod projector;
pub mod scalar;

pub use error::{Error, ErrorKind, Result};
pub use multipoly::{apply_diff_op, MPoly, Monomial};
pub use scalar::{HPoly, Rational, Ring};
