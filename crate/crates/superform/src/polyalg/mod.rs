//! Exact rational arithmetic, sparse multivariate polynomials and the small
//! amount of exact linear algebra the rest of the crate is built on.

mod linalg;
mod polynomial;
mod rational;

pub use linalg::Mat;
pub use polynomial::{PolyError, Polynomial};
pub use rational::{ParseRatError, Rat};

pub(crate) mod linalg_internal {
    pub(crate) use super::linalg::{primitive_integer_row, primitive_signed_row};
}
