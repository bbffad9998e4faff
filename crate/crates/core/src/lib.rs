//! Numerical toolkit for operator-Lipschitz and commutator estimates on
//! finite matrices.

pub mod error;
pub mod linalg;
pub mod cauchy_green;
pub mod commutator;
pub mod schur;
pub mod variance;

pub use error::{Error, Result};
pub use linalg::{Matrix, C64};
