//! Relative eigenvalue and eigenvector certificates for Rayleigh–Ritz
//! approximations of nonnegative self-adjoint operators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angles;
pub mod bounds;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod scalar;
pub mod selfcheck;
pub mod string_model;
pub mod tolerances;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerances::Tolerances;

/// Double-precision dense matrix.
pub type Matrix = linalg::DenseMatrix<f64>;
/// Single-precision dense matrix.
pub type Matrix32 = linalg::DenseMatrix<f32>;
pub type Operator = forms::OperatorRep<f64>;
pub type String1d = string_model::StringSpec<f64>;
pub type Certificate = bounds::Certificate<f64>;
