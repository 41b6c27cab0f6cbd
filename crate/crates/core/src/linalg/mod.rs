//! Dense real linear algebra: symmetric eigendecomposition, SVD,
//! pseudoinverse, orthonormalisation and the matrix text format.

mod eig;
pub mod io;
mod matrix;
mod ops;
mod svd;

pub use eig::{symmetric_eig, symmetric_eig_with, SpectralDecomp, DEFAULT_SYM_TOL};
pub use io::{format_matrix, parse_matrix, MatrixFile};
pub use matrix::{dot, norm2, DenseMatrix};
pub use ops::{
    default_rank_tol, null_basis, orthonormalize, pinv, projector, projector_or_zero, psd_function,
    psd_pinv, psd_pinv_sqrt, psd_sqrt, range_basis, spectral_norm, Orthonormalized,
};
pub use svd::{svd, SvdDecomp};
