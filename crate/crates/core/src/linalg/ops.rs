use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, norm2};
use crate::linalg::{svd, DenseMatrix, SpectralDecomp};
use crate::scalar::Real;

/// Default relative rank threshold: `max(rows, cols) * ε`.
pub fn default_rank_tol<T: Real>(rows: usize, cols: usize) -> T {
    T::c(rows.max(cols) as f64) * T::epsilon()
}

/// Moore–Penrose pseudoinverse; singular values at or below
/// `rank_tol * σ_max` are treated as exact zeros.
pub fn pinv<T: Real>(a: &DenseMatrix<T>, rank_tol: T) -> Result<DenseMatrix<T>> {
    if !(rank_tol > T::zero()) {
        return Err(Error::InvalidArgument(
            "rank tolerance must be positive".into(),
        ));
    }
    let s = svd(a)?;
    let cut = rank_tol * s.max_singular_value();
    let mut out = DenseMatrix::zeros(a.cols(), a.rows());
    for (k, &sigma) in s.singular_values.iter().enumerate() {
        if !(sigma > cut) {
            continue;
        }
        let inv = T::one() / sigma;
        for i in 0..a.cols() {
            let vik = s.v[(i, k)] * inv;
            if vik == T::zero() {
                continue;
            }
            for j in 0..a.rows() {
                out[(i, j)] = out[(i, j)] + vik * s.u[(j, k)];
            }
        }
    }
    Ok(out)
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    Ok(svd(a)?.max_singular_value())
}

/// Result of [`orthonormalize`]: the orthonormal basis and how many input
/// columns were discarded as dependent.
#[derive(Debug, Clone, PartialEq)]
pub struct Orthonormalized<T> {
    pub basis: DenseMatrix<T>,
    pub dropped: usize,
}

/// Modified Gram–Schmidt with one reorthogonalisation pass.
///
/// A column is dropped when its residual after projection falls to
/// `rank_tol` times the largest input column norm.
pub fn orthonormalize<T: Real>(
    columns: &DenseMatrix<T>,
    rank_tol: T,
) -> Result<Orthonormalized<T>> {
    let scale = columns
        .columns()
        .iter()
        .map(|c| norm2(c))
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return Err(Error::EmptySpan);
    }
    let cut = rank_tol * scale;
    let mut kept: Vec<Vec<T>> = Vec::new();
    let mut dropped = 0;
    for mut v in columns.columns() {
        for _ in 0..2 {
            for q in &kept {
                let proj = dot(q, &v);
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi = *vi - proj * qi;
                }
            }
        }
        let nrm = norm2(&v);
        if nrm > cut {
            kept.push(v.into_iter().map(|x| x / nrm).collect());
        } else {
            dropped += 1;
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptySpan);
    }
    Ok(Orthonormalized {
        basis: DenseMatrix::from_columns(&kept),
        dropped,
    })
}

/// Orthonormal basis of `ran(A)` from the singular vectors above
/// `rel_tol * σ_max`; `None` when the range is trivial.
pub fn range_basis<T: Real>(a: &DenseMatrix<T>, rel_tol: T) -> Result<Option<DenseMatrix<T>>> {
    let s = svd(a)?;
    let r = s.rank(rel_tol);
    if r == 0 {
        return Ok(None);
    }
    Ok(Some(s.u.select_columns(&(0..r).collect::<Vec<_>>())))
}

/// Orthonormal basis of `ker(A)` from the right singular vectors at or below
/// `rel_tol * σ_max`; `None` when `A` is injective.
pub fn null_basis<T: Real>(a: &DenseMatrix<T>, rel_tol: T) -> Result<Option<DenseMatrix<T>>> {
    let n = a.cols();
    // A square system exposes every right singular vector.
    let padded;
    let a = if a.rows() < n {
        let mut p = DenseMatrix::zeros(n, n);
        for i in 0..a.rows() {
            for j in 0..n {
                p[(i, j)] = a[(i, j)];
            }
        }
        padded = p;
        &padded
    } else {
        a
    };
    let s = svd(a)?;
    let r = s.rank(rel_tol);
    if r == n {
        return Ok(None);
    }
    Ok(Some(s.v.select_columns(&(r..n).collect::<Vec<_>>())))
}

/// Orthogonal projector `Q Q^T` onto the span of orthonormal columns `Q`.
pub fn projector<T: Real>(q: &DenseMatrix<T>) -> DenseMatrix<T> {
    q.matmul(&q.transpose()).symmetrized()
}

/// Projector built from an optional basis; the zero matrix of order `n` for
/// the trivial subspace.
pub fn projector_or_zero<T: Real>(q: Option<&DenseMatrix<T>>, n: usize) -> DenseMatrix<T> {
    q.map_or_else(|| DenseMatrix::zeros(n, n), projector)
}

/// Spectral functions of a nonnegative decomposition: eigenvalues at or below
/// `rank_tol * λ_max` are treated as zero.
pub fn psd_function<T: Real>(
    d: &SpectralDecomp<T>,
    rank_tol: T,
    on_positive: impl Fn(T) -> T,
) -> DenseMatrix<T> {
    let cut = rank_tol * d.max().max(T::zero());
    d.apply(|l| if l > cut { on_positive(l) } else { T::zero() })
}

/// `A^{1/2}` with dust eigenvalues zeroed.
pub fn psd_sqrt<T: Real>(d: &SpectralDecomp<T>, rank_tol: T) -> DenseMatrix<T> {
    psd_function(d, rank_tol, |l| l.sqrt())
}

/// `A^{†1/2}`.
pub fn psd_pinv_sqrt<T: Real>(d: &SpectralDecomp<T>, rank_tol: T) -> DenseMatrix<T> {
    psd_function(d, rank_tol, |l| T::one() / l.sqrt())
}

/// `A^†`.
pub fn psd_pinv<T: Real>(d: &SpectralDecomp<T>, rank_tol: T) -> DenseMatrix<T> {
    psd_function(d, rank_tol, |l| T::one() / l)
}
