use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Relative symmetry tolerance applied by [`symmetric_eig`].
pub const DEFAULT_SYM_TOL: f64 = 1e-12;

/// Off-diagonal Frobenius mass, relative to `‖A‖_F`, at which Jacobi stops.
const JACOBI_OFF_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `A = Q Λ Q^T` of a real symmetric matrix.
///
/// Eigenvalues ascend; column `k` of `eigenvectors` belongs to `eigenvalues[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomp<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: DenseMatrix<T>,
}

impl<T: Real> SpectralDecomp<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Q f(Λ) Q^T`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> DenseMatrix<T> {
        let d: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        DenseMatrix::congruence_diag(&self.eigenvectors, &d)
    }

    pub fn reconstruct(&self) -> DenseMatrix<T> {
        self.apply(|l| l)
    }

    pub fn min(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> T {
        self.eigenvalues[self.len() - 1]
    }

    /// Largest eigenvalue magnitude, i.e. the 2-norm of the decomposed matrix.
    pub fn norm(&self) -> T {
        self.min().abs().max(self.max().abs())
    }
}

/// Symmetric eigendecomposition with the default symmetry tolerance.
pub fn symmetric_eig<T: Real>(a: &DenseMatrix<T>) -> Result<SpectralDecomp<T>> {
    symmetric_eig_with(a, T::tol(DEFAULT_SYM_TOL))
}

/// Cyclic Jacobi with a threshold strategy.
///
/// Input must be square with `max|A - A^T| <= sym_tol * ‖A‖_max`; it is never
/// silently symmetrised. Iteration stops once the off-diagonal Frobenius mass
/// drops to `1e-14 ‖A‖_F`.
pub fn symmetric_eig_with<T: Real>(a: &DenseMatrix<T>, sym_tol: T) -> Result<SpectralDecomp<T>> {
    if !a.is_square() {
        return Err(Error::dims(
            "symmetric_eig",
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let scale = a.max_abs();
    let asym = a.asymmetry();
    if asym > sym_tol * scale {
        return Err(Error::NotSymmetric {
            asymmetry: asym.as_f64(),
            tolerance: (sym_tol * scale).as_f64(),
        });
    }

    let n = a.rows();
    let mut m = a.symmetrized();
    let mut q = DenseMatrix::identity(n);
    let target = T::tol(JACOBI_OFF_TOL) * a.frobenius_norm();
    let eps = T::epsilon();
    let nn = T::c((n * n) as f64);

    for sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= target {
            break;
        }
        // Early sweeps skip small pivots so the large ones go first.
        let threshold = if sweep < 3 {
            T::c(0.2) * off_diagonal_abs_sum(&m) / nn
        } else {
            T::zero()
        };
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = m[(p, r)];
                let g = T::c(100.0) * apr.abs();
                let app = m[(p, p)];
                let arr = m[(r, r)];
                if sweep > 3 && app.abs() + g == app.abs() && arr.abs() + g == arr.abs() {
                    m[(p, r)] = T::zero();
                    m[(r, p)] = T::zero();
                    continue;
                }
                if apr.abs() <= threshold || apr == T::zero() {
                    continue;
                }
                rotate(&mut m, &mut q, p, r, eps);
            }
        }
    }
    if off_diagonal_norm(&m) > target {
        return Err(Error::NoConvergence {
            algorithm: "Jacobi eigensolver",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps Jacobi order among ties.
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .partial_cmp(&m[(j, j)])
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&i| m[(i, i)]).collect();
    let eigenvectors = q.select_columns(&order);
    Ok(SpectralDecomp {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate<T: Real>(m: &mut DenseMatrix<T>, q: &mut DenseMatrix<T>, p: usize, r: usize, eps: T) {
    let n = m.rows();
    let apr = m[(p, r)];
    let app = m[(p, p)];
    let arr = m[(r, r)];
    let diff = arr - app;
    let t = if apr.abs() < diff.abs() * eps {
        apr / diff
    } else {
        let theta = diff / (T::c(2.0) * apr);
        let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -t
        } else {
            t
        }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let tau = s / (T::one() + c);

    m[(p, p)] = app - t * apr;
    m[(r, r)] = arr + t * apr;
    m[(p, r)] = T::zero();
    m[(r, p)] = T::zero();
    for k in 0..n {
        if k == p || k == r {
            continue;
        }
        let mkp = m[(k, p)];
        let mkr = m[(k, r)];
        let new_kp = mkp - s * (mkr + tau * mkp);
        let new_kr = mkr + s * (mkp - tau * mkr);
        m[(k, p)] = new_kp;
        m[(p, k)] = new_kp;
        m[(k, r)] = new_kr;
        m[(r, k)] = new_kr;
    }
    for k in 0..n {
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = qkp - s * (qkr + tau * qkp);
        q[(k, r)] = qkr + s * (qkp - tau * qkr);
    }
}

fn off_diagonal_norm<T: Real>(m: &DenseMatrix<T>) -> T {
    let n = m.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            acc = acc + m[(i, j)] * m[(i, j)];
        }
    }
    (acc + acc).sqrt()
}

fn off_diagonal_abs_sum<T: Real>(m: &DenseMatrix<T>) -> T {
    let n = m.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            acc = acc + m[(i, j)].abs();
        }
    }
    acc
}
