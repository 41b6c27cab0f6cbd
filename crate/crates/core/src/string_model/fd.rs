//! Finite-difference discretization of `-(p u')'` on `[0, 2]` with Dirichlet
//! ends, used as an independent check of the analytic string results.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::string_model::{StringSpec, TestFunction};

/// Smallest accepted mesh.
pub const FD_MIN_MESH: usize = 100;

/// Symmetric tridiagonal stiffness matrix on interior nodes
/// `x_i = 2i/N, i = 1..N-1`; each cell carries the harmonic mean of `p`.
struct Tridiagonal<T> {
    diag: Vec<T>,
    off: Vec<T>,
    h: T,
}

impl<T: Real> Tridiagonal<T> {
    fn assemble(spec: &StringSpec<T>, cells: usize) -> Self {
        let h = T::c(2.0) / T::c(cells as f64);
        let contrast = spec.contrast();
        let one = T::one();
        let cell_p: Vec<T> = (0..cells)
            .map(|j| {
                let a = h * T::c(j as f64);
                let b = a + h;
                let left = (b.min(one) - a).max(T::zero());
                let right = (b - a.max(one)).max(T::zero());
                h / (left + right / contrast)
            })
            .collect();
        let h2 = h * h;
        let diag = (1..cells)
            .map(|i| (cell_p[i - 1] + cell_p[i]) / h2)
            .collect();
        let off = (1..cells - 1).map(|i| -cell_p[i] / h2).collect();
        Self { diag, off, h }
    }

    /// Number of eigenvalues below `x` (Sturm sequence count).
    fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0.. {
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
            if i + 1 == self.diag.len() {
                break;
            }
            let e = self.off[i];
            q = self.diag[i + 1] - x - e * e / q;
        }
        count
    }

    fn upper_bound(&self) -> T {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 {
                    self.off[i - 1].abs()
                } else {
                    T::zero()
                };
                let r = if i + 1 < n {
                    self.off[i].abs()
                } else {
                    T::zero()
                };
                self.diag[i] + l + r
            })
            .fold(T::zero(), T::max)
    }

    /// The `k`-th smallest eigenvalue (one-based) by bisection.
    fn eigenvalue(&self, k: usize) -> T {
        let (mut lo, mut hi) = (T::zero(), self.upper_bound());
        for _ in 0..200 {
            let mid = lo + (hi - lo) / T::c(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo + (hi - lo) / T::c(2.0)
    }

    /// Thomas algorithm for `A w = f`.
    fn solve(&self, f: &[T]) -> Vec<T> {
        let n = self.diag.len();
        let mut c = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        let mut denom = self.diag[0];
        d[0] = f[0] / denom;
        for i in 1..n {
            c[i - 1] = self.off[i - 1] / denom;
            denom = self.diag[i] - self.off[i - 1] * c[i - 1];
            d[i] = (f[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] = d[i] - c[i] * d[i + 1];
        }
        d
    }
}

fn checked_mesh(mesh: usize) -> Result<usize> {
    if mesh < FD_MIN_MESH {
        return Err(Error::MeshTooCoarse {
            mesh,
            minimum: FD_MIN_MESH,
        });
    }
    // An even cell count puts x = 1 on a node.
    Ok(mesh + mesh % 2)
}

fn richardson<T: Real>(coarse: T, fine: T) -> T {
    (T::c(4.0) * fine - coarse) / T::c(3.0)
}

/// Lowest `count` eigenvalues from meshes `N` and `2N`, Richardson
/// extrapolated.
pub fn fd_oracle<T: Real>(spec: &StringSpec<T>, mesh: usize, count: usize) -> Result<Vec<T>> {
    let n = checked_mesh(mesh)?;
    let coarse = Tridiagonal::assemble(spec, n);
    let fine = Tridiagonal::assemble(spec, 2 * n);
    Ok((1..=count)
        .map(|k| richardson(coarse.eigenvalue(k), fine.eigenvalue(k)))
        .collect())
}

/// `(u_n, H_η^{-1} u_n)` from a discrete solve and the trapezoidal rule,
/// Richardson extrapolated over meshes `N` and `2N`.
pub fn fd_green<T: Real>(spec: &StringSpec<T>, mode: usize, mesh: usize) -> Result<T> {
    let u = TestFunction::new(mode)?;
    let n = checked_mesh(mesh)?;
    let value = |cells: usize| {
        let a = Tridiagonal::assemble(spec, cells);
        let f: Vec<T> = (1..cells).map(|i| u.eval(a.h * T::c(i as f64))).collect();
        let w = a.solve(&f);
        a.h * f.iter().zip(&w).map(|(&x, &y)| x * y).sum::<T>()
    };
    Ok(richardson(value(n), value(2 * n)))
}
