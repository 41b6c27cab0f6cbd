use crate::error::{Error, Result};
use crate::linalg::matrix::{dot, norm2};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(σ) V^T`.
///
/// With `k = min(rows, cols)`: `u` is `rows x k`, `v` is `cols x k`, and the
/// singular values descend and are nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdDecomp<T> {
    pub u: DenseMatrix<T>,
    pub singular_values: Vec<T>,
    pub v: DenseMatrix<T>,
}

impl<T: Real> SvdDecomp<T> {
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let mut us = self.u.clone();
        for j in 0..us.cols() {
            let s = self.singular_values[j];
            for i in 0..us.rows() {
                us[(i, j)] = us[(i, j)] * s;
            }
        }
        us.matmul(&self.v.transpose())
    }

    pub fn max_singular_value(&self) -> T {
        self.singular_values
            .first()
            .copied()
            .unwrap_or_else(T::zero)
    }

    /// Number of singular values above `rel_tol * σ_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let cut = rel_tol * self.max_singular_value();
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(a: &DenseMatrix<T>) -> Result<SvdDecomp<T>> {
    if a.rows() < a.cols() {
        let t = svd_tall(&a.transpose())?;
        return Ok(SvdDecomp {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    svd_tall(a)
}

fn svd_tall<T: Real>(a: &DenseMatrix<T>) -> Result<SvdDecomp<T>> {
    let (m, n) = a.shape();
    // Work on columns as contiguous vectors.
    let mut cols: Vec<Vec<T>> = a.columns();
    let mut vcols: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            e
        })
        .collect();
    let eps = T::epsilon();
    // Columns this small carry only roundoff and are left alone.
    let floor = (eps * a.frobenius_norm()).powi(2);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if alpha <= floor || beta <= floor || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::c(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut vcols, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            algorithm: "one-sided Jacobi SVD",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut sigma: Vec<T> = cols.iter().map(|c| norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        sigma[j]
            .partial_cmp(&sigma[i])
            .expect("finite singular values")
    });
    sigma = order.iter().map(|&i| sigma[i]).collect();

    let smax = sigma.first().copied().unwrap_or_else(T::zero);
    let null_cut = smax * eps * T::c(m.max(n) as f64);
    let mut ucols: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if sigma[k] > null_cut && sigma[k] > T::zero() {
            ucols.push(cols[i].iter().map(|&x| x / sigma[k]).collect());
        } else {
            ucols.push(vec![T::zero(); m]);
            missing.push(k);
        }
    }
    complete_orthonormal(&mut ucols, &missing);

    let u = DenseMatrix::from_columns(&ucols);
    let v = DenseMatrix::from_columns(&order.iter().map(|&i| vcols[i].clone()).collect::<Vec<_>>());
    Ok(SvdDecomp {
        u,
        singular_values: sigma.into_iter().map(|s| s.max(T::zero())).collect(),
        v,
    })
}

fn rotate_pair<T: Real>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the listed slots with unit vectors orthogonal to every other column,
/// each time taking the coordinate vector with the largest residual.
fn complete_orthonormal<T: Real>(cols: &mut [Vec<T>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = cols[0].len();
    for &slot in missing {
        let mut best: Option<(T, Vec<T>)> = None;
        for candidate in 0..m {
            let mut e = vec![T::zero(); m];
            e[candidate] = T::one();
            for _ in 0..2 {
                for (j, c) in cols.iter().enumerate() {
                    if j == slot || c.iter().all(|&x| x == T::zero()) {
                        continue;
                    }
                    let proj = dot(c, &e);
                    for (ei, &ci) in e.iter_mut().zip(c) {
                        *ei = *ei - proj * ci;
                    }
                }
            }
            let nrm = norm2(&e);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, e));
            }
        }
        let (nrm, e) = best.expect("ambient dimension is positive");
        assert!(nrm > T::c(0.1), "cannot complete orthonormal basis");
        cols[slot] = e.into_iter().map(|x| x / nrm).collect();
    }
}
