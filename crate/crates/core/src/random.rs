//! Seeded random instance generators shared by the self-check harness and the
//! test suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{orthonormalize, DenseMatrix};
use crate::scalar::Real;

pub type InstanceRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_gaussian<T: Real, R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix<T> {
    let data = (0..rows * cols)
        .map(|_| T::c(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    DenseMatrix::from_row_major(rows, cols, data).expect("finite gaussian sample")
}

pub fn random_unit_vector<T: Real, R: Rng>(rng: &mut R, n: usize) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            return v.into_iter().map(|x| T::c(x / nrm)).collect();
        }
    }
}

/// `n x k` matrix with orthonormal columns, Haar-like.
pub fn random_orthonormal_columns<T: Real, R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
) -> DenseMatrix<T> {
    assert!(k <= n && k >= 1);
    loop {
        let g = random_gaussian::<T, R>(rng, n, k);
        if let Ok(o) = orthonormalize(&g, T::tol(1e-10)) {
            if o.dropped == 0 {
                return o.basis;
            }
        }
    }
}

pub fn random_orthogonal<T: Real, R: Rng>(rng: &mut R, n: usize) -> DenseMatrix<T> {
    random_orthonormal_columns(rng, n, n)
}

pub fn random_symmetric<T: Real, R: Rng>(rng: &mut R, n: usize) -> DenseMatrix<T> {
    random_gaussian::<T, R>(rng, n, n).symmetrized()
}

/// Ascending log-uniform spectrum in `[lo, hi]`.
pub fn random_spectrum<T: Real, R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<T> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = (0..n)
        .map(|_| (a + (b - a) * rng.random::<f64>()).exp())
        .collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v.into_iter().map(T::c).collect()
}

/// `Q diag(spectrum) Q^T` with a random orthogonal `Q`, returned with `Q`.
pub fn matrix_with_spectrum<T: Real, R: Rng>(
    rng: &mut R,
    spectrum: &[T],
) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let q = random_orthogonal::<T, R>(rng, spectrum.len());
    let h = DenseMatrix::congruence_diag(&q, spectrum);
    (h, q)
}
