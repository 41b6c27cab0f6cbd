//! The two-piece string `-(p u')' = λ u` on `[0, 2]` with Dirichlet ends,
//! `p = 1` on `[0, 1]` and `p = 1 + η²` on `(1, 2]`.

mod eigvec;
mod fd;
mod green;
mod secular;

pub use eigvec::{string_eigvec_error, EigvecError, UNIFORM_CONSTANT};
pub use fd::{fd_green, fd_oracle, FD_MIN_MESH};
pub use green::{green_quadratic_form, sin_theta_string, GreenForm, StringSinTheta};
pub use secular::{secular_roots, secular_solve, SecularForm, StringEig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::RitzData;
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Stiffness contrast of the string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StringSpec<T> {
    eta: T,
}

impl<T: Real> StringSpec<T> {
    pub fn new(eta: T) -> Result<Self> {
        if !(eta >= T::zero()) || !eta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "eta must be finite and nonnegative, got {eta}"
            )));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    /// Stiffness on the right piece, `1 + η²`.
    pub fn contrast(&self) -> T {
        T::one() + self.eta * self.eta
    }

    pub fn coefficient(&self, x: T) -> T {
        if x <= T::one() {
            T::one()
        } else {
            self.contrast()
        }
    }
}

/// Mode `n` test function `√2 sin(nπx)` on `[0, 1]`, zero on `(1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestFunction {
    pub mode: usize,
}

impl TestFunction {
    pub fn new(mode: usize) -> Result<Self> {
        if mode == 0 {
            return Err(Error::InvalidArgument("modes are numbered from 1".into()));
        }
        Ok(Self { mode })
    }

    pub fn wave_number<T: Real>(&self) -> T {
        T::c(self.mode as f64) * T::PI()
    }

    pub fn eval<T: Real>(&self, x: T) -> T {
        if x <= T::one() {
            T::SQRT_2() * (self.wave_number::<T>() * x).sin()
        } else {
            T::zero()
        }
    }

    /// `h_η(u_n, u_n) = n²π²`, the same for every `η`.
    pub fn ritz_value<T: Real>(&self) -> T {
        let k = self.wave_number::<T>();
        k * k
    }
}

/// Rayleigh quotient of the string form on the span of the given modes.
///
/// The test functions are supported where `p = 1`, so `Ξ = diag(n²π²)`.
pub fn string_ritz<T: Real>(modes: &[TestFunction]) -> RitzData<T> {
    let values: Vec<T> = modes.iter().map(TestFunction::ritz_value).collect();
    let xi = DenseMatrix::from_diagonal(&values);
    let mut ritz_values = values;
    ritz_values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    RitzData {
        xi,
        ritz_values,
        ritz_vectors: None,
    }
}
