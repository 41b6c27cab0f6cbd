use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::default_rank_tol;
use crate::scalar::Real;

/// Numerical thresholds shared by every stage of a certification run.
///
/// A `rank_tol` of `None` selects `max(rows, cols) * ε` for whichever matrix
/// is being decomposed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T> {
    pub rank_tol: Option<T>,
    pub sym_tol: T,
    pub quad_tol: T,
    pub secular_tol: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            rank_tol: None,
            sym_tol: T::tol(1e-12),
            quad_tol: T::tol(1e-10),
            secular_tol: T::tol(1e-12),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn with_rank_tol(mut self, rank_tol: T) -> Self {
        self.rank_tol = Some(rank_tol);
        self
    }

    /// Rank threshold for an `n x n` decomposition.
    pub fn rank_tol_for(&self, n: usize) -> T {
        self.rank_tol.unwrap_or_else(|| default_rank_tol(n, n))
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("rank tolerance", self.rank_tol.unwrap_or_else(T::one)),
            ("symmetry tolerance", self.sym_tol),
            ("quadrature tolerance", self.quad_tol),
            ("secular tolerance", self.secular_tol),
        ];
        for (name, v) in named {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let t = Tolerances::<f64>::default();
        assert!(t.validate().is_ok());
        assert_eq!(t.rank_tol_for(4), 4.0 * f64::EPSILON);
        assert_eq!(t.with_rank_tol(1e-9).rank_tol_for(4), 1e-9);
    }

    #[test]
    fn rejects_nonpositive() {
        let t = Tolerances::<f64> {
            quad_tol: 0.0,
            ..Default::default()
        };
        assert!(t.validate().is_err());
    }
}
