use crate::bounds::eigvec_bound_factor;
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::scalar::Real;
use crate::string_model::{secular_solve, sin_theta_string, StringSpec, TestFunction};
use crate::tolerances::Tolerances;

/// The constant claimed in the uniform estimate
/// `‖v_1 - u_1‖ <= C / √(4 + η² - √(8 + 2η²))` for `η >= 2`.
pub const UNIFORM_CONSTANT: f64 = 1.333334;

/// Distance between the first eigenfunction and `u_1`, with its bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigvecError<T> {
    pub lambda1: T,
    pub lambda2: T,
    /// `sinΘ = √(2 / (4 + η²))` by quadrature.
    pub sin_theta: T,
    /// `‖v_1 - u_1‖` by quadrature, `v_1` normalized with `⟨v_1, u_1⟩ >= 0`.
    pub actual: T,
    /// `π√λ_2/(λ_2 - π²) · 2/√(4 + η² - √(8 + 2η²))`.
    pub bound: T,
    /// The general eigenvector bound at `μ = π²` with the tail starting at `λ_2`.
    pub generic_bound: T,
    /// `2π√λ_2/(λ_2 - π²)`, the factor the uniform estimate replaces by
    /// [`UNIFORM_CONSTANT`].
    pub uniform_factor: T,
    /// `UNIFORM_CONSTANT / √(4 + η² - √(8 + 2η²))`.
    pub uniform_bound: T,
}

pub fn string_eigvec_error<T: Real>(
    spec: &StringSpec<T>,
    tol: &Tolerances<T>,
) -> Result<EigvecError<T>> {
    let u = TestFunction::new(1)?;
    let mu = u.ritz_value::<T>();
    let v1 = secular_solve(spec, 1, tol.secular_tol)?;
    let v2 = secular_solve(spec, 2, tol.secular_tol)?;
    let (l1, l2) = (v1.lambda, v2.lambda);
    if !(l2 > mu) {
        return Err(Error::NotApplicable(format!(
            "second eigenvalue {l2} does not exceed the Ritz value {mu}"
        )));
    }
    let s = sin_theta_string(spec, 1, tol.quad_tol)?.sin_theta;
    if s >= T::one() {
        return Err(Error::NotApplicable(
            "sinΘ = 1 for the first test function".into(),
        ));
    }

    let (zero, one, two) = (T::zero(), T::one(), T::c(2.0));
    let q = tol.quad_tol;
    let overlap = integrate(|x| v1.eval(x) * u.eval(x), zero, one, q)?.value;
    let sign = if overlap >= zero { one } else { -one };
    let left = integrate(|x| (sign * v1.eval(x) - u.eval(x)).powi(2), zero, one, q)?.value;
    let right = integrate(|x| v1.eval(x).powi(2), one, two, q)?.value;
    let actual = (left + right).max(zero).sqrt();

    let e2 = spec.eta() * spec.eta();
    let four = T::c(4.0);
    let root = (four + e2 - (T::c(8.0) + two * e2).sqrt()).sqrt();
    let pi = T::PI();
    let bound = pi * l2.sqrt() / (l2 - mu) * two / root;
    // λ_p ≥ λ_2 > μ on the tail and √(μλ)/(λ - μ) decreases there.
    let factor = eigvec_bound_factor(mu, std::iter::once(l2)).ok_or_else(|| {
        Error::NotApplicable("second eigenvalue coincides with the Ritz value".into())
    })?;
    let generic_bound = T::SQRT_2() * s / (one - s).sqrt() * factor;
    Ok(EigvecError {
        lambda1: l1,
        lambda2: l2,
        sin_theta: s,
        actual,
        bound,
        generic_bound,
        uniform_factor: two * pi * l2.sqrt() / (l2 - mu),
        uniform_bound: T::c(UNIFORM_CONSTANT) / root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(eta: f64) -> EigvecError<f64> {
        string_eigvec_error(&StringSpec::new(eta).unwrap(), &Tolerances::default()).unwrap()
    }

    #[test]
    fn actual_error_within_bound() {
        for eta in [2.0, 5.0, 10.0, 50.0] {
            let e = run(eta);
            assert!(e.actual <= e.bound, "eta {eta}: {} > {}", e.actual, e.bound);
            assert!(((e.bound - e.generic_bound) / e.bound).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_decays_like_one_over_eta_and_error_like_its_square() {
        let (a, b) = (run(10.0), run(100.0));
        let bound_ratio = b.bound / a.bound;
        assert!((0.05..=0.2).contains(&bound_ratio), "{bound_ratio}");
        let ratio = b.actual / a.actual;
        assert!((0.005..=0.02).contains(&ratio), "{ratio}");
    }

    #[test]
    fn uniform_estimate_holds_for_the_actual_error() {
        for eta in [2.0, 3.0, 5.0, 10.0, 100.0] {
            let e = run(eta);
            assert!(e.actual <= e.uniform_bound, "eta {eta}");
        }
    }

    #[test]
    fn uniform_factor_tends_to_four_thirds_from_above() {
        let far = run(1e4);
        assert!((far.uniform_factor - 4.0 / 3.0).abs() < 1e-3);
        let near = run(2.0);
        assert!(near.uniform_factor > UNIFORM_CONSTANT);
    }
}
