use crate::error::Result;
use crate::quadrature::integrate;
use crate::scalar::Real;
use crate::string_model::{StringSpec, TestFunction};

/// `(u_n, H_η^{-1} u_n)` and its excess over the limit value `1/(n²π²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenForm<T> {
    /// Quadrature value of `(u_n, w)` with `-(p w')' = u_n`.
    pub value: T,
    /// Quadrature value of `(u_n, w - u_n/(n²π²))`.
    pub difference: T,
    /// Closed form `(4 + η²) / ((2 + η²) n²π²)`.
    pub analytic: T,
    /// Closed form `2 / ((2 + η²) n²π²)`.
    pub analytic_difference: T,
}

/// Slope `D` of the solution of `-(p w')' = u_n`, `w(0) = w(2) = 0`:
/// `w = √2 sin(nπx)/(nπ)² + D x` on `[0, 1]` and `D (2 - x)` on `[1, 2]`,
/// with `D = -√2 (-1)^n / (nπ (2 + η²))` from continuity of `w` and `p w'`.
fn green_slope<T: Real>(spec: &StringSpec<T>, u: &TestFunction) -> T {
    let k = u.wave_number::<T>();
    let sign = if u.mode.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    };
    -T::SQRT_2() * sign / (k * (T::one() + spec.contrast()))
}

/// `w = H_η^{-1} u_n` in closed form.
pub fn green_solution<T: Real>(spec: &StringSpec<T>, u: &TestFunction, x: T) -> T {
    let d = green_slope(spec, u);
    if x <= T::one() {
        let k = u.wave_number::<T>();
        T::SQRT_2() * (k * x).sin() / (k * k) + d * x
    } else {
        d * (T::c(2.0) - x)
    }
}

pub fn green_quadratic_form<T: Real>(
    spec: &StringSpec<T>,
    mode: usize,
    quad_tol: T,
) -> Result<GreenForm<T>> {
    let u = TestFunction::new(mode)?;
    let d = green_slope(spec, &u);
    let product = |x: T| u.eval(x) * green_solution(spec, &u, x);
    let (zero, one, two) = (T::zero(), T::one(), T::c(2.0));
    let value = integrate(product, zero, one, quad_tol)?.value
        + integrate(product, one, two, quad_tol)?.value;
    let difference = integrate(|x: T| u.eval(x) * d * x, zero, one, quad_tol)?.value;
    let k2 = u.ritz_value::<T>();
    let e2 = spec.eta() * spec.eta();
    let analytic_difference = two / ((two + e2) * k2);
    Ok(GreenForm {
        value,
        difference,
        analytic: T::one() / k2 + analytic_difference,
        analytic_difference,
    })
}

/// `sinΘ` of the test function `u_n` for the string operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringSinTheta<T> {
    /// `(G - 1/(n²π²)) / G` by quadrature.
    pub sin_sq: T,
    pub sin_theta: T,
    /// `2 / (4 + η²)`.
    pub analytic_sin_sq: T,
}

pub fn sin_theta_string<T: Real>(
    spec: &StringSpec<T>,
    mode: usize,
    quad_tol: T,
) -> Result<StringSinTheta<T>> {
    let g = green_quadratic_form(spec, mode, quad_tol)?;
    let sin_sq = g.difference / g.value;
    let e2 = spec.eta() * spec.eta();
    Ok(StringSinTheta {
        sin_sq,
        sin_theta: sin_sq.max(T::zero()).sqrt(),
        analytic_sin_sq: T::c(2.0) / (T::c(4.0) + e2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(eta: f64) -> StringSpec<f64> {
        StringSpec::new(eta).unwrap()
    }

    #[test]
    fn green_solution_solves_the_boundary_problem() {
        let s = spec(3.0);
        let u = TestFunction::new(2).unwrap();
        assert!(green_solution(&s, &u, 0.0).abs() < 1e-16);
        assert!(green_solution(&s, &u, 2.0).abs() < 1e-16);
        let h = 1e-5;
        let left = (green_solution(&s, &u, 1.0) - green_solution(&s, &u, 1.0 - h)) / h;
        let right =
            s.contrast() * (green_solution(&s, &u, 1.0 + h) - green_solution(&s, &u, 1.0)) / h;
        assert!((left - right).abs() < 1e-4);
        // -w'' = u_n on the left piece
        let x = 0.3;
        let d2 = (green_solution(&s, &u, x + 1e-4) - 2.0 * green_solution(&s, &u, x)
            + green_solution(&s, &u, x - 1e-4))
            / 1e-8;
        assert!((-d2 - u.eval(x)).abs() < 1e-5);
    }

    #[test]
    fn green_form_closed_forms() {
        let g = green_quadratic_form(&spec(1.0), 1, 1e-12).unwrap();
        let want = 1.0 / (PI * PI) + 2.0 / (3.0 * PI * PI);
        assert!((g.value - want).abs() < 1e-12);
        assert!((g.value - 0.168869).abs() < 1e-6);
        for eta in [1.0, 2.0, 5.0, 10.0] {
            for n in 1..=3 {
                let g = green_quadratic_form(&spec(eta), n, 1e-12).unwrap();
                assert!(
                    ((g.difference - g.analytic_difference) / g.analytic_difference).abs() < 1e-10
                );
                assert!(((g.value - g.analytic) / g.analytic).abs() < 1e-10);
            }
        }
        let big = green_quadratic_form(&spec(1e6), 1, 1e-12).unwrap();
        assert!((big.value - 1.0 / (PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn string_sin_theta() {
        let s = sin_theta_string(&spec(2.0), 3, 1e-12).unwrap();
        assert!((s.sin_theta - 0.5).abs() < 1e-10);
        assert!(
            (sin_theta_string(&spec(1.0), 1, 1e-12)
                .unwrap()
                .analytic_sin_sq
                - 0.4)
                .abs()
                < 1e-15
        );
        assert!(sin_theta_string(&spec(1e8), 1, 1e-12).unwrap().sin_theta < 1e-7);
    }
}
