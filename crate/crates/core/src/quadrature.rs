//! Composite Gauss–Legendre quadrature with panel doubling.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Points per panel.
pub const GAUSS_POINTS: usize = 16;

const MAX_DOUBLINGS: usize = 16;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Roots of `P_n` by Newton iteration from Chebyshev-like guesses; the
    /// computation runs in `f64` and is converted once.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(T::c).collect(),
            weights: weights.into_iter().map(T::c).collect(),
        }
    }

    /// The rule applied on `panels` equal subintervals of `[a, b]`.
    pub fn composite(&self, f: &impl Fn(T) -> T, a: T, b: T, panels: usize) -> T {
        let h = (b - a) / T::c(panels as f64);
        let half = h / T::c(2.0);
        let mut total = T::zero();
        for k in 0..panels {
            let mid = a + h * T::c(k as f64) + half;
            let s: T = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| w * f(mid + half * x))
                .sum();
            total = total + s * half;
        }
        total
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Value of an adaptive integral and the panel count that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub panels: usize,
}

/// Doubles the panel count until two successive values differ by less than
/// `tol`, absolutely or relative to the value, whichever is looser.
pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> Result<Integral<T>> {
    let rule = GaussLegendre::new(GAUSS_POINTS);
    let mut panels = 1;
    let mut prev = rule.composite(&f, a, b, panels);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let next = rule.composite(&f, a, b, panels);
        if (next - prev).abs() <= tol * next.abs().max(T::one()) {
            return Ok(Integral {
                value: next,
                panels,
            });
        }
        prev = next;
    }
    Err(Error::NoConvergence {
        algorithm: "composite Gauss-Legendre quadrature",
        sweeps: MAX_DOUBLINGS,
    })
}
