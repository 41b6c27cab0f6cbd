use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::string_model::StringSpec;

const MAX_POLES: usize = 10_000_000;
const MAX_BISECTIONS: usize = 400;

/// Which cotangent carries the factor `c = √(1 + η²)` in
/// `a cot(√λ) + b cot(√λ / c) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecularForm {
    /// `cot(√λ) + c cot(√λ/c) = 0`, the form implied by continuity of `u`
    /// and of `p u'` at `x = 1`.
    Transmission,
    /// `c cot(√λ) + cot(√λ/c) = 0`, with the coefficients exchanged.
    Swapped,
}

impl SecularForm {
    fn coefficients<T: Real>(self, c: T) -> (T, T) {
        match self {
            SecularForm::Transmission => (T::one(), c),
            SecularForm::Swapped => (c, T::one()),
        }
    }
}

/// First `count` roots `λ` of the chosen secular equation, ascending.
///
/// In `s = √λ` the function `a cot s + b cot(s/c)` decreases strictly from
/// `+∞` to `-∞` between consecutive poles of `{mπ} ∪ {mcπ}`, so each
/// inter-pole interval holds exactly one root, found by bisection. A point
/// where two poles coincide is itself a root of the regularized equation.
pub fn secular_roots<T: Real>(
    spec: &StringSpec<T>,
    count: usize,
    form: SecularForm,
    tol: T,
) -> Result<Vec<T>> {
    let c = spec.contrast().sqrt();
    let (a, b) = form.coefficients(c);
    let g = |s: T| a / s.tan() + b / (s / c).tan();
    let pi = T::PI();
    let coincide = T::tol(1e-12);

    let mut roots = Vec::with_capacity(count);
    let (mut i, mut j) = (1usize, 1usize);
    let mut prev = T::zero();
    let mut scanned = 0;
    while roots.len() < count {
        scanned += 1;
        if scanned > MAX_POLES {
            return Err(Error::BracketFailure {
                index: roots.len() + 1,
                reason: format!("no bracket among the first {MAX_POLES} poles"),
            });
        }
        let p1 = T::c(i as f64) * pi;
        let p2 = T::c(j as f64) * c * pi;
        let (pole, double) = if (p1 - p2).abs() <= coincide * p1.max(p2) {
            i += 1;
            j += 1;
            (p1.min(p2), true)
        } else if p1 < p2 {
            i += 1;
            (p1, false)
        } else {
            j += 1;
            (p2, false)
        };
        let root = bisect_decreasing(&g, prev, pole, tol).ok_or_else(|| Error::BracketFailure {
            index: roots.len() + 1,
            reason: format!("no sign change between poles {prev} and {pole}"),
        })?;
        roots.push(root * root);
        if double && roots.len() < count {
            roots.push(pole * pole);
        }
        prev = pole;
    }
    Ok(roots)
}

/// Root of a function that decreases from `+∞` at `lo` to `-∞` at `hi`.
fn bisect_decreasing<T: Real>(g: &impl Fn(T) -> T, lo: T, hi: T, tol: T) -> Option<T> {
    let (mut lo, mut hi) = (lo, hi);
    let mut seen_pos = false;
    let mut seen_neg = false;
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + (hi - lo) / T::c(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid);
        if v.is_nan() {
            return None;
        }
        if v > T::zero() {
            seen_pos = true;
            lo = mid;
        } else {
            seen_neg = true;
            hi = mid;
        }
        if hi - lo <= tol * hi {
            break;
        }
    }
    // A bracket that never saw one of the signs collapsed onto a pole.
    (seen_pos || seen_neg).then(|| lo + (hi - lo) / T::c(2.0))
}

/// Eigenpair `k` of the string.
///
/// The eigenfunction is `N sin(k_L x)` on `[0, 1]` and
/// `N B sin(k_R (2 - x))` on `[1, 2]`, which vanishes at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringEig<T> {
    /// One-based index.
    pub index: usize,
    pub lambda: T,
    /// `√λ`.
    pub k_left: T,
    /// `√(λ / (1 + η²))`.
    pub k_right: T,
    /// Amplitude `B` of the right piece relative to the left.
    pub amplitude: T,
    /// `N`, making the eigenfunction a unit vector in `L²(0, 2)`.
    pub scale: T,
    contrast: T,
}

impl<T: Real> StringEig<T> {
    fn from_lambda(index: usize, lambda: T, spec: &StringSpec<T>) -> Self {
        let contrast = spec.contrast();
        let c = contrast.sqrt();
        let k_left = lambda.sqrt();
        let k_right = k_left / c;
        let (sr, cr) = (k_right.sin(), k_right.cos());
        // Use whichever matching condition is better conditioned.
        let amplitude = if sr.abs() >= cr.abs() {
            k_left.sin() / sr
        } else {
            -k_left.cos() / (c * cr)
        };
        let two = T::c(2.0);
        let four = T::c(4.0);
        let left = T::one() / two - (two * k_left).sin() / (four * k_left);
        let right = T::one() / two - (two * k_right).sin() / (four * k_right);
        let scale = T::one() / (left + amplitude * amplitude * right).sqrt();
        Self {
            index,
            lambda,
            k_left,
            k_right,
            amplitude,
            scale,
            contrast,
        }
    }

    pub fn eval(&self, x: T) -> T {
        if x <= T::one() {
            self.scale * (self.k_left * x).sin()
        } else {
            self.scale * self.amplitude * (self.k_right * (T::c(2.0) - x)).sin()
        }
    }

    /// `p u'` at `x`; on the right piece the coefficient is `1 + η²`.
    pub fn flux(&self, x: T, right_side: bool) -> T {
        if !right_side && x <= T::one() {
            self.scale * self.k_left * (self.k_left * x).cos()
        } else {
            -self.contrast
                * self.scale
                * self.amplitude
                * self.k_right
                * (self.k_right * (T::c(2.0) - x)).cos()
        }
    }

    /// Jump of `u` across `x = 1`.
    pub fn value_residual(&self) -> T {
        let left = self.scale * self.k_left.sin();
        let right = self.scale * self.amplitude * self.k_right.sin();
        (left - right).abs()
    }

    /// Jump of `p u'` across `x = 1`, divided by `√λ`.
    pub fn flux_residual(&self) -> T {
        (self.flux(T::one(), false) - self.flux(T::one(), true)).abs() / self.k_left
    }

    /// `|cos s sin(s/c) + c sin s cos(s/c)| / (1 + c)` at `s = √λ`.
    pub fn secular_residual(&self) -> T {
        let c = self.contrast.sqrt();
        let s = self.k_left;
        (s.cos() * (s / c).sin() + c * s.sin() * (s / c).cos()).abs() / (T::one() + c)
    }
}

/// Eigenpair `k` (one-based) from the transmission form of the secular
/// equation.
pub fn secular_solve<T: Real>(spec: &StringSpec<T>, k: usize, tol: T) -> Result<StringEig<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "eigenvalues are numbered from 1".into(),
        ));
    }
    let roots = secular_roots(spec, k, SecularForm::Transmission, tol)?;
    Ok(StringEig::from_lambda(k, roots[k - 1], spec))
}
