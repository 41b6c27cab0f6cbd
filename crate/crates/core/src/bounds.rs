//! Certified eigenvalue intervals, matching of Ritz values to eigenvalues,
//! gap-based localization, eigenvector error bounds and the Temple–Kato
//! lower bound.

use std::ops::Range;

use crate::angles::{eta_of, sin_theta_residual, AngleReport, SATURATION_TOL};
use crate::error::{Error, Result};
use crate::forms::{rayleigh_quotient, BlockSplit, OperatorRep, RitzData, Subspace};
use crate::linalg::{
    dot, norm2, psd_function, psd_pinv_sqrt, psd_sqrt, symmetric_eig, DenseMatrix,
};
use crate::scalar::Real;
use crate::tolerances::Tolerances;

/// Values below this multiple of the largest magnitude count as zero when
/// forming relative errors.
pub const ZERO_TOL: f64 = 1e-12;

/// Gap below which an eigenvector bound is left undefined, relative to the
/// largest value involved.
pub const DEGENERATE_GAP: f64 = 1e-14;

/// `[μ(1 - s), μ(1 + s)]` together with the `λ`-relative radius `s/(1 - s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeInterval<T> {
    pub mu: T,
    pub lo: T,
    pub hi: T,
    /// Bound on `|λ - μ| / λ`.
    pub lambda_relative: T,
}

impl<T: Real> RelativeInterval<T> {
    pub fn contains(&self, lambda: T, slack: T) -> bool {
        lambda >= self.lo - slack && lambda <= self.hi + slack
    }
}

pub fn relative_interval<T: Real>(mu: T, sin_theta_p: T) -> Result<RelativeInterval<T>> {
    let eta = eta_of(sin_theta_p).ok_or_else(|| {
        Error::NotApplicable(format!(
            "sinΘ_p = {sin_theta_p} leaves no relative interval"
        ))
    })?;
    Ok(RelativeInterval {
        mu,
        lo: mu * (T::one() - sin_theta_p),
        hi: mu * (T::one() + sin_theta_p),
        lambda_relative: eta,
    })
}

/// `|λ - μ| / μ` with `0/0 = 0` and `x/0 = ∞`, values at or below `zero`
/// counting as zero.
pub fn relative_error<T: Real>(lambda: T, mu: T, zero: T) -> T {
    let lz = lambda.abs() <= zero;
    let mz = mu.abs() <= zero;
    match (lz, mz) {
        (true, true) => T::zero(),
        (false, true) => T::infinity(),
        _ => (lambda - mu).abs() / mu,
    }
}

fn zero_threshold<T: Real>(a: &[T], b: &[T]) -> T {
    let m = a.iter().chain(b).fold(T::zero(), |m, x| m.max(x.abs()));
    T::tol(ZERO_TOL) * m
}

/// Order-preserving assignment of Ritz values to reference eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport<T> {
    /// Zero-based index into the reference list for each Ritz value.
    pub indices: Vec<usize>,
    pub per_pair_rel_error: Vec<T>,
    pub max_rel_error: T,
    /// `per_pair_rel_error[j] <= sinΘ_p + 1e-12`.
    pub bound_satisfied: Vec<bool>,
}

/// Bottleneck matching: among increasing index maps `j -> i_j`, the one
/// minimizing `max_j |λ_{i_j} - μ_j| / μ_j`.
///
/// Binary search over the candidate thresholds; a threshold is feasible when
/// the greedy scan that gives each Ritz value the earliest admissible
/// eigenvalue succeeds.
pub fn match_ritz<T: Real>(ritz: &[T], eigs: &[T], sin_theta_p: T) -> Result<MatchReport<T>> {
    let (n, m) = (ritz.len(), eigs.len());
    if n > m {
        return Err(Error::InsufficientEigenvalues {
            needed: n,
            available: m,
        });
    }
    let zero = zero_threshold(ritz, eigs);
    let rel = |p: usize, k: usize| relative_error(eigs[p], ritz[k], zero);

    let mut candidates: Vec<T> = (0..n)
        .flat_map(|k| (k..=(m - n + k)).map(move |p| (p, k)))
        .map(|(p, k)| rel(p, k))
        .collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("relative errors are not NaN"));
    candidates.dedup();

    let greedy = |t: T| -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(n);
        let mut p = 0;
        for k in 0..n {
            while p < m && rel(p, k) > t {
                p += 1;
            }
            if p + (n - k) > m {
                return None;
            }
            out.push(p);
            p += 1;
        }
        Some(out)
    };

    let (mut lo, mut hi) = (0usize, candidates.len().saturating_sub(1));
    let mut best = greedy(candidates.get(hi).copied().unwrap_or_else(T::zero))
        .expect("the largest candidate threshold is feasible");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match greedy(candidates[mid]) {
            Some(found) => {
                best = found;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    if let Some(found) = candidates.get(lo).and_then(|&t| greedy(t)) {
        best = found;
    }

    let per_pair: Vec<T> = best.iter().enumerate().map(|(k, &p)| rel(p, k)).collect();
    let max_rel_error = per_pair.iter().fold(T::zero(), |a, &b| a.max(b));
    let slack = T::tol(ZERO_TOL);
    Ok(MatchReport {
        bound_satisfied: per_pair.iter().map(|&e| e <= sin_theta_p + slack).collect(),
        indices: best,
        per_pair_rel_error: per_pair,
        max_rel_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalizationMode {
    /// The Ritz values approximate the lowest eigenvalues.
    Lower,
    /// The Ritz values approximate the eigenvalues starting at this
    /// zero-based offset.
    Inner { offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremApplies {
    LowerBlock,
    InnerBlock,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport<T> {
    pub mode: LocalizationMode,
    /// `min_{k, p ≥ n} (λ_p - μ_k) / (λ_p + μ_k)`, one for an empty tail.
    pub gamma_r: Option<T>,
    /// Two-sided gap around an inner block, capped at one.
    pub gamma_c: Option<T>,
    pub eta_theta_p: Option<T>,
    pub applies: TheoremApplies,
    /// Zero-based block of reference indices the Ritz values approximate.
    pub matched_range: Option<Range<usize>>,
    /// Whether `|λ - μ| <= μ sinΘ_p` holds pairwise on the matched block.
    pub pair_bounds_hold: Option<bool>,
}

fn gap_ratio<T: Real>(num: T, den: T) -> T {
    if den == T::zero() {
        T::zero()
    } else {
        num / den
    }
}

/// Decides whether the gap conditions certify that the Ritz values
/// approximate a contiguous block of eigenvalues.
pub fn localize<T: Real>(
    ritz: &[T],
    eigs: &[T],
    sin_theta_p: T,
    mode: LocalizationMode,
) -> LocalizationReport<T> {
    let n = ritz.len();
    let eta = eta_of(sin_theta_p);
    let slack = T::tol(ZERO_TOL)
        * eigs
            .iter()
            .chain(ritz)
            .fold(T::zero(), |m, x| m.max(x.abs()));
    let pair_check = |range: &Range<usize>| {
        range
            .clone()
            .zip(ritz)
            .all(|(p, &mu)| (eigs[p] - mu).abs() <= mu * sin_theta_p + slack)
    };
    match mode {
        LocalizationMode::Lower => {
            let gamma_r = if n > eigs.len() {
                None
            } else {
                let g = ritz
                    .iter()
                    .flat_map(|&mu| eigs[n..].iter().map(move |&l| gap_ratio(l - mu, l + mu)))
                    .fold(T::one(), T::min);
                Some(g)
            };
            let applies = match (gamma_r, eta) {
                (Some(g), Some(e)) if e < g.min(T::one()) => TheoremApplies::LowerBlock,
                _ => TheoremApplies::None,
            };
            let matched_range = (applies == TheoremApplies::LowerBlock).then_some(0..n);
            LocalizationReport {
                mode,
                gamma_r,
                gamma_c: None,
                eta_theta_p: eta,
                applies,
                pair_bounds_hold: matched_range.as_ref().map(pair_check),
                matched_range,
            }
        }
        LocalizationMode::Inner { offset } => {
            let gamma_c = if offset + n > eigs.len() {
                None
            } else {
                let below = eigs[..offset]
                    .iter()
                    .flat_map(|&l| ritz.iter().map(move |&mu| gap_ratio(mu - l, l + mu)));
                let above = eigs[offset + n..]
                    .iter()
                    .flat_map(|&l| ritz.iter().map(move |&mu| gap_ratio(l - mu, l + mu)));
                Some(below.chain(above).fold(T::one(), T::min))
            };
            let applies = match (gamma_c, eta) {
                (Some(g), Some(e)) if e < g => TheoremApplies::InnerBlock,
                _ => TheoremApplies::None,
            };
            let matched_range = (applies == TheoremApplies::InnerBlock).then(|| offset..offset + n);
            LocalizationReport {
                mode,
                gamma_r: None,
                gamma_c,
                eta_theta_p: eta,
                applies,
                pair_bounds_hold: matched_range.as_ref().map(pair_check),
                matched_range,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TempleKato<T> {
    pub mu: T,
    pub gamma: T,
    /// `‖Hu‖² - μ²`.
    pub residual_sq: T,
    pub bound: T,
    /// The bound carries no information for a nonnegative operator.
    pub vacuous: bool,
}

/// `μ - (‖Hu‖² - μ²) / (γ - μ)` for a unit vector `u` with `μ = u^T H u < γ`.
pub fn temple_kato<T: Real>(op: &OperatorRep<T>, u: &[T], gamma: T) -> Result<TempleKato<T>> {
    let h = op.matrix()?;
    if u.len() != h.rows() {
        return Err(Error::dims("temple_kato", h.rows(), u.len()));
    }
    let nrm = norm2(u);
    if (nrm - T::one()).abs() > T::tol(1e-12) {
        return Err(Error::InvalidArgument(format!(
            "test vector must be normalized, has norm {nrm}"
        )));
    }
    let hu = h.matvec(u);
    let mu = dot(u, &hu);
    if !(gamma > mu) {
        return Err(Error::GammaNotAboveMu {
            gamma: gamma.as_f64(),
            mu: mu.as_f64(),
        });
    }
    let residual_sq = (dot(&hu, &hu) - mu * mu).max(T::zero());
    let bound = mu - residual_sq / (gamma - mu);
    Ok(TempleKato {
        mu,
        gamma,
        residual_sq,
        bound,
        vacuous: bound <= T::zero(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigvecBoundReport<T> {
    /// `√2 s/√(1-s) · max_{p ≠ i_j} √(μ_j λ_p)/|λ_p - μ_j|`; `None` where a gap
    /// degenerates.
    pub bounds: Vec<Option<T>>,
    /// `‖v_j - u_j‖` after aligning signs, where eigenvectors were supplied.
    pub actual: Vec<Option<T>>,
}

/// Eigenvector error bounds for matched Ritz pairs.
///
/// `eigs` is the full reference spectrum and `matched[j]` the index matched
/// to `ritz[j]`; the maximum runs over every other reference eigenvalue.
/// When `vectors` holds `(ritz_vectors, eigenvectors)` the actual errors are
/// measured against the matched eigenvector columns.
pub fn eigenvector_bounds<T: Real>(
    ritz: &[T],
    eigs: &[T],
    matched: &[usize],
    sin_theta_p: T,
    vectors: Option<(&DenseMatrix<T>, &DenseMatrix<T>)>,
) -> Result<EigvecBoundReport<T>> {
    if matched.len() != ritz.len() {
        return Err(Error::dims("eigenvector_bounds", ritz.len(), matched.len()));
    }
    if sin_theta_p >= T::one() - T::tol(SATURATION_TOL) {
        return Err(Error::NotApplicable(
            "sinΘ_p = 1 leaves eigenvectors unconstrained".into(),
        ));
    }
    let front = T::SQRT_2() * sin_theta_p / (T::one() - sin_theta_p).sqrt();
    let bounds = ritz
        .iter()
        .zip(matched)
        .map(|(&mu, &ij)| {
            let others = eigs
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != ij)
                .map(|(_, &l)| l);
            eigvec_bound_factor(mu, others).map(|f| front * f)
        })
        .collect();
    let actual = match vectors {
        Some((u, v)) => ritz
            .iter()
            .enumerate()
            .map(|(j, _)| Some(aligned_distance(&v.column(matched[j]), &u.column(j))))
            .collect(),
        None => vec![None; ritz.len()],
    };
    Ok(EigvecBoundReport { bounds, actual })
}

/// `max_p √(μ λ_p)/|λ_p - μ|` over the given eigenvalues; `None` when some
/// `λ_p` is within `1e-14 max(λ, μ)` of `μ`. Zero for an empty list.
pub fn eigvec_bound_factor<T: Real>(mu: T, others: impl Iterator<Item = T>) -> Option<T> {
    let mut best = T::zero();
    for l in others {
        let gap = (l - mu).abs();
        if gap <= T::tol(DEGENERATE_GAP) * l.abs().max(mu.abs()) {
            return None;
        }
        best = best.max((mu * l).max(T::zero()).sqrt() / gap);
    }
    Some(best)
}

/// `‖v - u‖` after flipping `v` so that `⟨v, u⟩ ≥ 0`; `√2` for orthogonal pairs.
pub fn aligned_distance<T: Real>(v: &[T], u: &[T]) -> T {
    let ip = dot(v, u);
    if ip == T::zero() {
        return T::SQRT_2();
    }
    let sign = ip.signum();
    v.iter()
        .zip(u)
        .map(|(&a, &b)| {
            let d = sign * a - b;
            d * d
        })
        .sum::<T>()
        .sqrt()
}

/// `S = H^{1/2} H'^{†1/2} - H^{†1/2} H'^{1/2}`.
pub fn s_operator<T: Real>(
    op: &OperatorRep<T>,
    split: &BlockSplit<T>,
    tol: &Tolerances<T>,
) -> Result<DenseMatrix<T>> {
    let d = op.spectrum()?;
    let rank_tol = tol.rank_tol_for(d.len());
    let hp = symmetric_eig(&split.h_prime)?;
    let a = psd_sqrt(d, rank_tol).matmul(&psd_pinv_sqrt(&hp, rank_tol));
    let b = psd_function(d, rank_tol, |l| T::one() / l.sqrt()).matmul(&psd_sqrt(&hp, rank_tol));
    Ok(&a - &b)
}

/// `s / √(1 - s)`, the bound on `‖S‖`.
pub fn s_operator_bound<T: Real>(sin_theta_p: T) -> T {
    sin_theta_p / (T::one() - sin_theta_p).sqrt()
}

/// Everything that can be certified about a test subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub ritz: RitzData<T>,
    pub angles: AngleReport<T>,
    /// Reference spectrum of `H`, ascending.
    pub eigenvalues: Vec<T>,
    /// `None` when `sinΘ_p` saturates.
    pub intervals: Option<Vec<RelativeInterval<T>>>,
    pub matching: MatchReport<T>,
    pub localization: LocalizationReport<T>,
    pub eigenvectors: Option<EigvecBoundReport<T>>,
    /// Temple–Kato on the lowest Ritz vector, or why it was skipped.
    pub temple_kato: std::result::Result<TempleKato<T>, String>,
}

impl<T: Real> Certificate<T> {
    pub fn bounds_applicable(&self) -> bool {
        self.angles.bounds_applicable()
    }
}

/// Runs the full pipeline: Rayleigh quotient, block split, residual
/// measures, intervals, matching, lower-block localization, eigenvector
/// bounds and Temple–Kato. `gamma` defaults to the second reference
/// eigenvalue.
pub fn certify<T: Real>(
    op: &OperatorRep<T>,
    sub: &Subspace<T>,
    tol: &Tolerances<T>,
    gamma: Option<T>,
) -> Result<Certificate<T>> {
    let ritz = rayleigh_quotient(op, sub)?;
    let angles = sin_theta_residual(op, sub, tol)?;
    let spectrum = op.spectrum()?;
    let eigenvalues = spectrum.eigenvalues.clone();
    let s = angles.sin_theta_p;
    let intervals = angles.bounds_applicable().then(|| {
        ritz.ritz_values
            .iter()
            .map(|&mu| relative_interval(mu, s).expect("applicable"))
            .collect()
    });
    let matching = match_ritz(&ritz.ritz_values, &eigenvalues, s)?;
    let localization = localize(&ritz.ritz_values, &eigenvalues, s, LocalizationMode::Lower);
    let eigenvectors = if angles.bounds_applicable() {
        let vectors = ritz
            .ritz_vectors
            .as_ref()
            .map(|u| (u, &spectrum.eigenvectors));
        Some(eigenvector_bounds(
            &ritz.ritz_values,
            &eigenvalues,
            &matching.indices,
            s,
            vectors,
        )?)
    } else {
        None
    };
    let temple_kato = match (
        gamma.or_else(|| eigenvalues.get(1).copied()),
        &ritz.ritz_vectors,
    ) {
        (Some(g), Some(u)) => temple_kato(op, &u.column(0), g).map_err(|e| e.to_string()),
        (None, _) => Err("no second eigenvalue to serve as the gap parameter".into()),
        (_, None) => Err("no Ritz vector".into()),
    };
    Ok(Certificate {
        ritz,
        angles,
        eigenvalues,
        intervals,
        matching,
        localization,
        eigenvectors,
        temple_kato,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{block_split, graded_family, graded_family_eigenvalues};
    use crate::random::{
        matrix_with_spectrum, random_orthonormal_columns, random_spectrum, random_unit_vector,
        rng_from_seed,
    };
    use proptest::prelude::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    /// Exhaustive bottleneck over every injection, ordered or not.
    fn brute_force(ritz: &[f64], eigs: &[f64]) -> f64 {
        fn go(k: usize, ritz: &[f64], eigs: &[f64], used: &mut Vec<bool>, zero: f64) -> f64 {
            if k == ritz.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for p in 0..eigs.len() {
                if used[p] {
                    continue;
                }
                used[p] = true;
                let e =
                    relative_error(eigs[p], ritz[k], zero).max(go(k + 1, ritz, eigs, used, zero));
                used[p] = false;
                best = best.min(e);
            }
            best
        }
        let zero = zero_threshold(ritz, eigs);
        go(0, ritz, eigs, &mut vec![false; eigs.len()], zero)
    }

    #[test]
    fn interval_examples() {
        let s = 1.0 / 101f64.sqrt();
        let i = relative_interval(0.01, s).unwrap();
        assert!((i.lo - 0.009004962810).abs() < 1e-12);
        let s3 = 1.0 / 901f64.sqrt();
        assert!((relative_interval(0.01, s3).unwrap().lo - 0.009666851698).abs() < 1e-12);
        let z = relative_interval(2.0, 0.0).unwrap();
        assert_eq!((z.lo, z.hi), (2.0, 2.0));
        assert!(matches!(
            relative_interval(1.0, 1.0),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn graded_family_match() {
        let (l1, l2) = graded_family_eigenvalues(1.0);
        let m = match_ritz::<f64>(&[0.01], &[l1, l2], 0.0995).unwrap();
        assert_eq!(m.indices, vec![0]);
        assert!((m.max_rel_error - 0.00999900).abs() < 1e-8);
        assert_eq!(m.bound_satisfied, vec![true]);
    }

    #[test]
    fn invariant_match_is_identity() {
        let m = match_ritz(&[1.0, 3.0], &[1.0, 3.0, 7.0], 0.0).unwrap();
        assert_eq!(m.indices, vec![0, 1]);
        assert_eq!(m.max_rel_error, 0.0);
        let m = match_ritz(&[3.0, 7.0], &[1.0, 3.0, 7.0], 0.0).unwrap();
        assert_eq!(m.indices, vec![1, 2]);
        assert!(matches!(
            match_ritz(&[1.0, 2.0], &[1.0], 0.0),
            Err(Error::InsufficientEigenvalues { .. })
        ));
    }

    #[test]
    fn kernel_values_match_first() {
        let m = match_ritz::<f64>(&[0.0, 2.0], &[0.0, 0.0, 2.1, 5.0], 0.1).unwrap();
        assert_eq!(m.per_pair_rel_error[0], 0.0);
        assert!((m.max_rel_error - 0.05).abs() < 1e-12);
        let m = match_ritz(&[0.0], &[1.0, 2.0], 0.1).unwrap();
        assert_eq!(m.max_rel_error, f64::INFINITY);
    }

    #[test]
    fn matcher_equals_brute_force_on_random_spd() {
        let mut rng = rng_from_seed(30);
        for _ in 0..30 {
            let spec = random_spectrum::<f64, _>(&mut rng, 7, 0.1, 10.0);
            let (h, _) = matrix_with_spectrum(&mut rng, &spec);
            let op = OperatorRep::explicit(h, &tol()).unwrap();
            let sub = Subspace::new(&random_orthonormal_columns(&mut rng, 7, 3), 1e-12).unwrap();
            let r = rayleigh_quotient(&op, &sub).unwrap();
            let eigs = &op.spectrum().unwrap().eigenvalues;
            let m = match_ritz(&r.ritz_values, eigs, 0.5).unwrap();
            let bf = brute_force(&r.ritz_values, eigs);
            assert!(
                (m.max_rel_error - bf).abs() <= 1e-14 * bf.max(1.0),
                "{} vs {bf}",
                m.max_rel_error
            );
        }
    }

    proptest! {
        #[test]
        fn matcher_is_optimal(mut ritz in prop::collection::vec(0.0f64..10.0, 1..4),
                              mut eigs in prop::collection::vec(0.0f64..10.0, 4..7)) {
            ritz.sort_by(|a, b| a.partial_cmp(b).unwrap());
            eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let m = match_ritz(&ritz, &eigs, 0.5).unwrap();
            let bf = brute_force(&ritz, &eigs);
            prop_assert!(m.indices.windows(2).all(|w| w[0] < w[1]));
            if bf.is_finite() {
                prop_assert!((m.max_rel_error - bf).abs() <= 1e-12 * bf.max(1.0));
            } else {
                prop_assert!(m.max_rel_error.is_infinite());
            }
        }
    }

    #[test]
    fn lower_localization_on_graded_family() {
        let (l1, l2) = graded_family_eigenvalues(1.0);
        let s = 1.0 / 101f64.sqrt();
        let r = localize(&[0.01], &[l1, l2], s, LocalizationMode::Lower);
        let g = r.gamma_r.unwrap();
        assert!((g - (l2 - 0.01) / (l2 + 0.01)).abs() < 1e-15);
        assert!((g - 0.980394).abs() < 1e-6);
        assert!((r.eta_theta_p.unwrap() - 0.110499).abs() < 1e-6);
        assert_eq!(r.applies, TheoremApplies::LowerBlock);
        assert_eq!(r.matched_range, Some(0..1));
        assert_eq!(r.pair_bounds_hold, Some(true));
    }

    #[test]
    fn zero_residual_localizes() {
        let r = localize(&[1.0, 2.0], &[1.0, 2.0, 3.0], 0.0, LocalizationMode::Lower);
        assert_eq!(r.eta_theta_p, Some(0.0));
        assert_eq!(r.applies, TheoremApplies::LowerBlock);
        let r = localize(&[1.0], &[1.0], 0.0, LocalizationMode::Lower);
        assert_eq!(r.gamma_r, Some(1.0));
    }

    #[test]
    fn inner_localization_example() {
        let r = localize(
            &[2.05],
            &[1.0, 2.0, 3.0, 4.0],
            0.1 / 1.1,
            LocalizationMode::Inner { offset: 1 },
        );
        let want = ((2.05 - 1.0) / 3.05f64)
            .min((3.0 - 2.05) / 5.05)
            .min((4.0 - 2.05) / 6.05);
        assert!((r.gamma_c.unwrap() - want).abs() < 1e-15);
        assert!((r.gamma_c.unwrap() - 0.188).abs() < 1e-3);
        assert!((r.eta_theta_p.unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(r.applies, TheoremApplies::InnerBlock);
        assert_eq!(r.matched_range, Some(1..2));
        let r = localize(
            &[2.05],
            &[1.0, 2.0, 3.0, 4.0],
            0.5,
            LocalizationMode::Inner { offset: 1 },
        );
        assert_eq!(r.applies, TheoremApplies::None);
    }

    #[test]
    fn temple_kato_examples() {
        let op = OperatorRep::explicit(graded_family(1.0), &tol()).unwrap();
        let (l1, l2) = graded_family_eigenvalues(1.0);
        let tk = temple_kato(&op, &[1.0, 0.0], l2).unwrap();
        assert!((tk.bound - (0.01 - 1e-4 / (l2 - 0.01))).abs() < 1e-15);
        assert!((tk.bound - 0.009900009999).abs() < 1e-12);
        assert!(tk.bound <= l1 + 1e-12);
        let q = &op.spectrum().unwrap().eigenvectors;
        let tk = temple_kato(&op, &q.column(0), l2).unwrap();
        assert!((tk.bound - l1).abs() < 1e-15);
        assert!(matches!(
            temple_kato(&op, &[1.0, 0.0], 0.005),
            Err(Error::GammaNotAboveMu { .. })
        ));
        assert!(temple_kato(&op, &[2.0, 0.0], l2).is_err());
    }

    #[test]
    fn temple_kato_is_a_lower_bound() {
        let mut rng = rng_from_seed(31);
        let mut tried = 0;
        while tried < 50 {
            let spec = random_spectrum::<f64, _>(&mut rng, 6, 0.1, 10.0);
            let (h, _) = matrix_with_spectrum(&mut rng, &spec);
            let op = OperatorRep::explicit(h, &tol()).unwrap();
            let u: Vec<f64> = random_unit_vector(&mut rng, 6);
            let l = &op.spectrum().unwrap().eigenvalues;
            if let Ok(tk) = temple_kato(&op, &u, l[1]) {
                tried += 1;
                assert!(tk.bound <= l[0] + 1e-12, "{} > {}", tk.bound, l[0]);
            }
        }
    }

    #[test]
    fn eigenvector_bound_basics() {
        let r = eigenvector_bounds(&[1.0, 2.0], &[1.0, 2.0, 3.0], &[0, 1], 0.0, None).unwrap();
        assert_eq!(r.bounds, vec![Some(0.0), Some(0.0)]);
        assert_eq!(r.actual, vec![None, None]);
        let r = eigenvector_bounds(&[2.0], &[1.0, 2.0, 2.0], &[1], 0.1, None).unwrap();
        assert_eq!(r.bounds, vec![None]);
        assert!(eigenvector_bounds(&[1.0], &[1.0, 2.0], &[0], 1.0, None).is_err());
        assert_eq!(
            aligned_distance(&[1.0, 0.0], &[0.0, 1.0]),
            std::f64::consts::SQRT_2
        );
        assert!(aligned_distance(&[-1.0, 0.0], &[1.0, 0.0]) == 0.0);
    }

    #[test]
    fn eigenvector_bounds_hold_on_random_spd() {
        let mut rng = rng_from_seed(32);
        for _ in 0..20 {
            let lambda = [0.5, 1.0, 4.0, 6.0, 9.0, 15.0, 20.0, 30.0, 45.0, 60.0];
            let (h, q) = matrix_with_spectrum(&mut rng, &lambda);
            let op = OperatorRep::explicit(h, &tol()).unwrap();
            let noise = crate::random::random_gaussian::<f64, _>(&mut rng, 10, 2).scale(0.002);
            let x = &q.select_columns(&[0, 1]) + &noise;
            let sub = Subspace::new(&x, 1e-12).unwrap();
            let c = certify(&op, &sub, &tol(), None).unwrap();
            let ev = c.eigenvectors.unwrap();
            for (b, a) in ev.bounds.iter().zip(&ev.actual) {
                assert!(a.unwrap() <= b.unwrap() + 1e-10, "{a:?} > {b:?}");
            }
            assert_eq!(c.localization.applies, TheoremApplies::LowerBlock);
            assert_eq!(c.matching.indices, vec![0, 1]);
        }
    }

    #[test]
    fn s_operator_norm_and_elements() {
        let mut rng = rng_from_seed(33);
        for _ in 0..10 {
            let spec = random_spectrum::<f64, _>(&mut rng, 6, 0.1, 10.0);
            let (h, _) = matrix_with_spectrum(&mut rng, &spec);
            let op = OperatorRep::explicit(h, &tol()).unwrap();
            let sub = Subspace::new(&random_orthonormal_columns(&mut rng, 6, 2), 1e-12).unwrap();
            let split = block_split(&op, &sub).unwrap();
            let a = sin_theta_residual(&op, &sub, &tol()).unwrap();
            let s = s_operator(&op, &split, &tol()).unwrap();
            let nrm = crate::linalg::spectral_norm(&s).unwrap();
            assert!(nrm <= s_operator_bound(a.sin_theta_p) + 1e-10);

            let hd = op.spectrum().unwrap();
            let hp = symmetric_eig(&split.h_prime).unwrap();
            for i in 0..6 {
                for k in 0..6 {
                    let v = hd.eigenvectors.column(i);
                    let u = hp.eigenvectors.column(k);
                    let (l, m) = (hd.eigenvalues[i], hp.eigenvalues[k]);
                    let lhs = dot(&v, &s.matvec(&u));
                    let rhs = (l - m) / (l * m).sqrt() * dot(&v, &u);
                    assert!(
                        (lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()),
                        "{lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn certify_graded_family() {
        let op = OperatorRep::explicit(graded_family(2.0), &tol()).unwrap();
        let c = certify(&op, &Subspace::coordinate(2, &[0]), &tol(), None).unwrap();
        assert!(c.bounds_applicable());
        let tk = c.temple_kato.unwrap();
        assert!((tk.bound - 0.009975).abs() < 1e-6);
        assert!(c.intervals.unwrap()[0].contains(c.eigenvalues[0], 0.0));
    }

    #[test]
    fn certify_all_ones_reports_not_applicable() {
        let h = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let op = OperatorRep::explicit(h, &tol()).unwrap();
        let c = certify(&op, &Subspace::coordinate(2, &[0]), &tol(), None).unwrap();
        assert!(!c.bounds_applicable());
        assert!(c.intervals.is_none());
        assert!(c.eigenvectors.is_none());
        assert_eq!(c.localization.applies, TheoremApplies::None);
    }
}
