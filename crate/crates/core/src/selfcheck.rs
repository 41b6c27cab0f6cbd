//! Seeded randomized verification of the structural identities and
//! inequalities the certificates rest on.

use std::fmt::Write as _;

use rand::Rng;

use crate::angles::{canonical_angles, scaled_offdiag_norm, sin_theta_residual};
use crate::bounds::{
    certify, match_ritz, relative_error, s_operator, s_operator_bound, temple_kato,
};
use crate::error::Result;
use crate::forms::{block_split, operator_order_leq, rayleigh_quotient, OperatorRep, Subspace};
use crate::linalg::{dot, pinv, spectral_norm, symmetric_eig, DenseMatrix, SpectralDecomp};
use crate::random::{
    matrix_with_spectrum, random_gaussian, random_orthonormal_columns, random_spectrum,
    random_unit_vector, rng_from_seed, InstanceRng,
};
use crate::tolerances::Tolerances;

/// Largest ambient dimension of a random instance.
pub const MAX_DIM: usize = 12;
/// Largest test-subspace dimension.
pub const MAX_SUBSPACE_DIM: usize = 5;
/// Largest spectrum handed to the exhaustive matcher oracle.
pub const MAX_MATCHER_DIM: usize = 7;

const UNIT_VECTORS: usize = 20;

/// Pass counts and the worst observed excess for one property.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    /// Largest value of `lhs - rhs` over all checks; nonpositive when every
    /// inequality held without using its slack.
    pub worst_excess: f64,
    pub first_failure: Option<String>,
}

impl PropertyResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            passed: 0,
            worst_excess: f64::NEG_INFINITY,
            first_failure: None,
        }
    }

    /// Records `lhs <= rhs`.
    fn check(&mut self, instance: usize, lhs: f64, rhs: f64) {
        self.checked += 1;
        let excess = lhs - rhs;
        if excess.is_nan() {
            self.fail(instance, "NaN".into());
            return;
        }
        self.worst_excess = self.worst_excess.max(excess);
        if lhs <= rhs {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(format!("instance {instance}: {lhs:e} > {rhs:e}"));
        }
    }

    fn fail(&mut self, instance: usize, why: String) {
        self.checked += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(format!("instance {instance}: {why}"));
        }
    }

    fn record(&mut self, instance: usize, outcome: Result<()>) {
        if let Err(e) = outcome {
            self.fail(instance, e.to_string());
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.checked
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfcheckSummary {
    pub seed: u64,
    pub instances: usize,
    pub properties: Vec<PropertyResult>,
}

impl SelfcheckSummary {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::ok)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "selfcheck seed {} instances {}",
            self.seed, self.instances
        );
        let width = self
            .properties
            .iter()
            .map(|p| p.name.len())
            .max()
            .unwrap_or(0);
        for p in &self.properties {
            let worst = if p.worst_excess.is_finite() {
                format!("{:.3e}", p.worst_excess)
            } else {
                "-".into()
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>5}/{:<5}  worst excess {worst}  {}",
                p.name,
                p.passed,
                p.checked,
                if p.ok() { "pass" } else { "FAIL" }
            );
            if let Some(f) = &p.first_failure {
                let _ = writeln!(out, "{:<width$}  first failure: {f}", "");
            }
        }
        let _ = writeln!(
            out,
            "{}",
            if self.all_passed() {
                "all properties pass"
            } else {
                "FAILURES"
            }
        );
        out
    }
}

struct Instance {
    h: DenseMatrix<f64>,
    q: DenseMatrix<f64>,
    spectrum: Vec<f64>,
    x: DenseMatrix<f64>,
    positive_definite: bool,
}

fn random_instance(rng: &mut InstanceRng, index: usize) -> Instance {
    let n = rng.random_range(2..=MAX_DIM);
    let k = rng.random_range(1..=MAX_SUBSPACE_DIM.min(n - 1));
    let mut spectrum: Vec<f64> = random_spectrum(rng, n, 1e-2, 1e2);
    // Every fourth instance has a one-dimensional kernel.
    let positive_definite = index % 4 != 3;
    if !positive_definite {
        spectrum[0] = 0.0;
    }
    let (h, q) = matrix_with_spectrum(rng, &spectrum);
    // Alternate between arbitrary subspaces and perturbed eigenspaces; with a
    // kernel the perturbed eigenspace avoids it, so that ker H' = ker H.
    let x = if index.is_multiple_of(2) {
        random_orthonormal_columns(rng, n, k)
    } else {
        let eps = 10f64.powf(-rng.random_range(1.0..4.0));
        let first = usize::from(!positive_definite);
        let cols: Vec<usize> = (first..first + k).collect();
        let mut noise = random_gaussian::<f64, _>(rng, n, k).scale(eps);
        if !positive_definite {
            let v0 = q.column(0);
            for j in 0..k {
                let c = noise.column(j);
                let ip = dot(&c, &v0);
                let c: Vec<f64> = c.iter().zip(&v0).map(|(a, b)| a - ip * b).collect();
                noise.set_column(j, &c);
            }
        }
        &q.select_columns(&cols) + &noise
    };
    Instance {
        h,
        q,
        spectrum,
        x,
        positive_definite,
    }
}

struct Suite {
    moore_penrose: PropertyResult,
    invariance: PropertyResult,
    sandwich: PropertyResult,
    relative_sandwich: PropertyResult,
    isometry_norm: PropertyResult,
    kernel_equality: PropertyResult,
    dual_route: PropertyResult,
    scaled_offdiag: PropertyResult,
    s_operator: PropertyResult,
    matching: PropertyResult,
    matcher_oracle: PropertyResult,
    monotonicity: PropertyResult,
    temple_kato: PropertyResult,
    eigenvectors: PropertyResult,
}

impl Suite {
    fn new() -> Self {
        Self {
            moore_penrose: PropertyResult::new("moore_penrose"),
            invariance: PropertyResult::new("ritz_invariance"),
            sandwich: PropertyResult::new("form_sandwich"),
            relative_sandwich: PropertyResult::new("relative_sandwich"),
            isometry_norm: PropertyResult::new("isometry_norm"),
            kernel_equality: PropertyResult::new("kernel_equality"),
            dual_route: PropertyResult::new("dual_route"),
            scaled_offdiag: PropertyResult::new("scaled_offdiag_norm"),
            s_operator: PropertyResult::new("s_operator"),
            matching: PropertyResult::new("relative_matching"),
            matcher_oracle: PropertyResult::new("matcher_oracle"),
            monotonicity: PropertyResult::new("spectral_monotonicity"),
            temple_kato: PropertyResult::new("temple_kato"),
            eigenvectors: PropertyResult::new("eigenvector_bound"),
        }
    }

    fn into_vec(self) -> Vec<PropertyResult> {
        vec![
            self.moore_penrose,
            self.invariance,
            self.sandwich,
            self.relative_sandwich,
            self.isometry_norm,
            self.kernel_equality,
            self.dual_route,
            self.scaled_offdiag,
            self.s_operator,
            self.matching,
            self.matcher_oracle,
            self.monotonicity,
            self.temple_kato,
            self.eigenvectors,
        ]
    }
}

/// Runs every property on `count` seeded instances. The summary is a pure
/// function of `seed` and `count`.
pub fn run_selfcheck(seed: u64, count: usize) -> SelfcheckSummary {
    let tol = Tolerances::default();
    let mut rng = rng_from_seed(seed);
    let mut suite = Suite::new();
    for i in 0..count {
        let inst = random_instance(&mut rng, i);
        check_moore_penrose(&mut rng, i, &mut suite.moore_penrose);
        check_subspace_properties(&mut rng, i, &inst, &tol, &mut suite);
        check_matcher(&mut rng, i, &mut suite.matcher_oracle);
        check_monotonicity(&mut rng, i, &tol, &mut suite.monotonicity);
        check_temple_kato(&mut rng, i, &inst, &tol, &mut suite.temple_kato);
    }
    SelfcheckSummary {
        seed,
        instances: count,
        properties: suite.into_vec(),
    }
}

fn rel_diff(a: &DenseMatrix<f64>, b: &DenseMatrix<f64>, scale: f64) -> f64 {
    (a - b).max_abs() / scale.max(f64::MIN_POSITIVE)
}

fn check_moore_penrose(rng: &mut InstanceRng, i: usize, out: &mut PropertyResult) {
    let m = rng.random_range(1..=MAX_DIM);
    let n = rng.random_range(1..=MAX_DIM);
    let r = rng.random_range(1..=m.min(n));
    let a = random_gaussian::<f64, _>(rng, m, r).matmul(&random_gaussian(rng, r, n));
    let outcome = (|| {
        let ap = pinv(&a, crate::linalg::default_rank_tol::<f64>(m, n) * 10.0)?;
        let na = a.max_abs();
        let np = ap.max_abs();
        let aap = a.matmul(&ap);
        let apa = ap.matmul(&a);
        let worst = [
            rel_diff(&aap.matmul(&a), &a, na),
            rel_diff(&apa.matmul(&ap), &ap, np),
            rel_diff(&aap, &aap.transpose(), 1.0),
            rel_diff(&apa, &apa.transpose(), 1.0),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        out.check(i, worst, 1e-9);
        Ok(())
    })();
    out.record(i, outcome);
}

fn check_subspace_properties(
    rng: &mut InstanceRng,
    i: usize,
    inst: &Instance,
    tol: &Tolerances<f64>,
    s: &mut Suite,
) {
    let outcome = (|| -> Result<()> {
        let op = OperatorRep::explicit(inst.h.clone(), tol)?;
        let sub = Subspace::new(&inst.x, tol.rank_tol_for(inst.h.rows()))?;
        let norm_h = op.spectrum()?.norm();
        let ritz = rayleigh_quotient(&op, &sub)?;
        let split = block_split(&op, &sub)?;
        let x = sub.basis();
        let resid = &split.h_prime.matmul(x) - &x.matmul(&ritz.xi);
        s.invariance.check(i, resid.max_abs(), 1e-11 * norm_h);

        let angles = sin_theta_residual(&op, &sub, tol)?;
        let sp = angles.sin_theta_p;
        let slack = 1e-10 * norm_h;
        for _ in 0..UNIT_VECTORS {
            let u: Vec<f64> = random_unit_vector(rng, inst.h.rows());
            let uhu = dot(&u, &inst.h.matvec(&u));
            let uh1u = dot(&u, &split.h_prime.matvec(&u));
            s.sandwich.check(i, (1.0 - sp) * uh1u, uhu + slack);
            s.sandwich.check(i, uhu, (1.0 + sp) * uh1u + slack);
            if let Some(eta) = angles.eta_theta_p {
                let udu = dot(&u, &split.delta_h.matvec(&u));
                s.relative_sandwich.check(i, udu.abs(), eta * uhu + slack);
            }
        }

        let iso = &angles.isometries;
        let dhs = spectral_norm(&iso.delta_hs)?;
        let vw = spectral_norm(&iso.v.tr_matmul(&iso.w))?;
        s.isometry_norm.check(i, (dhs - vw).abs(), 1e-10);

        if inst.positive_definite {
            match angles.cross_check_gap {
                Some(gap) => s.dual_route.check(i, gap, 1e-9),
                None => s.dual_route.fail(
                    i,
                    "route 1 unavailable on a positive definite instance".into(),
                ),
            }
            if sp < 1.0 - 1e-6 {
                let d = scaled_offdiag_norm(&op, &sub, tol)?;
                let want = sp / (1.0 - sp);
                s.scaled_offdiag
                    .check(i, (d - want).abs(), 1e-9 * want.max(1.0));
            }
        }

        if angles.bounds_applicable() {
            let sm = s_operator(&op, &split, tol)?;
            s.s_operator
                .check(i, spectral_norm(&sm)?, s_operator_bound(sp) + 1e-10);

            let m = match_ritz(&ritz.ritz_values, &inst.spectrum, sp)?;
            s.matching.check(i, m.max_rel_error, sp + 1e-10);
            // The λ-relative form divides by 1 - sinΘ_p, so it is only
            // meaningful away from saturation.
            if sp < 1.0 - 1e-6 {
                let worst = worst_lambda_relative(&m.indices, &ritz.ritz_values, &inst.spectrum);
                s.matching.check(i, worst, sp / (1.0 - sp) + 1e-10);
            }

            if !inst.positive_definite {
                let rank_tol = tol.rank_tol_for(inst.h.rows());
                let kh = kernel_basis(op.spectrum()?, rank_tol);
                let kp = kernel_basis(&symmetric_eig(&split.h_prime)?, rank_tol);
                match (kh, kp) {
                    (Some(a), Some(b)) if a.cols() == b.cols() => {
                        s.kernel_equality
                            .check(i, canonical_angles(&a, &b)?.sin_theta, 1e-9)
                    }
                    _ => s
                        .kernel_equality
                        .fail(i, "kernels of H and H' differ in dimension".into()),
                }
            }

            let cert = certify(&op, &sub, tol, None)?;
            if let Some(ev) = &cert.eigenvectors {
                let gap_ok = min_gap(&inst.spectrum) > 1e-6;
                for (b, a) in ev.bounds.iter().zip(&ev.actual) {
                    if let (Some(b), Some(a), true) = (b, a, gap_ok) {
                        s.eigenvectors.check(i, *a, *b + 1e-10);
                    }
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        s.invariance.fail(i, e.to_string());
    }
}

fn worst_lambda_relative(indices: &[usize], ritz: &[f64], eigs: &[f64]) -> f64 {
    let zero = crate::bounds::ZERO_TOL
        * eigs
            .iter()
            .chain(ritz)
            .fold(0.0, |m: f64, x| m.max(x.abs()));
    indices
        .iter()
        .zip(ritz)
        .map(|(&p, &mu)| relative_error(mu, eigs[p], zero))
        .fold(0.0, f64::max)
}

fn kernel_basis(d: &SpectralDecomp<f64>, rank_tol: f64) -> Option<DenseMatrix<f64>> {
    let cut = rank_tol * d.max().max(0.0);
    let idx: Vec<usize> = (0..d.len()).filter(|&p| d.eigenvalues[p] <= cut).collect();
    (!idx.is_empty()).then(|| d.eigenvectors.select_columns(&idx))
}

fn min_gap(spectrum: &[f64]) -> f64 {
    spectrum
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Smallest bottleneck over every injective assignment.
fn brute_force_bottleneck(ritz: &[f64], eigs: &[f64]) -> f64 {
    fn go(k: usize, ritz: &[f64], eigs: &[f64], used: &mut Vec<bool>, cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if k == ritz.len() {
            *best = cur;
            return;
        }
        for p in 0..eigs.len() {
            if !used[p] {
                used[p] = true;
                let e = (eigs[p] - ritz[k]).abs() / ritz[k];
                go(k + 1, ritz, eigs, used, cur.max(e), best);
                used[p] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, ritz, eigs, &mut vec![false; eigs.len()], 0.0, &mut best);
    best
}

fn check_matcher(rng: &mut InstanceRng, i: usize, out: &mut PropertyResult) {
    let m = rng.random_range(1..=MAX_MATCHER_DIM);
    let n = rng.random_range(1..=m.min(MAX_SUBSPACE_DIM));
    let eigs: Vec<f64> = random_spectrum(rng, m, 1e-1, 1e1);
    let ritz: Vec<f64> = random_spectrum(rng, n, 1e-1, 1e1);
    let outcome = match_ritz(&ritz, &eigs, 1.0).map(|r| {
        let oracle = brute_force_bottleneck(&ritz, &eigs);
        out.check(i, (r.max_rel_error - oracle).abs(), 1e-14 * oracle.max(1.0));
    });
    out.record(i, outcome);
}

fn check_monotonicity(
    rng: &mut InstanceRng,
    i: usize,
    tol: &Tolerances<f64>,
    out: &mut PropertyResult,
) {
    let n = rng.random_range(2..=MAX_DIM);
    let r = rng.random_range(1..=n);
    let spectrum: Vec<f64> = random_spectrum(rng, n, 1e-2, 1e2);
    let (a, _) = matrix_with_spectrum(rng, &spectrum);
    let b = random_gaussian::<f64, _>(rng, n, r);
    let h = &a + &b.matmul(&b.transpose()).symmetrized();
    let outcome = (|| -> Result<()> {
        let ao = OperatorRep::explicit(a, tol)?;
        let ho = OperatorRep::explicit(h.symmetrized(), tol)?;
        if !operator_order_leq(&ao, &ho)? {
            out.fail(i, "A <= A + BB^T not detected".into());
            return Ok(());
        }
        let slack = 1e-10 * ho.spectrum()?.norm();
        let worst = ao
            .spectrum()?
            .eigenvalues
            .iter()
            .zip(&ho.spectrum()?.eigenvalues)
            .map(|(m, l)| m - l)
            .fold(f64::NEG_INFINITY, f64::max);
        out.check(i, worst, slack);
        Ok(())
    })();
    out.record(i, outcome);
}

fn check_temple_kato(
    rng: &mut InstanceRng,
    i: usize,
    inst: &Instance,
    tol: &Tolerances<f64>,
    out: &mut PropertyResult,
) {
    let n = inst.h.rows();
    let eps = 10f64.powf(-rng.random_range(1.0..4.0));
    let noise: Vec<f64> = random_unit_vector(rng, n);
    let v1 = inst.q.column(0);
    let u: Vec<f64> = v1.iter().zip(&noise).map(|(a, b)| a + eps * b).collect();
    let nrm = crate::linalg::norm2(&u);
    let u: Vec<f64> = u.iter().map(|x| x / nrm).collect();
    let outcome = (|| -> Result<()> {
        let op = OperatorRep::explicit(inst.h.clone(), tol)?;
        let eigs = &op.spectrum()?.eigenvalues;
        let mu = dot(&u, &inst.h.matvec(&u));
        let (l1, l2) = (eigs[0], eigs[1]);
        if mu < l2 {
            let gamma = mu + (l2 - mu) * rng.random_range(0.5..=1.0);
            let t = temple_kato(&op, &u, gamma)?;
            out.check(i, t.bound, l1 + 1e-12 * l2.max(1.0));
        }
        Ok(())
    })();
    out.record(i, outcome);
}
