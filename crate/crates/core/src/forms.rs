//! Symmetric nonnegative forms, their Rayleigh quotients on a test subspace,
//! and the block-diagonal split `h = h' + δh`.

use crate::error::{Error, Result};
use crate::linalg::{
    orthonormalize, projector, symmetric_eig, symmetric_eig_with, DenseMatrix, SpectralDecomp,
};
use crate::scalar::Real;
use crate::string_model::StringSpec;
use crate::tolerances::Tolerances;

/// Negative eigenvalues down to this multiple of `‖H‖` count as roundoff.
pub const PSD_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind<T> {
    /// The operator `H` itself.
    Explicit(DenseMatrix<T>),
    /// A factor `R` with `h(u, v) = (Ru, Rv)`, so `H = R^T R`.
    Factor(DenseMatrix<T>),
    /// The two-piece string operator, known only analytically.
    String(StringSpec<T>),
}

/// A symmetric nonnegative operator together with its cached spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorRep<T> {
    kind: OperatorKind<T>,
    matrix: Option<DenseMatrix<T>>,
    spectrum: Option<SpectralDecomp<T>>,
    essential_spectrum_bottom: T,
}

impl<T: Real> OperatorRep<T> {
    /// Validates symmetry and nonnegativity of `h`; eigenvalue dust above
    /// `-1e-12 ‖H‖` is clamped to zero in the cached spectrum.
    pub fn explicit(h: DenseMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let spectrum = nonnegative_spectrum(&h, tol.sym_tol)?;
        Ok(Self {
            kind: OperatorKind::Explicit(h.clone()),
            matrix: Some(h),
            spectrum: Some(spectrum),
            essential_spectrum_bottom: T::infinity(),
        })
    }

    pub fn factor(r: DenseMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let h = r.tr_matmul(&r).symmetrized();
        let spectrum = nonnegative_spectrum(&h, tol.sym_tol)?;
        Ok(Self {
            kind: OperatorKind::Factor(r),
            matrix: Some(h),
            spectrum: Some(spectrum),
            essential_spectrum_bottom: T::infinity(),
        })
    }

    pub fn string(spec: StringSpec<T>) -> Self {
        Self {
            kind: OperatorKind::String(spec),
            matrix: None,
            spectrum: None,
            essential_spectrum_bottom: T::infinity(),
        }
    }

    pub fn with_essential_spectrum_bottom(mut self, bottom: T) -> Self {
        self.essential_spectrum_bottom = bottom;
        self
    }

    pub fn kind(&self) -> &OperatorKind<T> {
        &self.kind
    }

    pub fn essential_spectrum_bottom(&self) -> T {
        self.essential_spectrum_bottom
    }

    /// Order of the matrix, or `None` for the analytic string operator.
    pub fn dimension(&self) -> Option<usize> {
        self.matrix.as_ref().map(DenseMatrix::rows)
    }

    /// `H` as a dense matrix (formed as `R^T R` for factor input).
    pub fn matrix(&self) -> Result<&DenseMatrix<T>> {
        self.matrix
            .as_ref()
            .ok_or_else(|| Error::NotApplicable("the string operator has no matrix form".into()))
    }

    /// Eigendecomposition of `H` with nonnegative eigenvalues.
    pub fn spectrum(&self) -> Result<&SpectralDecomp<T>> {
        self.spectrum.as_ref().ok_or_else(|| {
            Error::NotApplicable("the string operator has no matrix spectrum".into())
        })
    }

    /// True when the smallest eigenvalue exceeds `rank_tol * λ_max`.
    pub fn is_positive_definite(&self, rank_tol: T) -> Result<bool> {
        let d = self.spectrum()?;
        Ok(d.max() > T::zero() && d.min() > rank_tol * d.max())
    }

    /// `h(u, v)`, evaluated through the factor when one was supplied.
    pub fn form(&self, u: &[T], v: &[T]) -> Result<T> {
        let n = self
            .dimension()
            .ok_or_else(|| Error::NotApplicable("form on the string operator".into()))?;
        if u.len() != n || v.len() != n {
            return Err(Error::dims("form evaluation", n, u.len().max(v.len())));
        }
        Ok(match &self.kind {
            OperatorKind::Factor(r) => crate::linalg::dot(&r.matvec(u), &r.matvec(v)),
            _ => crate::linalg::dot(u, &self.matrix()?.matvec(v)),
        })
    }
}

fn nonnegative_spectrum<T: Real>(h: &DenseMatrix<T>, sym_tol: T) -> Result<SpectralDecomp<T>> {
    let mut d = symmetric_eig_with(h, sym_tol)?;
    let slack = T::tol(PSD_SLACK) * d.norm();
    if d.min() < -slack {
        return Err(Error::NotNonnegative {
            min_eigenvalue: d.min().as_f64(),
            tolerance: slack.as_f64(),
        });
    }
    for l in &mut d.eigenvalues {
        *l = l.max(T::zero());
    }
    Ok(d)
}

/// Test subspace given by an orthonormal basis `X` and its projector `P = XX^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T> {
    basis: DenseMatrix<T>,
    projector: DenseMatrix<T>,
    dropped: usize,
}

impl<T: Real> Subspace<T> {
    /// Orthonormalizes the given columns; numerically dependent columns are
    /// dropped and counted.
    pub fn new(columns: &DenseMatrix<T>, rank_tol: T) -> Result<Self> {
        let o = orthonormalize(columns, rank_tol)?;
        let projector = projector(&o.basis);
        Ok(Self {
            basis: o.basis,
            projector,
            dropped: o.dropped,
        })
    }

    /// Span of the listed standard unit vectors of `R^n`.
    pub fn coordinate(n: usize, indices: &[usize]) -> Self {
        let mut x = DenseMatrix::zeros(n, indices.len());
        for (k, &i) in indices.iter().enumerate() {
            x[(i, k)] = T::one();
        }
        Self::new(&x, T::epsilon()).expect("unit vectors are independent")
    }

    pub fn basis(&self) -> &DenseMatrix<T> {
        &self.basis
    }

    pub fn projector(&self) -> &DenseMatrix<T> {
        &self.projector
    }

    /// `I - P`.
    pub fn complement_projector(&self) -> DenseMatrix<T> {
        &DenseMatrix::identity(self.ambient_dim()) - &self.projector
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    /// Input columns discarded as dependent during orthonormalization.
    pub fn dropped(&self) -> usize {
        self.dropped
    }
}

/// Rayleigh quotient `Ξ` on a test space and its Ritz pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzData<T> {
    pub xi: DenseMatrix<T>,
    /// Ascending Ritz values.
    pub ritz_values: Vec<T>,
    /// Ritz vectors `X y_i` in the ambient space; absent for analytic test
    /// functions.
    pub ritz_vectors: Option<DenseMatrix<T>>,
}

/// `Ξ = X^T H X` (or `(RX)^T (RX)` for a factor) and its eigenpairs.
pub fn rayleigh_quotient<T: Real>(op: &OperatorRep<T>, sub: &Subspace<T>) -> Result<RitzData<T>> {
    let n = op.dimension().ok_or_else(|| {
        Error::NotApplicable("string operators take test-function modes, not a basis".into())
    })?;
    if sub.ambient_dim() != n {
        return Err(Error::dims(
            "rayleigh_quotient",
            format!("basis with {n} rows"),
            sub.ambient_dim(),
        ));
    }
    let x = sub.basis();
    let xi = match op.kind() {
        OperatorKind::Factor(r) => {
            let rx = r.matmul(x);
            rx.tr_matmul(&rx)
        }
        _ => x.tr_matmul(&op.matrix()?.matmul(x)),
    }
    .symmetrized();
    let d = symmetric_eig(&xi)?;
    let ritz_values = d.eigenvalues.iter().map(|&m| m.max(T::zero())).collect();
    Ok(RitzData {
        ritz_vectors: Some(x.matmul(&d.eigenvectors)),
        ritz_values,
        xi,
    })
}

/// Block-diagonal part `H'` and off-diagonal part `δH` of `H` relative to `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSplit<T> {
    pub h_prime: DenseMatrix<T>,
    pub delta_h: DenseMatrix<T>,
}

/// `δH = PHP⊥ + P⊥HP` and `H' = H - δH`.
pub fn block_split<T: Real>(op: &OperatorRep<T>, sub: &Subspace<T>) -> Result<BlockSplit<T>> {
    let h = op.matrix()?;
    if sub.ambient_dim() != h.rows() {
        return Err(Error::dims(
            "block_split",
            format!("basis with {} rows", h.rows()),
            sub.ambient_dim(),
        ));
    }
    let p = sub.projector();
    let q = sub.complement_projector();
    let php_perp = p.matmul(&h.matmul(&q));
    let delta_h = (&php_perp + &php_perp.transpose()).symmetrized();
    let h_prime = (h - &delta_h).symmetrized();
    Ok(BlockSplit { h_prime, delta_h })
}

/// `A ≤ H` in the form sense: `H - A` nonnegative up to `-1e-12 ‖H‖`.
pub fn operator_order_leq<T: Real>(a: &OperatorRep<T>, h: &OperatorRep<T>) -> Result<bool> {
    let (am, hm) = (a.matrix()?, h.matrix()?);
    if am.shape() != hm.shape() {
        return Err(Error::dims(
            "operator_order_leq",
            format!("{}x{}", hm.rows(), hm.cols()),
            format!("{}x{}", am.rows(), am.cols()),
        ));
    }
    let diff = (hm - am).symmetrized();
    let d = symmetric_eig(&diff)?;
    let slack = T::tol(PSD_SLACK) * h.spectrum()?.norm().max(a.spectrum()?.norm());
    Ok(d.min() >= -slack)
}

/// The graded 2x2 family `L diag(1/100, η²) L^T` with `L = [[1, 0], [-1, 1]]`,
/// i.e. `[[1/100, -1/100], [-1/100, 1/100 + η²]]`.
pub fn graded_family<T: Real>(eta: T) -> DenseMatrix<T> {
    let l = DenseMatrix::from_rows(&[vec![T::one(), T::zero()], vec![-T::one(), T::one()]]);
    DenseMatrix::congruence_diag(&l, &[T::c(0.01), eta * eta])
}

/// The same family with bottom-right entry `1 + η²`, as it is sometimes
/// written; kept for comparison in reports.
pub fn graded_family_variant<T: Real>(eta: T) -> DenseMatrix<T> {
    let e = T::c(0.01);
    DenseMatrix::from_rows(&[vec![e, -e], vec![-e, T::one() + eta * eta]])
}

/// Closed-form eigenvalues `(1 + 50η² ∓ √(1 + 2500η⁴)) / 100` of
/// [`graded_family`], the smaller one in cancellation-free form.
pub fn graded_family_eigenvalues<T: Real>(eta: T) -> (T, T) {
    let e2 = eta * eta;
    let fifty = T::c(50.0);
    let root = (T::one() + T::c(2500.0) * e2 * e2).sqrt();
    let big = T::one() + fifty * e2 + root;
    (e2 / big, big / T::c(100.0))
}

/// `sinΘ` of the first coordinate vector for [`graded_family`]: `1/√(100η² + 1)`.
pub fn graded_family_sin_theta<T: Real>(eta: T) -> T {
    T::one() / (T::c(100.0) * eta * eta + T::one()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{
        matrix_with_spectrum, random_gaussian, random_orthonormal_columns, random_spectrum,
        rng_from_seed,
    };

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn graded_family_matches_closed_forms() {
        for eta in [1.0f64, 2.0, 3.0, 4.0, 5.0] {
            let h = graded_family(eta);
            assert_eq!(h[(1, 1)], 0.01 + eta * eta);
            let d = symmetric_eig(&h).unwrap();
            let (l1, l2) = graded_family_eigenvalues(eta);
            assert!(((d.eigenvalues[0] - l1) / l1).abs() < 1e-12);
            assert!(((d.eigenvalues[1] - l2) / l2).abs() < 1e-12);
            assert!((l1 + l2 - h.trace()).abs() < 1e-14 * l2);
        }
        assert_eq!(graded_family_variant(1.0)[(1, 1)], 2.0);
    }

    #[test]
    fn first_coordinate_ritz_value() {
        let op = OperatorRep::explicit(graded_family(1.0), &tol()).unwrap();
        let r = rayleigh_quotient(&op, &Subspace::coordinate(2, &[0])).unwrap();
        assert_eq!(r.ritz_values, vec![0.01]);
    }

    #[test]
    fn invariant_subspace_reproduces_eigenvalues() {
        let mut rng = rng_from_seed(1);
        let lambda = [0.5, 1.0, 2.0, 3.0, 8.0];
        let (h, q) = matrix_with_spectrum(&mut rng, &lambda);
        let op = OperatorRep::explicit(h, &tol()).unwrap();
        let sub = Subspace::new(&q.select_columns(&[1, 3]), 1e-12).unwrap();
        let r = rayleigh_quotient(&op, &sub).unwrap();
        assert!((r.ritz_values[0] - 1.0).abs() < 1e-13);
        assert!((r.ritz_values[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn ritz_values_within_spectrum() {
        let mut rng = rng_from_seed(2);
        let spec = random_spectrum::<f64, _>(&mut rng, 8, 0.1, 10.0);
        let (h, _) = matrix_with_spectrum(&mut rng, &spec);
        let op = OperatorRep::explicit(h, &tol()).unwrap();
        let x = random_orthonormal_columns(&mut rng, 8, 3);
        let r = rayleigh_quotient(&op, &Subspace::new(&x, 1e-12).unwrap()).unwrap();
        let d = op.spectrum().unwrap();
        for &m in &r.ritz_values {
            assert!(m >= d.min() - 1e-12 && m <= d.max() + 1e-12);
        }
        let v = r.ritz_vectors.unwrap();
        assert!((&v.tr_matmul(&v) - &DenseMatrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn factor_and_explicit_agree() {
        let mut rng = rng_from_seed(3);
        let r = random_gaussian::<f64, _>(&mut rng, 6, 6);
        let a = OperatorRep::factor(r.clone(), &tol()).unwrap();
        let b = OperatorRep::explicit(r.tr_matmul(&r).symmetrized(), &tol()).unwrap();
        let x = random_orthonormal_columns(&mut rng, 6, 2);
        let sub = Subspace::new(&x, 1e-12).unwrap();
        let ra = rayleigh_quotient(&a, &sub).unwrap();
        let rb = rayleigh_quotient(&b, &sub).unwrap();
        for (p, q) in ra.ritz_values.iter().zip(&rb.ritz_values) {
            assert!((p - q).abs() < 1e-12 * q.max(1.0));
        }
        let u = x.column(0);
        assert!((a.form(&u, &u).unwrap() - ra.xi[(0, 0)]).abs() < 1e-12 * ra.xi.max_abs());
    }

    #[test]
    fn rejects_indefinite_and_wrong_shapes() {
        let h = DenseMatrix::from_diagonal(&[1.0, -0.1]);
        assert!(matches!(
            OperatorRep::explicit(h, &tol()),
            Err(Error::NotNonnegative { .. })
        ));
        let dust = DenseMatrix::from_diagonal(&[1.0, -1e-14]);
        let op = OperatorRep::explicit(dust, &tol()).unwrap();
        assert_eq!(op.spectrum().unwrap().min(), 0.0);
        let sub = Subspace::<f64>::coordinate(3, &[0]);
        assert!(matches!(
            rayleigh_quotient(&op, &sub),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            block_split(&op, &sub),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn all_ones_split_gives_identity() {
        let h = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let op = OperatorRep::explicit(h, &tol()).unwrap();
        let s = block_split(&op, &Subspace::coordinate(2, &[0])).unwrap();
        assert_eq!(s.h_prime, DenseMatrix::identity(2));
        assert_eq!(
            s.delta_h,
            DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
        );
    }

    #[test]
    fn graded_family_split() {
        let eta = 2.0;
        let op = OperatorRep::explicit(graded_family(eta), &tol()).unwrap();
        let sub = Subspace::coordinate(2, &[0]);
        let s = block_split(&op, &sub).unwrap();
        assert_eq!(
            s.h_prime,
            DenseMatrix::from_diagonal(&[0.01, 0.01 + eta * eta])
        );
        assert_eq!(
            s.delta_h,
            DenseMatrix::from_rows(&[vec![0.0, -0.01], vec![-0.01, 0.0]])
        );
        let r = rayleigh_quotient(&op, &sub).unwrap();
        let lhs = s.h_prime.matmul(sub.basis());
        let rhs = sub.basis().matmul(&r.xi);
        assert!((&lhs - &rhs).max_abs() < 1e-15);
    }

    #[test]
    fn diagonal_is_already_split() {
        let op =
            OperatorRep::explicit(DenseMatrix::from_diagonal(&[1.0, 2.0, 3.0]), &tol()).unwrap();
        let s = block_split(&op, &Subspace::coordinate(3, &[0])).unwrap();
        assert_eq!(s.h_prime, *op.matrix().unwrap());
        assert_eq!(s.delta_h.max_abs(), 0.0);
    }

    #[test]
    fn split_commutes_and_preserves_ritz_block() {
        let mut rng = rng_from_seed(4);
        for n in [3, 6, 12] {
            let spec = random_spectrum::<f64, _>(&mut rng, n, 0.01, 100.0);
            let (h, _) = matrix_with_spectrum(&mut rng, &spec);
            let op = OperatorRep::explicit(h, &tol()).unwrap();
            let k = (n / 2).min(5);
            let sub = Subspace::new(&random_orthonormal_columns(&mut rng, n, k), 1e-12).unwrap();
            let s = block_split(&op, &sub).unwrap();
            let r = rayleigh_quotient(&op, &sub).unwrap();
            let scale = op.spectrum().unwrap().norm();
            let resid = (&s.h_prime.matmul(sub.basis()) - &sub.basis().matmul(&r.xi)).max_abs();
            assert!(resid <= 1e-11 * scale, "{resid}");
            let p = sub.projector();
            let comm = (&p.matmul(&s.h_prime) - &s.h_prime.matmul(p)).max_abs();
            assert!(comm <= 1e-11 * scale, "{comm}");
            // spectrum of H' = spectrum of Ξ ∪ spectrum of the compressed complement
            let q = crate::linalg::null_basis(&sub.basis().transpose(), 1e-12)
                .unwrap()
                .unwrap();
            let comp = q.tr_matmul(&op.matrix().unwrap().matmul(&q)).symmetrized();
            let mut union: Vec<f64> = r.ritz_values.clone();
            union.extend(symmetric_eig(&comp).unwrap().eigenvalues);
            union.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let hp = symmetric_eig(&s.h_prime).unwrap().eigenvalues;
            for (a, b) in union.iter().zip(&hp) {
                assert!((a - b).abs() <= 1e-11 * scale);
            }
        }
    }

    #[test]
    fn order_relation() {
        let mut rng = rng_from_seed(6);
        let g = random_gaussian::<f64, _>(&mut rng, 7, 7);
        let a = g.tr_matmul(&g).symmetrized();
        let b = random_gaussian::<f64, _>(&mut rng, 7, 2);
        let h = (&a + &b.matmul(&b.transpose())).symmetrized();
        let ao = OperatorRep::explicit(a, &tol()).unwrap();
        let ho = OperatorRep::explicit(h, &tol()).unwrap();
        assert!(operator_order_leq(&ao, &ao).unwrap());
        assert!(operator_order_leq(&ao, &ho).unwrap());
        assert!(!operator_order_leq(&ho, &ao).unwrap());
        let (mu, la) = (ao.spectrum().unwrap(), ho.spectrum().unwrap());
        for (m, l) in mu.eigenvalues.iter().zip(&la.eigenvalues) {
            assert!(*m <= l + 1e-10 * la.norm());
        }
    }
}
