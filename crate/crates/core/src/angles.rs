//! Subspace geometry: canonical angles, the partial isometries `V` and `W`,
//! the inverse image `{x : H^{1/2} x ∈ ran X}`, and the energy-scaled
//! residual measures `sinΘ` and `sinΘ_p`.

use crate::error::{Error, Result};
use crate::forms::{block_split, rayleigh_quotient, BlockSplit, OperatorRep, Subspace};
use crate::linalg::{
    null_basis, projector, projector_or_zero, psd_pinv_sqrt, psd_sqrt, range_basis, spectral_norm,
    svd, symmetric_eig, DenseMatrix, SpectralDecomp,
};
use crate::scalar::Real;
use crate::tolerances::Tolerances;

/// Angles within this distance of `0` or `π/2` count as exactly `0` or `π/2`.
pub const ANGLE_CUTOFF: f64 = 1e-8;

/// `sinΘ_p` this close to one leaves the relative bounds undefined.
pub const SATURATION_TOL: f64 = 1e-12;

/// Canonical angles between two subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalAngles<T> {
    /// `arccos σ_i(V^T U)`, ascending, in `[0, π/2]`.
    pub angles: Vec<T>,
    /// `max{‖P(I - Q)‖, ‖Q(I - P)‖}`; equals one for unequal dimensions.
    pub sin_theta: T,
    /// Largest sine over the angles strictly inside `(0, π/2)`, if any.
    pub acute_sin_theta: Option<T>,
    /// How many computed values had to be clamped into `[0, 1]`.
    pub clamped: usize,
}

fn clamp_unit<T: Real>(x: T, clamped: &mut usize) -> T {
    if x > T::one() {
        *clamped += 1;
        T::one()
    } else if x < T::zero() {
        *clamped += 1;
        T::zero()
    } else {
        x
    }
}

/// Canonical angles between `ran(U)` and `ran(V)` for orthonormal `U`, `V`.
pub fn canonical_angles<T: Real>(
    u: &DenseMatrix<T>,
    v: &DenseMatrix<T>,
) -> Result<CanonicalAngles<T>> {
    if u.rows() != v.rows() {
        return Err(Error::dims(
            "canonical_angles",
            format!("{} rows", u.rows()),
            v.rows(),
        ));
    }
    let mut clamped = 0;
    let s = svd(&v.tr_matmul(u))?;
    let mut angles: Vec<T> = s
        .singular_values
        .iter()
        .map(|&c| clamp_unit(c, &mut clamped).acos())
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));

    let (pu, pv) = (projector(u), projector(v));
    let id = DenseMatrix::identity(u.rows());
    let a = spectral_norm(&pu.matmul(&(&id - &pv)))?;
    let b = spectral_norm(&pv.matmul(&(&id - &pu)))?;
    let sin_theta = clamp_unit(a.max(b), &mut clamped);

    let cut = T::c(ANGLE_CUTOFF);
    let right = T::FRAC_PI_2() - cut;
    let acute_sin_theta = angles
        .iter()
        .filter(|&&t| t > cut && t < right)
        .map(|t| t.sin())
        .fold(None, |m: Option<T>, s| Some(m.map_or(s, |m| m.max(s))));
    Ok(CanonicalAngles {
        angles,
        sin_theta,
        acute_sin_theta,
        clamped,
    })
}

/// `V = H^{1/2} P H'^{†1/2}`, `W = H^{1/2} P⊥ H'^{†1/2}` and
/// `δH_s = V^T W + W^T V`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryPair<T> {
    pub v: DenseMatrix<T>,
    pub w: DenseMatrix<T>,
    pub delta_hs: DenseMatrix<T>,
}

pub fn build_isometries<T: Real>(
    op: &OperatorRep<T>,
    sub: &Subspace<T>,
    tol: &Tolerances<T>,
) -> Result<IsometryPair<T>> {
    let split = block_split(op, sub)?;
    isometries_from_split(op, sub, &split, tol)
}

fn isometries_from_split<T: Real>(
    op: &OperatorRep<T>,
    sub: &Subspace<T>,
    split: &BlockSplit<T>,
    tol: &Tolerances<T>,
) -> Result<IsometryPair<T>> {
    let n = sub.ambient_dim();
    let rank_tol = tol.rank_tol_for(n);
    let h_half = psd_sqrt(op.spectrum()?, rank_tol);
    let hp = symmetric_eig(&split.h_prime)?;
    let hp_pinv_half = psd_pinv_sqrt(&hp, rank_tol);
    let v = h_half.matmul(&sub.projector().matmul(&hp_pinv_half));
    let w = h_half.matmul(&sub.complement_projector().matmul(&hp_pinv_half));
    let vtw = v.tr_matmul(&w);
    let delta_hs = &vtw + &vtw.transpose();
    Ok(IsometryPair { v, w, delta_hs })
}

/// Orthonormal basis of `{x : H^{1/2} x ∈ ran X}`, i.e. the kernel of
/// `P⊥ H^{1/2}`; `None` when that set is trivial.
pub fn inverse_image<T: Real>(
    op: &OperatorRep<T>,
    sub: &Subspace<T>,
    tol: &Tolerances<T>,
) -> Result<Option<DenseMatrix<T>>> {
    let n = op
        .dimension()
        .ok_or_else(|| Error::NotApplicable("inverse image of the string operator".into()))?;
    if sub.ambient_dim() != n {
        return Err(Error::dims(
            "inverse_image",
            format!("basis with {n} rows"),
            sub.ambient_dim(),
        ));
    }
    let h_half = psd_sqrt(op.spectrum()?, tol.rank_tol_for(n));
    kernel_relative_to(&sub.complement_projector().matmul(&h_half), h_half_norm(op))
}

fn h_half_norm<T: Real>(op: &OperatorRep<T>) -> T {
    op.spectrum()
        .map(|d| d.max().max(T::zero()).sqrt())
        .unwrap_or_else(|_| T::one())
}

/// Kernel of `a`, cutting singular values at `100 n ε` times `scale`.
fn kernel_relative_to<T: Real>(a: &DenseMatrix<T>, scale: T) -> Result<Option<DenseMatrix<T>>> {
    let n = a.cols();
    if scale == T::zero() {
        return Ok(Some(DenseMatrix::identity(n)));
    }
    let cut = T::c(100.0 * n as f64) * T::epsilon() * scale;
    let smax = svd(a)?.max_singular_value();
    if smax <= cut {
        return Ok(Some(DenseMatrix::identity(n)));
    }
    null_basis(a, cut / smax)
}

/// Residual measures of a test subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleReport<T> {
    /// Canonical angles between `ran V` and the inverse image `ran(W)^⊥`.
    pub canonical_angles: Vec<T>,
    pub sin_theta: T,
    /// `‖V^T W‖`, the measure all bounds are based on.
    pub sin_theta_p: T,
    /// `sinΘ_p / (1 - sinΘ_p)`; `None` once `sinΘ_p` reaches one.
    pub eta_theta_p: Option<T>,
    /// `sinΘ` from the generalized eigenproblem on `ran X`; positive
    /// definite operators only.
    pub route1_sin_theta: Option<T>,
    /// `|route 1 - sinΘ_p|` when both are available.
    pub cross_check_gap: Option<T>,
    /// Largest acute canonical-angle sine, `None` when every angle is `0` or `π/2`.
    pub acute_sin_theta: Option<T>,
    pub clamped: usize,
    /// `H` and `H'` have kernels of different dimension, which forces
    /// `sinΘ_p = 1` regardless of the measured `‖V^T W‖`.
    pub kernel_mismatch: bool,
    pub isometries: IsometryPair<T>,
    pub split: BlockSplit<T>,
    /// Dimension of the inverse image.
    pub inverse_image_dim: usize,
}

impl<T: Real> AngleReport<T> {
    pub fn bounds_applicable(&self) -> bool {
        self.eta_theta_p.is_some()
    }
}

/// `sinΘ_p / (1 - sinΘ_p)`, or `None` when `sinΘ_p` is within `1e-12` of one.
pub fn eta_of<T: Real>(sin_theta_p: T) -> Option<T> {
    if sin_theta_p >= T::one() - T::tol(SATURATION_TOL) {
        None
    } else {
        Some(sin_theta_p / (T::one() - sin_theta_p))
    }
}

/// Both residual measures and the geometry behind them.
///
/// `sinΘ_p = ‖V^T W‖` is always computed. For a positive definite operator
/// `sinΘ` is also obtained from the pencil `(A - B, A)` on the test space,
/// where `A = X^T H^{-1} X` and `B = X^T H'^{-1} X`; see [`route1_sin_theta`].
pub fn sin_theta_residual<T: Real>(
    op: &OperatorRep<T>,
    sub: &Subspace<T>,
    tol: &Tolerances<T>,
) -> Result<AngleReport<T>> {
    let n = op.dimension().ok_or_else(|| {
        Error::NotApplicable("use the string model for analytic operators".into())
    })?;
    let rank_tol = tol.rank_tol_for(n);
    let split = block_split(op, sub)?;
    let iso = isometries_from_split(op, sub, &split, tol)?;
    let mut clamped = 0;
    let measured = clamp_unit(spectral_norm(&iso.v.tr_matmul(&iso.w))?, &mut clamped);
    // ker H' = ker H whenever sinΘ_p < 1, so differing kernels pin it to one.
    let kernel_dim = |d: &SpectralDecomp<T>| {
        let cut = rank_tol * d.max().max(T::zero());
        d.eigenvalues.iter().filter(|&&l| l <= cut).count()
    };
    let kernel_mismatch = kernel_dim(op.spectrum()?) != kernel_dim(&symmetric_eig(&split.h_prime)?);
    let sin_theta_p = if kernel_mismatch { T::one() } else { measured };

    let ran_v = range_basis(&iso.v, T::c(100.0) * T::epsilon() * T::c(n as f64))?;
    let inv = inverse_image(op, sub, tol)?;
    let (angles, sin_theta, acute) = match (&ran_v, &inv) {
        (Some(a), Some(b)) => {
            let c = canonical_angles(a, b)?;
            clamped += c.clamped;
            (c.angles, c.sin_theta, c.acute_sin_theta)
        }
        (None, None) => (Vec::new(), T::zero(), None),
        _ => {
            let pa = projector_or_zero(ran_v.as_ref(), n);
            let pb = projector_or_zero(inv.as_ref(), n);
            let id = DenseMatrix::identity(n);
            let s = spectral_norm(&pa.matmul(&(&id - &pb)))?
                .max(spectral_norm(&pb.matmul(&(&id - &pa)))?);
            (Vec::new(), clamp_unit(s, &mut clamped), None)
        }
    };

    let route1 = if op.is_positive_definite(rank_tol)? {
        Some(clamp_unit(
            route1_sin_theta(op, sub, rank_tol)?,
            &mut clamped,
        ))
    } else {
        None
    };
    Ok(AngleReport {
        canonical_angles: angles,
        sin_theta: sin_theta.max(sin_theta_p),
        sin_theta_p,
        eta_theta_p: eta_of(sin_theta_p),
        cross_check_gap: route1.map(|r| (r - sin_theta_p).abs()),
        route1_sin_theta: route1,
        acute_sin_theta: acute,
        clamped,
        kernel_mismatch,
        isometries: iso,
        split,
        inverse_image_dim: inv.map_or(0, |b| b.cols()),
    })
}

/// `sinΘ` through the generalized eigenproblem on the test space.
///
/// `sin²Θ` is the largest eigenvalue of `A^{-1/2} (A - B) A^{-1/2}`. Since
/// `A - B = F^T F` with `F = H^{-1/2} R Ξ^{-1}` and residual `R = HX - XΞ`,
/// the sine itself is `‖F A^{-1/2}‖`, which keeps full relative accuracy for
/// nearly invariant `X`.
pub fn route1_sin_theta<T: Real>(op: &OperatorRep<T>, sub: &Subspace<T>, rank_tol: T) -> Result<T> {
    if !op.is_positive_definite(rank_tol)? {
        return Err(Error::SingularOperator("the generalized-eigenvalue route"));
    }
    let d = op.spectrum()?;
    let h_inv = d.apply(|l| T::one() / l);
    let h_inv_half = d.apply(|l| T::one() / l.sqrt());
    let h = op.matrix()?;
    let x = sub.basis();
    let ritz = rayleigh_quotient(op, sub)?;
    let xi_d = symmetric_eig(&ritz.xi)?;
    if !(xi_d.min() > T::zero()) {
        return Err(Error::SingularOperator("the generalized-eigenvalue route"));
    }
    let xi_inv = xi_d.apply(|l| T::one() / l);
    let resid = &h.matmul(x) - &x.matmul(&ritz.xi);
    let a = x.tr_matmul(&h_inv.matmul(x)).symmetrized();
    let a_inv_half = symmetric_eig(&a)?.apply(|l| T::one() / l.sqrt());
    let f = h_inv_half.matmul(&resid).matmul(&xi_inv);
    spectral_norm(&f.matmul(&a_inv_half))
}

/// `‖H^{-1/2} δH H^{-1/2}‖`, the largest value of `|δh(u, v)| / √(h[u] h[v])`.
pub fn scaled_offdiag_norm<T: Real>(
    op: &OperatorRep<T>,
    sub: &Subspace<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    let n = op
        .dimension()
        .ok_or_else(|| Error::NotApplicable("scaled_offdiag_norm on the string operator".into()))?;
    if !op.is_positive_definite(tol.rank_tol_for(n))? {
        return Err(Error::SingularOperator("scaled_offdiag_norm"));
    }
    let split = block_split(op, sub)?;
    let h_inv_half = op.spectrum()?.apply(|l| T::one() / l.sqrt());
    spectral_norm(&h_inv_half.matmul(&split.delta_h.matmul(&h_inv_half)))
}
