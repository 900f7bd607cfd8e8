use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{
    cg_solve_projected, spectral_norm, svd, CgOptions, DenseMatrix, SampledTangentMap, Side, SupportSet, TangentBasis,
    DEFAULT_RANK_CUTOFF,
};
use crate::mc::solver::validate_tau;
use crate::problem::rng::PortableRng;

/// Default relative tolerance on condition (b).
pub const CERTIFICATE_TOL: f64 = 1e-6;

/// `(P_T P_Ω P_T)⁻¹ rhs` on `T`, by projected CG.
pub(crate) fn inverse_on_tangent(
    t: &TangentBasis,
    omega: &SupportSet,
    rhs: &DenseMatrix,
    cg: &CgOptions,
) -> Result<DenseMatrix> {
    let map = SampledTangentMap { tangent: t, omega };
    let rhs = t.project_unchecked(rhs);
    Ok(cg_solve_projected(&map, &rhs, cg, |x| t.project_unchecked(x))?.x)
}

/// `Λ = P_Ω P_T (P_T P_Ω P_T)⁻¹ U Vᵀ`. Vanishes when `Ω` is empty.
pub fn lemma1_lambda(t: &TangentBasis, omega: &SupportSet, cg: &CgOptions) -> Result<DenseMatrix> {
    if omega.is_empty() || t.rank() == 0 {
        let (n1, n2) = t.shape();
        return Ok(DenseMatrix::zeros(n1, n2));
    }
    let z = inverse_on_tangent(t, omega, &t.uv_t(), cg)?;
    Ok(project_omega_unchecked(&z, omega))
}

/// Dual certificate `Y = Λ + (1/τ) P_Ω P_T (P_T P_Ω P_T)⁻¹ M`.
#[derive(Clone, Debug)]
pub struct McCertificate {
    pub y: DenseMatrix,
    pub lambda_mat: DenseMatrix,
    pub correction: DenseMatrix,
    pub tangent: TangentBasis,
    pub tau: f64,
}

impl McCertificate {
    /// Wraps a solver multiplier as a certificate for its own output `x`, so the same
    /// condition checks serve as KKT residuals. `lambda_mat` holds the multiplier and
    /// `correction` is zero.
    pub fn from_dual(dual: &DenseMatrix, x: &DenseMatrix, tau: f64, rank_cutoff: f64) -> Result<Self> {
        validate_tau(tau)?;
        dual.ensure_shape(x.shape())?;
        let tangent = TangentBasis::from_factors(&svd(x, rank_cutoff)?);
        Ok(Self {
            y: dual.clone(),
            lambda_mat: dual.clone(),
            correction: DenseMatrix::zeros(x.rows(), x.cols()),
            tangent,
            tau,
        })
    }
}

pub fn build_mc_certificate(m_true: &DenseMatrix, omega: &SupportSet, tau: f64) -> Result<McCertificate> {
    build_mc_certificate_with(m_true, omega, tau, &CgOptions::default(), DEFAULT_RANK_CUTOFF)
}

pub fn build_mc_certificate_with(
    m_true: &DenseMatrix,
    omega: &SupportSet,
    tau: f64,
    cg: &CgOptions,
    rank_cutoff: f64,
) -> Result<McCertificate> {
    validate_tau(tau)?;
    omega.ensure_matches(m_true)?;
    let tangent = TangentBasis::of_matrix(m_true, rank_cutoff)?;
    let lambda_mat = lemma1_lambda(&tangent, omega, cg)?;
    let correction = if m_true.is_zero() {
        DenseMatrix::zeros(m_true.rows(), m_true.cols())
    } else {
        let z = inverse_on_tangent(&tangent, omega, m_true, cg)?;
        project_omega_unchecked(&z, omega).scale(1.0 / tau)
    };
    let y = &lambda_mat + &correction;
    Ok(McCertificate {
        y,
        lambda_mat,
        correction,
        tangent,
        tau,
    })
}

/// Residuals of (a) `Y = P_Ω Y`, (b) `P_T Y = M/τ + U Vᵀ`, (c) `‖P_T⊥ Y‖ ≤ 1`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CertificateReport {
    /// `‖Y − P_Ω Y‖_F`
    pub cond_a_residual: f64,
    /// `‖P_T Y − (M/τ + U Vᵀ)‖_F / ‖M/τ + U Vᵀ‖_F`
    pub cond_b_residual: f64,
    /// `‖P_T⊥ Y‖`
    pub cond_c_value: f64,
    /// `‖P_T⊥ Λ‖`
    pub lemma1_value: f64,
    pub passed: bool,
}

pub fn check_mc_certificate(
    cert: &McCertificate,
    m_true: &DenseMatrix,
    omega: &SupportSet,
) -> Result<CertificateReport> {
    check_mc_certificate_with_tol(cert, m_true, omega, CERTIFICATE_TOL)
}

pub fn check_mc_certificate_with_tol(
    cert: &McCertificate,
    m_true: &DenseMatrix,
    omega: &SupportSet,
    tol_b: f64,
) -> Result<CertificateReport> {
    omega.ensure_matches(m_true)?;
    cert.y.ensure_shape(m_true.shape())?;
    if cert.tangent.shape() != m_true.shape() {
        return Err(Error::dims(m_true.shape(), cert.tangent.shape()));
    }
    let t = &cert.tangent;
    let y = &cert.y;

    let cond_a_residual = (y - &project_omega_unchecked(y, omega)).frobenius_norm();

    let mut target = m_true.scale(1.0 / cert.tau);
    target.axpy(1.0, &t.uv_t());
    let pt_y = t.project(y, Side::T)?;
    let target_norm = target.frobenius_norm();
    let b_abs = (&pt_y - &target).frobenius_norm();
    let cond_b_residual = if target_norm > 0.0 { b_abs / target_norm } else { b_abs };

    let cond_c_value = spectral_norm(&(y - &pt_y))?;
    let lemma1_value = spectral_norm(&t.project(&cert.lambda_mat, Side::TPerp)?)?;

    let passed = cond_a_residual <= 1e-10 * y.frobenius_norm() && cond_b_residual <= tol_b && cond_c_value <= 1.0;
    Ok(CertificateReport {
        cond_a_residual,
        cond_b_residual,
        cond_c_value,
        lemma1_value,
        passed,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SamplingOperatorReport {
    /// `‖P_T⊥ Λ‖`
    pub lambda_tperp_norm: f64,
    /// Extremes of `⟨Z, P_T P_Ω P_T Z⟩ / ‖Z‖_F²` over the random probes `Z ∈ T`.
    pub rayleigh_min: f64,
    pub rayleigh_max: f64,
}

/// Empirical check of the two sampling-operator events: `‖P_T⊥ Λ‖ ≤ 1/2` and
/// `p/2 ≤ P_T P_Ω P_T ≤ 3p/2` on `T`.
pub fn check_sampling_operator(
    t: &TangentBasis,
    omega: &SupportSet,
    probes: usize,
    seed: u64,
) -> Result<SamplingOperatorReport> {
    if probes == 0 {
        return Err(Error::param("probes", "must be at least 1"));
    }
    if t.shape() != omega.shape() {
        return Err(Error::dims(t.shape(), omega.shape()));
    }
    let lambda = lemma1_lambda(t, omega, &CgOptions::default())?;
    let lambda_tperp_norm = spectral_norm(&t.project(&lambda, Side::TPerp)?)?;

    let (n1, n2) = t.shape();
    let map = SampledTangentMap { tangent: t, omega };
    let mut rng = PortableRng::seed_from_u64(seed);
    let mut rayleigh_min = f64::INFINITY;
    let mut rayleigh_max = f64::NEG_INFINITY;
    for _ in 0..probes {
        let z = t.project_unchecked(&rng.gaussian_matrix(n1, n2));
        let zz = z.dot(&z);
        let q = if zz > 0.0 {
            z.dot(&crate::linalg::LinearMap::apply(&map, &z)) / zz
        } else {
            0.0
        };
        rayleigh_min = rayleigh_min.min(q);
        rayleigh_max = rayleigh_max.max(q);
    }
    Ok(SamplingOperatorReport {
        lambda_tperp_norm,
        rayleigh_min,
        rayleigh_max,
    })
}
