use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{spectral_norm, CgOptions, DenseMatrix, Side, SupportSet, TangentBasis, DEFAULT_RANK_CUTOFF};
use crate::mc::certificate::{inverse_on_tangent, lemma1_lambda};

/// `(4/p) ‖P_Ω M‖_F` with `p = |Ω| / (n1 n2)`, from observed data only.
pub fn mc_tau_bound_data(observed: &DenseMatrix, omega: &SupportSet) -> Result<f64> {
    omega.ensure_matches(observed)?;
    if omega.is_empty() {
        return Err(Error::EmptySupport);
    }
    let observed_norm = project_omega_unchecked(observed, omega).frobenius_norm();
    Ok(4.0 / omega.density() * observed_norm)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct McOracleBound {
    pub value: f64,
    /// `‖P_T⊥ P_Ω P_T (P_T P_Ω P_T)⁻¹ M‖`
    pub numerator: f64,
    /// `‖P_T⊥ Λ‖`
    pub lambda_tperp_norm: f64,
}

/// `‖P_T⊥ P_Ω P_T (P_T P_Ω P_T)⁻¹ M‖ / (1 − ‖P_T⊥ Λ‖)`.
pub fn mc_tau_bound_oracle(m_true: &DenseMatrix, omega: &SupportSet) -> Result<McOracleBound> {
    mc_tau_bound_oracle_with(m_true, omega, &CgOptions::default(), DEFAULT_RANK_CUTOFF)
}

pub fn mc_tau_bound_oracle_with(
    m_true: &DenseMatrix,
    omega: &SupportSet,
    cg: &CgOptions,
    rank_cutoff: f64,
) -> Result<McOracleBound> {
    omega.ensure_matches(m_true)?;
    let t = TangentBasis::of_matrix(m_true, rank_cutoff)?;
    let lambda = lemma1_lambda(&t, omega, cg)?;
    let lambda_tperp_norm = spectral_norm(&t.project(&lambda, Side::TPerp)?)?;
    if lambda_tperp_norm >= 1.0 {
        return Err(Error::Regime(format!(
            "‖P_T⊥ Λ‖ = {lambda_tperp_norm:.6} ≥ 1; the oracle bound is undefined on this instance"
        )));
    }
    let numerator = if m_true.is_zero() {
        0.0
    } else {
        let z = inverse_on_tangent(&t, omega, m_true, cg)?;
        let sampled = project_omega_unchecked(&z, omega);
        spectral_norm(&t.project(&sampled, Side::TPerp)?)?
    };
    Ok(McOracleBound {
        value: numerator / (1.0 - lambda_tperp_norm),
        numerator,
        lambda_tperp_norm,
    })
}
