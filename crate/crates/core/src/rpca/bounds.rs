use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{DenseMatrix, SupportSet};
use crate::rpca::solver::validate_lambda;

/// `(2‖D‖_∞ + λ (√15/3) ‖D‖_F) / (λ(1−λ))`, from observed data only.
pub fn rpca_tau_bound_data(d: &DenseMatrix, lambda: f64) -> Result<f64> {
    validate_lambda(lambda)?;
    if d.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let c = 15f64.sqrt() / 3.0;
    Ok((2.0 * d.max_abs() + lambda * c * d.frobenius_norm()) / (lambda * (1.0 - lambda)))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RpcaOracleBound {
    pub value: f64,
    /// `‖P_Ω⊥ D‖_∞`
    pub gamma: f64,
    /// `‖P_Ω(M − S₀)‖_F`
    pub delta: f64,
}

/// `(2γ + λδ) / (λ(1−λ))` with `γ = ‖P_Ω⊥(M − S₀)‖_∞`, `δ = ‖P_Ω(M − S₀)‖_F` and
/// `Ω = supp(S₀)`.
pub fn rpca_tau_bound_oracle(m_true: &DenseMatrix, s_true: &DenseMatrix, lambda: f64) -> Result<RpcaOracleBound> {
    validate_lambda(lambda)?;
    s_true.ensure_shape(m_true.shape())?;
    let omega = SupportSet::of_nonzeros(s_true);
    let diff = m_true - s_true;
    let on = project_omega_unchecked(&diff, &omega);
    let gamma = (&diff - &on).max_abs();
    let delta = on.frobenius_norm();
    Ok(RpcaOracleBound {
        value: (2.0 * gamma + lambda * delta) / (lambda * (1.0 - lambda)),
        gamma,
        delta,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpsilonChoice {
    pub epsilon: f64,
    /// `γ / ((1/2 − ε) λ)`
    pub tau_gamma_side: f64,
    /// `δ / (ε/2 − λ/4)`
    pub tau_delta_side: f64,
}

impl EpsilonChoice {
    /// The equalized penalty, `(2γ + 4λδ) / (λ(1−λ))`.
    pub fn tau(&self) -> f64 {
        self.tau_gamma_side.max(self.tau_delta_side)
    }
}

/// `ε = (δ/2 + γ/4) / (γ/(2λ) + δ)`, the value that equalizes the two lower bounds on `τ`.
/// A side whose numerator vanishes reports 0.
pub fn optimal_epsilon(gamma: f64, delta: f64, lambda: f64) -> Result<EpsilonChoice> {
    for (name, v) in [("gamma", gamma), ("delta", delta)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::param(name, format!("must be nonnegative and finite, got {v}")));
        }
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::param("lambda", format!("must lie in (0, 1], got {lambda}")));
    }
    if gamma + delta == 0.0 {
        return Err(Error::param("gamma", "gamma and delta are both zero"));
    }
    let epsilon = (delta / 2.0 + gamma / 4.0) / (gamma / (2.0 * lambda) + delta);
    let tau_gamma_side = if gamma == 0.0 {
        0.0
    } else {
        gamma / ((0.5 - epsilon) * lambda)
    };
    let tau_delta_side = if delta == 0.0 {
        0.0
    } else {
        delta / (epsilon / 2.0 - lambda / 4.0)
    };
    Ok(EpsilonChoice {
        epsilon,
        tau_gamma_side,
        tau_delta_side,
    })
}
