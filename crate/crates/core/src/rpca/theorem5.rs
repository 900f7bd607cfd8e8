use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{
    power_op_norm, spectral_norm, DenseMatrix, SampledTangentMap, SupportSet, TangentBasis, DEFAULT_RANK_CUTOFF,
};
use crate::mc::validate_tau;

const POWER_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Theorem5Report {
    /// `‖UVᵀ + W + M/τ − λ(sgn S₀ + F + P_Ω B) − S₀/τ‖_F`
    pub eq26_residual: f64,
    /// `‖P_T W‖_F`
    pub w_tangent_residual: f64,
    /// `‖W‖`
    pub w_norm: f64,
    /// `‖P_Ω F‖_F`
    pub f_support_residual: f64,
    /// `‖F‖_∞`
    pub f_inf: f64,
    /// `‖P_Ω B‖_F`
    pub b_frob: f64,
    pub alpha: f64,
    pub beta: f64,
    pub constraint27_ok: bool,
    /// `‖P_Ω P_T‖`
    pub pt_pomega_norm: f64,
    pub passed: bool,
}

/// `β ≤ 1`, `α + β ≤ 1/λ`, `λ ≤ (1 − β)/(2α)`, the last written as `2αλ ≤ 1 − β`. A relative
/// slack of `1e-12` absorbs rounding when `(α, β)` sit on the boundary by construction.
pub fn constraint27(lambda: f64, alpha: f64, beta: f64) -> bool {
    let slack = 1e-12;
    beta <= 1.0 + slack && lambda * (alpha + beta) <= 1.0 + slack && 2.0 * alpha * lambda <= (1.0 - beta) + slack
}

/// `‖P_Ω P_T‖ = ‖P_T P_Ω P_T‖^{1/2}`, by power iteration.
pub fn pomega_pt_norm(t: &TangentBasis, omega: &SupportSet) -> f64 {
    if t.rank() == 0 || omega.is_empty() {
        return 0.0;
    }
    let map = SampledTangentMap { tangent: t, omega };
    power_op_norm(&map, POWER_SEED, 1e-10, 2000).norm.sqrt()
}

/// Checks a dual triple `(W, F, B)` against the sufficient conditions for `(M, S₀)` to be
/// the unique optimum at `(λ, τ)`, with `Ω = supp(S₀)`.
#[allow(clippy::too_many_arguments)]
pub fn check_theorem5(
    w: &DenseMatrix,
    f: &DenseMatrix,
    b: &DenseMatrix,
    m_true: &DenseMatrix,
    s_true: &DenseMatrix,
    lambda: f64,
    tau: f64,
    alpha: f64,
    beta: f64,
    tol: f64,
) -> Result<Theorem5Report> {
    let shape = m_true.shape();
    for x in [w, f, b, s_true] {
        x.ensure_shape(shape)?;
    }
    validate_tau(tau)?;
    if !(lambda > 0.0) || !(alpha >= 0.0) || !(beta >= 0.0) || !(tol > 0.0) {
        return Err(Error::param(
            "lambda",
            format!("need lambda > 0, alpha >= 0, beta >= 0, tol > 0; got {lambda}, {alpha}, {beta}, {tol}"),
        ));
    }
    let omega = SupportSet::of_nonzeros(s_true);
    let t = TangentBasis::of_matrix(m_true, DEFAULT_RANK_CUTOFF)?;

    let pb = project_omega_unchecked(b, &omega);
    let mut r = t.uv_t();
    r.axpy(1.0, w);
    r.axpy(1.0 / tau, m_true);
    r.axpy(-1.0 / tau, s_true);
    r.axpy(-lambda, &s_true.signum());
    r.axpy(-lambda, f);
    r.axpy(-lambda, &pb);
    let eq26_residual = r.frobenius_norm();

    let w_tangent_residual = t.project_unchecked(w).frobenius_norm();
    let w_norm = spectral_norm(w)?;
    let f_support_residual = project_omega_unchecked(f, &omega).frobenius_norm();
    let f_inf = f.max_abs();
    let b_frob = pb.frobenius_norm();
    let constraint27_ok = constraint27(lambda, alpha, beta);
    let pt_pomega_norm = pomega_pt_norm(&t, &omega);

    let d_norm = (m_true + s_true).frobenius_norm();
    let passed = eq26_residual <= tol * d_norm.max(1.0)
        && w_tangent_residual <= tol * w.frobenius_norm().max(1.0)
        && w_norm <= beta
        && f_support_residual <= tol * f.frobenius_norm().max(1.0)
        && f_inf <= beta
        && b_frob <= alpha
        && constraint27_ok
        && pt_pomega_norm <= 0.5;
    Ok(Theorem5Report {
        eq26_residual,
        w_tangent_residual,
        w_norm,
        f_support_residual,
        f_inf,
        b_frob,
        alpha,
        beta,
        constraint27_ok,
        pt_pomega_norm,
        passed,
    })
}

/// A triple `(W, F, B)` with the parameters it is meant to be checked at.
#[derive(Clone, Debug)]
pub struct Theorem5Candidate {
    pub w: DenseMatrix,
    pub f: DenseMatrix,
    pub b: DenseMatrix,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
}

/// Assembles `W = W^L + W^S` and solves the stationarity equation for the rest:
/// with `R = UVᵀ + W + (M − S₀)/τ − λ sgn S₀`, `F = P_Ω⊥ R / λ` and `B = P_Ω R / λ`.
/// The parameters follow `α = ε/(2λ)`, `β = 1 − ε`.
#[allow(clippy::too_many_arguments)]
pub fn theorem5_candidate(
    wl: &DenseMatrix,
    ws: &DenseMatrix,
    m_true: &DenseMatrix,
    s_true: &DenseMatrix,
    lambda: f64,
    tau: f64,
    epsilon: f64,
) -> Result<Theorem5Candidate> {
    let shape = m_true.shape();
    for x in [wl, ws, s_true] {
        x.ensure_shape(shape)?;
    }
    validate_tau(tau)?;
    if !(lambda > 0.0) {
        return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
    }
    let omega = SupportSet::of_nonzeros(s_true);
    let t = TangentBasis::of_matrix(m_true, DEFAULT_RANK_CUTOFF)?;
    let w = wl + ws;
    let mut r = t.uv_t();
    r.axpy(1.0, &w);
    r.axpy(1.0 / tau, m_true);
    r.axpy(-1.0 / tau, s_true);
    r.axpy(-lambda, &s_true.signum());
    let on = project_omega_unchecked(&r, &omega);
    let f = (&r - &on).scale(1.0 / lambda);
    let b = on.scale(1.0 / lambda);
    Ok(Theorem5Candidate {
        w,
        f,
        b,
        alpha: epsilon / (2.0 * lambda),
        beta: 1.0 - epsilon,
        epsilon,
    })
}
