use serde::Serialize;

use crate::error::Result;
use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{
    cg_solve_projected, spectral_norm, CgOptions, DenseMatrix, LinearMap, SupportSet, TangentBasis, DEFAULT_RANK_CUTOFF,
};

/// `P_Ω P_T⊥ P_Ω`, self-adjoint and positive on matrices supported on `Ω` when
/// `‖P_Ω P_T‖ < 1`.
struct OmegaTperpMap<'a> {
    tangent: &'a TangentBasis,
    omega: &'a SupportSet,
}

impl LinearMap for OmegaTperpMap<'_> {
    fn input_shape(&self) -> (usize, usize) {
        self.omega.shape()
    }

    fn output_shape(&self) -> (usize, usize) {
        self.omega.shape()
    }

    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        let x = project_omega_unchecked(x, self.omega);
        let perp = &x - &self.tangent.project_unchecked(&x);
        project_omega_unchecked(&perp, self.omega)
    }

    fn apply_adjoint(&self, y: &DenseMatrix) -> DenseMatrix {
        self.apply(y)
    }

    fn is_self_adjoint(&self) -> bool {
        true
    }
}

/// Smallest-norm `W ∈ T⊥` with `P_Ω W = target`: `W = P_T⊥ z` where
/// `(P_Ω P_T⊥ P_Ω) z = target` on `Ω`.
pub fn min_norm_tperp(
    t: &TangentBasis,
    omega: &SupportSet,
    target: &DenseMatrix,
    cg: &CgOptions,
) -> Result<DenseMatrix> {
    let map = OmegaTperpMap { tangent: t, omega };
    let z = cg_solve_projected(&map, target, cg, |x| project_omega_unchecked(x, omega))?.x;
    Ok(&z - &t.project_unchecked(&z))
}

#[derive(Clone, Debug)]
pub struct LemmaWitnesses {
    /// Cancels `UVᵀ` on `Ω`.
    pub wl: DenseMatrix,
    /// Equals `λ sgn S₀` on `Ω`.
    pub ws: DenseMatrix,
}

/// Least-squares witnesses in `T⊥`: `P_Ω W^L = −P_Ω UVᵀ` and `P_Ω W^S = λ sgn S₀`, each
/// of minimal Frobenius norm.
pub fn build_lemma_witnesses(m_true: &DenseMatrix, s_true: &DenseMatrix, lambda: f64) -> Result<LemmaWitnesses> {
    build_lemma_witnesses_with(m_true, s_true, lambda, &CgOptions::default())
}

pub fn build_lemma_witnesses_with(
    m_true: &DenseMatrix,
    s_true: &DenseMatrix,
    lambda: f64,
    cg: &CgOptions,
) -> Result<LemmaWitnesses> {
    s_true.ensure_shape(m_true.shape())?;
    let omega = SupportSet::of_nonzeros(s_true);
    let t = TangentBasis::of_matrix(m_true, DEFAULT_RANK_CUTOFF)?;
    let target_l = project_omega_unchecked(&t.uv_t(), &omega).scale(-1.0);
    let wl = min_norm_tperp(&t, &omega, &target_l, cg)?;
    let ws = min_norm_tperp(&t, &omega, &s_true.signum().scale(lambda), cg)?;
    Ok(LemmaWitnesses { wl, ws })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LemmaWitnessReport {
    /// `‖W^L‖`, needs `< 1/4`.
    pub wl_norm: f64,
    /// `‖P_Ω(UVᵀ + W^L)‖_F`, needs `< λ/4`.
    pub wl_omega_frob: f64,
    /// `‖P_Ω⊥(UVᵀ + W^L)‖_∞`, needs `< λ/4`.
    pub wl_omegaperp_inf: f64,
    /// `‖W^S‖`, needs `< 1/4`.
    pub ws_norm: f64,
    /// `‖P_Ω⊥ W^S‖_∞`, needs `< λ/4`.
    pub ws_omegaperp_inf: f64,
    /// `‖P_Ω W^S − λ sgn S₀‖_F`
    pub ws_sign_residual: f64,
    /// `‖P_T W^L‖_F`
    pub wl_tangent_residual: f64,
    /// `‖P_T W^S‖_F`
    pub ws_tangent_residual: f64,
    pub norm_threshold: f64,
    pub entry_threshold: f64,
    pub lemma2: [bool; 3],
    pub lemma3: [bool; 2],
    /// Both witnesses lie in `T⊥` and `W^S` matches the signs on `Ω`.
    pub structure_ok: bool,
    pub passed: bool,
}

/// Relative tolerance for the structural identities (membership in `T⊥`, sign match).
const STRUCTURE_TOL: f64 = 1e-8;

pub fn check_lemma_witnesses(
    wl: &DenseMatrix,
    ws: &DenseMatrix,
    m_true: &DenseMatrix,
    s_true: &DenseMatrix,
    lambda: f64,
) -> Result<LemmaWitnessReport> {
    let shape = m_true.shape();
    for x in [wl, ws, s_true] {
        x.ensure_shape(shape)?;
    }
    let omega = SupportSet::of_nonzeros(s_true);
    let t = TangentBasis::of_matrix(m_true, DEFAULT_RANK_CUTOFF)?;

    let mut uv_wl = t.uv_t();
    uv_wl.axpy(1.0, wl);
    let uv_wl_on = project_omega_unchecked(&uv_wl, &omega);
    let wl_norm = spectral_norm(wl)?;
    let wl_omega_frob = uv_wl_on.frobenius_norm();
    let wl_omegaperp_inf = (&uv_wl - &uv_wl_on).max_abs();

    let ws_on = project_omega_unchecked(ws, &omega);
    let ws_norm = spectral_norm(ws)?;
    let ws_omegaperp_inf = (ws - &ws_on).max_abs();
    let sign_target = s_true.signum().scale(lambda);
    let ws_sign_residual = (&ws_on - &sign_target).frobenius_norm();

    let wl_tangent_residual = t.project_unchecked(wl).frobenius_norm();
    let ws_tangent_residual = t.project_unchecked(ws).frobenius_norm();

    let norm_threshold = 0.25;
    let entry_threshold = lambda / 4.0;
    let lemma2 = [
        wl_norm < norm_threshold,
        wl_omega_frob < entry_threshold,
        wl_omegaperp_inf < entry_threshold,
    ];
    let lemma3 = [ws_norm < norm_threshold, ws_omegaperp_inf < entry_threshold];
    let structure_ok = wl_tangent_residual <= STRUCTURE_TOL * wl.frobenius_norm().max(1.0)
        && ws_tangent_residual <= STRUCTURE_TOL * ws.frobenius_norm().max(1.0)
        && ws_sign_residual <= STRUCTURE_TOL * sign_target.frobenius_norm().max(1.0);
    let passed = lemma2.iter().chain(&lemma3).all(|&ok| ok) && structure_ok;
    Ok(LemmaWitnessReport {
        wl_norm,
        wl_omega_frob,
        wl_omegaperp_inf,
        ws_norm,
        ws_omegaperp_inf,
        ws_sign_residual,
        wl_tangent_residual,
        ws_tangent_residual,
        norm_threshold,
        entry_threshold,
        lemma2,
        lemma3,
        structure_ok,
        passed,
    })
}
