use serde::Serialize;

use crate::error::Result;
use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{
    cg_solve_projected, spectral_norm, svd, CgOptions, DenseMatrix, FnMap, SupportSet, TangentBasis,
    DEFAULT_RANK_CUTOFF,
};
use crate::mc::validate_tau;
use crate::rpca::solver::validate_lambda;

const POLISH_ROUNDS: usize = 500;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RpcaOptimalityReport {
    /// `max(‖P_T Y − (UVᵀ + L/τ)‖_F / ‖UVᵀ + L/τ‖_F, ‖P_T⊥ Y‖ − 1, 0)` for the fitted `Y`.
    pub kkt_residual: f64,
    /// `‖D − L − S‖_F / ‖D‖_F`
    pub feasibility: f64,
    pub passed: bool,
}

/// Looks for one multiplier `Y` in both subdifferentials at `(L, S)`.
///
/// The S-side fixes `Y = λ sgn S + S/τ` on `supp(S)` and confines the remaining entries to
/// `[−λ, λ]`. Those free entries are fitted to the L-side equation `P_T Y = UVᵀ + L/τ` by
/// minimum-norm least squares, clipped to the box, then polished by alternating projections
/// between the box and the affine set. The L-side violation of the best iterate is reported.
pub fn check_rpca_optimality(
    l: &DenseMatrix,
    s: &DenseMatrix,
    d: &DenseMatrix,
    lambda: f64,
    tau: f64,
    tol: f64,
) -> Result<RpcaOptimalityReport> {
    validate_lambda(lambda)?;
    validate_tau(tau)?;
    l.ensure_shape(d.shape())?;
    s.ensure_shape(d.shape())?;

    let mut resid = d - l;
    resid.axpy(-1.0, s);
    let d_norm = d.frobenius_norm();
    let feasibility = if d_norm > 0.0 {
        resid.frobenius_norm() / d_norm
    } else {
        resid.frobenius_norm()
    };

    let t = TangentBasis::from_factors(&svd(l, DEFAULT_RANK_CUTOFF)?);
    let mut target = t.uv_t();
    target.axpy(1.0 / tau, l);
    let target_norm = target.frobenius_norm().max(f64::MIN_POSITIVE);

    let support = SupportSet::of_nonzeros(s);
    let free = support.complement();
    let mut fixed = s.signum().scale(lambda);
    fixed.axpy(1.0 / tau, s);

    let project_box = |y: &DenseMatrix| {
        let mask = support.mask();
        let mut out = fixed.clone();
        for (k, o) in out.as_mut_slice().iter_mut().enumerate() {
            if !mask[k] {
                *o = y.as_slice()[k].clamp(-lambda, lambda);
            }
        }
        out
    };
    let residual_of = |y: &DenseMatrix| -> Result<f64> {
        let pt = t.project_unchecked(y);
        let tangent = (&pt - &target).frobenius_norm() / target_norm;
        let perp = spectral_norm(&(y - &pt))?;
        Ok(tangent.max(perp - 1.0).max(0.0))
    };

    // Minimum-norm fit of the free entries.
    let rhs = project_omega_unchecked(&(&target - &t.project_unchecked(&fixed)), &free);
    let map = FnMap {
        input_shape: d.shape(),
        output_shape: d.shape(),
        forward: |x: &DenseMatrix| {
            project_omega_unchecked(&t.project_unchecked(&project_omega_unchecked(x, &free)), &free)
        },
        adjoint: |x: &DenseMatrix| {
            project_omega_unchecked(&t.project_unchecked(&project_omega_unchecked(x, &free)), &free)
        },
        self_adjoint: true,
    };
    let cg = CgOptions {
        tol: 1e-12,
        max_iters: 1000,
    };
    let z = cg_solve_projected(&map, &rhs, &cg, |x| project_omega_unchecked(x, &free))
        .map(|sol| sol.x)
        .unwrap_or_else(|_| DenseMatrix::zeros(d.rows(), d.cols()));

    let mut y = project_box(&(&fixed + &z));
    let mut best = residual_of(&y)?;
    if best > tol {
        for _ in 0..POLISH_ROUNDS {
            let pt = t.project_unchecked(&y);
            let on_affine = &(&y - &pt) + &target;
            y = project_box(&on_affine);
            let tangent = (&t.project_unchecked(&y) - &target).frobenius_norm() / target_norm;
            if tangent < best {
                best = best.min(residual_of(&y)?);
                if best <= tol {
                    break;
                }
            }
        }
    }

    Ok(RpcaOptimalityReport {
        kkt_residual: best,
        feasibility,
        passed: best <= tol && feasibility <= tol,
    })
}
