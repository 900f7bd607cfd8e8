//! Power iteration for operator norms and conjugate gradients on matrix spaces.

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::operator::LinearMap;
use crate::linalg::DenseMatrix;
use crate::problem::rng::PortableRng;

pub const POWER_DEFAULT_TOL: f64 = 1e-8;
pub const POWER_DEFAULT_MAX_ITERS: usize = 1000;

#[derive(Clone, Copy, Debug)]
pub struct PowerEstimate {
    /// Estimate of `‖A‖ = sup_{‖X‖_F ≤ 1} ‖A X‖_F`.
    pub norm: f64,
    pub iterations: usize,
    /// False when `max_iters` ran out before the relative change dropped below `tol`;
    /// `norm` then holds the last estimate.
    pub converged: bool,
}

/// Operator norm by power iteration on `A* A` from a seeded Gaussian start.
pub fn power_op_norm(a: &dyn LinearMap, seed: u64, tol: f64, max_iters: usize) -> PowerEstimate {
    let (rows, cols) = a.input_shape();
    let mut rng = PortableRng::seed_from_u64(seed);
    let mut x = rng.gaussian_matrix(rows, cols);
    let start_norm = x.frobenius_norm();
    if start_norm == 0.0 {
        return PowerEstimate {
            norm: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    x = x.scale(1.0 / start_norm);

    let mut estimate = 0.0;
    for it in 1..=max_iters {
        let ax = a.apply(&x);
        let ata_x = if a.is_self_adjoint() {
            a.apply(&ax)
        } else {
            a.apply_adjoint(&ax)
        };
        // ‖A*A x‖ → ‖A‖² as x aligns with the top right singular vector.
        let next = ata_x.frobenius_norm().sqrt();
        if next == 0.0 {
            return PowerEstimate {
                norm: 0.0,
                iterations: it,
                converged: true,
            };
        }
        let change = (next - estimate).abs();
        estimate = next;
        x = ata_x.scale(1.0 / (next * next));
        if change <= tol * estimate {
            return PowerEstimate {
                norm: estimate,
                iterations: it,
                converged: true,
            };
        }
    }
    warn!("power iteration hit {max_iters} iterations; last estimate {estimate:.6e}");
    PowerEstimate {
        norm: estimate,
        iterations: max_iters,
        converged: false,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CgOptions {
    /// Stop once `‖A x − b‖_F ≤ tol ‖b‖_F`.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 500,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CgSolution {
    pub x: DenseMatrix,
    pub iterations: usize,
    /// Final `‖A x − b‖_F / ‖b‖_F`.
    pub relative_residual: f64,
}

/// Conjugate gradients for a self-adjoint map that is positive definite on the
/// subspace containing `rhs`.
pub fn cg_solve(a: &dyn LinearMap, rhs: &DenseMatrix, opts: &CgOptions) -> Result<CgSolution> {
    cg_solve_projected(a, rhs, opts, |x| x.clone())
}

/// [`cg_solve`] with every iterate and direction re-projected by `project`, which keeps the
/// iteration inside a subspace (for example `T`) despite rounding drift.
pub fn cg_solve_projected(
    a: &dyn LinearMap,
    rhs: &DenseMatrix,
    opts: &CgOptions,
    project: impl Fn(&DenseMatrix) -> DenseMatrix,
) -> Result<CgSolution> {
    rhs.ensure_shape(a.output_shape())?;
    if a.input_shape() != a.output_shape() {
        return Err(Error::dims(a.output_shape(), a.input_shape()));
    }
    let b = project(rhs);
    let b_norm = b.frobenius_norm();
    let mut x = DenseMatrix::zeros(b.rows(), b.cols());
    if b_norm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }

    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for it in 1..=opts.max_iters {
        let ap = project(&a.apply(&p));
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Err(Error::CgBreakdown);
        }
        let alpha = rr / pap;
        x.axpy(alpha, &p);
        x = project(&x);
        r.axpy(-alpha, &ap);
        let rr_next = r.dot(&r);
        if rr_next.sqrt() <= opts.tol * b_norm {
            // Confirm against the true residual; the recursive one can drift.
            let true_res = (&b - &project(&a.apply(&x))).frobenius_norm() / b_norm;
            if true_res <= opts.tol {
                return Ok(CgSolution {
                    x,
                    iterations: it,
                    relative_residual: true_res,
                });
            }
            r = &b - &project(&a.apply(&x));
            p = r.clone();
            rr = r.dot(&r);
            continue;
        }
        let beta = rr_next / rr;
        let mut p_next = r.clone();
        p_next.axpy(beta, &p);
        p = project(&p_next);
        rr = rr_next;
    }
    let residual = (&b - &project(&a.apply(&x))).frobenius_norm() / b_norm;
    Err(Error::CgNotConverged {
        iterations: opts.max_iters,
        residual,
    })
}
