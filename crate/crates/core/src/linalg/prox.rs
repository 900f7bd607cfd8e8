use crate::error::{Error, Result};
use crate::linalg::svd::{full_svd, SvdFactors};
use crate::linalg::DenseMatrix;

/// Singular value shrinkage: `U max(Σ − θ, 0) Vᵀ`, the minimizer of
/// `θ‖X‖_* + ½‖X − Z‖_F²`.
pub fn sv_shrink(z: &DenseMatrix, theta: f64) -> Result<DenseMatrix> {
    Ok(sv_shrink_factors(z, theta)?.reconstruct())
}

/// Factored form of [`sv_shrink`]; only triplets with `σ > θ` survive, with `σ − θ` stored.
pub fn sv_shrink_factors(z: &DenseMatrix, theta: f64) -> Result<SvdFactors> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::param(
            "theta",
            format!("must be positive and finite, got {theta}"),
        ));
    }
    let full = full_svd(z)?;
    let k = full.sigma.iter().take_while(|&&s| s > theta).count();
    let mut kept = full.truncated(k);
    for s in &mut kept.sigma {
        *s -= theta;
    }
    Ok(kept)
}

/// Entrywise soft thresholding `sign(z) max(|z| − θ, 0)`, the minimizer of
/// `θ‖S‖₁ + ½‖S − Z‖_F²`.
///
/// # Panics
/// If `theta` is negative or NaN.
pub fn soft_threshold(z: &DenseMatrix, theta: f64) -> DenseMatrix {
    assert!(theta >= 0.0, "soft_threshold needs theta >= 0, got {theta}");
    z.map(|x| {
        if x > theta {
            x - theta
        } else if x < -theta {
            x + theta
        } else {
            0.0
        }
    })
}
