use crate::error::Result;
use crate::linalg::svd::singular_values;
use crate::linalg::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    /// `√Σ x_ij²`
    Frobenius,
    /// Largest singular value.
    Spectral,
    /// Sum of singular values.
    Nuclear,
    /// `max |x_ij|`
    Linf,
    /// `Σ |x_ij|`
    L1,
}

pub fn matrix_norm(x: &DenseMatrix, kind: NormKind) -> Result<f64> {
    Ok(match kind {
        NormKind::Frobenius => x.frobenius_norm(),
        NormKind::Spectral => spectral_norm(x)?,
        NormKind::Nuclear => nuclear_norm(x)?,
        NormKind::Linf => x.max_abs(),
        NormKind::L1 => x.l1_norm(),
    })
}

pub fn spectral_norm(x: &DenseMatrix) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    Ok(singular_values(x)?.first().copied().unwrap_or(0.0))
}

pub fn nuclear_norm(x: &DenseMatrix) -> Result<f64> {
    if x.is_zero() {
        return Ok(0.0);
    }
    Ok(singular_values(x)?.iter().sum())
}

/// `‖G − I‖` for a square Gram matrix `G`; zero-sized input gives 0.
pub(crate) fn spectral_deviation_from_identity(gram: &DenseMatrix) -> f64 {
    if gram.rows() == 0 {
        return 0.0;
    }
    let dev = &DenseMatrix::identity(gram.rows()) - gram;
    spectral_norm(&dev).unwrap_or(f64::INFINITY)
}
