use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, TangentBasis, DEFAULT_RANK_CUTOFF};

/// Largest dimension for which the `O(n²)` pairwise scan of the strong condition runs.
pub const STRONG_SCAN_MAX_DIM: usize = 2000;

/// Smallest incoherence parameters compatible with a matrix's singular vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IncoherenceReport {
    /// `max_i ‖Uᵀ e_i‖² · n1 / r`
    pub mu_row: f64,
    /// `max_i ‖Vᵀ e_i‖² · n2 / r`
    pub mu_col: f64,
    /// `‖U Vᵀ‖_∞² · n1 n2 / r`
    pub mu_uv: f64,
    pub mu: f64,
    /// Smallest `μ` meeting the pairwise bounds on `U Uᵀ` and `V Vᵀ` together with the
    /// `‖U Vᵀ‖_∞` bound; `None` above [`STRONG_SCAN_MAX_DIM`].
    pub strong_mu: Option<f64>,
}

pub fn incoherence(m: &DenseMatrix) -> Result<IncoherenceReport> {
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let t = TangentBasis::of_matrix(m, DEFAULT_RANK_CUTOFF)?;
    Ok(incoherence_of_basis(&t))
}

pub fn incoherence_of_basis(t: &TangentBasis) -> IncoherenceReport {
    let (n1, n2) = t.shape();
    let r = t.rank() as f64;
    let max_row_sq = |x: &DenseMatrix| {
        (0..x.rows())
            .map(|i| x.row(i).iter().map(|v| v * v).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let mu_row = max_row_sq(t.u()) * n1 as f64 / r;
    let mu_col = max_row_sq(t.v()) * n2 as f64 / r;
    let uv_inf = t.uv_t().max_abs();
    let mu_uv = uv_inf * uv_inf * (n1 * n2) as f64 / r;
    let mu = mu_row.max(mu_col).max(mu_uv);

    let strong_mu = (n1.max(n2) <= STRONG_SCAN_MAX_DIM).then(|| {
        let pairwise = |x: &DenseMatrix, n: usize| {
            let gram = x.matmul_tr(x);
            let diag_target = r / n as f64;
            let mut worst = 0.0f64;
            for a in 0..n {
                for b in 0..n {
                    let target = if a == b { diag_target } else { 0.0 };
                    worst = worst.max((gram.get(a, b) - target).abs());
                }
            }
            worst * n as f64 / r.sqrt()
        };
        pairwise(t.u(), n1).max(pairwise(t.v(), n2)).max(mu_uv)
    });

    IncoherenceReport {
        mu_row,
        mu_col,
        mu_uv,
        mu,
        strong_mu,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::generate::gen_lowrank;

    #[test]
    fn coordinate_matrix_is_maximally_coherent() {
        let n = 6;
        let m = DenseMatrix::from_fn(n, n, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 });
        let rep = incoherence(&m).unwrap();
        assert!((rep.mu_row - n as f64).abs() < 1e-12);
    }

    #[test]
    fn flat_vectors_are_incoherent() {
        let n = 8;
        let x = 1.0 / (n as f64).sqrt();
        let m = DenseMatrix::from_fn(n, n, |_, _| x * x);
        let rep = incoherence(&m).unwrap();
        assert!((rep.mu_row - 1.0).abs() < 1e-12);
        assert!((rep.mu_col - 1.0).abs() < 1e-12);
        assert!((rep.mu_uv - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_rejected() {
        assert!(matches!(incoherence(&DenseMatrix::zeros(3, 3)), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn random_rank3_is_moderately_incoherent() {
        // Singular vectors are flat; the joint term carries the heavier tail of a sum of
        // Gaussian products and typically lands between 20 and 50.
        for seed in 0..20 {
            let m = gen_lowrank(100, 100, 3, seed).unwrap();
            let rep = incoherence(&m).unwrap();
            assert!(rep.mu_row <= 10.0 && rep.mu_col <= 10.0, "seed {seed}: {rep:?}");
            assert!(rep.mu_uv <= 100.0, "seed {seed}: {rep:?}");
            assert!(rep.strong_mu.unwrap() >= rep.mu_uv);
        }
    }
}
