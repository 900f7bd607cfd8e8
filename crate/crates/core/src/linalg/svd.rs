use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::svd::{self as faer_svd, ComputeSvdVectors};
use faer::{Mat, Par};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Singular values at or below `DEFAULT_RANK_CUTOFF * σ₁` count as zero.
pub const DEFAULT_RANK_CUTOFF: f64 = 1e-10;

/// Thin, rank-revealing SVD `A = U diag(σ) Vᵀ` with `σ` strictly positive and nonincreasing.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    /// `n1 x k`, orthonormal columns.
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    /// `n2 x k`, orthonormal columns.
    pub v: DenseMatrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(σ) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.reconstruct_with(|s| s)
    }

    /// `U diag(f(σ)) Vᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let mut us = self.u.clone();
        let k = self.rank();
        for i in 0..us.rows() {
            for (c, &s) in self.sigma.iter().enumerate() {
                let value = us.get(i, c) * f(s);
                us.set(i, c, value);
            }
        }
        if k == 0 {
            return DenseMatrix::zeros(self.u.rows(), self.v.rows());
        }
        us.matmul_tr(&self.v)
    }

    /// `U Vᵀ`, the sign part of the nuclear-norm subgradient.
    pub fn uv_t(&self) -> DenseMatrix {
        self.reconstruct_with(|_| 1.0)
    }

    /// Keeps the leading `k` triplets.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.rank());
        let take = |m: &DenseMatrix| DenseMatrix::from_fn(m.rows(), k, |i, j| m.get(i, j));
        Self {
            u: take(&self.u),
            sigma: self.sigma[..k].to_vec(),
            v: take(&self.v),
        }
    }
}

type Factors = (Mat<f64>, Mat<f64>);

/// Runs the divide-and-conquer SVD single-threaded, so results never depend on the
/// thread pool. Returns `σ` (nonincreasing) and, if requested, thin `U` and `V`.
fn decompose(a: &DenseMatrix, vectors: bool) -> Result<(Vec<f64>, Option<Factors>)> {
    let (rows, cols) = a.shape();
    let k = rows.min(cols);
    let a = Mat::from_fn(rows, cols, |i, j| a.get(i, j));
    let mut s = Diag::<f64>::zeros(k);
    let compute = if vectors {
        ComputeSvdVectors::Thin
    } else {
        ComputeSvdVectors::No
    };
    let mut factors = vectors.then(|| (Mat::<f64>::zeros(rows, k), Mat::<f64>::zeros(cols, k)));
    let scratch = faer_svd::svd_scratch::<f64>(rows, cols, compute, compute, Par::Seq, Default::default());
    let mut buffer = MemBuffer::new(scratch);
    let (u, v) = match factors.as_mut() {
        Some((u, v)) => (Some(u.as_mut()), Some(v.as_mut())),
        None => (None, None),
    };
    faer_svd::svd(
        a.as_ref(),
        s.as_mut(),
        u,
        v,
        Par::Seq,
        MemStack::new(&mut buffer),
        Default::default(),
    )
    .map_err(|_| Error::SvdNotConverged)?;
    let sigma = s.column_vector().iter().copied().collect();
    Ok((sigma, factors))
}

/// Full set of `min(n1, n2)` singular values, sorted nonincreasing.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    Ok(decompose(a, false)?.0)
}

/// Thin SVD truncated at `rank_cutoff`: triplets with `σ_i <= rank_cutoff * σ₁` are dropped.
///
/// A zero matrix yields `k = 0` and empty factors.
pub fn svd(a: &DenseMatrix, rank_cutoff: f64) -> Result<SvdFactors> {
    if !(rank_cutoff >= 0.0) {
        return Err(Error::param(
            "rank_cutoff",
            format!("must be nonnegative, got {rank_cutoff}"),
        ));
    }
    let (rows, cols) = a.shape();
    let full = full_svd(a)?;
    let Some(&top) = full.sigma.first() else {
        return Ok(empty_factors(rows, cols));
    };
    let k = full
        .sigma
        .iter()
        .take_while(|&&s| s > 0.0 && s > rank_cutoff * top)
        .count();
    Ok(full.truncated(k))
}

/// Like [`svd`], but refuses to guess when a singular value lies within two decades of the
/// cutoff on either side.
pub fn svd_strict_rank(a: &DenseMatrix, rank_cutoff: f64) -> Result<SvdFactors> {
    let full = full_svd(a)?;
    let Some(&top) = full.sigma.first() else {
        return Ok(empty_factors(a.rows(), a.cols()));
    };
    if top > 0.0 {
        for &s in &full.sigma {
            let ratio = s / top;
            if ratio > rank_cutoff * 1e-2 && ratio <= rank_cutoff * 1e2 {
                return Err(Error::AmbiguousRank {
                    cutoff: rank_cutoff,
                    ratio,
                });
            }
        }
    }
    svd(a, rank_cutoff)
}

/// All `min(n1, n2)` triplets, including zero singular values.
pub(crate) fn full_svd(a: &DenseMatrix) -> Result<SvdFactors> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(empty_factors(rows, cols));
    }
    let (sigma, factors) = decompose(a, true)?;
    let (u, v) = factors.expect("vectors requested");
    let k = sigma.len();
    Ok(SvdFactors {
        u: DenseMatrix::from_fn(rows, k, |i, j| u[(i, j)]),
        sigma,
        v: DenseMatrix::from_fn(cols, k, |i, j| v[(i, j)]),
    })
}

fn empty_factors(rows: usize, cols: usize) -> SvdFactors {
    SvdFactors {
        u: DenseMatrix::zeros(rows, 0),
        sigma: Vec::new(),
        v: DenseMatrix::zeros(cols, 0),
    }
}
