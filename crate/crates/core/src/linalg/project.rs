use crate::error::{Error, Result};
use crate::linalg::norms::spectral_deviation_from_identity;
use crate::linalg::svd::{svd_strict_rank, SvdFactors};
use crate::linalg::{DenseMatrix, SupportSet};

/// `P_Ω x`: keeps the entries on `Ω`, zeroes the rest.
pub fn project_omega(x: &DenseMatrix, omega: &SupportSet) -> Result<DenseMatrix> {
    omega.ensure_matches(x)?;
    Ok(project_omega_unchecked(x, omega))
}

/// `P_Ω⊥ x = x − P_Ω x`.
pub fn project_omega_perp(x: &DenseMatrix, omega: &SupportSet) -> Result<DenseMatrix> {
    omega.ensure_matches(x)?;
    let mut out = x.clone();
    let data = out.as_mut_slice();
    for &k in omega.flat() {
        data[k] = 0.0;
    }
    Ok(out)
}

pub(crate) fn project_omega_unchecked(x: &DenseMatrix, omega: &SupportSet) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(x.rows(), x.cols());
    let src = x.as_slice();
    let dst = out.as_mut_slice();
    for &k in omega.flat() {
        dst[k] = src[k];
    }
    out
}

/// Which half of the orthogonal decomposition `x = P_T x + P_T⊥ x` to return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    T,
    TPerp,
}

/// Column and row spaces `(U, V)` of a rank-`r` matrix, spanning the tangent space
/// `T = {U X₁ᵀ + X₂ Vᵀ}`.
#[derive(Clone, Debug)]
pub struct TangentBasis {
    u: DenseMatrix,
    v: DenseMatrix,
}

impl TangentBasis {
    /// Checks orthonormality of both factors (spectral deviation `≤ 1e-10`).
    pub fn new(u: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        if u.cols() != v.cols() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} columns in v", u.cols()),
                found: format!("{} columns", v.cols()),
            });
        }
        for (name, m) in [("u", &u), ("v", &v)] {
            let dev = spectral_deviation_from_identity(&m.tr_matmul(m));
            if dev > 1e-10 {
                return Err(Error::param(
                    name,
                    format!("columns not orthonormal (deviation {dev:.2e})"),
                ));
            }
        }
        Ok(Self { u, v })
    }

    pub fn from_factors(f: &SvdFactors) -> Self {
        Self {
            u: f.u.clone(),
            v: f.v.clone(),
        }
    }

    /// Tangent space of `m` at the given rank cutoff; errors when the rank is ambiguous.
    pub fn of_matrix(m: &DenseMatrix, rank_cutoff: f64) -> Result<Self> {
        Ok(Self::from_factors(&svd_strict_rank(m, rank_cutoff)?))
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    /// Shape `(n1, n2)` of the ambient matrix space.
    pub fn shape(&self) -> (usize, usize) {
        (self.u.rows(), self.v.rows())
    }

    pub fn uv_t(&self) -> DenseMatrix {
        if self.rank() == 0 {
            return DenseMatrix::zeros(self.u.rows(), self.v.rows());
        }
        self.u.matmul_tr(&self.v)
    }

    /// `P_T y = P_U y + y P_V − P_U y P_V`, evaluated as `U A + (y V − U A V) Vᵀ`
    /// with `A = Uᵀ y`.
    pub(crate) fn project_unchecked(&self, y: &DenseMatrix) -> DenseMatrix {
        if self.rank() == 0 {
            return DenseMatrix::zeros(y.rows(), y.cols());
        }
        let a = self.u.tr_matmul(y);
        let yv = y.matmul(&self.v);
        let uav = self.u.matmul(&a.matmul(&self.v));
        let mut out = self.u.matmul(&a);
        out.axpy(1.0, &(&yv - &uav).matmul_tr(&self.v));
        out
    }

    pub fn project(&self, y: &DenseMatrix, side: Side) -> Result<DenseMatrix> {
        y.ensure_shape(self.shape())?;
        let pt = self.project_unchecked(y);
        Ok(match side {
            Side::T => pt,
            Side::TPerp => y - &pt,
        })
    }
}

/// `P_T x` or `P_T⊥ x = x − P_T x`.
pub fn project_tangent(x: &DenseMatrix, t: &TangentBasis, side: Side) -> Result<DenseMatrix> {
    t.project(x, side)
}
