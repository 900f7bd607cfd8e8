use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::project::project_omega_unchecked;
use crate::linalg::{DenseMatrix, SupportSet};
use crate::problem::rng::{derive_seed, PortableRng};

/// `M = A Bᵀ` with `A` (`n1 x r`) then `B` (`n2 x r`) filled row-major from one Gaussian stream.
pub fn gen_lowrank(n1: usize, n2: usize, r: usize, seed: u64) -> Result<DenseMatrix> {
    if r > n1.min(n2) {
        return Err(Error::param(
            "rank",
            format!("{r} exceeds min(n1, n2) = {}", n1.min(n2)),
        ));
    }
    if r == 0 {
        return Ok(DenseMatrix::zeros(n1, n2));
    }
    let mut rng = PortableRng::seed_from_u64(seed);
    let a = rng.gaussian_matrix(n1, r);
    let b = rng.gaussian_matrix(n2, r);
    Ok(a.matmul_tr(&b))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum SamplingModel {
    /// Each cell independently with probability `ρ`.
    Bernoulli(f64),
    /// Exactly `m` distinct cells, uniformly.
    Uniform(usize),
}

/// Draws `Ω`. Cells are visited in row-major order with one uniform per cell.
///
/// Bernoulli keeps a cell when `u < ρ`. Uniform uses selection sampling: with `k` cells
/// still needed and `t` remaining, a cell is kept when `u·t < k`.
pub fn sample_support(n1: usize, n2: usize, model: SamplingModel, seed: u64) -> Result<SupportSet> {
    let total = n1 * n2;
    let mut rng = PortableRng::seed_from_u64(seed);
    let mut flat = Vec::new();
    match model {
        SamplingModel::Bernoulli(rho) => {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::param("rho", format!("must lie in [0, 1], got {rho}")));
            }
            for k in 0..total {
                if rng.uniform() < rho {
                    flat.push(k);
                }
            }
        }
        SamplingModel::Uniform(m) => {
            if m > total {
                return Err(Error::param("m", format!("{m} exceeds n1*n2 = {total}")));
            }
            let mut needed = m;
            for k in 0..total {
                if needed == 0 {
                    break;
                }
                let remaining = (total - k) as f64;
                if rng.uniform() * remaining < needed as f64 {
                    flat.push(k);
                    needed -= 1;
                }
            }
        }
    }
    Ok(SupportSet::from_sorted_flat(n1, n2, flat))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionModel {
    /// `±magnitude` with independent fair signs.
    #[default]
    SymmetricSign,
    /// `magnitude · g` with `g` standard Gaussian.
    Gaussian,
}

/// Sparse corruption supported exactly on `omega` (one draw per index, sorted order).
pub fn gen_sparse(omega: &SupportSet, magnitude: f64, model: CorruptionModel, seed: u64) -> Result<DenseMatrix> {
    if !(magnitude > 0.0) || !magnitude.is_finite() {
        return Err(Error::param("magnitude", format!("must be positive, got {magnitude}")));
    }
    let mut rng = PortableRng::seed_from_u64(seed);
    let mut s = DenseMatrix::zeros(omega.rows(), omega.cols());
    let data = s.as_mut_slice();
    for &k in omega.flat() {
        data[k] = match model {
            CorruptionModel::SymmetricSign => {
                if rng.uniform() < 0.5 {
                    magnitude
                } else {
                    -magnitude
                }
            }
            CorruptionModel::Gaussian => loop {
                // A zero draw would fall off the support.
                let g = rng.gaussian();
                if g != 0.0 {
                    break magnitude * g;
                }
            },
        };
    }
    Ok(s)
}

/// A matrix completion problem with its ground truth.
#[derive(Clone, Debug)]
pub struct McInstance {
    pub m_true: DenseMatrix,
    pub omega: SupportSet,
    /// `P_Ω M`.
    pub observed: DenseMatrix,
    pub rank: usize,
    /// Nominal Bernoulli rate used to draw `Ω`.
    pub rho: f64,
    pub seed: u64,
}

impl McInstance {
    /// `M` from stream 0 of `seed`, `Ω ∼ Ber(ρ)` from stream 1.
    pub fn generate(n1: usize, n2: usize, rank: usize, rho: f64, seed: u64) -> Result<Self> {
        let m_true = gen_lowrank(n1, n2, rank, derive_seed(seed, 0))?;
        let omega = sample_support(n1, n2, SamplingModel::Bernoulli(rho), derive_seed(seed, 1))?;
        Ok(Self::from_parts(m_true, omega, rank, rho, seed))
    }

    pub fn from_parts(m_true: DenseMatrix, omega: SupportSet, rank: usize, rho: f64, seed: u64) -> Self {
        assert_eq!(m_true.shape(), omega.shape(), "instance shape mismatch");
        let observed = project_omega_unchecked(&m_true, &omega);
        Self {
            m_true,
            omega,
            observed,
            rank,
            rho,
            seed,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.m_true.shape()
    }

    /// Empirical `p = |Ω| / (n1 n2)`.
    pub fn sampling_ratio(&self) -> f64 {
        self.omega.density()
    }
}

/// A robust PCA problem `D = M + S₀` with its ground truth.
#[derive(Clone, Debug)]
pub struct RpcaInstance {
    pub m_true: DenseMatrix,
    pub s_true: DenseMatrix,
    /// Support of `S₀`.
    pub omega: SupportSet,
    pub d: DenseMatrix,
    pub rank: usize,
    pub rho: f64,
    pub lambda: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RpcaSpec {
    pub n1: usize,
    pub n2: usize,
    pub rank: usize,
    /// Bernoulli corruption rate.
    pub rho: f64,
    pub magnitude: f64,
    pub model: CorruptionModel,
    /// `None` picks `1/√max(n1, n2)`.
    pub lambda: Option<f64>,
}

impl RpcaInstance {
    /// `M` from stream 0, support from stream 1, corruption values from stream 2.
    pub fn generate(spec: &RpcaSpec, seed: u64) -> Result<Self> {
        let m_true = gen_lowrank(spec.n1, spec.n2, spec.rank, derive_seed(seed, 0))?;
        let omega = sample_support(
            spec.n1,
            spec.n2,
            SamplingModel::Bernoulli(spec.rho),
            derive_seed(seed, 1),
        )?;
        let s_true = gen_sparse(&omega, spec.magnitude, spec.model, derive_seed(seed, 2))?;
        let lambda = spec
            .lambda
            .unwrap_or_else(|| crate::rpca::default_lambda(spec.n1, spec.n2));
        Ok(Self::from_parts(m_true, s_true, spec.rank, spec.rho, lambda, seed))
    }

    pub fn from_parts(m_true: DenseMatrix, s_true: DenseMatrix, rank: usize, rho: f64, lambda: f64, seed: u64) -> Self {
        assert_eq!(m_true.shape(), s_true.shape(), "instance shape mismatch");
        let omega = SupportSet::of_nonzeros(&s_true);
        let d = &m_true + &s_true;
        Self {
            m_true,
            s_true,
            omega,
            d,
            rank,
            rho,
            lambda,
            seed,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.d.shape()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{svd, DEFAULT_RANK_CUTOFF};

    #[test]
    fn lowrank_rank_zero_and_validation() {
        assert!(gen_lowrank(4, 5, 0, 1).unwrap().is_zero());
        assert!(matches!(
            gen_lowrank(4, 5, 5, 1),
            Err(Error::InvalidParameter { name: "rank", .. })
        ));
    }

    #[test]
    fn lowrank_is_deterministic_and_has_rank() {
        let a = gen_lowrank(50, 50, 3, 11).unwrap();
        let b = gen_lowrank(50, 50, 3, 11).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert_eq!(svd(&a, DEFAULT_RANK_CUTOFF).unwrap().rank(), 3);
        assert_ne!(gen_lowrank(50, 50, 3, 12).unwrap(), a);
    }

    #[test]
    fn bernoulli_extremes() {
        assert_eq!(
            sample_support(4, 3, SamplingModel::Bernoulli(1.0), 1).unwrap(),
            SupportSet::full(4, 3)
        );
        assert!(sample_support(4, 3, SamplingModel::Bernoulli(0.0), 1)
            .unwrap()
            .is_empty());
        assert!(sample_support(4, 3, SamplingModel::Bernoulli(1.5), 1).is_err());
    }

    #[test]
    fn bernoulli_density_concentrates() {
        for seed in 0..20 {
            let s = sample_support(100, 100, SamplingModel::Bernoulli(0.3), seed).unwrap();
            let d = s.density();
            assert!((0.27..=0.33).contains(&d), "seed {seed}: {d}");
        }
    }

    #[test]
    fn uniform_model_exact_cardinality() {
        for m in [0, 1, 17, 120] {
            let s = sample_support(10, 12, SamplingModel::Uniform(m), 3).unwrap();
            assert_eq!(s.len(), m);
        }
        assert!(sample_support(3, 3, SamplingModel::Uniform(10), 3).is_err());
    }

    #[test]
    fn sparse_signs() {
        let empty = SupportSet::empty(5, 5);
        assert!(gen_sparse(&empty, 1.0, CorruptionModel::SymmetricSign, 1)
            .unwrap()
            .is_zero());
        for seed in 0..20 {
            let omega = sample_support(40, 40, SamplingModel::Uniform(600), seed).unwrap();
            let s = gen_sparse(&omega, 2.5, CorruptionModel::SymmetricSign, seed + 100).unwrap();
            assert_eq!(s.max_abs(), 2.5);
            assert_eq!(SupportSet::of_nonzeros(&s), omega);
            let pos = s.as_slice().iter().filter(|&&x| x > 0.0).count() as f64 / omega.len() as f64;
            assert!((0.4..=0.6).contains(&pos), "seed {seed}: {pos}");
        }
    }

    #[test]
    fn instances_satisfy_construction_invariants() {
        let mc = McInstance::generate(20, 15, 2, 0.5, 4).unwrap();
        assert_eq!(
            mc.observed,
            crate::linalg::project_omega(&mc.m_true, &mc.omega).unwrap()
        );
        let spec = RpcaSpec {
            n1: 20,
            n2: 15,
            rank: 2,
            rho: 0.1,
            magnitude: 1.0,
            model: CorruptionModel::SymmetricSign,
            lambda: None,
        };
        let rp = RpcaInstance::generate(&spec, 4).unwrap();
        assert_eq!(rp.d, &rp.m_true + &rp.s_true);
        assert!((rp.lambda - 1.0 / 20f64.sqrt()).abs() < 1e-15);
        let off = crate::linalg::project_omega_perp(&rp.s_true, &rp.omega).unwrap();
        assert!(off.is_zero());
    }
}
