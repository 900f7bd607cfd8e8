//! Seeded ground-truth instances and incoherence estimators.

pub mod generate;
pub mod incoherence;
pub mod rng;

pub use generate::{
    gen_lowrank, gen_sparse, sample_support, CorruptionModel, McInstance, RpcaInstance, RpcaSpec, SamplingModel,
};
pub use incoherence::{incoherence, incoherence_of_basis, IncoherenceReport};
pub use rng::{derive_seed, PortableRng};
