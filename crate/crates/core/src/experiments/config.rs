//! JSON configuration files. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::experiments::io::ProblemKind;
use crate::experiments::ExpError;
use crate::mc::McSolveOptions;
use crate::problem::CorruptionModel;
use crate::rpca::RpcaSolveOptions;

fn default_magnitude() -> f64 {
    1.0
}

fn default_threshold() -> f64 {
    1e-3
}

fn default_trials() -> usize {
    1
}

/// Configuration for `gen`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub problem: ProblemKind,
    pub n1: usize,
    pub n2: usize,
    pub rank: usize,
    /// Sampling rate for MC, corruption rate for RPCA.
    pub rho: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_magnitude")]
    pub magnitude: f64,
    #[serde(default)]
    pub model: CorruptionModel,
    /// RPCA only; defaults to `1/√max(n1, n2)`.
    #[serde(default)]
    pub lambda: Option<f64>,
}

/// Solver knobs shared by `solve`, `sweep` and `tau-frontier`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub feas_tol: Option<f64>,
    pub step_size: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            feas_tol: None,
            step_size: None,
        }
    }
}

impl SolverConfig {
    pub fn mc(&self) -> McSolveOptions {
        let base = McSolveOptions::default();
        McSolveOptions {
            step_size: self.step_size,
            max_iters: self.max_iters,
            feas_tol: self.feas_tol.unwrap_or(base.feas_tol),
            ..base
        }
    }

    pub fn rpca(&self) -> RpcaSolveOptions {
        let base = RpcaSolveOptions::default();
        RpcaSolveOptions {
            step_size: self.step_size,
            max_iters: self.max_iters,
            feas_tol: self.feas_tol.unwrap_or(base.feas_tol),
            ..base
        }
    }
}

/// Configuration for `sweep`: one cell per `(rank, rho, tau_multiplier)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub problem: ProblemKind,
    pub n1: usize,
    pub n2: usize,
    pub ranks: Vec<usize>,
    pub rhos: Vec<f64>,
    /// Multiples of the data-driven bound.
    pub tau_multipliers: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_threshold")]
    pub success_threshold: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_magnitude")]
    pub magnitude: f64,
    #[serde(default)]
    pub model: CorruptionModel,
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Also build and check the MC certificate for each trial.
    #[serde(default)]
    pub certify: bool,
}

fn field(name: &'static str, ok: bool, msg: impl FnOnce() -> String) -> Result<(), ExpError> {
    if ok {
        Ok(())
    } else {
        Err(ExpError::Config {
            field: name,
            msg: msg(),
        })
    }
}

fn check_dims_rank(n1: usize, n2: usize, rank: usize) -> Result<(), ExpError> {
    field("n1", n1 > 0, || "must be positive".into())?;
    field("n2", n2 > 0, || "must be positive".into())?;
    field("rank", rank <= n1.min(n2), || {
        format!("{rank} exceeds min(n1, n2) = {}", n1.min(n2))
    })
}

fn check_lambda(lambda: Option<f64>) -> Result<(), ExpError> {
    match lambda {
        Some(l) => field("lambda", l > 0.0 && l < 1.0, || format!("must lie in (0, 1), got {l}")),
        None => Ok(()),
    }
}

fn check_rho(rho: f64) -> Result<(), ExpError> {
    field("rho", (0.0..=1.0).contains(&rho), || {
        format!("must lie in [0, 1], got {rho}")
    })
}

impl SolverConfig {
    fn validate(&self) -> Result<(), ExpError> {
        field("solver.max_iters", self.max_iters > 0, || "must be positive".into())?;
        if let Some(t) = self.feas_tol {
            field("solver.feas_tol", t > 0.0, || format!("must be positive, got {t}"))?;
        }
        if let Some(s) = self.step_size {
            field("solver.step_size", s > 0.0, || format!("must be positive, got {s}"))?;
        }
        Ok(())
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), ExpError> {
        check_dims_rank(self.n1, self.n2, self.rank)?;
        check_rho(self.rho)?;
        field("magnitude", self.magnitude > 0.0 && self.magnitude.is_finite(), || {
            format!("must be positive, got {}", self.magnitude)
        })?;
        check_lambda(self.lambda)
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExpError> {
        field("ranks", !self.ranks.is_empty(), || "must not be empty".into())?;
        field("rhos", !self.rhos.is_empty(), || "must not be empty".into())?;
        field("tau_multipliers", !self.tau_multipliers.is_empty(), || {
            "must not be empty".into()
        })?;
        for &r in &self.ranks {
            field("ranks", r > 0, || "entries must be positive".into())?;
            check_dims_rank(self.n1, self.n2, r)?;
        }
        for &rho in &self.rhos {
            field("rhos", rho > 0.0 && rho <= 1.0, || {
                format!("entries must lie in (0, 1], got {rho}")
            })?;
        }
        for &t in &self.tau_multipliers {
            field("tau_multipliers", t > 0.0 && t.is_finite(), || {
                format!("entries must be positive, got {t}")
            })?;
        }
        field("trials", self.trials >= 1, || "must be at least 1".into())?;
        field("success_threshold", self.success_threshold > 0.0, || {
            "must be positive".into()
        })?;
        field("magnitude", self.magnitude > 0.0 && self.magnitude.is_finite(), || {
            "must be positive".into()
        })?;
        check_lambda(self.lambda)?;
        self.solver.validate()
    }

    pub fn cell_count(&self) -> usize {
        self.ranks.len() * self.rhos.len() * self.tau_multipliers.len()
    }

    /// `(rank, rho, tau_multiplier)` of a cell; ranks vary slowest.
    pub fn cell(&self, index: usize) -> (usize, f64, f64) {
        let nt = self.tau_multipliers.len();
        let nr = self.rhos.len();
        (
            self.ranks[index / (nr * nt)],
            self.rhos[(index / nt) % nr],
            self.tau_multipliers[index % nt],
        )
    }
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ExpError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExpError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ExpError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        msg: e.to_string(),
    })
}
