//! The subcommands behind the `lowrank` binary.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::experiments::config::{GenConfig, SolverConfig, SweepConfig};
use crate::experiments::io::{read_bundle, write_mc_bundle, write_rpca_bundle, Bundle, InstanceMeta, ProblemKind};
use crate::experiments::ExpError;
use crate::linalg::{DenseMatrix, SupportSet};
use crate::mc::{
    build_mc_certificate, check_mc_certificate, mc_tau_bound_data, mc_tau_bound_oracle, relative_error, solve_mc,
    McSolveOptions,
};
use crate::problem::{McInstance, RpcaInstance, RpcaSpec};
use crate::rpca::{
    build_lemma_witnesses, check_lemma_witnesses, check_theorem5, default_lambda, optimal_epsilon, rpca_tau_bound_data,
    rpca_tau_bound_oracle, solve_rpca, theorem5_candidate, RpcaSolveOptions,
};

/// Result of a command: a JSON document and whether the quantitative check passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: serde_json::Value,
    pub pass: bool,
}

/// How `solve` and `certify` pick `τ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauPolicy {
    Explicit(f64),
    DataBound,
    OracleBound,
    /// Multiple of the data bound.
    Multiplier(f64),
}

impl FromStr for TauPolicy {
    type Err = String;

    /// `data_bound`, `oracle_bound`, `<x>x` (multiple of the data bound) or a plain value.
    fn from_str(s: &str) -> Result<Self, String> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        match s {
            "data_bound" => Ok(Self::DataBound),
            "oracle_bound" => Ok(Self::OracleBound),
            _ => {
                if let Some(m) = s.strip_suffix('x') {
                    match m.parse::<f64>() {
                        Ok(v) if positive(v) => Ok(Self::Multiplier(v)),
                        _ => Err(format!("bad tau multiplier {s:?}")),
                    }
                } else {
                    match s.parse::<f64>() {
                        Ok(v) if positive(v) => Ok(Self::Explicit(v)),
                        _ => Err(format!(
                            "bad tau policy {s:?}; expected data_bound, oracle_bound, <multiplier>x or a positive value"
                        )),
                    }
                }
            }
        }
    }
}

/// One solve scored against ground truth.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub n1: usize,
    pub n2: usize,
    pub r: usize,
    pub rho: f64,
    pub tau_multiplier: f64,
    pub tau: f64,
    /// Relative error of the low-rank part; absent without ground truth.
    pub rel_err: Option<f64>,
    pub success: bool,
    pub iters: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_pass: Option<bool>,
    pub wall_ms: f64,
}

pub const CSV_HEADER: [&str; 11] = [
    "seed",
    "n1",
    "n2",
    "r",
    "rho",
    "tau_multiplier",
    "tau",
    "rel_err",
    "success",
    "iters",
    "wall_ms",
];

impl TrialRecord {
    pub fn csv_row(&self) -> [String; 11] {
        [
            self.seed.to_string(),
            self.n1.to_string(),
            self.n2.to_string(),
            self.r.to_string(),
            self.rho.to_string(),
            self.tau_multiplier.to_string(),
            format!("{:e}", self.tau),
            self.rel_err.map(|e| format!("{e:e}")).unwrap_or_default(),
            self.success.to_string(),
            self.iters.to_string(),
            format!("{:.3}", self.wall_ms),
        ]
    }
}

struct Scored {
    rel_err: Option<f64>,
    iters: usize,
    converged: bool,
}

fn score(estimate: &DenseMatrix, truth: Option<&DenseMatrix>, iters: usize, converged: bool) -> Scored {
    Scored {
        rel_err: truth.map(|t| relative_error(estimate, t)),
        iters,
        converged,
    }
}

/// Solves, falling back to the last iterate when the iteration budget runs out.
fn run_mc(
    observed: &DenseMatrix,
    omega: &SupportSet,
    truth: Option<&DenseMatrix>,
    tau: f64,
    opts: &McSolveOptions,
) -> Result<Scored, Error> {
    match solve_mc(observed, omega, tau, opts) {
        Ok(sol) => Ok(score(&sol.x, truth, sol.report.iterations, true)),
        Err(Error::NotConverged {
            iterations, partial, ..
        }) => Ok(score(&partial.primary, truth, iterations, false)),
        Err(e) => Err(e),
    }
}

fn run_rpca(
    d: &DenseMatrix,
    truth: Option<&DenseMatrix>,
    lambda: f64,
    tau: f64,
    opts: &RpcaSolveOptions,
) -> Result<Scored, Error> {
    match solve_rpca(d, lambda, tau, opts) {
        Ok(sol) => Ok(score(&sol.l, truth, sol.report.iterations, true)),
        Err(Error::NotConverged {
            iterations, partial, ..
        }) => Ok(score(&partial.primary, truth, iterations, false)),
        Err(e) => Err(e),
    }
}

fn success(s: &Scored, threshold: f64) -> bool {
    match s.rel_err {
        Some(e) => e <= threshold,
        None => s.converged,
    }
}

fn require<'a>(m: &'a Option<DenseMatrix>, what: &str) -> Result<&'a DenseMatrix, ExpError> {
    m.as_ref()
        .ok_or_else(|| ExpError::Usage(format!("{what} requires ground truth")))
}

fn bundle_lambda(meta: &InstanceMeta) -> f64 {
    meta.lambda.unwrap_or_else(|| default_lambda(meta.n1, meta.n2))
}

/// Data bound, and `τ` for `policy`.
fn resolve_tau(bundle: &Bundle, policy: TauPolicy) -> Result<(f64, f64), ExpError> {
    let data = match bundle {
        Bundle::Mc { omega, observed, .. } => mc_tau_bound_data(observed, omega)?,
        Bundle::Rpca { meta, d, .. } => rpca_tau_bound_data(d, bundle_lambda(meta))?,
    };
    let tau = match policy {
        TauPolicy::Explicit(v) => v,
        TauPolicy::DataBound => data,
        TauPolicy::Multiplier(k) => k * data,
        TauPolicy::OracleBound => match bundle {
            Bundle::Mc { omega, m_true, .. } => mc_tau_bound_oracle(require(m_true, "the oracle bound")?, omega)?.value,
            Bundle::Rpca {
                meta, m_true, s_true, ..
            } => {
                rpca_tau_bound_oracle(
                    require(m_true, "the oracle bound")?,
                    require(s_true, "the oracle bound")?,
                    bundle_lambda(meta),
                )?
                .value
            }
        },
    };
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ExpError::Usage(format!(
            "resolved tau = {tau} is not positive; pick an explicit value"
        )));
    }
    Ok((data, tau))
}

fn solve_bundle(bundle: &Bundle, tau: f64, solver: &SolverConfig) -> Result<Scored, ExpError> {
    Ok(match bundle {
        Bundle::Mc {
            omega,
            observed,
            m_true,
            ..
        } => run_mc(observed, omega, m_true.as_ref(), tau, &solver.mc())?,
        Bundle::Rpca { meta, d, m_true, .. } => run_rpca(d, m_true.as_ref(), bundle_lambda(meta), tau, &solver.rpca())?,
    })
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), ExpError> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(value).expect("json serializes");
        text.push('\n');
        crate::experiments::io::write_text(path, &text)?;
    }
    Ok(())
}

/// Generates an instance bundle in `out`. `seed` overrides the config's seed.
pub fn cmd_gen(cfg: &GenConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, ExpError> {
    cfg.validate()?;
    let seed = seed.unwrap_or(cfg.seed);
    let meta = match cfg.problem {
        ProblemKind::Mc => write_mc_bundle(out, &McInstance::generate(cfg.n1, cfg.n2, cfg.rank, cfg.rho, seed)?)?,
        ProblemKind::Rpca => {
            let spec = RpcaSpec {
                n1: cfg.n1,
                n2: cfg.n2,
                rank: cfg.rank,
                rho: cfg.rho,
                magnitude: cfg.magnitude,
                model: cfg.model,
                lambda: cfg.lambda,
            };
            write_rpca_bundle(out, &RpcaInstance::generate(&spec, seed)?, cfg.model, cfg.magnitude)?
        }
    };
    Ok(Outcome {
        report: serde_json::to_value(meta).expect("meta serializes"),
        pass: true,
    })
}

/// Solves a bundle at the chosen `τ` and scores it.
pub fn cmd_solve(
    instance: &Path,
    policy: TauPolicy,
    solver: &SolverConfig,
    threshold: f64,
    out: Option<&Path>,
) -> Result<Outcome, ExpError> {
    let bundle = read_bundle(instance)?;
    let (data, tau) = resolve_tau(&bundle, policy)?;
    let start = Instant::now();
    let scored = solve_bundle(&bundle, tau, solver)?;
    let meta = bundle.meta();
    let record = TrialRecord {
        seed: meta.seed,
        n1: meta.n1,
        n2: meta.n2,
        r: meta.rank,
        rho: meta.rho,
        tau_multiplier: tau / data,
        tau,
        rel_err: scored.rel_err,
        success: success(&scored, threshold),
        iters: scored.iters,
        converged: scored.converged,
        certificate_pass: None,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let report = serde_json::to_value(&record).expect("record serializes");
    write_json(out, &report)?;
    Ok(Outcome {
        report,
        pass: record.success,
    })
}

/// Runs one sweep trial from its seed.
pub fn run_sweep_trial(cfg: &SweepConfig, cell: usize, trial: usize) -> Result<TrialRecord, Error> {
    let (r, rho, mult) = cfg.cell(cell);
    let seed = cfg.base_seed + cell as u64 * 1_000_000 + trial as u64;
    let start = Instant::now();
    let (tau, scored, certificate_pass) = match cfg.problem {
        ProblemKind::Mc => {
            let inst = McInstance::generate(cfg.n1, cfg.n2, r, rho, seed)?;
            let tau = mult * mc_tau_bound_data(&inst.observed, &inst.omega)?;
            let scored = run_mc(&inst.observed, &inst.omega, Some(&inst.m_true), tau, &cfg.solver.mc())?;
            let cert = if cfg.certify {
                let c = build_mc_certificate(&inst.m_true, &inst.omega, tau)
                    .and_then(|c| check_mc_certificate(&c, &inst.m_true, &inst.omega));
                Some(c.map(|rep| rep.passed).unwrap_or(false))
            } else {
                None
            };
            (tau, scored, cert)
        }
        ProblemKind::Rpca => {
            let spec = RpcaSpec {
                n1: cfg.n1,
                n2: cfg.n2,
                rank: r,
                rho,
                magnitude: cfg.magnitude,
                model: cfg.model,
                lambda: cfg.lambda,
            };
            let inst = RpcaInstance::generate(&spec, seed)?;
            let tau = mult * rpca_tau_bound_data(&inst.d, inst.lambda)?;
            let scored = run_rpca(&inst.d, Some(&inst.m_true), inst.lambda, tau, &cfg.solver.rpca())?;
            (tau, scored, None)
        }
    };
    Ok(TrialRecord {
        seed,
        n1: cfg.n1,
        n2: cfg.n2,
        r,
        rho,
        tau_multiplier: mult,
        tau,
        rel_err: scored.rel_err,
        success: success(&scored, cfg.success_threshold),
        iters: scored.iters,
        converged: scored.converged,
        certificate_pass,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CellSummary {
    pub cell: usize,
    pub r: usize,
    pub rho: f64,
    pub tau_multiplier: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_rel_err: f64,
}

/// `results.csv` → `results.summary.json`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

/// `results.csv` → `results.partial.csv`.
pub fn partial_path(csv: &Path) -> PathBuf {
    csv.with_extension("partial.csv")
}

fn csv_err(path: &Path, e: csv::Error) -> ExpError {
    ExpError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> ExpError {
    ExpError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

/// Runs every `(cell, trial)` in parallel and writes the CSV sorted by `(cell, trial)`.
/// Rows are also appended to a partial file as trials finish; it is removed on success.
pub fn cmd_sweep(cfg: &SweepConfig, out: &Path) -> Result<Outcome, ExpError> {
    cfg.validate()?;
    let partial = partial_path(out);
    let mut writer = csv::Writer::from_path(&partial).map_err(|e| csv_err(&partial, e))?;
    writer.write_record(CSV_HEADER).map_err(|e| csv_err(&partial, e))?;
    writer.flush().map_err(|e| io_err(&partial, e))?;
    let writer = Mutex::new(writer);

    let jobs: Vec<(usize, usize)> = (0..cfg.cell_count())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<Result<TrialRecord, ExpError>> = jobs
        .par_iter()
        .map(|&(cell, trial)| {
            let rec = run_sweep_trial(cfg, cell, trial)?;
            let mut w = writer.lock().expect("partial writer poisoned");
            w.write_record(rec.csv_row()).map_err(|e| csv_err(&partial, e))?;
            w.flush().map_err(|e| io_err(&partial, e))?;
            Ok(rec)
        })
        .collect();
    drop(writer);
    // `par_iter().collect()` keeps job order, which is sorted by (cell, trial).
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut final_writer = csv::Writer::from_path(out).map_err(|e| csv_err(out, e))?;
    final_writer.write_record(CSV_HEADER).map_err(|e| csv_err(out, e))?;
    for rec in &records {
        final_writer.write_record(rec.csv_row()).map_err(|e| csv_err(out, e))?;
    }
    final_writer.flush().map_err(|e| io_err(out, e))?;

    let cells: Vec<CellSummary> = records
        .chunks(cfg.trials)
        .enumerate()
        .map(|(cell, recs)| {
            let (r, rho, tau_multiplier) = cfg.cell(cell);
            let successes = recs.iter().filter(|r| r.success).count();
            let mut errs: Vec<f64> = recs.iter().filter_map(|r| r.rel_err).collect();
            errs.sort_by(f64::total_cmp);
            let median_rel_err = if errs.is_empty() {
                f64::NAN
            } else {
                errs[errs.len() / 2]
            };
            CellSummary {
                cell,
                r,
                rho,
                tau_multiplier,
                trials: recs.len(),
                successes,
                success_rate: successes as f64 / recs.len() as f64,
                median_rel_err,
            }
        })
        .collect();
    let report = json!({ "csv": out, "cells": cells });
    write_json(Some(&summary_path(out)), &report)?;
    std::fs::remove_file(&partial).map_err(|e| io_err(&partial, e))?;
    Ok(Outcome { report, pass: true })
}

#[derive(Clone, Copy, Debug)]
pub struct FrontierOptions {
    /// Stop once `hi / lo` is at most this.
    pub ratio: f64,
    /// Lower bracket as a fraction of the data bound.
    pub lower_factor: f64,
    pub threshold: f64,
    pub solver: SolverConfig,
}

impl Default for FrontierOptions {
    fn default() -> Self {
        Self {
            ratio: 1.1,
            lower_factor: 1e-6,
            threshold: 1e-3,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FrontierProbe {
    pub tau: f64,
    pub rel_err: Option<f64>,
    pub success: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrontierReport {
    pub tau_min_empirical: Option<f64>,
    pub tau_data_bound: f64,
    pub tau_oracle_bound: Option<f64>,
    /// Why the oracle bound is missing, when it is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_note: Option<String>,
    /// Recovery succeeded at the lower bracket, so the frontier lies below it.
    pub floored: bool,
    pub bracket_ok: bool,
    /// `tau_min ≤ oracle ≤ data`, or `tau_min ≤ data` when the oracle is undefined.
    pub ordering_ok: bool,
    pub probes: Vec<FrontierProbe>,
}

/// Bisects (geometrically) for the smallest `τ` at which recovery succeeds.
pub fn cmd_tau_frontier(instance: &Path, opts: &FrontierOptions, out: Option<&Path>) -> Result<Outcome, ExpError> {
    if !(opts.ratio > 1.0) || !(opts.lower_factor > 0.0 && opts.lower_factor < 1.0) {
        return Err(ExpError::Usage("need ratio > 1 and lower factor in (0, 1)".into()));
    }
    let bundle = read_bundle(instance)?;
    let (data, _) = resolve_tau(&bundle, TauPolicy::DataBound)?;
    match &bundle {
        Bundle::Mc { m_true, .. } => {
            require(m_true, "tau-frontier")?;
        }
        Bundle::Rpca { m_true, .. } => {
            require(m_true, "tau-frontier")?;
        }
    }
    let (oracle, oracle_note) = match resolve_tau(&bundle, TauPolicy::OracleBound) {
        Ok((_, v)) => (Some(v), None),
        Err(ExpError::Core(e)) if e.is_regime() => (None, Some(e.to_string())),
        Err(ExpError::Usage(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };

    let mut probes = Vec::new();
    let mut probe = |tau: f64| -> Result<bool, ExpError> {
        let s = solve_bundle(&bundle, tau, &opts.solver)?;
        let ok = success(&s, opts.threshold);
        probes.push(FrontierProbe {
            tau,
            rel_err: s.rel_err,
            success: ok,
        });
        Ok(ok)
    };

    let mut hi = data;
    let mut lo = data * opts.lower_factor;
    let bracket_ok = probe(hi)?;
    let mut floored = false;
    let tau_min = if !bracket_ok {
        None
    } else if probe(lo)? {
        floored = true;
        Some(lo)
    } else {
        while hi / lo > opts.ratio {
            let mid = (hi * lo).sqrt();
            if probe(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    };

    let ordering_ok = match (tau_min, oracle) {
        (Some(t), Some(o)) => t <= o && o <= data,
        (Some(t), None) => t <= data,
        (None, _) => false,
    };
    let report = FrontierReport {
        tau_min_empirical: tau_min,
        tau_data_bound: data,
        tau_oracle_bound: oracle,
        oracle_note,
        floored,
        bracket_ok,
        ordering_ok,
        probes,
    };
    let report = serde_json::to_value(&report).expect("report serializes");
    write_json(out, &report)?;
    Ok(Outcome {
        report,
        pass: bracket_ok && ordering_ok,
    })
}

/// Builds and checks the dual certificate at the chosen `τ`.
pub fn cmd_certify(instance: &Path, policy: TauPolicy, out: Option<&Path>) -> Result<Outcome, ExpError> {
    let bundle = read_bundle(instance)?;
    match &bundle {
        Bundle::Mc { m_true: None, .. } | Bundle::Rpca { m_true: None, .. } | Bundle::Rpca { s_true: None, .. } => {
            return Err(ExpError::Usage("certification requires ground truth".into()));
        }
        _ => {}
    }
    let (_, tau) = resolve_tau(&bundle, policy)?;
    let (report, pass) = match &bundle {
        Bundle::Mc {
            omega, m_true: Some(m), ..
        } => {
            let cert = build_mc_certificate(m, omega, tau)?;
            let rep = check_mc_certificate(&cert, m, omega)?;
            (json!({ "problem": "mc", "tau": tau, "certificate": rep }), rep.passed)
        }
        Bundle::Rpca {
            meta,
            m_true: Some(m),
            s_true: Some(s),
            ..
        } => {
            let lambda = bundle_lambda(meta);
            let oracle = rpca_tau_bound_oracle(m, s, lambda)?;
            let eps = optimal_epsilon(oracle.gamma, oracle.delta, lambda)?;
            let w = build_lemma_witnesses(m, s, lambda)?;
            let lemmas = check_lemma_witnesses(&w.wl, &w.ws, m, s, lambda)?;
            let cand = theorem5_candidate(&w.wl, &w.ws, m, s, lambda, tau, eps.epsilon)?;
            let t5 = check_theorem5(
                &cand.w, &cand.f, &cand.b, m, s, lambda, tau, cand.alpha, cand.beta, 1e-8,
            )?;
            (
                json!({
                    "problem": "rpca",
                    "tau": tau,
                    "lambda": lambda,
                    "epsilon": eps.epsilon,
                    "lemmas": lemmas,
                    "theorem5": t5,
                }),
                t5.passed,
            )
        }
        _ => unreachable!("ground truth checked above"),
    };
    write_json(out, &report)?;
    Ok(Outcome { report, pass })
}
