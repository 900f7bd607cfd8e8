//! Plain-text matrix and support formats, and instance bundles.
//!
//! Dense matrix: line 1 `n1 n2`, then `n1` lines of `n2` values in `{:.16e}` form
//! (17 significant digits, exact round trip). Support: line 1 `n1 n2 m`, then `m` lines
//! `i j`, 0-based, sorted row-major.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::ExpError;
use crate::linalg::{DenseMatrix, SupportSet};
use crate::problem::{CorruptionModel, McInstance, RpcaInstance};

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn format_support(s: &SupportSet) -> String {
    let mut out = format!("{} {} {}\n", s.rows(), s.cols(), s.len());
    for (i, j) in s.indices() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

fn read_text(path: &Path) -> Result<String, ExpError> {
    fs::read_to_string(path).map_err(|source| ExpError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), ExpError> {
    fs::write(path, text).map_err(|source| ExpError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> ExpError {
    ExpError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_header<const N: usize>(path: &Path, line: Option<&str>) -> Result<[usize; N], ExpError> {
    let line = line.ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != N {
        return Err(parse_err(
            path,
            1,
            format!("expected {N} header fields, found {}", fields.len()),
        ));
    }
    let mut out = [0; N];
    for (o, f) in out.iter_mut().zip(&fields) {
        *o = f
            .parse()
            .map_err(|_| parse_err(path, 1, format!("bad header field {f:?}")))?;
    }
    Ok(out)
}

pub fn parse_matrix(path: &Path, text: &str) -> Result<DenseMatrix, ExpError> {
    let mut lines = text.lines();
    let [rows, cols] = parse_header::<2>(path, lines.next())?;
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| parse_err(path, i + 2, format!("expected {rows} rows, found {i}")))?;
        let before = data.len();
        for f in line.split_whitespace() {
            let v: f64 = f
                .parse()
                .map_err(|_| parse_err(path, i + 2, format!("bad value {f:?}")))?;
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                path,
                i + 2,
                format!("expected {cols} values, found {}", data.len() - before),
            ));
        }
    }
    if let Some((k, _)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(path, rows + 2 + k, "trailing content"));
    }
    DenseMatrix::from_row_major(rows, cols, data).map_err(|e| parse_err(path, 0, e.to_string()))
}

pub fn parse_support(path: &Path, text: &str) -> Result<SupportSet, ExpError> {
    let mut lines = text.lines();
    let [rows, cols, m] = parse_header::<3>(path, lines.next())?;
    let mut idx = Vec::with_capacity(m);
    for k in 0..m {
        let line = lines
            .next()
            .ok_or_else(|| parse_err(path, k + 2, format!("expected {m} indices, found {k}")))?;
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(i)), Some(Ok(j)), None) => idx.push((i, j)),
            _ => return Err(parse_err(path, k + 2, format!("bad index line {line:?}"))),
        }
    }
    SupportSet::new(rows, cols, idx).map_err(|e| parse_err(path, 0, e.to_string()))
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<(), ExpError> {
    write_text(path, &format_matrix(m))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, ExpError> {
    parse_matrix(path, &read_text(path)?)
}

pub fn write_support(path: &Path, s: &SupportSet) -> Result<(), ExpError> {
    write_text(path, &format_support(s))
}

pub fn read_support(path: &Path) -> Result<SupportSet, ExpError> {
    parse_support(path, &read_text(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Mc,
    Rpca,
}

/// Contents of `meta.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceMeta {
    pub problem: ProblemKind,
    pub n1: usize,
    pub n2: usize,
    pub rank: usize,
    pub rho: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<CorruptionModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude: Option<f64>,
}

/// An instance read back from disk. Ground truth is optional.
#[derive(Clone, Debug)]
pub enum Bundle {
    Mc {
        meta: InstanceMeta,
        omega: SupportSet,
        observed: DenseMatrix,
        m_true: Option<DenseMatrix>,
    },
    Rpca {
        meta: InstanceMeta,
        d: DenseMatrix,
        m_true: Option<DenseMatrix>,
        s_true: Option<DenseMatrix>,
    },
}

impl Bundle {
    pub fn meta(&self) -> &InstanceMeta {
        match self {
            Bundle::Mc { meta, .. } | Bundle::Rpca { meta, .. } => meta,
        }
    }
}

const META: &str = "meta.json";
const M_TRUE: &str = "m_true.txt";
const S_TRUE: &str = "s_true.txt";
const OMEGA: &str = "omega.txt";
const OBSERVED: &str = "observed.txt";
const D: &str = "d.txt";

fn create_dir(dir: &Path) -> Result<(), ExpError> {
    fs::create_dir_all(dir).map_err(|source| ExpError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_meta(dir: &Path, meta: &InstanceMeta) -> Result<(), ExpError> {
    let mut text = serde_json::to_string_pretty(meta).expect("meta serializes");
    text.push('\n');
    write_text(&dir.join(META), &text)
}

pub fn write_mc_bundle(dir: &Path, inst: &McInstance) -> Result<InstanceMeta, ExpError> {
    create_dir(dir)?;
    let (n1, n2) = inst.shape();
    let meta = InstanceMeta {
        problem: ProblemKind::Mc,
        n1,
        n2,
        rank: inst.rank,
        rho: inst.rho,
        seed: inst.seed,
        lambda: None,
        model: None,
        magnitude: None,
    };
    write_meta(dir, &meta)?;
    write_matrix(&dir.join(M_TRUE), &inst.m_true)?;
    write_support(&dir.join(OMEGA), &inst.omega)?;
    write_matrix(&dir.join(OBSERVED), &inst.observed)?;
    Ok(meta)
}

pub fn write_rpca_bundle(
    dir: &Path,
    inst: &RpcaInstance,
    model: CorruptionModel,
    magnitude: f64,
) -> Result<InstanceMeta, ExpError> {
    create_dir(dir)?;
    let (n1, n2) = inst.shape();
    let meta = InstanceMeta {
        problem: ProblemKind::Rpca,
        n1,
        n2,
        rank: inst.rank,
        rho: inst.rho,
        seed: inst.seed,
        lambda: Some(inst.lambda),
        model: Some(model),
        magnitude: Some(magnitude),
    };
    write_meta(dir, &meta)?;
    write_matrix(&dir.join(M_TRUE), &inst.m_true)?;
    write_matrix(&dir.join(S_TRUE), &inst.s_true)?;
    write_support(&dir.join(OMEGA), &inst.omega)?;
    write_matrix(&dir.join(D), &inst.d)?;
    Ok(meta)
}

fn optional_matrix(path: PathBuf) -> Result<Option<DenseMatrix>, ExpError> {
    if path.exists() {
        read_matrix(&path).map(Some)
    } else {
        Ok(None)
    }
}

fn check_shape(path: &Path, m: &DenseMatrix, meta: &InstanceMeta) -> Result<(), ExpError> {
    if m.shape() != (meta.n1, meta.n2) {
        return Err(parse_err(
            path,
            1,
            format!(
                "shape {:?} disagrees with meta.json ({}, {})",
                m.shape(),
                meta.n1,
                meta.n2
            ),
        ));
    }
    Ok(())
}

pub fn read_bundle(dir: &Path) -> Result<Bundle, ExpError> {
    let meta_path = dir.join(META);
    let meta: InstanceMeta = serde_json::from_str(&read_text(&meta_path)?).map_err(|e| ExpError::Parse {
        path: meta_path.clone(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    let m_true = optional_matrix(dir.join(M_TRUE))?;
    if let Some(m) = &m_true {
        check_shape(&dir.join(M_TRUE), m, &meta)?;
    }
    match meta.problem {
        ProblemKind::Mc => {
            let omega = read_support(&dir.join(OMEGA))?;
            let observed = read_matrix(&dir.join(OBSERVED))?;
            check_shape(&dir.join(OBSERVED), &observed, &meta)?;
            Ok(Bundle::Mc {
                meta,
                omega,
                observed,
                m_true,
            })
        }
        ProblemKind::Rpca => {
            let d = read_matrix(&dir.join(D))?;
            check_shape(&dir.join(D), &d, &meta)?;
            let s_true = optional_matrix(dir.join(S_TRUE))?;
            if let Some(s) = &s_true {
                check_shape(&dir.join(S_TRUE), s, &meta)?;
            }
            Ok(Bundle::Rpca {
                meta,
                d,
                m_true,
                s_true,
            })
        }
    }
}
