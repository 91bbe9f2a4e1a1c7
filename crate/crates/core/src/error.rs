use std::path::PathBuf;

use thiserror::Error;

/// Which unknown tripped the overflow guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Axial,
    Radial,
    Microrotation,
    Temperature,
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            FieldKind::Axial => "u",
            FieldKind::Radial => "v",
            FieldKind::Microrotation => "w",
            FieldKind::Temperature => "theta",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("axial coordinate z = {z} lies outside the tube [0, {length}]")]
    OutOfDomain { z: f64, length: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} must be {requirement} (got {value})")]
    OutOfRange {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("{0}")]
    Inconsistent(String),
    #[error("dt = {dt} exceeds the explicit stability limit {limit:.6e}")]
    Unstable { dt: f64, limit: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("solution diverged at step {step} (t = {time:.6}): {field}[{i},{j}] = {value:e}")]
    Diverged {
        step: u64,
        time: f64,
        field: FieldKind,
        i: usize,
        j: usize,
        value: f64,
    },
    #[error("steady state not reached after {steps} steps (last max |du| = {last_change:e})")]
    NotConverged { steps: u64, last_change: f64 },
    #[error(transparent)]
    Params(#[from] ParamError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("degenerate cycle: mean flow rate {q_mean:e} is not positive")]
    DegenerateCycle { q_mean: f64 },
    #[error("no completed measurement cycle is available")]
    NoCycle,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` assigned twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: `{key}`: cannot parse `{value}` as a number")]
    BadNumber { line: usize, key: String, value: String },
    #[error(transparent)]
    Invalid(#[from] ParamError),
    #[error("sweep point {point}: {source}")]
    InvalidPoint { point: String, source: ParamError },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
}

impl RunError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }
}
