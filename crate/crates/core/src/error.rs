// Copyright 2026 The pauli-forge Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector of length {len} is not 4^N for any N >= 1")]
    BadLength { len: usize },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("multipliers do not describe a channel: k[{index}] = {value:e} < 0")]
    NotAChannel { index: usize, value: f64 },

    #[error("invalid multiplier vector: {0}")]
    InvalidTau(String),

    #[error("{what}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("too many qubits: {n} (limit {limit})")]
    TooManyQubits { n: usize, limit: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("parameter {p} outside domain [{lo}, {hi}]")]
    OutOfDomain { p: f64, lo: f64, hi: f64 },

    #[error("unknown map name {0:?}")]
    UnknownMap(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("qasm parse error on line {line}: {msg}")]
    QasmParse { line: usize, msg: String },

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("no 1PR decomposition found (best residual {best_residual:e})")]
    NotFound { best_residual: f64 },

    #[error("curve spans {rank} dimensions; a 1PR curve spans at most 3")]
    Infeasible { rank: usize },

    #[error("tomography inputs are not informationally complete")]
    SingularInversion,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
