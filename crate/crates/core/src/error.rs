use thiserror::Error;

use crate::metric::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("matrix entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },

    #[error("pseudo-metric axioms violated: {}", format_violations(.0))]
    AxiomViolation(Vec<Violation>),

    #[error("index {index} out of range for a space of {size} points")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("point is not on the model space: {0}")]
    PointNotOnModel(String),

    #[error("invalid graph point: {0}")]
    InvalidPoint(String),

    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("at least {required} points are required, got {got}")]
    TooFewPoints { required: usize, got: usize },

    #[error("expected a matrix of size {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("input too large: {0}")]
    TooLarge(String),

    #[error("filtration is not monotone at simplex {0}")]
    NonMonotoneFiltration(usize),

    #[error("unsupported (n, k) combination: n = {n}, k = {k}")]
    UnsupportedCombination { n: usize, k: usize },

    #[error("histogram range does not cover the density support: {0}")]
    RegionMismatch(String),

    #[error("sample contains no tuples")]
    EmptySample,

    #[error("diagram has a point with infinite death")]
    InfiniteDeath,

    #[error("diagram set is empty")]
    EmptyInput,

    #[error("corner detection needs a sample with n = 4, k = 1 (got n = {n}, k = {k})")]
    NotPrincipal41 { n: usize, k: usize },

    #[error("cannot draw distinct points: {0}")]
    DegenerateSpace(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn format_violations(v: &[Violation]) -> String {
    const SHOWN: usize = 8;
    let mut s = v.iter().take(SHOWN).map(|x| x.to_string()).collect::<Vec<_>>().join("; ");
    if v.len() > SHOWN {
        s.push_str(&format!("; ... ({} more)", v.len() - SHOWN));
    }
    s
}
