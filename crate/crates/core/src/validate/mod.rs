//! Finite-trace checking, trace fuzzing and a brute-force realizability oracle.

mod check;
mod fuzz;
pub mod gen;
mod oracle;
mod trace;

pub use check::{check_trace, Violation};
pub use fuzz::{
    equivalence_check, equivalence_check_with, random_trace, Counterexample, EquivOptions,
    EquivResult, InputSampler, Runner,
};
pub use oracle::{
    brute_force_realizability, CounterStrategy, Realizability, Reply, StrategyNode,
    ORACLE_MAX_OMEGA, ORACLE_MAX_VARS,
};
pub use trace::Trace;

use crate::sdf::SdfError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidateError {
    #[error("the assumption admits no input valuation")]
    UnsatisfiableAssumption,
    #[error("oracle instance too large: {vars} variables, horizon {omega}")]
    InstanceTooLarge { vars: usize, omega: u32 },
    #[error("trace has no column `{0}`")]
    MissingColumn(String),
    #[error("trace CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Sdf(#[from] SdfError),
}
