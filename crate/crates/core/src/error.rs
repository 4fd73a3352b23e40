use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("pool is empty")]
    EmptyPool,
    #[error("duplicate member id `{0}`")]
    DuplicateId(String),
    #[error("accuracy of member `{0}` is outside [0, 1]")]
    AccuracyOutOfRange(String),
    #[error("cost of member `{0}` is not a positive finite number")]
    NonPositiveCost(String),
    /// Several pool invariants were violated at once.
    #[error("invalid pool: {}", join_errors(.0))]
    InvalidPool(Vec<Error>),
    #[error("budget must be a positive finite number, got {0}")]
    InvalidBudget(f64),
    #[error("selection is invalid: {0}")]
    InvalidSelection(&'static str),

    #[error("input list is empty")]
    EmptyInput,
    #[error("decision weight table has {got} entries, expected {expected}")]
    WeightsLengthMismatch { expected: usize, got: usize },
    #[error("decision weights must be nondecreasing in k and lie in [0, 1]")]
    WeightsNotMonotone,
    #[error("no decision weights available for ensembles of size {0}")]
    MissingWeights(usize),
    #[error("input of size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("no member fits within the budget")]
    NoFeasibleSubset,

    #[error("argument outside the function domain: {0}")]
    DomainError(&'static str),
    #[error("iteration did not converge: {0}")]
    NoConvergence(&'static str),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("need at least 3 interior decision weights in (0, 1), got {0}")]
    TooFewInteriorPoints(usize),
    #[error("variance {var} is not inside (0, mean*(1-mean)) for mean {mean}")]
    DegenerateVariance { mean: f64, var: f64 },
    #[error("variance {var} is not attainable by a [0, 1] variate with mean {mean}")]
    InvalidMoments { mean: f64, var: f64 },
    #[error("all selection weights are zero")]
    AllZero,
    #[error("invalid search configuration: {0}")]
    InvalidConfig(&'static str),
}

fn join_errors(errors: &[Error]) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (i, e) in errors.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        let _ = write!(out, "{e}");
    }
    out
}
