use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution or configuration value violates its invariants.
    #[error("configuration error: {0}")]
    Config(String),

    /// Rejection sampling failed to produce an in-bounds draw.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// Input data violates a precondition (too few samples, nonpositive
    /// values, inconsistent columns).
    #[error("data error: {0}")]
    Data(String),

    /// Maximum-likelihood fitting failed to converge or has no finite
    /// solution.
    #[error("fit error: {0}")]
    Fit(String),

    /// A mathematical operation left its domain (negative discount base,
    /// fractional power of a negative number).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation needs state that was not retained (for example
    /// histogram bins over a result whose values were dropped).
    #[error("state error: {0}")]
    State(String),

    /// The audit CSV is missing a required column.
    #[error("schema error: {0}")]
    Schema(String),

    /// One or more CSV rows could not be parsed.
    #[error("row errors in {path}: {count} malformed row(s), first at line {first_line}: {first_message}")]
    Rows {
        path: String,
        count: usize,
        first_line: u64,
        first_message: String,
    },

    /// Implicit-parameter inversion could not reach the target rate
    /// inside the search bracket.
    #[error(
        "inversion error: target rate {target} unreachable for {parameter} in \
         [{lo}, {hi}] (rates {rate_lo} .. {rate_hi})"
    )]
    Inversion {
        parameter: String,
        target: f64,
        lo: f64,
        hi: f64,
        rate_lo: f64,
        rate_hi: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
