use thiserror::Error;

/// Default ceiling on elementary operations for a single call.
pub const DEFAULT_BUDGET: f64 = 5.0e8;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("budget exceeded: {what} needs about {cost:.3e} operations, budget is {budget:.3e}")]
    Budget { what: String, cost: f64, budget: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

/// Refuses when `cost` exceeds `budget`.
pub(crate) fn charge(what: &str, cost: f64, budget: f64) -> Result<()> {
    if cost > budget {
        return Err(Error::Budget { what: what.to_string(), cost, budget });
    }
    Ok(())
}
