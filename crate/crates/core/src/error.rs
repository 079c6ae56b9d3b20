use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no horizontal distance meets the {l_db} dB D2B bound at altitude {h} m")]
    InfeasibleAltitude { h: f64, l_db: f64 },

    #[error("empty altitude window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("instance exceeds brute-force guard: {0}")]
    SizeGuard(String),

    #[error("user {0} has no scheduled slots")]
    Unscheduled(usize),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
