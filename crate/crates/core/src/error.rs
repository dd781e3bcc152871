use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("t = nM/m = {t} is not an integer; use memory_share_points to split the cache")]
    NonIntegerT { t: String },

    #[error("invalid request matrix: {0}")]
    InvalidRequests(String),

    #[error("instance too large for {solver}: {size} > limit {limit}")]
    TooLarge {
        solver: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("field GF(2^{degree}) too small for {needed} distinct nonzero evaluation points; raise q")]
    FieldTooSmall { degree: u32, needed: usize },

    #[error("unsupported field degree {0} (expected 1..=16)")]
    UnsupportedDegree(u32),

    #[error("missing symbol for requested packet {0}")]
    MissingSymbol(String),

    #[error("user {user} cannot uniquely determine packet {packet}")]
    Undecodable { user: usize, packet: String },

    #[error("gap {gap} exceeds the proven bound 18")]
    GapViolation { gap: String },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
