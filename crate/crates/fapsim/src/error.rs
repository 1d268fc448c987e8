use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("speed must be finite and non-negative, got {0}")]
    InvalidSpeed(f64),

    #[error("turn radius must be positive, got {0}")]
    InvalidRadius(f64),

    #[error("turn radius {radius_m} m below fixed-wing minimum {r_min_m} m")]
    InfeasibleRadius { radius_m: f64, r_min_m: f64 },

    #[error("fixed-wing aircraft cannot hover")]
    FixedWingHover,

    #[error("sampled path needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("intersection area is empty")]
    EmptyArea,

    #[error("ground user {gu} cannot be served from any candidate position")]
    InfeasibleSingleton { gu: usize },

    #[error("group offered load {total_mbps} Mbit/s exceeds the top MCS rate")]
    GroupOverCapacity { total_mbps: f64 },

    #[error("no feasible {uav} trajectory for FAP {fap}")]
    InfeasibleSelection { uav: &'static str, fap: usize },

    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for validation/parse problems,
    /// 3 for infeasible requests, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::InvalidSpeed(_)
            | Error::InvalidRadius(_)
            | Error::Validation(_)
            | Error::Parse(_) => 2,
            Error::InfeasibleRadius { .. }
            | Error::FixedWingHover
            | Error::InfeasibleSingleton { .. }
            | Error::GroupOverCapacity { .. }
            | Error::InfeasibleSelection { .. } => 3,
            _ => 1,
        }
    }
}
