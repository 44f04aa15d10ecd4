use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("count must be nonnegative, got {0}")]
    NegativeCount(i64),

    #[error("queue is unstable: offered load {rho} erlangs with {servers} servers")]
    Unstable { rho: f64, servers: u64 },

    #[error("probability {0} is outside the open interval (0, 1)")]
    QuantileOutOfRange(f64),

    #[error(
        "delay grid overflow: {mass_beyond:e} of the probability mass lies beyond {upper_bound_ms} ms; use a larger bound"
    )]
    GridOverflow {
        mass_beyond: f64,
        upper_bound_ms: f64,
    },

    #[error("grid step mismatch: {0} ms vs {1} ms")]
    GridMismatch(f64, f64),

    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: u32 },

    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: u32 },

    #[error("point ({x}, {y}) lies outside the {width} x {height} m region")]
    OutsideRegion {
        x: f64,
        y: f64,
        width: f64,
        height: f64,
    },

    #[error("channel {channel} outside 1..={n_channels}")]
    InvalidChannel { channel: u32, n_channels: u32 },

    #[error("duplicate scenario name `{0}`")]
    DuplicateScenario(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
