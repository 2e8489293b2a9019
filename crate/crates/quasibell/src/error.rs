use thiserror::Error;

/// Crate-wide error type. Every fallible operation returns one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Coherent expansion lost too much weight at the requested cutoff.
    #[error("truncation insufficient: deficit {deficit:.3e} exceeds {allowed:.3e} at cutoff {cutoff}")]
    TruncationInsufficient {
        deficit: f64,
        allowed: f64,
        cutoff: usize,
    },

    /// Odd-parity superpositions vanish identically at alpha = beta = 0.
    #[error("degenerate state: the requested superposition has zero norm at these labels")]
    DegenerateState,

    /// At mixing angle pi/4 the two coherent components coincide and no
    /// orthonormal pair can be built from them.
    #[error("basis undefined: mixing angle {angle} is within 1e-8 of pi/4")]
    BasisUndefined { angle: f64 },

    /// e*theta_nc*B = 1 makes the effective mass vanish.
    #[error("critical parameters: e*theta_nc*B = {etb} sits at the forbidden value 1, where the effective mass vanishes")]
    CriticalParameters { etb: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable code, used by the CLI JSON error records and
    /// mirrored by the C ABI status enum.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::TruncationInsufficient { .. } => "truncation_insufficient",
            Error::DegenerateState => "degenerate_state",
            Error::BasisUndefined { .. } => "basis_undefined",
            Error::CriticalParameters { .. } => "critical_parameters",
            Error::Unsupported(_) => "unsupported",
        }
    }
}
