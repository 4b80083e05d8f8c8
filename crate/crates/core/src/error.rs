use thiserror::Error;

/// Errors raised by the numerical routines, the constants pipeline and the
/// configuration layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error(
        "error target not met on [{a}, {b}]: estimate {error:.3e} exceeds target {target:.3e} at depth {depth}"
    )]
    DepthExceeded {
        a: f64,
        b: f64,
        error: f64,
        target: f64,
        depth: u32,
    },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("dimension must be at least 2, got {0}")]
    InvalidDim(usize),

    #[error("point is not on the hyperboloid: {0}")]
    InvalidPoint(String),

    #[error("direction is not a unit tangent vector: {0}")]
    InvalidDirection(String),

    #[error("{quantity} overflows f64 (log value {log_value:.6}); use the log-space variant")]
    Overflow {
        quantity: &'static str,
        log_value: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("total-variation check is only available in dimensions 2 and 3, got {0}")]
    UnsupportedDim(usize),

    #[error("tail bound never dropped below the running extremum before R = {max_ray_cut}")]
    TailNeverDominates { max_ray_cut: f64 },

    #[error("missing external constant `{key}`")]
    MissingExternal { key: String },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for this error: 2 for usage and configuration
    /// problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. }
            | Error::DepthExceeded { .. }
            | Error::Overflow { .. }
            | Error::DegenerateKernel(_)
            | Error::TailNeverDominates { .. } => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
