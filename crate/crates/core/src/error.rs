use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid or run parameter violates its precondition.
    #[error("invalid {field}: {message}")]
    Config { field: &'static str, message: String },

    /// A ball radius does not fit in one period.
    #[error("radius index {index} out of range 1..={max}")]
    Radius { index: usize, max: usize },

    /// A kernel dilate would wrap around the torus.
    #[error("radius cap exceeded: r * support = {extent} > L/4 = {cap}")]
    RadiusCap { extent: f64, cap: f64 },

    /// Spectral interpolation onto a larger torus would lose information.
    #[error("dilation by 2^{m} needs a band-limited input; residual spectral mass {residual:.3e}")]
    Dilation { m: i32, residual: f64 },

    /// A Littlewood-Paley index lies above the Nyquist truncation.
    #[error("band index j = {j} exceeds j_max = {j_max}")]
    BandRange { j: i32, j_max: i32 },

    /// A lacunary depth N or frequency is not resolved by the grid.
    #[error("N = {n} not admissible on this grid (max admissible N = {max_n})")]
    Admissibility { n: usize, max_n: usize },

    /// A frequency above the Nyquist margin was requested.
    #[error("frequency {frequency} exceeds the admissible limit {limit}")]
    Frequency { frequency: f64, limit: f64 },

    /// The grid is too short for the support of a constructed function.
    #[error("period {period} too small: need at least {required}")]
    Support { period: f64, required: f64 },

    /// Malformed input file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Missing, malformed or tampered calibration fixture.
    #[error("calibration: {0}")]
    Calibration(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: &'static str, message: impl Into<String>) -> Self {
        Error::Config {
            field,
            message: message.into(),
        }
    }

    /// `true` for errors caused by bad input or configuration, as opposed to
    /// admissibility limits of the grid.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Parse { .. } | Error::Calibration(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
