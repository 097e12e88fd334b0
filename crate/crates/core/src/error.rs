use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarvestError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("perturbative regime violated: excitation probabilities sum to {0} > 1")]
    Perturbative(f64),

    #[error("quadrature failed to converge after {subdivisions} subdivisions (estimate {value:e}, error {error:e})")]
    Quadrature { value: f64, error: f64, subdivisions: usize },

    #[error("switching window too small: tail mass {tail:e} outside the window exceeds 1e-12")]
    WindowTooSmall { tail: f64 },

    #[error("mode count {0} exceeds the finite-volume memory guard")]
    TooManyModes(u64),

    #[error("unit error for key `{key}`: {msg}")]
    Unit { key: String, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, HarvestError>;

impl From<std::io::Error> for HarvestError {
    fn from(e: std::io::Error) -> Self {
        HarvestError::Io(e.to_string())
    }
}

pub(crate) fn ensure_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(HarvestError::Domain(format!("{name} must be positive and finite, got {x}")))
    }
}
