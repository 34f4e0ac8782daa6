use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A phase was requested where none exists: some overlap vanishes, or
    /// the fringe has zero visibility.
    #[error("phase is undefined: {0}")]
    UndefinedPhase(&'static str),

    /// Two vertices of a spherical triangle are antipodal, so the geodesic
    /// joining them is not unique.
    #[error("degenerate geodesic: vertices {0} and {1} are antipodal")]
    DegenerateGeodesic(usize, usize),

    #[error("state has zero amplitude in both branches")]
    EmptyState,

    #[error("profile is empty or carries no intensity")]
    EmptyProfile,

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite, got {value}"
        )))
    }
}
