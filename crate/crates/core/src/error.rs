use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("order gate violated: Re(alpha) = {re} must lie in [{lo}, {hi}]")]
    OrderOutOfRange { re: f64, lo: f64, hi: f64 },
    #[error("composition gate violated on axis {axis}: Re(alpha+beta) = {re} must lie in (0, 1)")]
    CompositionGate { axis: usize, re: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("point {x} outside the admissible range of [{a}, {b}]")]
    PointOutOfRange { x: f64, a: f64, b: f64 },
    #[error("gamma pole at z = {re}{im:+}i")]
    GammaPole { re: f64, im: f64 },
    #[error("node count {0} is below 2")]
    TooFewNodes(usize),
    #[error("missing derivative: {0}")]
    MissingDerivative(String),
    #[error("degenerate rectangle on axis {axis}: [{lo}, {hi}]")]
    DegenerateRect { axis: usize, lo: f64, hi: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("normal {0:?} is not a unit coordinate vector")]
    NonCoordinateNormal([f64; 4]),
    #[error("kernel evaluated at its singular point (distance {0:e})")]
    SingularPoint(f64),
    #[error("fractional path on axis {axis} passes within {distance:e} of the kernel singularity")]
    SingularSegment { axis: usize, distance: f64 },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("evaluation failed at {location}: {source}")]
    AtNode {
        location: String,
        #[source]
        source: Box<Error>,
    },
    #[error("division by a zero quaternion")]
    ZeroDivisor,
}

impl Error {
    pub fn at(self, location: impl Into<String>) -> Error {
        match self {
            Error::AtNode { .. } => self,
            other => Error::AtNode {
                location: location.into(),
                source: Box::new(other),
            },
        }
    }

    /// Innermost error, looking through node-location wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtNode { source, .. } => source.root(),
            other => other,
        }
    }
}
