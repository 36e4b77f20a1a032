use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point ({x}, {y}, {z}): z must be strictly positive and all coordinates finite")]
    InvalidPoint { x: f64, y: f64, z: f64 },

    #[error("evaluation within hyperbolic distance {distance:e} of a pole")]
    Pole { distance: f64 },

    #[error("monopole entry {index}: multiplicity must be at least 1")]
    ZeroMultiplicity { index: usize },

    #[error("monopole entries {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },

    #[error("configuration has no monopole points")]
    EmptyConfig,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature scheme {scheme} is not admissible: {reason}")]
    SchemeMismatch { scheme: String, reason: String },

    #[error("quadrature did not reach relative tolerance {tol:e} (estimate {estimate:e}) within {panels} panels")]
    ToleranceNotMet { tol: f64, estimate: f64, panels: usize },

    #[error("ODE step size underflow at r = {r}")]
    StepUnderflow { r: f64 },

    #[error("scale hierarchy is indeterminate: {0}")]
    Indeterminate(String),

    #[error("config: {0}")]
    Config(String),
}
