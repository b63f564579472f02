use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("negative weight {weight} at location {location}")]
    NegativeWeight { location: f64, weight: f64 },

    #[error("integration window [{window_lo}, {window_hi}] does not cover support [{support_lo}, {support_hi}]")]
    WindowCoverage {
        window_lo: f64,
        window_hi: f64,
        support_lo: f64,
        support_hi: f64,
    },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid oracle: {0}")]
    InvalidOracle(String),

    #[error("pole at {w} lies outside the disk of radius {radius}")]
    PoleOutsideDisk { w: String, radius: f64 },

    #[error("evaluation at the origin is not defined for this object")]
    EvalAtOrigin,

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("profile is not monotone: {0}")]
    NonMonotone(String),

    #[error("membership rejected: {0}")]
    MembershipRejected(String),

    #[error("majorant violated: u - M = {worst} at {at}")]
    MajorantViolated { worst: f64, at: String },

    #[error("function does not vanish but was evaluated where a nonzero value is required: {0}")]
    ZeroAtBasePoint(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}
