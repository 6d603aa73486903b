use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("wave packet has no weight left after zero-mode exclusion")]
    DegeneratePacket,
    #[error("H^-1/2 is singular: nonzero amplitude on the zero-frequency mode {mode}")]
    SingularOperator { mode: i64 },
    #[error("kernel hermiticity violated: imaginary residual {residual:e}")]
    HermiticityViolation { residual: f64 },
    #[error("fock oracle refused: {0}")]
    OracleRefused(String),
    #[error("invalid interval [{lo}, {hi}]: {reason}")]
    InvalidInterval { lo: f64, hi: f64, reason: String },
    #[error("continuity residual {residual:e} exceeds contract {tolerance:e}")]
    ContinuityViolation { residual: f64, tolerance: f64 },
    #[error("positivity violated: density {value:e} at x = {x}")]
    PositivityViolation { value: f64, x: f64 },
    #[error("singular jacobian at {point:?}")]
    SingularJacobian { point: Vec<f64> },
    #[error("metric not invertible at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("finite-difference step {step:e} underflows at {point:?}")]
    StepUnderflow { step: f64, point: Vec<f64> },
    #[error("point {point:?} lies outside the chart domain")]
    OutOfDomain { point: Vec<f64> },
    #[error("foliation error: {0}")]
    Foliation(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expression error at byte {pos}: {msg}")]
    Expression { pos: usize, msg: String },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
}
