use thiserror::Error;

/// Errors raised by the exact calculus and the verification procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is not divisible: {0}")]
    NotDivisible(String),
    #[error("denominator vanishes at the evaluation point")]
    PoleError,
    #[error("2-form is not closed: d B = {0}")]
    NotClosed(String),
    #[error("wrong form degree: expected {expected}, found {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("operation requires a chart of complex dimension 2 without fiber; got {0}")]
    UnsupportedChart(String),
    #[error("symplectic form is degenerate or not admissible: {0}")]
    DegenerateOmega(String),
    #[error("Jacobi identity fails: {0}")]
    JacobiFail(String),
    #[error("bivector is not holomorphic: {0}")]
    NotHolomorphic(String),
    #[error("no integrability witness: {0}")]
    NoWitness(String),
    #[error("frame change of basis is singular: {0}")]
    SingularFrame(String),
    #[error("U-decomposition leaked outside the expected levels: {0}")]
    UInconsistent(String),
    #[error("structure is not integrable: {0}")]
    NonIntegrable(String),
    #[error("section does not lie in the conjugate bundle: {0}")]
    NotInEbar(String),
    #[error("matrix of sections is singular (det P = 0)")]
    SingularP,
    #[error("matrix is not unimodular: det = {0}")]
    NotUnimodular(String),
    #[error("generalized holomorphic check failed: {0}")]
    GHCheckFail(String),
    #[error("spinor is not pure at {0}")]
    ImpureSpinor(String),
    #[error("quadrature diverged: spread {spread:e} exceeds tolerance {tolerance:e}")]
    QuadratureDiverged { spread: f64, tolerance: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
