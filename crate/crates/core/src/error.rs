use thiserror::Error;

/// Errors raised by the geometric operations.
///
/// Every variant is a value the caller can inspect; no operation returns an
/// infinity or NaN in place of an error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point has norm {norm} but must lie strictly inside the unit ball")]
    OutsideBall { norm: f64 },

    #[error("vector is zero or not finite")]
    Degenerate,

    #[error("tangent vector has hyperbolic length {length}, expected 1")]
    NotUnit { length: f64 },

    #[error("rho = {rho} exceeds the supported range |rho| <= {limit}")]
    RhoOutOfRange { rho: f64, limit: f64 },

    #[error("point is the projection pole of the chart")]
    ChartPole,

    #[error("point lies outside the field domain")]
    OutsideDomain,

    #[error("point is {distance} from the boundary, inside the inset {inset}")]
    BoundaryInset { distance: f64, inset: f64 },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },

    #[error("focal blowup: the denominator vanishes at t* = {t_star}")]
    FocalBlowup { t_star: f64 },

    #[error("focal point: det g = {det_g} is below the singularity floor")]
    FocalPoint { det_g: f64 },

    #[error("matrix is singular (det = {det})")]
    Singular { det: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("the map derivative vanishes at the evaluation point")]
    VanishingDerivative,

    #[error("|f| = {modulus} is not inside the unit disk")]
    OutsideDisk { modulus: f64 },

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("sample set is empty")]
    EmptySamples,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("trajectory seed is at a zero of the Schwarzian")]
    SeedAtZero,

    #[error("trajectory leaves the domain on its first step")]
    BoundaryExit,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
