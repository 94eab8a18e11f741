use thiserror::Error;

/// Errors raised anywhere in the geometry, profile, complex and certificate pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("endpoint lies on the submanifold")]
    EndpointOnSubmanifold,

    #[error("endpoint is a focal point of the submanifold ({0})")]
    FocalPointEndpoint(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("jacobi integration did not converge: {0}")]
    NonConvergence(String),

    #[error("assumption clause ({clause}) violated: {detail}")]
    AssumptionViolated { clause: String, detail: String },

    #[error("length cap {cap} too small to certify the geodesic index structure: {detail}")]
    CapTooSmall { cap: f64, detail: String },

    #[error("transversality violated at r = {r} for length {length}: |f''(r)| = {fsecond:e}")]
    TransversalityViolation { r: f64, length: f64, fsecond: f64 },

    #[error("generators at r = {r1} and r = {r2} share action {action}")]
    DuplicateAction { r1: f64, r2: f64, action: f64 },

    #[error("complex invariant violated: {0}")]
    InvariantViolation(String),

    #[error("brute-force search needs {entries} free entries, budget is {budget}")]
    BudgetExceeded { entries: usize, budget: usize },

    #[error("no acyclic admissible differential exists: {0}")]
    Infeasible(String),

    #[error("forced cycle {id} has no admissible primitive")]
    NoPrimitiveAvailable { id: usize },

    #[error("scenario error: {0}")]
    Scenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
