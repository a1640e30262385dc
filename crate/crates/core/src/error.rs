use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unknown function identifier {0}")]
    UnknownFunction(String),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("unknown procedure `{0}`")]
    UnknownProcedure(String),
    #[error("invalid problem definition: {0}")]
    InvalidProblem(String),
    #[error("invalid constraint order: {0}")]
    InvalidOrder(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("starting point lies outside the bound box")]
    StartOutsideBounds,
    #[error("no infeasible point found after {0} consecutive samples")]
    NoInfeasibleSample(usize),
    #[error("problem has no best-known objective value")]
    MissingBestKnown,
}
