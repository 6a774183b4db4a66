//! Crate-wide error type.

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("infeasible path timing: {0}")]
    InfeasiblePathTiming(String),
    #[error("start infeasible")]
    StartInfeasible,
    #[error("goal never free")]
    GoalNeverFree,
    #[error("instance generation failed: {0}")]
    InstanceGeneration(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
