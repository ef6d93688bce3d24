//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("propagation time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("timestep {0} is outside the scene history range")]
    InvalidTimestep(i64),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("unknown lane divider `{0}`")]
    UnknownDivider(String),

    #[error("trajectory length mismatch: prediction has {pred} states, ground truth {gt}")]
    LengthMismatch { pred: usize, gt: usize },

    #[error("timestamp {0} s does not land on a prediction step within the horizon")]
    OutsideHorizon(f64),

    #[error("missing ground truth for agent `{0}`")]
    MissingGroundTruth(String),

    #[error("mode list is empty")]
    EmptyModes,

    #[error("scene is invalid: {0}")]
    InvalidScene(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("failed to parse scene: {0}")]
    Parse(#[from] serde_json::Error),
}
