use thiserror::Error;

use crate::observers::Observer;
use crate::spacetime::Violation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probability {0} is outside [0, 1] or not finite")]
    InvalidProbability(f64),

    #[error("distribution does not sum to 1 (sum = {0})")]
    NotNormalized(f64),

    #[error("invalid geometry: {}", codes(.0))]
    InvalidGeometry(Vec<Violation>),

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("cannot condition on a partner outcome with zero marginal probability")]
    UndefinedConditional,

    #[error("{observer:?} observed an outcome with zero prior probability in trial {trial_id}")]
    Contradiction { observer: Observer, trial_id: u64 },

    #[error("ledger entries belong to different trials ({0} vs {1})")]
    TrialMismatch(u64, u64),

    #[error("empirical joint has no samples")]
    EmptySample,

    #[error("forecast for trial {0} needs Alice's message, which has not arrived")]
    MissingAliceMessage(u64),
}

fn codes(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.code())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
