//! Seeded simulator of the EPR-Bohm pair experiment with three observers.
//!
//! A source emits spin pairs; Alice measures the electron at `t1`, Bob the
//! positron at `t2`, and both send their results to Charles at light speed.
//! The crate keeps a per-observer ledger of self-information (in nats) and
//! lets Charles infer, from the arriving results alone, whether the source
//! was entangled or independent.
//!
//! - [`info`]: entropies, marginals, mutual and pseudo-information
//! - [`spacetime`]: 1D events, interval classes, light-speed arrival times
//! - [`sim`]: source models and the seeded trial engine
//! - [`observers`]: knowledge, beliefs, ledger entries and pair audits
//! - [`inference`]: counts, source posterior, forecast scoring
//! - [`cli`]: configuration, trial log and summary for the `epr-ledger` binary

pub mod cli;
pub mod error;
pub mod inference;
pub mod info;
pub mod observers;
pub mod rng;
pub mod sim;
pub mod spacetime;

pub use error::{Error, Result};
pub use info::{JointPairDistribution, Nats, OutcomeDistribution, SpinOutcome};
pub use rng::RngPolicy;
pub use sim::{SourceModel, TrialRecord};
pub use spacetime::{GeometryConfig, SpacetimeEvent};
