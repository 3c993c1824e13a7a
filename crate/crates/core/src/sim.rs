//! Trial engine: sample a spin pair, measure at the configured events and
//! deliver both results to Charles at light speed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{table_i, table_ii, JointPairDistribution, SpinOutcome};
use crate::rng::{RngPolicy, TrialStream};
use crate::spacetime::{
    earliest_arrival, interval_class, GeometryConfig, IntervalClass, SpacetimeEvent,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceModel {
    /// Anti-correlated pairs (Table I).
    Entangled,
    /// Uncorrelated uniform pairs (Table II).
    Independent,
    Custom(JointPairDistribution),
}

impl SourceModel {
    pub fn joint(&self) -> JointPairDistribution {
        match self {
            SourceModel::Entangled => table_i(),
            SourceModel::Independent => table_ii(),
            SourceModel::Custom(j) => *j,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SourceModel::Entangled => "entangled",
            SourceModel::Independent => "independent",
            SourceModel::Custom(_) => "custom",
        }
    }
}

/// Inverse-CDF draw over the cells in order (+,+), (+,−), (−,+), (−,−).
pub fn sample_pair(source: &SourceModel, stream: &mut TrialStream) -> (SpinOutcome, SpinOutcome) {
    let joint = source.joint();
    let u = stream.uniform();
    let mut cumulative = 0.0;
    let mut last_supported = None;
    for (e, p, prob) in joint.iter() {
        if prob > 0.0 {
            last_supported = Some((e, p));
        }
        cumulative += prob;
        if u < cumulative {
            return (e, p);
        }
    }
    // u fell into the rounding gap between the cumulative sum and 1
    last_supported.expect("validated joint has a supported cell")
}

/// A photon message to Charles. It carries the result and nothing else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub trial_id: u64,
    pub outcome: SpinOutcome,
    pub measurement_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub alice_outcome: SpinOutcome,
    pub bob_outcome: SpinOutcome,
    pub alice_event: SpacetimeEvent,
    pub bob_event: SpacetimeEvent,
    pub arrival_alice_msg: f64,
    pub arrival_bob_msg: f64,
    pub measurements_spacelike: bool,
}

impl TrialRecord {
    pub fn alice_message(&self) -> Message {
        Message {
            trial_id: self.trial_id,
            outcome: self.alice_outcome,
            measurement_time: self.alice_event.t,
        }
    }

    pub fn bob_message(&self) -> Message {
        Message {
            trial_id: self.trial_id,
            outcome: self.bob_outcome,
            measurement_time: self.bob_event.t,
        }
    }

    pub fn agrees(&self) -> bool {
        self.alice_outcome == self.bob_outcome
    }
}

// Geometry must already be validated.
fn trial_unchecked(
    geometry: &GeometryConfig,
    source: &SourceModel,
    rng: &RngPolicy,
    trial_id: u64,
) -> TrialRecord {
    let mut stream = rng.stream(trial_id);
    let (alice_outcome, bob_outcome) = sample_pair(source, &mut stream);
    let alice_event = geometry.alice_event();
    let bob_event = geometry.bob_event();
    TrialRecord {
        trial_id,
        alice_outcome,
        bob_outcome,
        alice_event,
        bob_event,
        arrival_alice_msg: earliest_arrival(&alice_event, geometry.x_charles),
        arrival_bob_msg: earliest_arrival(&bob_event, geometry.x_charles),
        measurements_spacelike: interval_class(&alice_event, &bob_event)
            == IntervalClass::Spacelike,
    }
}

pub fn run_trial(
    geometry: &GeometryConfig,
    source: &SourceModel,
    rng: &RngPolicy,
    trial_id: u64,
) -> Result<TrialRecord> {
    geometry.validate()?;
    Ok(trial_unchecked(geometry, source, rng, trial_id))
}

/// Runs trials `0..n` in parallel; records come back in trial-id order.
pub fn run_experiment(
    geometry: &GeometryConfig,
    source: &SourceModel,
    rng: &RngPolicy,
    n: u64,
) -> Result<Vec<TrialRecord>> {
    check_run(geometry, n)?;
    Ok((0..n)
        .into_par_iter()
        .map(|id| trial_unchecked(geometry, source, rng, id))
        .collect())
}

/// Lazily yields trials `0..n` on the calling thread.
pub fn experiment_iter<'a>(
    geometry: &'a GeometryConfig,
    source: &'a SourceModel,
    rng: &'a RngPolicy,
    n: u64,
) -> Result<impl Iterator<Item = TrialRecord> + 'a> {
    check_run(geometry, n)?;
    Ok((0..n).map(move |id| trial_unchecked(geometry, source, rng, id)))
}

fn check_run(geometry: &GeometryConfig, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroTrials);
    }
    geometry.validate()
}
