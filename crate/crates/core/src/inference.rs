//! Charles's side of the experiment: count what arrives, test the source
//! hypothesis, estimate the correlation, and score forecasts of Bob's result.
//!
//! The hypothesis space is exactly {entangled source (Table I), independent
//! source (Table II)}. The event `a ≠ b` has probability 1 under the first
//! and 0.5 under the second, so every anti-correlated trial adds `ln 2` to the
//! log-odds. An agreeing pair has zero likelihood under Table I and collapses
//! the posterior.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{mutual_information, JointPairDistribution, Nats, Party, SpinOutcome};
use crate::observers::KnowledgeSet;
use crate::rng::{RngPolicy, TrialStream};
use crate::sim::TrialRecord;

/// Count table over (Alice's outcome, Bob's outcome).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmpiricalJoint {
    counts: [[u64; 2]; 2],
    n: u64,
}

impl EmpiricalJoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<'a, I>(records: I) -> Self
    where
        I: IntoIterator<Item = &'a TrialRecord>,
    {
        records.into_iter().fold(Self::new(), update_counts)
    }

    pub fn record(&mut self, alice: SpinOutcome, bob: SpinOutcome) {
        self.counts[alice.index()][bob.index()] += 1;
        self.n += 1;
    }

    pub fn merge(mut self, other: &EmpiricalJoint) -> Self {
        for a in 0..2 {
            for b in 0..2 {
                self.counts[a][b] += other.counts[a][b];
            }
        }
        self.n += other.n;
        self
    }

    pub fn count(&self, alice: SpinOutcome, bob: SpinOutcome) -> u64 {
        self.counts[alice.index()][bob.index()]
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn agreements(&self) -> u64 {
        self.counts[0][0] + self.counts[1][1]
    }

    pub fn anticorrelated(&self) -> u64 {
        self.counts[0][1] + self.counts[1][0]
    }

    /// Fraction of trials in which `party`'s outcome was `Plus`.
    pub fn plus_fraction(&self, party: Party) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::EmptySample);
        }
        let plus = match party {
            Party::Electron => self.counts[0][0] + self.counts[0][1],
            Party::Positron => self.counts[0][0] + self.counts[1][0],
        };
        Ok(plus as f64 / self.n as f64)
    }

    /// The normalized count table.
    pub fn to_joint(&self) -> Result<JointPairDistribution> {
        if self.n == 0 {
            return Err(Error::EmptySample);
        }
        let n = self.n as f64;
        let c = self.counts;
        JointPairDistribution::new([
            [c[0][0] as f64 / n, c[0][1] as f64 / n],
            [c[1][0] as f64 / n, c[1][1] as f64 / n],
        ])
    }
}

pub fn update_counts(mut emp: EmpiricalJoint, record: &TrialRecord) -> EmpiricalJoint {
    emp.record(record.alice_outcome, record.bob_outcome);
    emp
}

pub fn agreement_rate(emp: &EmpiricalJoint) -> Result<f64> {
    if emp.n == 0 {
        return Err(Error::EmptySample);
    }
    Ok(emp.agreements() as f64 / emp.n as f64)
}

/// Plug-in mutual information of the normalized counts. Biased upward by
/// roughly `1/(2n)` nats for an independent source; no correction is applied.
pub fn estimate_mutual_information(emp: &EmpiricalJoint) -> Result<Nats> {
    Ok(mutual_information(&emp.to_joint()?))
}

/// Odds of "entangled source" against "independent source".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    prior_log_odds: f64,
    anticorrelated: u64,
    collapsed_to_independent: bool,
}

impl Posterior {
    pub fn new(prior_log_odds: f64) -> Self {
        debug_assert!(prior_log_odds.is_finite());
        Self {
            prior_log_odds,
            anticorrelated: 0,
            collapsed_to_independent: false,
        }
    }

    /// Batch form: the posterior depends only on the counts.
    pub fn from_counts(prior_log_odds: f64, emp: &EmpiricalJoint) -> Self {
        Self {
            prior_log_odds,
            anticorrelated: emp.anticorrelated(),
            collapsed_to_independent: emp.agreements() > 0,
        }
    }

    pub fn update(&mut self, alice: SpinOutcome, bob: SpinOutcome) {
        if alice == bob {
            self.collapsed_to_independent = true;
        } else {
            self.anticorrelated += 1;
        }
    }

    /// Combines posteriors computed over disjoint parts of the same stream
    /// sharing one prior.
    pub fn merge(mut self, other: &Posterior) -> Self {
        self.anticorrelated += other.anticorrelated;
        self.collapsed_to_independent |= other.collapsed_to_independent;
        self
    }

    /// `prior + k ln 2` for `k` anti-correlated trials; `−∞` once collapsed.
    pub fn log_odds_entangled(&self) -> f64 {
        if self.collapsed_to_independent {
            f64::NEG_INFINITY
        } else {
            self.prior_log_odds + self.anticorrelated as f64 * LN_2
        }
    }

    pub fn collapsed_to_independent(&self) -> bool {
        self.collapsed_to_independent
    }

    pub fn prior_log_odds(&self) -> f64 {
        self.prior_log_odds
    }

    pub fn p_entangled(&self) -> f64 {
        if self.collapsed_to_independent {
            return 0.0;
        }
        let x = self.log_odds_entangled();
        if x >= 0.0 {
            1.0 / (1.0 + (-x).exp())
        } else {
            let e = x.exp();
            e / (1.0 + e)
        }
    }
}

pub fn sequential_posterior<I>(prior_log_odds: f64, pairs: I) -> Posterior
where
    I: IntoIterator<Item = (SpinOutcome, SpinOutcome)>,
{
    let mut post = Posterior::new(prior_log_odds);
    for (a, b) in pairs {
        post.update(a, b);
    }
    post
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForecastPolicy {
    /// Fair coin from the forecaster's own stream.
    Agnostic,
    /// Opposite of Alice's outcome; needs her message.
    AssumeEntangled,
}

impl ForecastPolicy {
    pub const ALL: [ForecastPolicy; 2] =
        [ForecastPolicy::Agnostic, ForecastPolicy::AssumeEntangled];
}

pub fn predict_bob(
    policy: ForecastPolicy,
    knowledge: &KnowledgeSet,
    coin: &mut TrialStream,
    trial_id: u64,
) -> Result<SpinOutcome> {
    match policy {
        ForecastPolicy::Agnostic => Ok(if coin.coin() {
            SpinOutcome::Plus
        } else {
            SpinOutcome::Minus
        }),
        ForecastPolicy::AssumeEntangled => knowledge
            .received_alice_outcome
            .map(SpinOutcome::flipped)
            .ok_or(Error::MissingAliceMessage(trial_id)),
    }
}

/// Accuracy of `policy` at predicting Bob's outcome, each prediction made at
/// the moment Alice's message reaches Charles.
pub fn score_forecasts<'a, I>(
    policy: ForecastPolicy,
    records: I,
    forecaster: &RngPolicy,
) -> Result<f64>
where
    I: IntoIterator<Item = &'a TrialRecord>,
{
    score_forecasts_at(policy, records, forecaster, |r| r.arrival_alice_msg)
}

/// As [`score_forecasts`], with the prediction time chosen per record.
/// Only messages that have arrived by that time are available.
pub fn score_forecasts_at<'a, I, F>(
    policy: ForecastPolicy,
    records: I,
    forecaster: &RngPolicy,
    prediction_time: F,
) -> Result<f64>
where
    I: IntoIterator<Item = &'a TrialRecord>,
    F: Fn(&TrialRecord) -> f64,
{
    let mut hits = 0u64;
    let mut n = 0u64;
    for record in records {
        let knowledge = KnowledgeSet::charles_at(
            record,
            prediction_time(record),
            policy == ForecastPolicy::AssumeEntangled,
        );
        let mut coin = forecaster.stream(record.trial_id);
        let guess = predict_bob(policy, &knowledge, &mut coin, record.trial_id)?;
        n += 1;
        if guess == record.bob_outcome {
            hits += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    Ok(hits as f64 / n as f64)
}
