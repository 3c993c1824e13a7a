//! What each observer knows, what they predict, and how much self-information
//! a measurement removes from their point of view.
//!
//! Beliefs are epistemic: Alice, Bob and Charles may hold different
//! distributions for the same particle in the same trial. Whether an observer
//! knows the pair's joint table (`knows_joint`) decides whether a received
//! partner outcome changes anything.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{
    entropy, information_change, joint_entropy, marginal, JointPairDistribution, Nats,
    OutcomeDistribution, Party, SpinOutcome,
};
use crate::sim::TrialRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observer {
    Alice,
    Bob,
    Charles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    ElectronOutcome,
    PositronOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KnowledgeSet {
    pub knows_joint: bool,
    pub received_alice_outcome: Option<SpinOutcome>,
    pub received_bob_outcome: Option<SpinOutcome>,
}

impl KnowledgeSet {
    pub fn uninformed() -> Self {
        Self::default()
    }

    /// Charles's knowledge at time `t`: only messages that have arrived by `t`.
    pub fn charles_at(record: &TrialRecord, t: f64, knows_joint: bool) -> Self {
        Self {
            knows_joint,
            received_alice_outcome: (record.arrival_alice_msg <= t).then_some(record.alice_outcome),
            received_bob_outcome: (record.arrival_bob_msg <= t).then_some(record.bob_outcome),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefState {
    pub target: Target,
    pub distribution: OutcomeDistribution,
}

pub fn prior_belief(
    knowledge: &KnowledgeSet,
    target: Target,
    true_joint: &JointPairDistribution,
) -> Result<BeliefState> {
    if !knowledge.knows_joint {
        return Ok(BeliefState {
            target,
            distribution: OutcomeDistribution::uniform(),
        });
    }
    let (own_party, partner_outcome) = match target {
        Target::ElectronOutcome => (Party::Electron, knowledge.received_bob_outcome),
        Target::PositronOutcome => (Party::Positron, knowledge.received_alice_outcome),
    };
    let distribution = match partner_outcome {
        None => marginal(true_joint, own_party),
        Some(partner) => conditional(true_joint, target, partner)?,
    };
    Ok(BeliefState {
        target,
        distribution,
    })
}

fn conditional(
    joint: &JointPairDistribution,
    target: Target,
    partner: SpinOutcome,
) -> Result<OutcomeDistribution> {
    let cell = |own: SpinOutcome| match target {
        Target::PositronOutcome => joint.prob(partner, own),
        Target::ElectronOutcome => joint.prob(own, partner),
    };
    let partner_marginal = cell(SpinOutcome::Plus) + cell(SpinOutcome::Minus);
    if partner_marginal == 0.0 {
        return Err(Error::UndefinedConditional);
    }
    let plus = cell(SpinOutcome::Plus) / partner_marginal;
    let minus = cell(SpinOutcome::Minus) / partner_marginal;
    OutcomeDistribution::new(plus, minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub observer: Observer,
    pub trial_id: u64,
    pub before: Nats,
    pub after: Nats,
    pub delta: Nats,
}

/// Records the self-information removed by a perfect measurement: the
/// observer's prior entropy before, zero after.
pub fn measure_and_log(
    belief: &BeliefState,
    outcome: SpinOutcome,
    observer: Observer,
    trial_id: u64,
) -> Result<LedgerEntry> {
    if belief.distribution.prob(outcome) == 0.0 {
        return Err(Error::Contradiction { observer, trial_id });
    }
    let before = entropy(&belief.distribution);
    let after = Nats::ZERO;
    Ok(LedgerEntry {
        observer,
        trial_id,
        before,
        after,
        delta: information_change(before, after),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub total_delta: Nats,
    pub assumed_pair_information: Nats,
    /// `|total_delta| − assumed_pair_information`; positive means more
    /// information was lost than the assumed pair ever held.
    pub discrepancy: Nats,
}

pub fn audit_pair(
    alice_entry: &LedgerEntry,
    bob_entry: &LedgerEntry,
    assumed_joint: &JointPairDistribution,
) -> Result<AuditReport> {
    if alice_entry.trial_id != bob_entry.trial_id {
        return Err(Error::TrialMismatch(
            alice_entry.trial_id,
            bob_entry.trial_id,
        ));
    }
    let total_delta = alice_entry.delta + bob_entry.delta;
    let assumed_pair_information = joint_entropy(assumed_joint);
    Ok(AuditReport {
        total_delta,
        assumed_pair_information,
        discrepancy: total_delta.abs() - assumed_pair_information,
    })
}

/// Ledger entries for Alice and Bob in one trial. Neither knows the joint,
/// so Alice's result (even if Bob had it) leaves his prior uniform.
pub fn station_entries(
    record: &TrialRecord,
    true_joint: &JointPairDistribution,
) -> Result<(LedgerEntry, LedgerEntry)> {
    let alice_belief = prior_belief(
        &KnowledgeSet::uninformed(),
        Target::ElectronOutcome,
        true_joint,
    )?;
    let bob_knowledge = KnowledgeSet {
        received_alice_outcome: Some(record.alice_outcome),
        ..KnowledgeSet::uninformed()
    };
    let bob_belief = prior_belief(&bob_knowledge, Target::PositronOutcome, true_joint)?;
    Ok((
        measure_and_log(
            &alice_belief,
            record.alice_outcome,
            Observer::Alice,
            record.trial_id,
        )?,
        measure_and_log(
            &bob_belief,
            record.bob_outcome,
            Observer::Bob,
            record.trial_id,
        )?,
    ))
}

/// Charles, assuming `joint`, predicts Bob's positron once Alice's message has
/// arrived, then checks the belief against Bob's actual result.
pub fn informed_charles_entry(
    record: &TrialRecord,
    joint: &JointPairDistribution,
) -> Result<LedgerEntry> {
    let knowledge = KnowledgeSet::charles_at(record, record.arrival_alice_msg, true);
    let belief = prior_belief(&knowledge, Target::PositronOutcome, joint)?;
    measure_and_log(
        &belief,
        record.bob_outcome,
        Observer::Charles,
        record.trial_id,
    )
}
