//! Trial log (JSON Lines) and summary (one JSON document).
//!
//! Summary reals are rounded to 12 significant digits before serialization,
//! so byte-level comparisons across runs do not depend on the last few bits.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::Result;
use crate::inference::{
    agreement_rate, estimate_mutual_information, score_forecasts, EmpiricalJoint, ForecastPolicy,
    Posterior,
};
use crate::info::{
    independent_view_information, joint_entropy, mutual_information, pseudo_information, table_i,
    table_ii, Nats, Party, SpinOutcome,
};
use crate::observers::{
    audit_pair, informed_charles_entry, measure_and_log, prior_belief, station_entries,
    AuditReport, KnowledgeSet, Observer, Target,
};
use crate::rng::{RngPolicy, FORECASTER_DOMAIN};
use crate::sim::TrialRecord;
use crate::spacetime::GeometryConfig;

use super::config::RunConfig;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn r(n: Nats) -> f64 {
    round_sig(n.0)
}

/// One JSON object per record, newline-terminated, in the given order.
pub fn write_trial_log<'a, W, I>(mut out: W, records: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a TrialRecord>,
{
    for rec in records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Self-information bookkeeping for one uninformed trial, with the stations'
/// beliefs taken from the observers module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticLedger {
    pub i_pair: f64,
    pub i_e1: f64,
    pub i_e2: f64,
    pub delta_i_e: f64,
    pub i_p1: f64,
    pub i_p2: f64,
    pub delta_i_p: f64,
    pub delta_i_pair: f64,
    pub i_pair_star: f64,
    pub i_a_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditSummary {
    pub total_delta: f64,
    pub assumed_pair_information: f64,
    pub discrepancy: f64,
}

impl From<AuditReport> for AuditSummary {
    fn from(a: AuditReport) -> Self {
        Self {
            total_delta: r(a.total_delta),
            assumed_pair_information: r(a.assumed_pair_information),
            discrepancy: r(a.discrepancy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Audits {
    pub table_i: AuditSummary,
    pub table_ii: AuditSummary,
}

/// Unrounded analytic values, for callers that need full precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticValues {
    pub i_pair: Nats,
    pub i_e1: Nats,
    pub i_e2: Nats,
    pub delta_i_e: Nats,
    pub i_p1: Nats,
    pub i_p2: Nats,
    pub delta_i_p: Nats,
    pub delta_i_pair: Nats,
    pub i_pair_star: Nats,
    pub i_a_p: Nats,
    pub audit_table_i: AuditReport,
    pub audit_table_ii: AuditReport,
}

/// Alice measures the electron and Bob the positron, neither knowing the
/// pair is entangled; Bob has Alice's result but cannot use it.
pub fn analytic_values() -> Result<AnalyticValues> {
    let truth = table_i();
    let alice_prior = prior_belief(&KnowledgeSet::uninformed(), Target::ElectronOutcome, &truth)?;
    let bob_knowledge = KnowledgeSet {
        received_alice_outcome: Some(SpinOutcome::Plus),
        ..KnowledgeSet::uninformed()
    };
    let bob_prior = prior_belief(&bob_knowledge, Target::PositronOutcome, &truth)?;
    let alice = measure_and_log(&alice_prior, SpinOutcome::Plus, Observer::Alice, 0)?;
    let bob = measure_and_log(&bob_prior, SpinOutcome::Minus, Observer::Bob, 0)?;
    let audit_table_i = audit_pair(&alice, &bob, &table_i())?;
    let audit_table_ii = audit_pair(&alice, &bob, &table_ii())?;
    Ok(AnalyticValues {
        i_pair: joint_entropy(&truth),
        i_e1: alice.before,
        i_e2: alice.after,
        delta_i_e: alice.delta,
        i_p1: bob.before,
        i_p2: bob.after,
        delta_i_p: bob.delta,
        delta_i_pair: audit_table_i.total_delta,
        i_pair_star: independent_view_information(&truth),
        i_a_p: pseudo_information(&truth),
        audit_table_i,
        audit_table_ii,
    })
}

impl AnalyticValues {
    pub fn ledger(&self) -> AnalyticLedger {
        AnalyticLedger {
            i_pair: r(self.i_pair),
            i_e1: r(self.i_e1),
            i_e2: r(self.i_e2),
            delta_i_e: r(self.delta_i_e),
            i_p1: r(self.i_p1),
            i_p2: r(self.i_p2),
            delta_i_p: r(self.delta_i_p),
            delta_i_pair: r(self.delta_i_pair),
            i_pair_star: r(self.i_pair_star),
            i_a_p: r(self.i_a_p),
        }
    }

    pub fn audits(&self) -> Audits {
        Audits {
            table_i: self.audit_table_i.into(),
            table_ii: self.audit_table_ii.into(),
        }
    }

    /// Plain-text table, six decimals.
    pub fn render(&self) -> String {
        let rows = [
            ("I_pair", self.i_pair, "pair information, true joint"),
            ("I_e1", self.i_e1, "electron before Alice measures"),
            ("I_e2", self.i_e2, "electron after Alice measures"),
            ("dI_e", self.delta_i_e, "change for the electron"),
            ("I_p1", self.i_p1, "positron before Bob measures"),
            ("I_p2", self.i_p2, "positron after Bob measures"),
            ("dI_p", self.delta_i_p, "change for the positron"),
            (
                "dI_pair",
                self.delta_i_pair,
                "total change over both stations",
            ),
            (
                "I*_pair",
                self.i_pair_star,
                "pair information, independent view",
            ),
            ("I_a-p", self.i_a_p, "pseudo-information"),
        ];
        let mut s = String::from("information ledger (nats)\n");
        for (name, v, what) in rows {
            s.push_str(&format!("  {name:<8} {:>10.6}   {what}\n", v.0));
        }
        for (label, a) in [
            ("Table I", &self.audit_table_i),
            ("Table II", &self.audit_table_ii),
        ] {
            s.push_str(&format!(
                "audit vs {label}: total {:.6}, assumed {:.6}, discrepancy {:.6}\n",
                a.total_delta.0, a.assumed_pair_information.0, a.discrepancy.0
            ));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceSummary {
    pub kind: &'static str,
    /// Cells (+,+), (+,−), (−,+), (−,−).
    pub cells: [f64; 4],
    pub joint_entropy: f64,
    pub mutual_information: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub prior_log_odds: f64,
    /// `null` once collapsed (−∞).
    pub log_odds_entangled: Option<f64>,
    pub p_entangled: f64,
    pub collapsed_to_independent: bool,
}

impl From<&Posterior> for PosteriorSummary {
    fn from(p: &Posterior) -> Self {
        let lo = p.log_odds_entangled();
        Self {
            prior_log_odds: round_sig(p.prior_log_odds()),
            log_odds_entangled: lo.is_finite().then(|| round_sig(lo)),
            p_entangled: round_sig(p.p_entangled()),
            collapsed_to_independent: p.collapsed_to_independent(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastSummary {
    pub agnostic: f64,
    pub assume_entangled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservedLedger {
    /// Mean per-trial change for each uninformed station.
    pub alice_mean_delta: f64,
    pub bob_mean_delta: f64,
    pub mean_discrepancy_table_i: f64,
    pub mean_discrepancy_table_ii: f64,
    /// Trials where Charles, assuming Table I and holding Alice's result,
    /// held a certain belief about Bob's outcome that turned out wrong.
    pub table_i_assumption_contradictions: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
    pub seed: u64,
    pub n_trials: u64,
    pub geometry: GeometryConfig,
    pub source: SourceSummary,
    pub agreements: u64,
    pub agreement_rate: f64,
    pub alice_plus_fraction: f64,
    pub bob_plus_fraction: f64,
    pub mi_estimate: f64,
    pub posterior: PosteriorSummary,
    pub forecast_accuracy: ForecastSummary,
    pub spacelike_fraction: f64,
    pub analytic_ledger: AnalyticLedger,
    pub audits: Audits,
    pub observed_ledger: ObservedLedger,
}

pub fn summarize(
    config: &RunConfig,
    records: &[TrialRecord],
    generated_at_unix: Option<u64>,
) -> Result<SummaryReport> {
    let emp = EmpiricalJoint::from_records(records);
    let posterior = Posterior::from_counts(config.prior_log_odds, &emp);
    let forecaster = RngPolicy::new(config.master_seed).derive(FORECASTER_DOMAIN);
    let n = records.len() as f64;

    let truth = config.source.joint();
    let mut alice_sum = 0.0;
    let mut bob_sum = 0.0;
    let mut disc_i = 0.0;
    let mut disc_ii = 0.0;
    let mut contradictions = 0;
    let mut spacelike = 0u64;
    for rec in records {
        let (a, b) = station_entries(rec, &truth)?;
        alice_sum += a.delta.0;
        bob_sum += b.delta.0;
        disc_i += audit_pair(&a, &b, &table_i())?.discrepancy.0;
        disc_ii += audit_pair(&a, &b, &table_ii())?.discrepancy.0;
        if informed_charles_entry(rec, &table_i()).is_err() {
            contradictions += 1;
        }
        spacelike += rec.measurements_spacelike as u64;
    }

    let analytic = analytic_values()?;
    let cells: Vec<f64> = truth.iter().map(|(_, _, p)| round_sig(p)).collect();
    Ok(SummaryReport {
        generated_at_unix,
        seed: config.master_seed,
        n_trials: records.len() as u64,
        geometry: config.geometry,
        source: SourceSummary {
            kind: config.source.name(),
            cells: [cells[0], cells[1], cells[2], cells[3]],
            joint_entropy: r(joint_entropy(&truth)),
            mutual_information: r(mutual_information(&truth)),
        },
        agreements: emp.agreements(),
        agreement_rate: round_sig(agreement_rate(&emp)?),
        alice_plus_fraction: round_sig(emp.plus_fraction(Party::Electron)?),
        bob_plus_fraction: round_sig(emp.plus_fraction(Party::Positron)?),
        mi_estimate: r(estimate_mutual_information(&emp)?),
        posterior: (&posterior).into(),
        forecast_accuracy: ForecastSummary {
            agnostic: round_sig(score_forecasts(
                ForecastPolicy::Agnostic,
                records,
                &forecaster,
            )?),
            assume_entangled: round_sig(score_forecasts(
                ForecastPolicy::AssumeEntangled,
                records,
                &forecaster,
            )?),
        },
        spacelike_fraction: round_sig(spacelike as f64 / n),
        analytic_ledger: analytic.ledger(),
        audits: analytic.audits(),
        observed_ledger: ObservedLedger {
            alice_mean_delta: round_sig(alice_sum / n),
            bob_mean_delta: round_sig(bob_sum / n),
            mean_discrepancy_table_i: round_sig(disc_i / n),
            mean_discrepancy_table_ii: round_sig(disc_ii / n),
            table_i_assumption_contradictions: contradictions,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_experiment, SourceModel};
    use std::f64::consts::LN_2;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(LN_2).to_string(), "0.69314718056");
        assert_eq!(round_sig(-2.0 * LN_2), -1.38629436112);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1e-300 / 3.0), 3.33333333333e-301);
        assert!(round_sig(f64::NAN).is_nan());
    }

    #[test]
    fn analytic_ledger_six_decimals() {
        let a = analytic_values().unwrap();
        let six = |n: Nats| format!("{:.6}", n.0);
        assert_eq!(six(a.i_pair), "0.693147");
        assert_eq!(six(a.delta_i_pair), "-1.386294");
        assert_eq!(six(a.i_pair_star), "1.386294");
        assert_eq!(six(a.i_a_p), "0.693147");
        assert_eq!(a.audit_table_i.discrepancy, a.i_a_p);
        let text = a.render();
        assert!(text.contains("I_a-p      0.693147"), "{text}");
        assert!(text.contains(
            "audit vs Table II: total -1.386294, assumed 1.386294, discrepancy 0.000000"
        ));
    }

    #[test]
    fn trial_log_lines() {
        let recs = run_experiment(
            &GeometryConfig::default(),
            &SourceModel::Entangled,
            &RngPolicy::new(1),
            3,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_trial_log(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["trial_id"], 0);
        assert!(matches!(
            first["alice_outcome"].as_str(),
            Some("+1/2") | Some("-1/2")
        ));
        assert_eq!(first["measurements_spacelike"], true);
        assert_eq!(first["alice_event"]["t"], 0.6);
        let back: TrialRecord = serde_json::from_str(text.lines().nth(2).unwrap()).unwrap();
        assert_eq!(back, recs[2]);
    }

    #[test]
    fn summary_fields() {
        let cfg = RunConfig {
            n_trials: 200,
            ..RunConfig::default()
        };
        let recs = run_experiment(&cfg.geometry, &cfg.source, &RngPolicy::new(0), 200).unwrap();
        let s = summarize(&cfg, &recs, None).unwrap();
        assert_eq!(s.agreement_rate, 0.0);
        assert_eq!(s.forecast_accuracy.assume_entangled, 1.0);
        assert_eq!(s.observed_ledger.table_i_assumption_contradictions, 0);
        assert_eq!(s.observed_ledger.mean_discrepancy_table_i, round_sig(LN_2));
        assert_eq!(s.spacelike_fraction, 1.0);
        assert!(!s.posterior.collapsed_to_independent);
        let json = serde_json::to_value(&s).unwrap();
        assert!(json.get("generated_at_unix").is_none());
        assert_eq!(
            json["analytic_ledger"]["i_a_p"].to_string(),
            "0.69314718056"
        );
    }
}
