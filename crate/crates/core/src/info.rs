//! Discrete information measures over single-spin and spin-pair distributions.
//!
//! Everything is measured in nats. Cells with probability exactly zero
//! contribute nothing to an entropy sum (`0 ln 0 = 0`).

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum allowed |Σp − 1| when constructing a distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Spin projection along the single measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpinOutcome {
    /// m_s = +1/2
    Plus,
    /// m_s = −1/2
    Minus,
}

impl SpinOutcome {
    /// Iteration order used everywhere: `Plus` before `Minus`.
    pub const ALL: [SpinOutcome; 2] = [SpinOutcome::Plus, SpinOutcome::Minus];

    pub fn index(self) -> usize {
        match self {
            SpinOutcome::Plus => 0,
            SpinOutcome::Minus => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SpinOutcome::Plus => SpinOutcome::Minus,
            SpinOutcome::Minus => SpinOutcome::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SpinOutcome::Plus => "+1/2",
            SpinOutcome::Minus => "-1/2",
        }
    }
}

impl fmt::Display for SpinOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SpinOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SpinOutcome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "+1/2" => Ok(SpinOutcome::Plus),
            "-1/2" => Ok(SpinOutcome::Minus),
            other => Err(serde::de::Error::custom(format!(
                "expected \"+1/2\" or \"-1/2\", got {other:?}"
            ))),
        }
    }
}

/// Which particle of the pair a marginal refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Electron,
    Positron,
}

/// An amount of information in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nats(pub f64);

impl Nats {
    pub const ZERO: Nats = Nats(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    /// Display-only conversion.
    pub fn to_bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    pub fn abs(self) -> Nats {
        Nats(self.0.abs())
    }
}

impl Add for Nats {
    type Output = Nats;
    fn add(self, rhs: Nats) -> Nats {
        Nats(self.0 + rhs.0)
    }
}

impl Sub for Nats {
    type Output = Nats;
    fn sub(self, rhs: Nats) -> Nats {
        Nats(self.0 - rhs.0)
    }
}

impl Neg for Nats {
    type Output = Nats;
    fn neg(self) -> Nats {
        Nats(-self.0)
    }
}

impl std::iter::Sum for Nats {
    fn sum<I: Iterator<Item = Nats>>(iter: I) -> Nats {
        Nats(iter.map(|n| n.0).sum())
    }
}

impl fmt::Display for Nats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = f.precision() {
            write!(f, "{:.*} nats", p, self.0)
        } else {
            write!(f, "{} nats", self.0)
        }
    }
}

fn check_cells(cells: &[f64]) -> Result<()> {
    for &p in cells {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
    }
    let sum: f64 = cells.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized(sum));
    }
    Ok(())
}

/// `−p ln p`, with the zero cell handled by an explicit branch.
fn surprisal_term(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

/// A validated distribution over one spin outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution {
    probs: [f64; 2],
}

impl OutcomeDistribution {
    pub fn new(plus: f64, minus: f64) -> Result<Self> {
        check_cells(&[plus, minus])?;
        Ok(Self {
            probs: [plus, minus],
        })
    }

    pub fn uniform() -> Self {
        Self { probs: [0.5, 0.5] }
    }

    pub fn certain(outcome: SpinOutcome) -> Self {
        let mut probs = [0.0; 2];
        probs[outcome.index()] = 1.0;
        Self { probs }
    }

    pub fn prob(&self, outcome: SpinOutcome) -> f64 {
        self.probs[outcome.index()]
    }

    pub fn probs(&self) -> [f64; 2] {
        self.probs
    }
}

/// A validated 2×2 table over (electron spin, positron spin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointPairDistribution {
    // cells[electron][positron]
    cells: [[f64; 2]; 2],
}

impl JointPairDistribution {
    /// Builds a joint from cells indexed `[electron][positron]`, Plus first.
    pub fn new(cells: [[f64; 2]; 2]) -> Result<Self> {
        check_cells(&[cells[0][0], cells[0][1], cells[1][0], cells[1][1]])?;
        Ok(Self { cells })
    }

    /// Builds a joint from `(electron, positron, p)` triples; unlisted cells are 0.
    pub fn from_cells<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SpinOutcome, SpinOutcome, f64)>,
    {
        let mut cells = [[0.0; 2]; 2];
        for (e, p, prob) in entries {
            cells[e.index()][p.index()] = prob;
        }
        Self::new(cells)
    }

    pub fn product(electron: &OutcomeDistribution, positron: &OutcomeDistribution) -> Self {
        let mut cells = [[0.0; 2]; 2];
        for e in SpinOutcome::ALL {
            for p in SpinOutcome::ALL {
                cells[e.index()][p.index()] = electron.prob(e) * positron.prob(p);
            }
        }
        Self { cells }
    }

    pub fn prob(&self, electron: SpinOutcome, positron: SpinOutcome) -> f64 {
        self.cells[electron.index()][positron.index()]
    }

    pub fn cells(&self) -> [[f64; 2]; 2] {
        self.cells
    }

    /// Cells in the fixed order (+,+), (+,−), (−,+), (−,−).
    pub fn iter(&self) -> impl Iterator<Item = (SpinOutcome, SpinOutcome, f64)> + '_ {
        SpinOutcome::ALL.into_iter().flat_map(move |e| {
            SpinOutcome::ALL
                .into_iter()
                .map(move |p| (e, p, self.prob(e, p)))
        })
    }

    /// Probability that both particles show the same spin.
    pub fn agreement_probability(&self) -> f64 {
        self.cells[0][0] + self.cells[1][1]
    }
}

/// Spin-pair table of the entangled source: only anti-correlated pairs, each 0.5.
pub fn table_i() -> JointPairDistribution {
    JointPairDistribution {
        cells: [[0.0, 0.5], [0.5, 0.0]],
    }
}

/// The uniform four-cell table an observer assigns when ignorant of the correlation.
pub fn table_ii() -> JointPairDistribution {
    JointPairDistribution {
        cells: [[0.25, 0.25], [0.25, 0.25]],
    }
}

pub fn entropy(dist: &OutcomeDistribution) -> Nats {
    Nats(dist.probs.iter().map(|&p| surprisal_term(p)).sum())
}

pub fn joint_entropy(joint: &JointPairDistribution) -> Nats {
    Nats(joint.iter().map(|(_, _, p)| surprisal_term(p)).sum())
}

pub fn marginal(joint: &JointPairDistribution, party: Party) -> OutcomeDistribution {
    let c = joint.cells;
    let probs = match party {
        Party::Electron => [c[0][0] + c[0][1], c[1][0] + c[1][1]],
        Party::Positron => [c[0][0] + c[1][0], c[0][1] + c[1][1]],
    };
    OutcomeDistribution { probs }
}

/// Sum of the marginal entropies: the pair's information if the two
/// particles are treated as independent.
pub fn independent_view_information(joint: &JointPairDistribution) -> Nats {
    entropy(&marginal(joint, Party::Electron)) + entropy(&marginal(joint, Party::Positron))
}

/// `H(e) + H(p) − H(e, p)`, clamped at zero.
pub fn mutual_information(joint: &JointPairDistribution) -> Nats {
    let mi = independent_view_information(joint).0 - joint_entropy(joint).0;
    debug_assert!(
        mi > -1e-9,
        "mutual information {mi} is significantly negative"
    );
    if mi < 0.0 {
        Nats::ZERO
    } else {
        Nats(mi)
    }
}

/// Excess information attributed to the pair by the independent view over
/// the joint's own entropy. Numerically equal to [`mutual_information`].
pub fn pseudo_information(joint: &JointPairDistribution) -> Nats {
    let independent_view = independent_view_information(joint);
    let pair = joint_entropy(joint);
    information_change(pair, independent_view)
}

pub fn information_change(before: Nats, after: Nats) -> Nats {
    after - before
}
