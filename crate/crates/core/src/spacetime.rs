//! One-dimensional lab-frame event bookkeeping in natural units (c = 1).
//!
//! Pairs are emitted at `t = 0` from `x_source`. Distances are light-time.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Band on `(Δx)² − (Δt)²` inside which two events count as lightlike.
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub x: f64,
}

impl SpacetimeEvent {
    pub fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalClass {
    Timelike,
    Lightlike,
    Spacelike,
}

pub fn interval_class(e1: &SpacetimeEvent, e2: &SpacetimeEvent) -> IntervalClass {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    let s = dx * dx - dt * dt;
    if s.abs() <= LIGHTLIKE_TOLERANCE {
        IntervalClass::Lightlike
    } else if s > 0.0 {
        IntervalClass::Spacelike
    } else {
        IntervalClass::Timelike
    }
}

/// Earliest time a light signal sent at `from` can reach position `to_x`.
pub fn earliest_arrival(from: &SpacetimeEvent, to_x: f64) -> f64 {
    from.t + (to_x - from.x).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Station {
    Alice,
    Bob,
}

/// A broken geometry invariant. Reported as data by [`validate_geometry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Violation {
    /// t2 must be strictly greater than t1.
    MeasurementOrderViolated,
    /// The station measures before light from the source could reach it.
    ParticleNotYetArrived(Station),
    /// A position or time is NaN or infinite.
    NonFiniteValue(&'static str),
}

impl Violation {
    pub fn code(&self) -> String {
        match self {
            Violation::MeasurementOrderViolated => "MeasurementOrderViolated".to_string(),
            Violation::ParticleNotYetArrived(s) => format!("ParticleNotYetArrived({s:?})"),
            Violation::NonFiniteValue(field) => format!("NonFiniteValue({field})"),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// Positions of source, stations and the inference node, plus measurement times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub x_source: f64,
    pub x_alice: f64,
    pub x_bob: f64,
    pub x_charles: f64,
    pub t1: f64,
    pub t2: f64,
}

impl Default for GeometryConfig {
    /// Source and Charles at the origin, stations one unit apart.
    fn default() -> Self {
        Self {
            x_source: 0.0,
            x_alice: -0.5,
            x_bob: 0.5,
            x_charles: 0.0,
            t1: 0.6,
            t2: 0.7,
        }
    }
}

impl GeometryConfig {
    pub fn alice_event(&self) -> SpacetimeEvent {
        SpacetimeEvent::new(self.t1, self.x_alice)
    }

    pub fn bob_event(&self) -> SpacetimeEvent {
        SpacetimeEvent::new(self.t2, self.x_bob)
    }

    /// Alice to Charles.
    pub fn l_alice(&self) -> f64 {
        (self.x_alice - self.x_charles).abs()
    }

    /// Bob to Charles.
    pub fn l_bob(&self) -> f64 {
        (self.x_bob - self.x_charles).abs()
    }

    /// Alice to Bob.
    pub fn l_ab(&self) -> f64 {
        (self.x_alice - self.x_bob).abs()
    }

    pub fn validate(&self) -> Result<()> {
        let violations = validate_geometry(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGeometry(violations))
        }
    }
}

pub fn validate_geometry(g: &GeometryConfig) -> Vec<Violation> {
    let fields = [
        ("x_source", g.x_source),
        ("x_alice", g.x_alice),
        ("x_bob", g.x_bob),
        ("x_charles", g.x_charles),
        ("t1", g.t1),
        ("t2", g.t2),
    ];
    let non_finite: Vec<Violation> = fields
        .iter()
        .filter(|(_, v)| !v.is_finite())
        .map(|(name, _)| Violation::NonFiniteValue(name))
        .collect();
    if !non_finite.is_empty() {
        return non_finite;
    }

    let mut out = Vec::new();
    if g.t2 <= g.t1 {
        out.push(Violation::MeasurementOrderViolated);
    }
    if g.t1 < (g.x_alice - g.x_source).abs() {
        out.push(Violation::ParticleNotYetArrived(Station::Alice));
    }
    if g.t2 < (g.x_bob - g.x_source).abs() {
        out.push(Violation::ParticleNotYetArrived(Station::Bob));
    }
    out
}
