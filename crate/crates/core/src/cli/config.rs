//! Run configuration: a flat `key = value` file, overridden by flags.
//!
//! ```text
//! # comments and blank lines are ignored
//! source = independent          # entangled | independent | custom:PATH
//! trials = 100000
//! seed = 42
//! geometry = 0,-0.5,0.5,0,0.6,0.7   # x_source,x_alice,x_bob,x_charles,t1,t2
//! x_charles = 0.25              # single geometry fields are accepted too
//! prior_odds = 1
//! out = out
//! timestamp = false
//! ```
//!
//! A custom source file uses the same syntax with exactly the four keys
//! `p_plus_plus`, `p_plus_minus`, `p_minus_plus`, `p_minus_minus`
//! (electron spin first).

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::info::{JointPairDistribution, SpinOutcome};
use crate::sim::SourceModel;
use crate::spacetime::{validate_geometry, GeometryConfig};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub source: SourceModel,
    pub master_seed: u64,
    pub n_trials: u64,
    pub prior_log_odds: f64,
    pub out_dir: PathBuf,
    pub timestamp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            source: SourceModel::Entangled,
            master_seed: DEFAULT_SEED,
            n_trials: DEFAULT_TRIALS,
            prior_log_odds: 0.0,
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
            timestamp: true,
        }
    }
}

/// Flag values; `None` leaves the file (or default) value in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub source: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub geometry: Option<String>,
    pub prior_odds: Option<f64>,
    pub out: Option<PathBuf>,
    pub no_timestamp: bool,
}

/// Position of a problem in a key=value file, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{origin}:{at}: {message}")]
    Malformed {
        origin: String,
        at: Location,
        message: String,
    },
    #[error("{origin}: cannot read file: {message}")]
    Unreadable { origin: String, message: String },
    #[error("invalid configuration: {}", .0.join(", "))]
    Violations(Vec<String>),
}

impl ConfigError {
    fn malformed(origin: &str, at: Location, message: impl Into<String>) -> Self {
        ConfigError::Malformed {
            origin: origin.to_string(),
            at,
            message: message.into(),
        }
    }
}

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    key_at: Location,
    value_at: Location,
}

fn parse_key_values<'a>(text: &'a str, origin: &str) -> Result<Vec<Entry<'a>>, ConfigError> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let key_start = content.len() - content.trim_start().len();
        let Some(eq) = content.find('=') else {
            return Err(ConfigError::malformed(
                origin,
                Location {
                    line,
                    column: content.trim_end().len() + 1,
                },
                "expected `key = value`",
            ));
        };
        let key = content[..eq].trim();
        let key_at = Location {
            line,
            column: key_start + 1,
        };
        if key.is_empty() {
            return Err(ConfigError::malformed(
                origin,
                key_at,
                "missing key before `=`",
            ));
        }
        if key.chars().any(char::is_whitespace) {
            return Err(ConfigError::malformed(
                origin,
                key_at,
                format!("invalid key `{key}`"),
            ));
        }
        let after = &content[eq + 1..];
        let value = after.trim();
        let value_at = Location {
            line,
            column: eq + 2 + (after.len() - after.trim_start().len()),
        };
        if value.is_empty() {
            return Err(ConfigError::malformed(
                origin,
                value_at,
                format!("missing value for `{key}`"),
            ));
        }
        if !seen.insert(key) {
            return Err(ConfigError::malformed(
                origin,
                key_at,
                format!("duplicate key `{key}`"),
            ));
        }
        entries.push(Entry {
            key,
            value,
            key_at,
            value_at,
        });
    }
    Ok(entries)
}

fn number<T: std::str::FromStr>(e: &Entry<'_>, origin: &str) -> Result<T, ConfigError> {
    e.value.parse().map_err(|_| {
        ConfigError::malformed(
            origin,
            e.value_at,
            format!("`{}` is not a valid value for `{}`", e.value, e.key),
        )
    })
}

/// Parses `x_source,x_alice,x_bob,x_charles,t1,t2`.
pub fn parse_geometry(s: &str) -> Result<GeometryConfig, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(format!(
            "expected 6 comma-separated numbers, got {}",
            parts.len()
        ));
    }
    let mut v = [0.0; 6];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok(GeometryConfig {
        x_source: v[0],
        x_alice: v[1],
        x_bob: v[2],
        x_charles: v[3],
        t1: v[4],
        t2: v[5],
    })
}

/// Parses a custom source file body.
pub fn parse_custom_source(text: &str, origin: &str) -> Result<JointPairDistribution, ConfigError> {
    use SpinOutcome::{Minus, Plus};
    let cell_of = |key: &str| match key {
        "p_plus_plus" => Some((Plus, Plus)),
        "p_plus_minus" => Some((Plus, Minus)),
        "p_minus_plus" => Some((Minus, Plus)),
        "p_minus_minus" => Some((Minus, Minus)),
        _ => None,
    };
    let entries = parse_key_values(text, origin)?;
    let mut cells = Vec::with_capacity(4);
    for e in &entries {
        let Some((a, b)) = cell_of(e.key) else {
            return Err(ConfigError::malformed(
                origin,
                e.key_at,
                format!("unknown key `{}`", e.key),
            ));
        };
        cells.push((a, b, number::<f64>(e, origin)?));
    }
    if cells.len() != 4 {
        return Err(ConfigError::Violations(vec![format!(
            "InvalidCustomSource({origin}: expected p_plus_plus, p_plus_minus, p_minus_plus, p_minus_minus)"
        )]));
    }
    JointPairDistribution::from_cells(cells).map_err(|err| {
        ConfigError::Violations(vec![format!("InvalidCustomSource({origin}: {err})")])
    })
}

fn parse_source(spec: &str) -> Result<SourceModel, String> {
    match spec {
        "entangled" => Ok(SourceModel::Entangled),
        "independent" => Ok(SourceModel::Independent),
        other => match other.strip_prefix("custom:") {
            Some(path) if !path.is_empty() => {
                Ok(SourceModel::Custom(load_custom(Path::new(path))?))
            }
            _ => Err(format!(
                "unknown source `{other}` (entangled, independent, custom:PATH)"
            )),
        },
    }
}

fn load_custom(path: &Path) -> Result<JointPairDistribution, String> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {origin}: {e}"))?;
    parse_custom_source(&text, &origin).map_err(|e| e.to_string())
}

/// Builds a [`RunConfig`] from an optional config file body and flag
/// overrides, then checks every run invariant.
pub fn parse_config(
    file: Option<(&str, &str)>,
    overrides: &Overrides,
) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut source_spec: Option<String> = None;
    let mut prior_odds = 1.0;

    if let Some((text, origin)) = file {
        for e in parse_key_values(text, origin)? {
            let bad = |msg: String| ConfigError::malformed(origin, e.value_at, msg);
            match e.key {
                "source" => source_spec = Some(e.value.to_string()),
                "trials" => cfg.n_trials = number(&e, origin)?,
                "seed" => cfg.master_seed = number(&e, origin)?,
                "prior_odds" => prior_odds = number(&e, origin)?,
                "out" => cfg.out_dir = PathBuf::from(e.value),
                "timestamp" => cfg.timestamp = number(&e, origin)?,
                "geometry" => cfg.geometry = parse_geometry(e.value).map_err(bad)?,
                "x_source" => cfg.geometry.x_source = number(&e, origin)?,
                "x_alice" => cfg.geometry.x_alice = number(&e, origin)?,
                "x_bob" => cfg.geometry.x_bob = number(&e, origin)?,
                "x_charles" => cfg.geometry.x_charles = number(&e, origin)?,
                "t1" => cfg.geometry.t1 = number(&e, origin)?,
                "t2" => cfg.geometry.t2 = number(&e, origin)?,
                other => {
                    return Err(ConfigError::malformed(
                        origin,
                        e.key_at,
                        format!("unknown key `{other}`"),
                    ))
                }
            }
        }
    }

    if let Some(s) = &overrides.source {
        source_spec = Some(s.clone());
    }
    if let Some(n) = overrides.trials {
        cfg.n_trials = n;
    }
    if let Some(seed) = overrides.seed {
        cfg.master_seed = seed;
    }
    if let Some(g) = &overrides.geometry {
        cfg.geometry = parse_geometry(g)
            .map_err(|m| ConfigError::Violations(vec![format!("InvalidGeometrySpec({m})")]))?;
    }
    if let Some(r) = overrides.prior_odds {
        prior_odds = r;
    }
    if let Some(out) = &overrides.out {
        cfg.out_dir = out.clone();
    }
    if overrides.no_timestamp {
        cfg.timestamp = false;
    }

    let mut violations = Vec::new();
    if let Some(spec) = source_spec {
        match parse_source(&spec) {
            Ok(s) => cfg.source = s,
            Err(m) => violations.push(format!("InvalidSource({m})")),
        }
    }
    if cfg.n_trials == 0 {
        violations.push("MeasurementCountInvalid".to_string());
    }
    if !(prior_odds.is_finite() && prior_odds > 0.0) {
        violations.push(format!("PriorOddsInvalid({prior_odds})"));
    } else {
        cfg.prior_log_odds = prior_odds.ln();
    }
    violations.extend(validate_geometry(&cfg.geometry).iter().map(|v| v.code()));

    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Violations(violations))
    }
}
