//! JSON run configuration.
//!
//! ```json
//! {
//!   "levels": [{"label": "g", "energy": "0"}, {"label": "e", "energy": "1"}],
//!   "times": ["t0", "t1"],
//!   "momenta": ["k0"],
//!   "dispersion": {"k0": "1"},
//!   "couplings": {"1,k0": ["1", "0"]},
//!   "time_grid": {"points": 2, "dt": "1/2"},
//!   "nmax": 3
//! }
//! ```
//!
//! Rationals are written as `"p/q"`, integers or decimals. Everything except
//! `levels` is optional until a command needs it.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::algebra::{Dispersion, EntangledAlgebra, LabelSpace};
use crate::dyson::InteractionSpec;
use crate::error::{Error, Result};
use crate::exact::{self, ComplexRational, Rational};
use crate::system::{validate_generic, GenericSystem, Level, RejectionReport, Spectrum};

pub const DEFAULT_NMAX: usize = 3;
pub const DEFAULT_MAX_WORD_LEN: usize = 4;
pub const DEFAULT_MAX_ORDER: usize = 3;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLevel {
    label: String,
    energy: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    points: usize,
    dt: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    psi: Vec<[Value; 2]>,
    psi_prime: Option<Vec<[Value; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    levels: Vec<RawLevel>,
    frequencies: Option<Vec<Value>>,
    #[serde(default)]
    times: Vec<String>,
    #[serde(default)]
    momenta: Vec<String>,
    #[serde(default)]
    dispersion: BTreeMap<String, Value>,
    couplings: Option<BTreeMap<String, [Value; 2]>>,
    time_grid: Option<RawGrid>,
    nmax: Option<usize>,
    max_word_len: Option<usize>,
    max_order: Option<usize>,
    tol: Option<f64>,
    #[serde(default)]
    words: Vec<String>,
    state: Option<RawState>,
}

fn rational_value(value: &Value, what: &str) -> Result<Rational> {
    match value {
        Value::String(s) => exact::parse_rational(s),
        Value::Number(n) => exact::parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("{what}: expected a rational, got {other}"))),
    }
}

fn complex_value(pair: &[Value; 2], what: &str) -> Result<ComplexRational> {
    Ok(exact::cq(
        rational_value(&pair[0], what)?,
        rational_value(&pair[1], what)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionConfig {
    pub couplings: BTreeMap<(Rational, String), ComplexRational>,
    pub points: usize,
    pub dt: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spectrum: Spectrum,
    pub frequencies: Option<Vec<Rational>>,
    pub times: Vec<String>,
    pub momenta: Vec<String>,
    pub dispersion: Dispersion,
    pub interaction: Option<InteractionConfig>,
    pub nmax: usize,
    pub max_word_len: usize,
    pub max_order: usize,
    pub tol: Option<f64>,
    pub words: Vec<String>,
    pub psi: Option<Vec<ComplexRational>>,
    pub psi_prime: Option<Vec<ComplexRational>>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;

        let levels = raw
            .levels
            .iter()
            .map(|l| {
                Ok(Level {
                    label: l.label.clone(),
                    energy: rational_value(&l.energy, &l.label)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let spectrum = Spectrum::new(levels)?;

        let frequencies = raw
            .frequencies
            .map(|list| {
                list.iter()
                    .map(|v| rational_value(v, "frequency"))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;

        let dispersion = Dispersion::new(
            raw.dispersion
                .iter()
                .map(|(k, v)| Ok((k.clone(), rational_value(v, k)?)))
                .collect::<Result<_>>()?,
        );

        let interaction = match (raw.couplings, raw.time_grid) {
            (None, None) => None,
            (Some(couplings), Some(grid)) => {
                let mut table = BTreeMap::new();
                for (key, pair) in &couplings {
                    let (omega, k) = key
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(format!("coupling key {key:?} is not of the form ω,k")))?;
                    table.insert(
                        (exact::parse_rational(omega.trim())?, k.trim().to_string()),
                        complex_value(pair, key)?,
                    );
                }
                Some(InteractionConfig {
                    couplings: table,
                    points: grid.points,
                    dt: rational_value(&grid.dt, "dt")?,
                })
            }
            _ => return Err(Error::Parse("couplings and time_grid must be given together".into())),
        };

        let (psi, psi_prime) = match raw.state {
            None => (None, None),
            Some(state) => {
                let read =
                    |v: &Vec<[Value; 2]>| v.iter().map(|p| complex_value(p, "state")).collect::<Result<Vec<_>>>();
                let psi = read(&state.psi)?;
                let psi_prime = state.psi_prime.as_ref().map(read).transpose()?;
                (Some(psi), psi_prime)
            }
        };

        for (name, value) in [("nmax", raw.nmax), ("max_word_len", raw.max_word_len)] {
            if value == Some(0) {
                return Err(Error::Invalid(format!("{name} must be positive")));
            }
        }
        if let Some(tol) = raw.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
            }
        }

        Ok(Self {
            spectrum,
            frequencies,
            times: raw.times,
            momenta: raw.momenta,
            dispersion,
            interaction,
            nmax: raw.nmax.unwrap_or(DEFAULT_NMAX),
            max_word_len: raw.max_word_len.unwrap_or(DEFAULT_MAX_WORD_LEN),
            max_order: raw.max_order.unwrap_or(DEFAULT_MAX_ORDER),
            tol: raw.tol,
            words: raw.words,
            psi,
            psi_prime,
        })
    }

    /// Validated system, or the bypassed one when `force` is set.
    pub fn system(&self, force: bool) -> std::result::Result<GenericSystem, RejectionReport> {
        match validate_generic(&self.spectrum) {
            Err(_) if force => Ok(GenericSystem::bypass_validation(&self.spectrum)),
            other => other,
        }
    }

    pub fn algebra(&self, system: GenericSystem) -> Result<EntangledAlgebra> {
        if self.times.is_empty() || self.momenta.is_empty() {
            return Err(Error::Invalid(
                "config needs non-empty \"times\" and \"momenta\"".into(),
            ));
        }
        let labels = LabelSpace::new(
            &system,
            self.frequencies.clone(),
            self.times.clone(),
            self.momenta.clone(),
            &self.dispersion,
        )?;
        EntangledAlgebra::new(system, labels)
    }

    pub fn interaction(&self, alg: &EntangledAlgebra) -> Result<InteractionSpec> {
        let spec = self
            .interaction
            .as_ref()
            .ok_or_else(|| Error::Invalid("config has no interaction (couplings + time_grid)".into()))?;
        InteractionSpec::new(alg, &spec.couplings, spec.points, spec.dt.clone())
    }
}
