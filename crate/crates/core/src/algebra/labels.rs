//! Noise labels `(ω, t, k)` over finite declared atom sets, and the dispersion table.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::system::GenericSystem;

/// Index triple into a [`LabelSpace`]: Bohr frequency, time atom, momentum atom.
/// Ordered lexicographically by `(ω, t, k)`; frequencies are indexed in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NoiseLabel {
    pub omega: u16,
    pub time: u16,
    pub momentum: u16,
}

impl NoiseLabel {
    pub fn new(omega: usize, time: usize, momentum: usize) -> Self {
        Self {
            omega: omega as u16,
            time: time as u16,
            momentum: momentum as u16,
        }
    }
}

/// `k ↦ ω(k)`, total on the declared momenta.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dispersion {
    values: BTreeMap<String, Rational>,
}

impl Dispersion {
    pub fn new(values: BTreeMap<String, Rational>) -> Self {
        Self { values }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Rational)>) -> Self {
        Self {
            values: pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn get(&self, momentum: &str) -> Option<&Rational> {
        self.values.get(momentum)
    }
}

/// The declared label sets: a subset of the system's Bohr frequencies, time atoms
/// and momentum atoms, plus the on-shell table `ω(k) = ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpace {
    omegas: Vec<Rational>,
    times: Vec<String>,
    momenta: Vec<String>,
    dispersion: Vec<Rational>,
    on_shell: Vec<bool>,
}

fn check_distinct(kind: &str, atoms: &[String]) -> Result<()> {
    let mut sorted: Vec<&String> = atoms.iter().collect();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Invalid(format!("duplicate {kind} atom {:?}", w[0])));
    }
    Ok(())
}

impl LabelSpace {
    /// `omegas = None` declares every Bohr frequency of the system.
    pub fn new(
        system: &GenericSystem,
        omegas: Option<Vec<Rational>>,
        times: Vec<String>,
        momenta: Vec<String>,
        dispersion: &Dispersion,
    ) -> Result<Self> {
        let mut omegas = match omegas {
            Some(list) => {
                for omega in &list {
                    system.transitions(omega)?;
                }
                list
            }
            None => system.frequency_values().cloned().collect(),
        };
        omegas.sort();
        omegas.dedup();
        check_distinct("time", &times)?;
        check_distinct("momentum", &momenta)?;
        if omegas.len() > u16::MAX as usize || times.len() > u16::MAX as usize || momenta.len() > u16::MAX as usize {
            return Err(Error::Invalid("label set too large".into()));
        }
        let dispersion: Vec<Rational> = momenta
            .iter()
            .map(|k| {
                dispersion
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::UnknownLabel(format!("dispersion has no value for momentum {k:?}")))
            })
            .collect::<Result<_>>()?;
        let on_shell = omegas
            .iter()
            .flat_map(|w| dispersion.iter().map(move |v| v == w))
            .collect();
        Ok(Self {
            omegas,
            times,
            momenta,
            dispersion,
            on_shell,
        })
    }

    pub fn omegas(&self) -> &[Rational] {
        &self.omegas
    }

    pub fn times(&self) -> &[String] {
        &self.times
    }

    pub fn momenta(&self) -> &[String] {
        &self.momenta
    }

    pub fn omega_value(&self, label: NoiseLabel) -> &Rational {
        &self.omegas[label.omega as usize]
    }

    pub fn dispersion_value(&self, label: NoiseLabel) -> &Rational {
        &self.dispersion[label.momentum as usize]
    }

    /// `ω(k) = ω` for the label's frequency and momentum.
    pub fn is_on_shell(&self, label: NoiseLabel) -> bool {
        self.on_shell[label.omega as usize * self.momenta.len() + label.momentum as usize]
    }

    pub fn omega_index(&self, omega: &Rational) -> Result<usize> {
        self.omegas
            .iter()
            .position(|w| w == omega)
            .ok_or_else(|| Error::UnknownFrequency(exact::format_rational(omega)))
    }

    pub fn time_index(&self, time: &str) -> Result<usize> {
        self.times
            .iter()
            .position(|t| t == time)
            .ok_or_else(|| Error::UnknownLabel(format!("time {time:?}")))
    }

    pub fn momentum_index(&self, momentum: &str) -> Result<usize> {
        self.momenta
            .iter()
            .position(|k| k == momentum)
            .ok_or_else(|| Error::UnknownLabel(format!("momentum {momentum:?}")))
    }

    pub fn label(&self, omega: &Rational, time: &str, momentum: &str) -> Result<NoiseLabel> {
        Ok(NoiseLabel::new(
            self.omega_index(omega)?,
            self.time_index(time)?,
            self.momentum_index(momentum)?,
        ))
    }

    /// Parses `"ω,t,k"`, e.g. `"1/2,t0,k1"`.
    pub fn parse_label(&self, text: &str) -> Result<NoiseLabel> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let [omega, time, momentum] = parts.as_slice() else {
            return Err(Error::Parse(format!("label {text:?} is not of the form ω,t,k")));
        };
        self.label(&exact::parse_rational(omega)?, time, momentum)
    }

    /// Every label, in canonical order.
    pub fn all_labels(&self) -> Vec<NoiseLabel> {
        let mut out = Vec::with_capacity(self.label_count());
        for w in 0..self.omegas.len() {
            for t in 0..self.times.len() {
                for k in 0..self.momenta.len() {
                    out.push(NoiseLabel::new(w, t, k));
                }
            }
        }
        out
    }

    pub fn on_shell_labels(&self) -> Vec<NoiseLabel> {
        self.all_labels().into_iter().filter(|l| self.is_on_shell(*l)).collect()
    }

    pub fn label_count(&self) -> usize {
        self.omegas.len() * self.times.len() * self.momenta.len()
    }

    pub fn contains(&self, label: NoiseLabel) -> bool {
        (label.omega as usize) < self.omegas.len()
            && (label.time as usize) < self.times.len()
            && (label.momentum as usize) < self.momenta.len()
    }

    pub fn display(&self, label: NoiseLabel) -> LabelDisplay<'_> {
        LabelDisplay { space: self, label }
    }
}

pub struct LabelDisplay<'a> {
    space: &'a LabelSpace,
    label: NoiseLabel,
}

impl fmt::Display for LabelDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{}",
            exact::format_rational(self.space.omega_value(self.label)),
            self.space.times[self.label.time as usize],
            self.space.momenta[self.label.momentum as usize]
        )
    }
}
