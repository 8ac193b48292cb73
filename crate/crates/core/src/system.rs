//! Discrete system spectra, genericity, Bohr frequencies and the flip operators σ±.
//!
//! A spectrum is *generic* when its energies are pairwise distinct and every
//! positive energy difference (Bohr frequency) is realized by exactly one ordered
//! pair of levels. For a generic system each Bohr frequency `ω` names a unique
//! transition `1_ω → 2_ω` and `σ⁺_ω = |2_ω⟩⟨1_ω|`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::operator::SystemOperator;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub label: String,
    pub energy: Rational,
}

/// Levels sorted by energy (ties broken by label); labels pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    levels: Vec<Level>,
}

impl Spectrum {
    pub fn new(mut levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("spectrum has no levels".into()));
        }
        levels.sort_by(|a, b| a.energy.cmp(&b.energy).then_with(|| a.label.cmp(&b.label)));
        let mut labels: Vec<&str> = levels.iter().map(|l| l.label.as_str()).collect();
        labels.sort_unstable();
        if let Some(dup) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("duplicate level label {:?}", dup[0])));
        }
        Ok(Self { levels })
    }

    /// Levels labelled `e0, e1, ...` in the given order.
    pub fn from_energies(energies: &[Rational]) -> Result<Self> {
        Self::new(
            energies
                .iter()
                .enumerate()
                .map(|(i, e)| Level {
                    label: format!("e{i}"),
                    energy: e.clone(),
                })
                .collect(),
        )
    }

    pub fn from_integers(energies: &[i64]) -> Result<Self> {
        let energies: Vec<Rational> = energies.iter().map(|&e| exact::integer(e)).collect();
        Self::from_energies(&energies)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn dimension(&self) -> usize {
        self.levels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.label == label)
    }
}

/// A positive Bohr frequency together with one level pair realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BohrFrequency {
    pub value: Rational,
    pub lower: String,
    pub upper: String,
    pub lower_index: usize,
    pub upper_index: usize,
}

/// Every positive energy difference with the ordered level pairs `(lower, upper)`
/// realizing it, values ascending.
pub fn enumerate_bohr_frequencies(spectrum: &Spectrum) -> Vec<(Rational, Vec<(String, String)>)> {
    transitions(spectrum)
        .into_iter()
        .map(|(value, pairs)| (value, pairs.into_iter().map(|p| (p.lower, p.upper)).collect()))
        .collect()
}

fn transitions(spectrum: &Spectrum) -> BTreeMap<Rational, Vec<BohrFrequency>> {
    let levels = spectrum.levels();
    let mut out: BTreeMap<Rational, Vec<BohrFrequency>> = BTreeMap::new();
    for (i, lo) in levels.iter().enumerate() {
        for (j, hi) in levels.iter().enumerate() {
            if hi.energy > lo.energy {
                let value = &hi.energy - &lo.energy;
                out.entry(value.clone()).or_default().push(BohrFrequency {
                    value,
                    lower: lo.label.clone(),
                    upper: hi.label.clone(),
                    lower_index: i,
                    upper_index: j,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason")]
pub enum Rejection {
    #[serde(rename = "DEGENERATE_SPECTRUM")]
    DegenerateSpectrum { energy: String, labels: Vec<String> },
    #[serde(rename = "DUPLICATE_BOHR_FREQUENCY")]
    DuplicateBohrFrequency {
        value: String,
        multiplicity: usize,
        pairs: Vec<(String, String)>,
    },
}

/// Evidence that a spectrum violates genericity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub rejections: Vec<Rejection>,
}

impl RejectionReport {
    pub fn duplicate_multiplicity(&self, value: &Rational) -> Option<usize> {
        let value = exact::format_rational(value);
        self.rejections.iter().find_map(|r| match r {
            Rejection::DuplicateBohrFrequency {
                value: v, multiplicity, ..
            } if *v == value => Some(*multiplicity),
            _ => None,
        })
    }
}

/// A validated system: its spectrum and the set `F` of Bohr frequencies.
///
/// Systems built with [`GenericSystem::bypass_validation`] may violate genericity;
/// their flip operators sum over every level pair sharing a frequency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericSystem {
    spectrum: Spectrum,
    frequencies: BTreeMap<Rational, Vec<BohrFrequency>>,
    certified: bool,
}

pub fn validate_generic(spectrum: &Spectrum) -> std::result::Result<GenericSystem, RejectionReport> {
    let mut rejections = Vec::new();

    let mut by_energy: BTreeMap<&Rational, Vec<String>> = BTreeMap::new();
    for level in spectrum.levels() {
        by_energy.entry(&level.energy).or_default().push(level.label.clone());
    }
    for (energy, labels) in by_energy {
        if labels.len() > 1 {
            rejections.push(Rejection::DegenerateSpectrum {
                energy: exact::format_rational(energy),
                labels,
            });
        }
    }

    let frequencies = transitions(spectrum);
    for (value, pairs) in &frequencies {
        if pairs.len() > 1 {
            rejections.push(Rejection::DuplicateBohrFrequency {
                value: exact::format_rational(value),
                multiplicity: pairs.len(),
                pairs: pairs.iter().map(|p| (p.lower.clone(), p.upper.clone())).collect(),
            });
        }
    }

    if rejections.is_empty() {
        Ok(GenericSystem {
            spectrum: spectrum.clone(),
            frequencies,
            certified: true,
        })
    } else {
        Err(RejectionReport { rejections })
    }
}

impl GenericSystem {
    /// Builds the system without the genericity gate, for counterexample searches.
    pub fn bypass_validation(spectrum: &Spectrum) -> Self {
        match validate_generic(spectrum) {
            Ok(system) => system,
            Err(_) => Self {
                spectrum: spectrum.clone(),
                frequencies: transitions(spectrum),
                certified: false,
            },
        }
    }

    /// True when the spectrum passed [`validate_generic`].
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dimension(&self) -> usize {
        self.spectrum.dimension()
    }

    /// The Bohr frequencies in ascending order.
    pub fn frequency_values(&self) -> impl Iterator<Item = &Rational> {
        self.frequencies.keys()
    }

    pub fn frequency_count(&self) -> usize {
        self.frequencies.len()
    }

    /// The unique transition for `omega` (the first one for a bypassed system).
    pub fn frequency(&self, omega: &Rational) -> Result<&BohrFrequency> {
        self.frequencies
            .get(omega)
            .and_then(|pairs| pairs.first())
            .ok_or_else(|| Error::UnknownFrequency(exact::format_rational(omega)))
    }

    pub fn transitions(&self, omega: &Rational) -> Result<&[BohrFrequency]> {
        self.frequencies
            .get(omega)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownFrequency(exact::format_rational(omega)))
    }

    /// `σ⁺_ω = |2_ω⟩⟨1_ω|`.
    pub fn sigma_plus(&self, omega: &Rational) -> Result<SystemOperator> {
        let d = self.dimension();
        let mut out = SystemOperator::zeros(d);
        for t in self.transitions(omega)? {
            out.add_assign(&SystemOperator::unit(d, t.upper_index, t.lower_index));
        }
        Ok(out)
    }

    /// `σ⁻_ω = (σ⁺_ω)† = |1_ω⟩⟨2_ω|`.
    pub fn sigma_minus(&self, omega: &Rational) -> Result<SystemOperator> {
        Ok(self.sigma_plus(omega)?.adjoint())
    }

    /// Basis vector `e_i` as an exact column.
    pub fn basis_vector(&self, index: usize) -> Vec<exact::ComplexRational> {
        let mut v = vec![exact::czero(); self.dimension()];
        v[index] = exact::cone();
        v
    }
}
