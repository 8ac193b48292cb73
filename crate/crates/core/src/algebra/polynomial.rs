//! Polynomials over system matrices and quantum white noise factors.
//!
//! System matrices and noise operators act on distinct tensor legs, so every
//! product is canonically `M ⊗ b^{#}_{L1} … b^{#}_{Ln}`: all system factors fused
//! into one leading matrix, followed by the noise word in its product order. Like
//! terms (same noise word, same power of 2π) are merged by adding their matrices,
//! so a canonical term always has unit scalar coefficient.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{self, ComplexRational};
use crate::operator::SystemOperator;

use super::labels::{LabelSpace, NoiseLabel};
use super::scalar::ScalarExpr;

/// Creators sort before annihilators; this is the normal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NoiseKind {
    Creator,
    Annihilator,
}

impl NoiseKind {
    pub fn flip(self) -> Self {
        match self {
            NoiseKind::Creator => NoiseKind::Annihilator,
            NoiseKind::Annihilator => NoiseKind::Creator,
        }
    }
}

/// `b_L` or `b*_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NoiseFactor {
    pub kind: NoiseKind,
    pub label: NoiseLabel,
}

impl NoiseFactor {
    pub fn creator(label: NoiseLabel) -> Self {
        Self {
            kind: NoiseKind::Creator,
            label,
        }
    }

    pub fn annihilator(label: NoiseLabel) -> Self {
        Self {
            kind: NoiseKind::Annihilator,
            label,
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            kind: self.kind.flip(),
            label: self.label,
        }
    }

    pub fn is_creator(&self) -> bool {
        self.kind == NoiseKind::Creator
    }
}

/// An entangled generator: `c_L = σ⁺_ω ⊗ b_L` (annihilator) or `c*_L = σ⁻_ω ⊗ b*_L` (creator).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entangled {
    pub kind: NoiseKind,
    pub label: NoiseLabel,
}

impl Entangled {
    pub fn c(label: NoiseLabel) -> Self {
        Self {
            kind: NoiseKind::Annihilator,
            label,
        }
    }

    pub fn c_dag(label: NoiseLabel) -> Self {
        Self {
            kind: NoiseKind::Creator,
            label,
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            kind: self.kind.flip(),
            label: self.label,
        }
    }

    pub fn noise(self) -> NoiseFactor {
        NoiseFactor {
            kind: self.kind,
            label: self.label,
        }
    }

    pub fn render(&self, labels: &LabelSpace) -> String {
        match self.kind {
            NoiseKind::Annihilator => format!("c({})", labels.display(self.label)),
            NoiseKind::Creator => format!("c*({})", labels.display(self.label)),
        }
    }
}

pub fn render_word(word: &[Entangled], labels: &LabelSpace) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter().map(|g| g.render(labels)).collect::<Vec<_>>().join(" ")
}

/// Parses a whitespace-separated word such as `c(1,t0,k0) c*(1,t0,k0)`; the empty
/// string (or `1`) is the empty word.
pub fn parse_word(text: &str, labels: &LabelSpace) -> Result<Vec<Entangled>> {
    let text = text.trim();
    if text.is_empty() || text == "1" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let (kind, tail) = if let Some(tail) = rest.strip_prefix("c*(") {
            (NoiseKind::Creator, tail)
        } else if let Some(tail) = rest.strip_prefix("c(") {
            (NoiseKind::Annihilator, tail)
        } else {
            return Err(Error::Parse(format!("expected c(...) or c*(...) at {rest:?}")));
        };
        let close = tail
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed generator in {text:?}")))?;
        let label = labels.parse_label(&tail[..close])?;
        out.push(Entangled { kind, label });
        rest = tail[close + 1..].trim_start();
    }
    Ok(out)
}

/// A raw factor in an unfused product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor {
    System(SystemOperator),
    Noise(NoiseFactor),
}

/// A canonical term `scalar · system ⊗ noise`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub scalar: ScalarExpr,
    pub system: SystemOperator,
    pub noise: Vec<NoiseFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct TermKey {
    pub noise: Vec<NoiseFactor>,
    pub two_pi_power: u32,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<TermKey, SystemOperator>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_system(SystemOperator::identity(dim))
    }

    pub fn from_system(op: SystemOperator) -> Self {
        Self::monomial(ScalarExpr::one(), op, Vec::new())
    }

    pub fn monomial(scalar: ScalarExpr, system: SystemOperator, noise: Vec<NoiseFactor>) -> Self {
        let mut out = Self::zero(system.dim());
        out.add_term(noise, scalar.two_pi_power, system.scale(&scalar.coeff));
        out
    }

    /// Canonicalizes a raw product: system factors are fused in order, noise factors kept in order.
    pub fn from_factors(dim: usize, scalar: &ScalarExpr, factors: &[Factor]) -> Result<Self> {
        let mut system = SystemOperator::identity(dim);
        let mut noise = Vec::new();
        for factor in factors {
            match factor {
                Factor::System(m) => system = system.try_mul(m)?,
                Factor::Noise(n) => noise.push(*n),
            }
        }
        Ok(Self::monomial(scalar.clone(), system, noise))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, noise: Vec<NoiseFactor>, two_pi_power: u32, system: SystemOperator) {
        if system.is_zero() {
            return;
        }
        let key = TermKey { noise, two_pi_power };
        match self.terms.get_mut(&key) {
            Some(slot) => {
                slot.add_assign(&system);
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, system);
            }
        }
    }

    pub(crate) fn add_term_scaled(
        &mut self,
        noise: Vec<NoiseFactor>,
        two_pi_power: u32,
        scale: &ComplexRational,
        system: &SystemOperator,
    ) {
        if exact::is_czero(scale) {
            return;
        }
        self.add_term(noise, two_pi_power, system.scale(scale));
    }

    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (&TermKey, &SystemOperator)> {
        self.terms.iter()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(key, system)| Term {
            scalar: ScalarExpr::new(exact::cone(), key.two_pi_power),
            system: system.clone(),
            noise: key.noise.clone(),
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (key, m) in &other.terms {
            out.add_term(key.noise.clone(), key.two_pi_power, m.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&ScalarExpr::new(exact::cint(-1, 0), 0)))
    }

    pub fn scale(&self, scalar: &ScalarExpr) -> Self {
        let mut out = Self::zero(self.dim);
        for (key, m) in &self.terms {
            out.add_term_scaled(
                key.noise.clone(),
                key.two_pi_power + scalar.two_pi_power,
                &scalar.coeff,
                m,
            );
        }
        out
    }

    /// Bilinear product followed by canonicalization.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (ka, ma) in &self.terms {
            for (kb, mb) in &other.terms {
                let system = ma.mul(mb);
                if system.is_zero() {
                    continue;
                }
                let mut noise = Vec::with_capacity(ka.noise.len() + kb.noise.len());
                noise.extend_from_slice(&ka.noise);
                noise.extend_from_slice(&kb.noise);
                out.add_term(noise, ka.two_pi_power + kb.two_pi_power, system);
            }
        }
        Ok(out)
    }

    /// Reverses factor order, conjugate-transposes matrices, swaps creators and annihilators.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (key, m) in &self.terms {
            let noise = key.noise.iter().rev().map(|n| n.adjoint()).collect();
            out.add_term(noise, key.two_pi_power, m.adjoint());
        }
        out
    }

    /// The coefficient of the empty noise word.
    pub fn scalar_part(&self) -> super::scalar::OperatorValue {
        let mut out = super::scalar::OperatorValue::zero(self.dim);
        for (key, m) in &self.terms {
            if key.noise.is_empty() {
                out.add(key.two_pi_power, m);
            }
        }
        out
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|k| k.noise.len()).max().unwrap_or(0)
    }

    pub fn render(&self, labels: &LabelSpace) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(key, m)| {
                let noise: Vec<String> = key
                    .noise
                    .iter()
                    .map(|n| match n.kind {
                        NoiseKind::Creator => format!("b*({})", labels.display(n.label)),
                        NoiseKind::Annihilator => format!("b({})", labels.display(n.label)),
                    })
                    .collect();
                format!("(2π)^{}·{:?} {}", key.two_pi_power, m, noise.join(" "))
            })
            .collect::<Vec<_>>()
            .join("\n+ ")
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(k, m)| ((k.two_pi_power, &k.noise), m)))
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cint;

    fn label(i: usize) -> NoiseLabel {
        NoiseLabel::new(0, i, 0)
    }

    #[test]
    fn identity_is_neutral_and_zero_absorbs() {
        let p = Polynomial::monomial(
            ScalarExpr::new(cint(2, 1), 1),
            SystemOperator::unit(2, 1, 0),
            vec![NoiseFactor::annihilator(label(0))],
        );
        let id = Polynomial::identity(2);
        assert_eq!(p.multiply(&id).unwrap(), p);
        assert_eq!(id.multiply(&p).unwrap(), p);
        assert!(Polynomial::zero(2).multiply(&p).unwrap().is_zero());
    }

    #[test]
    fn system_factors_fuse_left_of_noise() {
        let plus = SystemOperator::unit(2, 1, 0);
        let minus = SystemOperator::unit(2, 0, 1);
        let c = Polynomial::monomial(
            ScalarExpr::one(),
            plus.clone(),
            vec![NoiseFactor::annihilator(label(0))],
        );
        let c_dag = Polynomial::monomial(ScalarExpr::one(), minus.clone(), vec![NoiseFactor::creator(label(0))]);
        let product = c.multiply(&c_dag).unwrap();
        // hand expansion: σ⁺σ⁻ ⊗ b b*
        let terms: Vec<Term> = product.terms().collect();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].system, plus.mul(&minus));
        assert_eq!(
            terms[0].noise,
            vec![NoiseFactor::annihilator(label(0)), NoiseFactor::creator(label(0))]
        );
        let raw = Polynomial::from_factors(
            2,
            &ScalarExpr::one(),
            &[
                Factor::System(plus),
                Factor::Noise(NoiseFactor::annihilator(label(0))),
                Factor::System(minus),
                Factor::Noise(NoiseFactor::creator(label(0))),
            ],
        )
        .unwrap();
        assert_eq!(raw, product);
    }

    #[test]
    fn adjoint_conjugates_scalars() {
        let p = Polynomial::identity(2).scale(&ScalarExpr::new(cint(0, 1), 0));
        assert_eq!(
            p.adjoint(),
            Polynomial::identity(2).scale(&ScalarExpr::new(cint(0, -1), 0))
        );
    }

    #[test]
    fn like_terms_cancel() {
        let p = Polynomial::monomial(
            ScalarExpr::two_pi(),
            SystemOperator::identity(2),
            vec![NoiseFactor::creator(label(1))],
        );
        assert!(p.sub(&p).unwrap().is_zero());
        assert!(matches!(
            p.multiply(&Polynomial::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
