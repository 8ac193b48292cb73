//! Exact symbolic algebra of system matrices and quantum white noise.

pub mod free;
pub mod labels;
pub mod polynomial;
pub mod scalar;
pub mod wick;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::operator::SystemOperator;
use crate::system::GenericSystem;

pub use labels::{Dispersion, LabelSpace, NoiseLabel};
pub use polynomial::{parse_word, render_word, Entangled, Factor, NoiseFactor, NoiseKind, Polynomial, Term};
pub use scalar::{OperatorValue, PiScalar, ScalarExpr};
pub use wick::{is_normal_ordered, vacuum_expectation, wick_normal_order, CommutatorRule, NormalOrderer, RewriteOrder};

/// A system together with its declared label sets; caches `σ±_ω` per declared frequency.
#[derive(Debug, Clone)]
pub struct EntangledAlgebra {
    system: GenericSystem,
    labels: LabelSpace,
    sigma_plus: Vec<SystemOperator>,
    sigma_minus: Vec<SystemOperator>,
}

impl EntangledAlgebra {
    pub fn new(system: GenericSystem, labels: LabelSpace) -> Result<Self> {
        let sigma_plus = labels
            .omegas()
            .iter()
            .map(|w| system.sigma_plus(w))
            .collect::<Result<Vec<_>>>()?;
        let sigma_minus = sigma_plus.iter().map(SystemOperator::adjoint).collect();
        Ok(Self {
            system,
            labels,
            sigma_plus,
            sigma_minus,
        })
    }

    pub fn system(&self) -> &GenericSystem {
        &self.system
    }

    pub fn labels(&self) -> &LabelSpace {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.system.dimension()
    }

    pub fn orderer(&self) -> NormalOrderer<'_> {
        NormalOrderer::new(&self.labels)
    }

    fn check(&self, label: NoiseLabel) -> Result<()> {
        if self.labels.contains(label) {
            Ok(())
        } else {
            Err(Error::UnknownLabel(format!("{label:?}")))
        }
    }

    pub fn sigma_plus(&self, label: NoiseLabel) -> &SystemOperator {
        &self.sigma_plus[label.omega as usize]
    }

    pub fn sigma_minus(&self, label: NoiseLabel) -> &SystemOperator {
        &self.sigma_minus[label.omega as usize]
    }

    /// `σ⁺_ω σ⁻_ω`, the projector onto `|2_ω⟩` for a generic system.
    pub fn projector(&self, label: NoiseLabel) -> SystemOperator {
        self.sigma_plus(label).mul(self.sigma_minus(label))
    }

    /// The system matrix carried by a generator: `σ⁺` for `c`, `σ⁻` for `c*`.
    pub fn system_factor(&self, g: Entangled) -> &SystemOperator {
        match g.kind {
            NoiseKind::Annihilator => self.sigma_plus(g.label),
            NoiseKind::Creator => self.sigma_minus(g.label),
        }
    }

    /// `c_ω(t,k) = σ⁺_ω ⊗ b_ω(t,k)`.
    pub fn entangled_annihilate(&self, label: NoiseLabel) -> Result<Polynomial> {
        self.check(label)?;
        Ok(self.generator(Entangled::c(label)))
    }

    /// `c*_ω(t,k) = σ⁻_ω ⊗ b*_ω(t,k)`.
    pub fn entangled_create(&self, label: NoiseLabel) -> Result<Polynomial> {
        self.check(label)?;
        Ok(self.generator(Entangled::c_dag(label)))
    }

    /// Looks the label up by value; unknown atoms yield `UnknownFrequency`/`UnknownLabel`.
    pub fn entangled_create_at(&self, omega: &Rational, time: &str, momentum: &str) -> Result<Polynomial> {
        self.entangled_create(self.labels.label(omega, time, momentum)?)
    }

    pub fn entangled_annihilate_at(&self, omega: &Rational, time: &str, momentum: &str) -> Result<Polynomial> {
        self.entangled_annihilate(self.labels.label(omega, time, momentum)?)
    }

    fn generator(&self, g: Entangled) -> Polynomial {
        Polynomial::monomial(ScalarExpr::one(), self.system_factor(g).clone(), vec![g.noise()])
    }

    /// The fused system product of a word, in word order.
    pub fn system_product(&self, word: &[Entangled]) -> SystemOperator {
        word.iter().fold(SystemOperator::identity(self.dim()), |acc, g| {
            acc.mul(self.system_factor(*g))
        })
    }

    /// The canonical polynomial of a product of entangled generators.
    pub fn word_polynomial(&self, word: &[Entangled]) -> Polynomial {
        let system = self.system_product(word);
        Polynomial::monomial(ScalarExpr::one(), system, word.iter().map(|g| g.noise()).collect())
    }
}
