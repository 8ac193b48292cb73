//! Three routes to the vacuum expectation of a word in the entangled generators.
//!
//! * direct: `c_ω(t,k) = σ⁺_ω ⊗ b_ω(t,k)` with bosonic white noise, reduced by the
//!   Wick engine;
//! * tensor: `c_ω(t,k) = σ⁺_ω c(t) ⊗ c_ω(k)` with free `c(t)c*(t') = [t=t']` and
//!   `c_ω(k)c*_{ω'}(k') = 2π[ω(k)=ω][ω=ω'][k=k']`;
//! * doubly factorized: `c_ω(k) = c_ω ⊗ √(2π[ω(k)=ω]) c(k)` with three free legs.
//!
//! Both free routes share the system product with the direct route; only the
//! noise side differs.

use crate::algebra::free::{free_reduce, kronecker, FreeFamily, FreeGenerator, FreeScalar};
use crate::algebra::{Entangled, EntangledAlgebra, NoiseKind, NormalOrderer, OperatorValue, ScalarExpr};
use crate::operator::SystemOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Representation {
    Direct,
    Tensor,
    DoublyFactorized,
}

impl Representation {
    pub const ALL: [Representation; 3] = [
        Representation::Direct,
        Representation::Tensor,
        Representation::DoublyFactorized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Direct => "direct",
            Representation::Tensor => "tensor",
            Representation::DoublyFactorized => "doubly_factorized",
        }
    }
}

pub fn direct_vacuum(alg: &EntangledAlgebra, orderer: &NormalOrderer<'_>, word: &[Entangled]) -> OperatorValue {
    orderer.vacuum_expectation(&alg.word_polynomial(word))
}

fn leg<L: Copy>(family: FreeFamily, word: &[Entangled], label: impl Fn(&Entangled) -> L) -> Vec<FreeGenerator<L>> {
    word.iter()
        .map(|g| FreeGenerator {
            family,
            label: label(g),
            creator: g.kind == NoiseKind::Creator,
        })
        .collect()
}

fn finish(system: SystemOperator, scalar: FreeScalar) -> OperatorValue {
    if scalar.is_zero() || system.is_zero() {
        return OperatorValue::zero(system.dim());
    }
    let power = scalar
        .two_pi_power()
        .expect("a fully contracted word carries an even power of √(2π)");
    OperatorValue::scaled(&system, &ScalarExpr::new(scalar.coeff, power))
}

pub fn tensor_vacuum(alg: &EntangledAlgebra, word: &[Entangled]) -> OperatorValue {
    let labels = alg.labels();
    let system = alg.system_product(word);
    let time = free_reduce(&leg(FreeFamily::Time, word, |g| g.label.time), kronecker).vacuum_value();
    let reservoir = free_reduce(
        &leg(FreeFamily::FrequencyMomentum, word, |g| {
            (g.label.omega, g.label.momentum)
        }),
        |a, b| {
            let on_shell = labels.is_on_shell(crate::algebra::NoiseLabel {
                omega: a.0,
                time: 0,
                momentum: a.1,
            });
            if a == b && on_shell {
                FreeScalar::two_pi()
            } else {
                FreeScalar::zero()
            }
        },
    )
    .vacuum_value();
    finish(system, time.mul(&reservoir))
}

pub fn doubly_factorized_vacuum(alg: &EntangledAlgebra, word: &[Entangled]) -> OperatorValue {
    let labels = alg.labels();
    let system = alg.system_product(word);
    // each generator carries √(2π[ω(k)=ω])
    let weights = word.iter().fold(FreeScalar::one(), |acc, g| {
        acc.mul(&if labels.is_on_shell(g.label) {
            FreeScalar::sqrt_two_pi()
        } else {
            FreeScalar::zero()
        })
    });
    if weights.is_zero() {
        return OperatorValue::zero(system.dim());
    }
    let time = free_reduce(&leg(FreeFamily::Time, word, |g| g.label.time), kronecker).vacuum_value();
    let frequency = free_reduce(&leg(FreeFamily::Frequency, word, |g| g.label.omega), kronecker).vacuum_value();
    let momentum = free_reduce(&leg(FreeFamily::Momentum, word, |g| g.label.momentum), kronecker).vacuum_value();
    finish(system, weights.mul(&time).mul(&frequency).mul(&momentum))
}

pub fn vacuum_in(
    representation: Representation,
    alg: &EntangledAlgebra,
    orderer: &NormalOrderer<'_>,
    word: &[Entangled],
) -> OperatorValue {
    match representation {
        Representation::Direct => direct_vacuum(alg, orderer, word),
        Representation::Tensor => tensor_vacuum(alg, word),
        Representation::DoublyFactorized => doubly_factorized_vacuum(alg, word),
    }
}
