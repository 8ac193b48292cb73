//! Quantum Boltzmann (free) algebras: `a_i a*_j = δ_ij`, and nothing else.
//!
//! Creators never commute with each other, so `a*_i a*_j |0⟩` and `a*_j a*_i |0⟩`
//! are distinct vectors. A family may weight its contractions (e.g. by 2π) through
//! a pairing function.

use std::f64::consts::TAU;

use crate::exact::{self, ComplexRational};

/// Free generator families used by the alternative representations:
/// `c(t)`, `c_ω(k)`, `c_ω` and `c(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FreeFamily {
    Time,
    FrequencyMomentum,
    Frequency,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeGenerator<L> {
    pub family: FreeFamily,
    pub label: L,
    pub creator: bool,
}

impl<L> FreeGenerator<L> {
    pub fn annihilator(family: FreeFamily, label: L) -> Self {
        Self {
            family,
            label,
            creator: false,
        }
    }

    pub fn creator(family: FreeFamily, label: L) -> Self {
        Self {
            family,
            label,
            creator: true,
        }
    }
}

/// `coeff · (√(2π))^sqrt_two_pi_power`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeScalar {
    pub coeff: ComplexRational,
    pub sqrt_two_pi_power: u32,
}

impl FreeScalar {
    pub fn one() -> Self {
        Self {
            coeff: exact::cone(),
            sqrt_two_pi_power: 0,
        }
    }

    pub fn zero() -> Self {
        Self {
            coeff: exact::czero(),
            sqrt_two_pi_power: 0,
        }
    }

    pub fn two_pi() -> Self {
        Self {
            coeff: exact::cone(),
            sqrt_two_pi_power: 2,
        }
    }

    pub fn sqrt_two_pi() -> Self {
        Self {
            coeff: exact::cone(),
            sqrt_two_pi_power: 1,
        }
    }

    pub fn indicator(condition: bool) -> Self {
        if condition {
            Self::one()
        } else {
            Self::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        exact::is_czero(&self.coeff)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self {
            coeff: &self.coeff * &other.coeff,
            sqrt_two_pi_power: self.sqrt_two_pi_power + other.sqrt_two_pi_power,
        }
    }

    /// The exponent of 2π when the power of √(2π) is even.
    pub fn two_pi_power(&self) -> Option<u32> {
        self.sqrt_two_pi_power
            .is_multiple_of(2)
            .then_some(self.sqrt_two_pi_power / 2)
    }

    pub fn to_f64_factor(&self) -> f64 {
        TAU.sqrt().powi(self.sqrt_two_pi_power as i32)
    }
}

/// `scalar · word` with no reducible `a a*` pair left in `word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeMonomial<L> {
    pub scalar: FreeScalar,
    pub word: Vec<FreeGenerator<L>>,
}

impl<L> FreeMonomial<L> {
    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    /// `⟨0|word|0⟩·scalar`: nonzero only when everything contracted.
    pub fn vacuum_value(&self) -> FreeScalar {
        if self.word.is_empty() {
            self.scalar.clone()
        } else {
            FreeScalar::zero()
        }
    }
}

/// Applies `a_i a*_j = pairing(i, j)` exhaustively to a single-family word.
///
/// A left-to-right stack scan suffices: a creator pushed onto an annihilator is the
/// only reducible configuration, and reducing never creates a new one elsewhere.
pub fn free_reduce<L: Clone>(word: &[FreeGenerator<L>], pairing: impl Fn(&L, &L) -> FreeScalar) -> FreeMonomial<L> {
    let mut scalar = FreeScalar::one();
    let mut stack: Vec<FreeGenerator<L>> = Vec::with_capacity(word.len());
    for g in word {
        match stack.last() {
            Some(top) if !top.creator && g.creator => {
                scalar = scalar.mul(&pairing(&top.label, &g.label));
                if scalar.is_zero() {
                    return FreeMonomial {
                        scalar,
                        word: Vec::new(),
                    };
                }
                stack.pop();
            }
            _ => stack.push(g.clone()),
        }
    }
    FreeMonomial { scalar, word: stack }
}

/// The plain Quantum Boltzmann pairing `δ_ij`.
pub fn kronecker<L: PartialEq>(a: &L, b: &L) -> FreeScalar {
    FreeScalar::indicator(a == b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: u8) -> FreeGenerator<u8> {
        FreeGenerator::annihilator(FreeFamily::Time, i)
    }

    fn a_dag(i: u8) -> FreeGenerator<u8> {
        FreeGenerator::creator(FreeFamily::Time, i)
    }

    #[test]
    fn matched_pair_reduces_to_one() {
        let r = free_reduce(&[a(1), a_dag(1)], kronecker);
        assert_eq!(r.scalar, FreeScalar::one());
        assert!(r.word.is_empty());
    }

    #[test]
    fn mismatched_pair_vanishes() {
        assert!(free_reduce(&[a(1), a_dag(2)], kronecker).is_zero());
    }

    #[test]
    fn creators_stay_ordered() {
        let r12 = free_reduce(&[a_dag(1), a_dag(2)], kronecker);
        let r21 = free_reduce(&[a_dag(2), a_dag(1)], kronecker);
        assert_eq!(r12.word, vec![a_dag(1), a_dag(2)]);
        assert_ne!(r12, r21);
    }

    #[test]
    fn crossing_pairings_vanish() {
        // a1 a2 a1* a2*: free moments see only non-crossing pairings
        assert!(free_reduce(&[a(1), a(2), a_dag(1), a_dag(2)], kronecker).is_zero());
        let nested = free_reduce(&[a(1), a(2), a_dag(2), a_dag(1)], kronecker);
        assert_eq!(nested.vacuum_value(), FreeScalar::one());
    }

    #[test]
    fn reduced_form_is_creators_then_annihilators() {
        let r = free_reduce(&[a_dag(3), a(1), a_dag(1), a(2), a_dag(2), a(4)], kronecker);
        assert_eq!(r.word, vec![a_dag(3), a(4)]);
        assert_eq!(r.vacuum_value(), FreeScalar::zero());
    }

    #[test]
    fn weighted_pairing_accumulates_half_powers() {
        let r = free_reduce(&[a(1), a_dag(1), a(1), a_dag(1)], |x, y| {
            if x == y {
                FreeScalar::sqrt_two_pi()
            } else {
                FreeScalar::zero()
            }
        });
        assert_eq!(r.scalar.two_pi_power(), Some(1));
    }
}
