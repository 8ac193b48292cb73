//! Normal ordering by the white-noise commutator
//! `b_L b*_{L'} = b*_{L'} b_L + 2π·[ω=ω'][t=t'][k=k'][ω(k)=ω]`.
//!
//! Deltas are Kronecker indicators over the declared atoms. Same-kind noise
//! factors commute, so the normal form sorts creators (then annihilators) by label.
//! Every rewrite removes exactly one inversion, which bounds the rewrite count.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::labels::{LabelSpace, NoiseLabel};
use super::polynomial::{NoiseFactor, NoiseKind, Polynomial};
use super::scalar::OperatorValue;

/// Which indicator conditions gate a contraction, and the power of 2π it carries.
/// [`CommutatorRule::exact`] is the white-noise commutator; the other settings
/// exist to mutate the rule and check that the verification suites notice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CommutatorRule {
    pub two_pi_power: u32,
    pub match_omega: bool,
    pub match_time: bool,
    pub match_momentum: bool,
    pub require_on_shell: bool,
}

impl CommutatorRule {
    pub const fn exact() -> Self {
        Self {
            two_pi_power: 1,
            match_omega: true,
            match_time: true,
            match_momentum: true,
            require_on_shell: true,
        }
    }

    pub const fn without_two_pi() -> Self {
        Self {
            two_pi_power: 0,
            ..Self::exact()
        }
    }

    pub const fn without_on_shell() -> Self {
        Self {
            require_on_shell: false,
            ..Self::exact()
        }
    }

    pub const fn without_time_delta() -> Self {
        Self {
            match_time: false,
            ..Self::exact()
        }
    }

    /// Whether `b_a b*_c` produces a contraction term.
    pub fn contracts(&self, labels: &LabelSpace, a: NoiseLabel, c: NoiseLabel) -> bool {
        (!self.match_omega || a.omega == c.omega)
            && (!self.match_time || a.time == c.time)
            && (!self.match_momentum || a.momentum == c.momentum)
            && (!self.require_on_shell || labels.is_on_shell(a))
    }
}

impl Default for CommutatorRule {
    fn default() -> Self {
        Self::exact()
    }
}

/// The order in which inversions are rewritten. All orders reach the same normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteOrder {
    LeftmostFirst,
    RightmostFirst,
    Seeded(u64),
}

type Expansion = Vec<(Vec<NoiseFactor>, u32, u64)>;

pub struct NormalOrderer<'a> {
    labels: &'a LabelSpace,
    rule: CommutatorRule,
    order: RewriteOrder,
}

impl<'a> NormalOrderer<'a> {
    pub fn new(labels: &'a LabelSpace) -> Self {
        Self {
            labels,
            rule: CommutatorRule::exact(),
            order: RewriteOrder::LeftmostFirst,
        }
    }

    pub fn with_rule(mut self, rule: CommutatorRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_order(mut self, order: RewriteOrder) -> Self {
        self.order = order;
        self
    }

    pub fn rule(&self) -> CommutatorRule {
        self.rule
    }

    pub fn labels(&self) -> &LabelSpace {
        self.labels
    }

    /// Expands one noise word into `Σ count·(2π)^power·word'` with every word' normal ordered.
    fn expand_word(&self, word: &[NoiseFactor], rng: &mut Option<ChaCha8Rng>) -> Expansion {
        let mut done: HashMap<Vec<NoiseFactor>, HashMap<u32, u64>> = HashMap::new();
        let mut pending: Vec<(Vec<NoiseFactor>, u32, u64)> = vec![(word.to_vec(), 0, 1)];
        while let Some((mut w, power, count)) = pending.pop() {
            let inversions: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i] > w[i + 1]).collect();
            if inversions.is_empty() {
                let slot = done.entry(w).or_default().entry(power).or_insert(0);
                *slot = slot.checked_add(count).expect("contraction count overflow");
                continue;
            }
            let i = match self.order {
                RewriteOrder::LeftmostFirst => inversions[0],
                RewriteOrder::RightmostFirst => inversions[inversions.len() - 1],
                RewriteOrder::Seeded(_) => {
                    let rng = rng.as_mut().expect("seeded order carries an rng");
                    inversions[rng.gen_range(0..inversions.len())]
                }
            };
            let (left, right) = (w[i], w[i + 1]);
            if left.kind == NoiseKind::Annihilator
                && right.kind == NoiseKind::Creator
                && self.rule.contracts(self.labels, left.label, right.label)
            {
                let mut contracted = Vec::with_capacity(w.len() - 2);
                contracted.extend_from_slice(&w[..i]);
                contracted.extend_from_slice(&w[i + 2..]);
                pending.push((contracted, power + self.rule.two_pi_power, count));
            }
            w.swap(i, i + 1);
            pending.push((w, power, count));
        }
        let mut out: Expansion = done
            .into_iter()
            .flat_map(|(w, powers)| powers.into_iter().map(move |(p, c)| (w.clone(), p, c)))
            .collect();
        out.sort();
        out
    }

    /// Rewrites `p` so every term has all creators left of all annihilators.
    pub fn normal_order(&self, p: &Polynomial) -> Polynomial {
        self.order_filtered(p, |_| true)
    }

    /// Normal-orders `p·|Ω⟩`: terms ending in an annihilator are dropped.
    pub fn apply_to_vacuum(&self, p: &Polynomial) -> Polynomial {
        self.order_filtered(p, |w| w.iter().all(NoiseFactor::is_creator))
    }

    fn order_filtered(&self, p: &Polynomial, keep: impl Fn(&[NoiseFactor]) -> bool) -> Polynomial {
        let mut rng = match self.order {
            RewriteOrder::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut cache: HashMap<&[NoiseFactor], Expansion> = HashMap::new();
        let mut out = Polynomial::zero(p.dim());
        for (key, system) in p.raw_terms() {
            let expansion = cache
                .entry(key.noise.as_slice())
                .or_insert_with(|| self.expand_word(&key.noise, &mut rng));
            for (word, power, count) in expansion.iter() {
                if keep(word) {
                    let scale = crate::exact::cint(*count as i64, 0);
                    out.add_term_scaled(word.clone(), key.two_pi_power + power, &scale, system);
                }
            }
        }
        out
    }

    /// The operator-valued vacuum state: normal order, keep only noise-free terms.
    pub fn vacuum_expectation(&self, p: &Polynomial) -> OperatorValue {
        self.order_filtered(p, |w| w.is_empty()).scalar_part()
    }
}

pub fn wick_normal_order(p: &Polynomial, labels: &LabelSpace) -> Polynomial {
    NormalOrderer::new(labels).normal_order(p)
}

pub fn vacuum_expectation(p: &Polynomial, labels: &LabelSpace) -> OperatorValue {
    NormalOrderer::new(labels).vacuum_expectation(p)
}

/// True when every term has creators left of annihilators and each block is sorted.
pub fn is_normal_ordered(p: &Polynomial) -> bool {
    p.terms().all(|t| t.noise.windows(2).all(|w| w[0] <= w[1]))
}
