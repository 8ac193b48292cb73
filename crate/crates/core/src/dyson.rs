//! Master Hamiltonian `h(t) = Σ_ω Σ_k conj(g_ω(k)) c_ω(t,k) + g_ω(k) c*_ω(t,k)` and the
//! discrete-time Dyson series of its propagator with `U_0 = 1`.
//!
//! Order `n` sums `h(t_1)⋯h(t_n)·Δtⁿ` over strictly decreasing grid tuples
//! `t_end ≥ t_1 > … > t_n`, an ordered Riemann sum. Equal-time pairs never occur.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Entangled, EntangledAlgebra, Factor, NoiseKind, NoiseLabel, PiScalar, Polynomial, ScalarExpr};
use crate::error::{Error, Result};
use crate::exact::{self, ComplexRational, Rational};
use crate::oracle::{to_numeric_state, OracleRep};

/// Default bound on `#tuples · #h-terms^n`.
pub const DEFAULT_TERM_BOUND: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionSpec {
    /// `(ω index, k index) ↦ g_ω(k)`.
    couplings: BTreeMap<(u16, u16), ComplexRational>,
    /// Time-atom indices of the grid, increasing.
    grid: Vec<u16>,
    dt: Rational,
    term_bound: u64,
}

impl InteractionSpec {
    /// The grid is the first `points` declared time atoms. Every declared `(ω, k)` needs a coupling.
    pub fn new(
        alg: &EntangledAlgebra,
        couplings: &BTreeMap<(Rational, String), ComplexRational>,
        points: usize,
        dt: Rational,
    ) -> Result<Self> {
        let labels = alg.labels();
        let mut table = BTreeMap::new();
        for ((omega, k), g) in couplings {
            let w = labels.omega_index(omega)?;
            let m = labels.momentum_index(k)?;
            table.insert((w as u16, m as u16), g.clone());
        }
        for w in 0..labels.omegas().len() {
            for m in 0..labels.momenta().len() {
                if !table.contains_key(&(w as u16, m as u16)) {
                    return Err(Error::Invalid(format!(
                        "missing coupling for ω={}, k={}",
                        exact::format_rational(&labels.omegas()[w]),
                        labels.momenta()[m]
                    )));
                }
            }
        }
        if points == 0 || points > labels.times().len() {
            return Err(Error::Invalid(format!(
                "time grid needs 1..={} points, got {points}",
                labels.times().len()
            )));
        }
        if dt <= exact::integer(0) {
            return Err(Error::Invalid("time step must be positive".into()));
        }
        Ok(Self {
            couplings: table,
            grid: (0..points as u16).collect(),
            dt,
            term_bound: DEFAULT_TERM_BOUND,
        })
    }

    /// Uniform coupling `g` for every declared `(ω, k)`.
    pub fn uniform(alg: &EntangledAlgebra, g: ComplexRational, points: usize, dt: Rational) -> Result<Self> {
        let labels = alg.labels();
        let couplings = labels
            .omegas()
            .iter()
            .flat_map(|w| {
                let g = &g;
                labels
                    .momenta()
                    .iter()
                    .map(move |k| ((w.clone(), k.clone()), g.clone()))
            })
            .collect();
        Self::new(alg, &couplings, points, dt)
    }

    pub fn with_term_bound(mut self, bound: u64) -> Self {
        self.term_bound = bound;
        self
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    pub fn dt(&self) -> &Rational {
        &self.dt
    }

    pub fn coupling(&self, omega: u16, momentum: u16) -> &ComplexRational {
        &self.couplings[&(omega, momentum)]
    }

    fn grid_position(&self, time: usize) -> Result<usize> {
        self.grid
            .iter()
            .position(|&t| t as usize == time)
            .ok_or_else(|| Error::UnknownLabel(format!("time index {time} is not on the grid")))
    }
}

/// An unfused product `coeff · f_1 f_2 …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTerm {
    pub coeff: ComplexRational,
    pub factors: Vec<Factor>,
}

/// `(coefficient, generator)` pairs making up `h(t)`.
fn hamiltonian_generators(
    alg: &EntangledAlgebra,
    spec: &InteractionSpec,
    time: usize,
) -> Vec<(ComplexRational, Entangled)> {
    let labels = alg.labels();
    let mut out = Vec::new();
    for w in 0..labels.omegas().len() {
        for k in 0..labels.momenta().len() {
            let g = spec.coupling(w as u16, k as u16);
            if exact::is_czero(g) {
                continue;
            }
            let label = NoiseLabel::new(w, time, k);
            out.push((exact::conj(g), Entangled::c(label)));
            out.push((g.clone(), Entangled::c_dag(label)));
        }
    }
    out
}

fn raw_factors(alg: &EntangledAlgebra, g: Entangled) -> [Factor; 2] {
    [Factor::System(alg.system_factor(g).clone()), Factor::Noise(g.noise())]
}

pub fn hamiltonian_raw(alg: &EntangledAlgebra, spec: &InteractionSpec, time: usize) -> Result<Vec<RawTerm>> {
    spec.grid_position(time)?;
    Ok(hamiltonian_generators(alg, spec, time)
        .into_iter()
        .map(|(coeff, g)| RawTerm {
            coeff,
            factors: raw_factors(alg, g).to_vec(),
        })
        .collect())
}

/// `h(t)` as a canonical polynomial.
pub fn hamiltonian_at(alg: &EntangledAlgebra, spec: &InteractionSpec, time: usize) -> Result<Polynomial> {
    canonicalize(alg, &hamiltonian_raw(alg, spec, time)?)
}

pub fn canonicalize(alg: &EntangledAlgebra, terms: &[RawTerm]) -> Result<Polynomial> {
    let mut out = Polynomial::zero(alg.dim());
    for t in terms {
        out = out.add(&Polynomial::from_factors(
            alg.dim(),
            &ScalarExpr::new(t.coeff.clone(), 0),
            &t.factors,
        )?)?;
    }
    Ok(out)
}

fn binomial(m: usize, n: usize) -> u64 {
    if n > m {
        return 0;
    }
    (0..n).fold(1u64, |acc, i| acc * (m - i) as u64 / (i as u64 + 1))
}

/// Strictly decreasing `n`-tuples of grid positions `≤ end`.
fn decreasing_tuples(end: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(upper: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (n - 1..upper).rev() {
            prefix.push(p);
            rec(p, n - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(end + 1, n, &mut Vec::new(), &mut out);
    out
}

/// The unfused expansion of `U^{(n)}(t_end)`.
#[derive(Debug, Clone)]
pub struct RawSeries {
    pub order: usize,
    pub tuples: u64,
    pub terms: Vec<RawTerm>,
}

pub fn dyson_expansion(alg: &EntangledAlgebra, spec: &InteractionSpec, n: usize, t_end: usize) -> Result<RawSeries> {
    let end = spec.grid_position(t_end)?;
    let tuples = decreasing_tuples(end, n);
    debug_assert_eq!(tuples.len() as u64, binomial(end + 1, n));
    let per_time = 2 * alg.labels().omegas().len() * alg.labels().momenta().len();
    let estimate = (tuples.len() as u64).saturating_mul((per_time as u64).saturating_pow(n as u32));
    if estimate > spec.term_bound {
        return Err(Error::OrderTooLarge {
            order: n,
            bound: spec.term_bound as usize,
        });
    }
    let prefactor = exact::minus_i_pow(n) * exact::creal(num_traits::pow(spec.dt.clone(), n));
    let mut terms = Vec::new();
    for tuple in &tuples {
        let mut partial = vec![RawTerm {
            coeff: prefactor.clone(),
            factors: Vec::new(),
        }];
        for &pos in tuple {
            let gens = hamiltonian_generators(alg, spec, spec.grid[pos] as usize);
            partial = partial
                .iter()
                .flat_map(|t| {
                    gens.iter().map(move |(c, g)| {
                        let mut factors = t.factors.clone();
                        factors.extend(raw_factors(alg, *g));
                        RawTerm {
                            coeff: &t.coeff * c,
                            factors,
                        }
                    })
                })
                .collect();
        }
        terms.extend(partial);
    }
    Ok(RawSeries {
        order: n,
        tuples: tuples.len() as u64,
        terms,
    })
}

/// `U^{(n)}(t_end)` as a canonical polynomial.
pub fn dyson_term(alg: &EntangledAlgebra, spec: &InteractionSpec, n: usize, t_end: usize) -> Result<Polynomial> {
    canonicalize(alg, &dyson_expansion(alg, spec, n, t_end)?.terms)
}

/// Every factor list is a sequence of `(σ⁺_ω, b_L)` / `(σ⁻_ω, b*_L)` pairs.
pub fn is_entangled_product(alg: &EntangledAlgebra, factors: &[Factor]) -> bool {
    factors.len().is_multiple_of(2)
        && factors.chunks(2).all(|pair| match pair {
            [Factor::System(m), Factor::Noise(n)] => {
                let expected = match n.kind {
                    NoiseKind::Annihilator => alg.sigma_plus(n.label),
                    NoiseKind::Creator => alg.sigma_minus(n.label),
                };
                m == expected
            }
            _ => false,
        })
}

pub fn series_depends_only_on_entangled(alg: &EntangledAlgebra, series: &RawSeries) -> bool {
    series.terms.iter().all(|t| is_entangled_product(alg, &t.factors))
}

/// Structural scan of `U^{(n)}(t_end)` for all `n ≤ n_max`, before any normal ordering.
pub fn depends_only_on_entangled(
    alg: &EntangledAlgebra,
    spec: &InteractionSpec,
    n_max: usize,
    t_end: usize,
) -> Result<bool> {
    for n in 0..=n_max {
        if !series_depends_only_on_entangled(alg, &dyson_expansion(alg, spec, n, t_end)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagatorOrder {
    pub order: usize,
    pub tuples: u64,
    pub symbolic: String,
    pub symbolic_value: [f64; 2],
    pub oracle_value: [f64; 2],
    pub deviation: f64,
    pub symbolic_zero: bool,
}

/// `h(t) v` in the oracle; off-shell terms vanish there.
fn oracle_hamiltonian(
    alg: &EntangledAlgebra,
    spec: &InteractionSpec,
    rep: &OracleRep,
    time: usize,
    v: &DVector<Complex64>,
) -> DVector<Complex64> {
    let mut out = DVector::zeros(v.len());
    for (coeff, g) in hamiltonian_generators(alg, spec, time) {
        out += rep.apply(g, v) * exact::to_complex64(&coeff);
    }
    out
}

/// `U^{(n)}(t_end) (ψ ⊗ Ω)` by direct matrix action.
pub fn oracle_dyson_vector(
    alg: &EntangledAlgebra,
    spec: &InteractionSpec,
    rep: &OracleRep,
    n: usize,
    t_end: usize,
    psi: &[Complex64],
) -> Result<DVector<Complex64>> {
    let end = spec.grid_position(t_end)?;
    let start = rep.product_state(psi);
    let mut out = DVector::zeros(start.len());
    for tuple in decreasing_tuples(end, n) {
        // rightmost factor h(t_n) acts first
        let v = tuple.iter().rev().fold(start.clone(), |acc, &pos| {
            oracle_hamiltonian(alg, spec, rep, spec.grid[pos] as usize, &acc)
        });
        out += v;
    }
    let prefactor = exact::to_complex64(&exact::minus_i_pow(n)) * exact::to_f64(&spec.dt).powi(n as i32);
    Ok(out * prefactor)
}

/// Canonical `U^{(0)}, …, U^{(n_max)}` at `t_end`, expanded once and reused across states.
#[derive(Debug, Clone)]
pub struct DysonSeries {
    t_end: usize,
    tuples: Vec<u64>,
    terms: Vec<Polynomial>,
}

impl DysonSeries {
    pub fn new(alg: &EntangledAlgebra, spec: &InteractionSpec, n_max: usize, t_end: usize) -> Result<Self> {
        let mut tuples = Vec::with_capacity(n_max + 1);
        let mut terms = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let raw = dyson_expansion(alg, spec, n, t_end)?;
            tuples.push(raw.tuples);
            terms.push(canonicalize(alg, &raw.terms)?);
        }
        Ok(Self { t_end, tuples, terms })
    }

    pub fn max_order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn term(&self, n: usize) -> &Polynomial {
        &self.terms[n]
    }

    pub fn tuples(&self, n: usize) -> u64 {
        self.tuples[n]
    }

    pub fn t_end(&self) -> usize {
        self.t_end
    }
}

/// `⟨ψ⊗Ω|U^{(n)}|ψ'⊗Ω⟩` symbolically and in the oracle, for `n = 0..=n_max`.
pub fn propagator_matrix_elements(
    alg: &EntangledAlgebra,
    spec: &InteractionSpec,
    rep: &OracleRep,
    psi: &[ComplexRational],
    psi_prime: &[ComplexRational],
    n_max: usize,
    t_end: usize,
) -> Result<Vec<PropagatorOrder>> {
    let series = DysonSeries::new(alg, spec, n_max, t_end)?;
    propagator_elements_with_bra(alg, spec, rep, &series, &[], psi, psi_prime)
}

/// `⟨W(ψ⊗Ω)|U^{(n)}|ψ'⊗Ω⟩` for a word `W` of entangled generators, symbolically as
/// `⟨ψ|E(W*·U^{(n)})|ψ'⟩` and in the oracle by direct matrix action. Creator words
/// probe the emitted quanta, which vacuum-to-vacuum elements cannot see.
pub fn propagator_elements_with_bra(
    alg: &EntangledAlgebra,
    spec: &InteractionSpec,
    rep: &OracleRep,
    series: &DysonSeries,
    bra_word: &[Entangled],
    psi: &[ComplexRational],
    psi_prime: &[ComplexRational],
) -> Result<Vec<PropagatorOrder>> {
    for state in [psi, psi_prime] {
        if state.len() != alg.dim() {
            return Err(Error::DimensionMismatch {
                left: alg.dim(),
                right: state.len(),
            });
        }
    }
    let orderer = alg.orderer();
    let bra_adjoint = alg.word_polynomial(bra_word).adjoint();
    let bra = rep.apply_word(bra_word, &rep.product_state(&to_numeric_state(psi)));
    let ket = to_numeric_state(psi_prime);
    (0..=series.max_order())
        .map(|n| {
            let term = bra_adjoint.multiply(series.term(n))?;
            let symbolic: PiScalar = orderer.vacuum_expectation(&term).sandwich(psi, psi_prime);
            let value = symbolic.to_complex64();
            let v = oracle_dyson_vector(alg, spec, rep, n, series.t_end(), &ket)?;
            let oracle = bra.dotc(&v);
            Ok(PropagatorOrder {
                order: n,
                tuples: series.tuples(n),
                symbolic: symbolic.render(),
                symbolic_value: [value.re, value.im],
                oracle_value: [oracle.re, oracle.im],
                deviation: (value - oracle).norm(),
                symbolic_zero: symbolic.is_zero(),
            })
        })
        .collect()
}

/// `‖Σ_{n≤n_max} U^{(n)} (ψ⊗Ω)‖² − 1` in the oracle: reported, never asserted.
pub fn unitarity_deviation(
    alg: &EntangledAlgebra,
    spec: &InteractionSpec,
    rep: &OracleRep,
    psi: &[ComplexRational],
    n_max: usize,
    t_end: usize,
) -> Result<f64> {
    let psi = to_numeric_state(psi);
    let mut total = DVector::zeros(rep.total_dim());
    for n in 0..=n_max {
        total += oracle_dyson_vector(alg, spec, rep, n, t_end, &psi)?;
    }
    Ok(total.norm_squared() - 1.0)
}
