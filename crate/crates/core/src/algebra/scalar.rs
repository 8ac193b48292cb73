//! Exact scalars and operator values carrying symbolic powers of 2π.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::exact::{self, ComplexRational};
use crate::operator::SystemOperator;

/// `coeff · (2π)^two_pi_power`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScalarExpr {
    pub coeff: ComplexRational,
    pub two_pi_power: u32,
}

impl ScalarExpr {
    pub fn new(coeff: ComplexRational, two_pi_power: u32) -> Self {
        Self { coeff, two_pi_power }
    }

    pub fn one() -> Self {
        Self::new(exact::cone(), 0)
    }

    pub fn two_pi() -> Self {
        Self::new(exact::cone(), 1)
    }

    pub fn is_zero(&self) -> bool {
        exact::is_czero(&self.coeff)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.coeff * &other.coeff, self.two_pi_power + other.two_pi_power)
    }

    pub fn to_complex64(&self) -> Complex64 {
        exact::to_complex64(&self.coeff) * TAU.powi(self.two_pi_power as i32)
    }
}

/// An exact polynomial in 2π: `Σ_p c_p (2π)^p`. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PiScalar {
    coeffs: BTreeMap<u32, ComplexRational>,
}

impl PiScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_expr(expr: &ScalarExpr) -> Self {
        let mut out = Self::zero();
        out.add_term(expr.two_pi_power, expr.coeff.clone());
        out
    }

    pub fn add_term(&mut self, power: u32, coeff: ComplexRational) {
        if exact::is_czero(&coeff) {
            return;
        }
        let slot = self.coeffs.entry(power).or_insert_with(exact::czero);
        *slot += coeff;
        if exact::is_czero(slot) {
            self.coeffs.remove(&power);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, power: u32) -> ComplexRational {
        self.coeffs.get(&power).cloned().unwrap_or_else(exact::czero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &ComplexRational)> {
        self.coeffs.iter().map(|(p, c)| (*p, c))
    }

    pub fn to_complex64(&self) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(p, c)| exact::to_complex64(c) * TAU.powi(*p as i32))
            .sum()
    }

    /// Human-readable form, e.g. `1/2 + 3·(2π)^2`.
    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|(p, c)| match p {
                0 => exact::format_complex(c),
                1 => format!("({})·2π", exact::format_complex(c)),
                _ => format!("({})·(2π)^{p}", exact::format_complex(c)),
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A `B(H_S)`-valued result, `Σ_p M_p (2π)^p` with exact matrices `M_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorValue {
    dim: usize,
    parts: BTreeMap<u32, SystemOperator>,
}

impl OperatorValue {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            parts: BTreeMap::new(),
        }
    }

    pub fn from_operator(op: SystemOperator) -> Self {
        let mut out = Self::zero(op.dim());
        out.add(0, &op);
        out
    }

    pub fn scaled(op: &SystemOperator, scalar: &ScalarExpr) -> Self {
        let mut out = Self::zero(op.dim());
        out.add(scalar.two_pi_power, &op.scale(&scalar.coeff));
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, power: u32, op: &SystemOperator) {
        if op.is_zero() {
            return;
        }
        match self.parts.get_mut(&power) {
            Some(slot) => {
                slot.add_assign(op);
                if slot.is_zero() {
                    self.parts.remove(&power);
                }
            }
            None => {
                self.parts.insert(power, op.clone());
            }
        }
    }

    pub fn add_value(&mut self, other: &OperatorValue) {
        for (p, op) in &other.parts {
            self.add(*p, op);
        }
    }

    pub fn sub(&self, other: &OperatorValue) -> OperatorValue {
        let mut out = self.clone();
        for (p, op) in &other.parts {
            out.add(*p, &op.scale(&exact::cint(-1, 0)));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, power: u32) -> Option<&SystemOperator> {
        self.parts.get(&power)
    }

    pub fn parts(&self) -> impl Iterator<Item = (u32, &SystemOperator)> {
        self.parts.iter().map(|(p, m)| (*p, m))
    }

    pub fn adjoint(&self) -> OperatorValue {
        Self {
            dim: self.dim,
            parts: self.parts.iter().map(|(p, m)| (*p, m.adjoint())).collect(),
        }
    }

    /// `⟨ψ|X|φ⟩` as an exact polynomial in 2π.
    pub fn sandwich(&self, bra: &[ComplexRational], ket: &[ComplexRational]) -> PiScalar {
        let mut out = PiScalar::zero();
        for (p, m) in &self.parts {
            out.add_term(*p, m.sandwich(bra, ket));
        }
        out
    }

    /// Substitutes 2π by its double-precision value.
    pub fn to_complex64(&self) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (p, m) in &self.parts {
            out += m.to_complex64() * Complex64::new(TAU.powi(*p as i32), 0.0);
        }
        out
    }

    pub fn to_json(&self) -> OperatorValueJson {
        OperatorValueJson {
            dim: self.dim,
            parts: self
                .parts
                .iter()
                .map(|(p, m)| (format!("(2pi)^{p}"), m.rows()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OperatorValueJson {
    pub dim: usize,
    pub parts: BTreeMap<String, Vec<Vec<String>>>,
}
