//! Entangled system-noise operator algebra.
//!
//! For a generic discrete system coupled to quantum white noise, the collective
//! operators `c_ω(t,k) = σ⁺_ω ⊗ b_ω(t,k)` obey operator-valued free (Quantum
//! Boltzmann) relations on the Fock module of entangled number vectors. This crate
//! derives those relations from the bosonic white-noise commutator with exact
//! arithmetic, and checks every symbolic identity against an independent
//! truncated Fock-space matrix model.

pub mod algebra;
pub mod config;
pub mod dyson;
pub mod error;
pub mod exact;
pub mod fock;
pub mod operator;
pub mod oracle;
pub mod report;
pub mod representations;
pub mod system;

pub use algebra::{EntangledAlgebra, LabelSpace, NoiseLabel, Polynomial};
pub use error::{Error, Result};
pub use operator::SystemOperator;
pub use system::{validate_generic, GenericSystem, Spectrum};
