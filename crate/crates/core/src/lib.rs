//! Shannon entropy `H` and subentropy `Q` as functions of the elementary
//! symmetric polynomials `e_1..e_d` of a probability vector.
//!
//! The crate evaluates both quantities and all their mixed partial
//! derivatives from half-axis integrals over `q(tau) = tau^d + e_1
//! tau^(d-1) + ... + e_d`, cross-checks them against direct and contour
//! evaluators, and verifies their identities, bounds, Levy-Khintchine
//! representations, Pick property, and the Haar-average characterisation
//! of subentropy.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod sympoly;
pub mod direct;
pub mod quadrature;
pub mod halfaxis;
pub mod contour;
pub mod fd;
pub mod report;
pub mod sampling;
pub mod identities;
pub mod bernstein;
pub mod haar;
pub mod suite;
pub mod cli;

pub use error::{Direction, Error, Result};
pub use quadrature::QuadratureConfig;
pub use sympoly::{ComplexSymPolyPoint, ProbVector, RootSet, SymPolyPoint};
