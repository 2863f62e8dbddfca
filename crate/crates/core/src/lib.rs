//! Simulation and verification engine for interacting particle systems
//! realized as random walks on Hecke algebras of Coxeter groups.
//!
//! The crate is organized bottom-up:
//!
//! - [`coxeter`]: symmetric and hyperoctahedral groups, lengths, oracles
//! - [`hecke`]: exact Hecke algebra arithmetic over big rationals
//! - [`mallows`]: Mallows measures and the truncated-geometric sampler
//! - [`walks`]: discrete and Poisson-clock walk drivers, exact kernels
//! - [`systems`]: particle-system frontends (multi-species ASEP, half-line
//!   ASEP, stochastic six-vertex, ASEP(q,M), qTAZRP) and type projections
//! - [`experiments`]: closed-form theory oracles and Monte Carlo
//!   estimators with deterministic reporting

pub mod coxeter;
pub mod experiments;
pub mod hecke;
pub mod mallows;
pub mod rngstream;
pub mod systems;
pub mod walks;

pub use coxeter::{CoxeterFamily, Family, GroupElement};
pub use hecke::{HeckeElement, QParameter};
