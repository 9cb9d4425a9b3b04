//! Exact, desk-scale constructions of regular cross sections for free flows
//! on the real line.
//!
//! Orbits are modelled by finite windows of points on a line (or a circle for
//! periodic analogues). Every real number in play is an exact rational
//! combination of declared, rationally independent generators, so gap
//! membership and tiling questions are decided exactly.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constructions;
pub mod counterexample;
pub mod distset;
pub mod exactreal;
pub mod orbits;
pub mod semigroup;
pub mod sumwalk;

pub use exactreal::{Basis, ExactError, RealQ, Rational};
