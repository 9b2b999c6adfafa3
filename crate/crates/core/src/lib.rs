//! Entanglement dynamics of a two-level system coupled to a quantum harmonic
//! oscillator, driven by an instantaneous spin-flip pulse train and damped by
//! Markovian baths.
//!
//! The numerical engine ([`evolve`]) integrates the interaction-picture
//! master equation; [`oracles`] holds the closed-form results it is checked
//! against; [`runner`] is the scenario, sweep and CSV layer behind the CLI.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolve;
pub mod hilbert;
pub mod measures;
pub mod model;
pub mod oracles;
pub mod runner;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
