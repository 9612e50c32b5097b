//! Numerical tools for the cost-constrained wiretap channel: exact
//! information measures, secrecy-rate optimizers over one or two auxiliary
//! variables, and a Monte Carlo simulator for superposition wiretap codes.

pub mod capacity;
pub mod coding;
pub mod channel;
pub mod cli;
pub mod error;
pub mod prob;
pub mod prop1;
pub mod rng;

pub use error::{Error, Result};
