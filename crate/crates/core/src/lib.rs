//! Budgeted ensemble selection under the majority-voting energy.
//!
//! A pool of independent voters, each with an accuracy `p` and a cost `t`,
//! is searched for the subset with the highest probability of a correct
//! majority decision whose total cost stays within a budget. The crate
//! provides:
//!
//! - exact ensemble energies (plain and constrained majority voting) with
//!   brute-force and exhaustive oracles ([`energy`]),
//! - the special functions the statistics pipeline needs ([`special`]),
//! - moment modeling of member and ensemble accuracies and the derivation of
//!   a `STOP`/`MAXSTEP` stopping rule ([`stats`]),
//! - greedy, Monte Carlo, simulated annealing and efficiency-sampling
//!   searches ([`search`]).
//!
//! The crate is `no_std` and only needs `alloc`. The default `std` feature
//! adds wall-clock timing to search results.

#![no_std]
#![deny(missing_debug_implementations)]
// `!(x > 0.0)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

mod error;
mod math;

pub mod energy;
pub mod search;
pub mod special;
pub mod stats;
pub mod types;

pub use error::Error;
pub use types::{validate_pool, Budget, DecisionWeights, EnergyModel, Member, Pool, Selection};

/// Convenience alias used across the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
