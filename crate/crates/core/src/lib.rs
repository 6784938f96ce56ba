//! Counting and probability for the ways a Blackjack dealer reaches a point
//! total.
//!
//! A dealer hand is a composition of `target - upcard` whose parts are the
//! counted values of the revealed cards. [`counting`] evaluates the closed
//! and general counting formulas term by term; [`oracle`] plays hands card by
//! card and certifies which compositions are actually reachable;
//! [`probability`] weights hands under the infinite-deck assumption.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod combinatorics;
pub mod counting;
mod error;
pub mod oracle;
pub mod probability;

pub use combinatorics::{
    binomial, composition_count, composition_count_min2, iterate_compositions, render_tableau,
    render_tableau_with, Composition,
};
pub use counting::{
    closed_form_count, count, general_count, i_ace_set, CountBreakdown, Query, Regime, RuleSet,
};
pub use error::{Error, Result};
pub use oracle::{
    enumerate_legal, oracle_count, simulate, verify_sweep, DealerTrajectory, DiscrepancyRecord,
    DiscrepancyReport, Outcome, SweepRanges,
};
pub use probability::{
    beat_probability, closed_form_probability, exact_probability, monte_carlo,
    outcome_distribution, CardDistribution, MonteCarloEstimate, OutcomeDistribution,
};
