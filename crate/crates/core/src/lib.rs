//! Secure NOMA downlink design.
//!
//! A transmitter superposes confidential messages for `K` users and protects
//! each with a wiretap code against a passive eavesdropper whose average gain
//! is known. This crate computes
//!
//! * minimum-power allocations meeting a common confidential rate and a
//!   secrecy-outage budget ([`power_min`]),
//! * max-min confidential-rate allocations under a power budget ([`maxmin`]),
//! * the TDMA baseline and NOMA/TDMA comparisons ([`oma`]),
//! * seeded Monte Carlo sweeps over fading realizations ([`experiments`]).
//!
//! The solvers are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiation.

// `!(x > 0.0)` is used on purpose so NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod error;
pub mod experiments;
pub mod maxmin;
pub mod oma;
pub mod outcome;
pub mod power_min;
pub mod scalar;
pub mod secrecy;

pub use channel::{db_to_linear, dbm_to_mw, sample_realization, ChannelRealization, NetworkGeometry};
pub use error::{NomaError, Result};
pub use maxmin::{solve_maxmin_bisection, solve_maxmin_two_user, MaxMinSolution};
pub use oma::{compare_maxmin, tdma_maxmin, tdma_min_power, TdmaMode, TimeAllocation};
pub use outcome::{InfeasibilityReason, InfeasibleVerdict, SolveOutcome};
pub use power_min::{select_users, solve_min_power, PowerMinSolution};
pub use scalar::Scalar;
pub use secrecy::{PowerAllocation, RatePair, SecrecyRequirement};

pub type Channel = ChannelRealization<f64>;
pub type Geometry = NetworkGeometry<f64>;
pub type Allocation = PowerAllocation<f64>;
pub type Requirement = SecrecyRequirement<f64>;
pub type Rates = RatePair<f64>;
pub type MinPowerSolution = PowerMinSolution<f64>;
pub type MaxMin = MaxMinSolution<f64>;

pub type Channel32 = ChannelRealization<f32>;
pub type Allocation32 = PowerAllocation<f32>;
pub type Requirement32 = SecrecyRequirement<f32>;
