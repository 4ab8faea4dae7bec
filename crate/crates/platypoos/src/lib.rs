//! Budgeted open-loop planning for MDPs with deterministic dynamics and
//! stochastic, bounded-noise, discounted rewards.
//!
//! The crate provides:
//!
//! * a planning tree over action sequences with per-edge sample statistics
//!   and exact integer budget accounting ([`tree`], [`budget`]),
//! * generative-model environments: the two-bin counter MDP, synthetic trees
//!   with controllable smoothness and branching, random reward tables
//!   ([`env`]),
//! * the planners themselves: `platypoos` (scale-free, noise-adaptive),
//!   `sequool` with and without the reset condition, an `olop`-style UCB
//!   baseline and the two uniform strategies ([`planners`]),
//! * brute-force value oracles, near-optimality counting and concentration
//!   diagnostics ([`oracle`]).
//!
//! The library is `no_std` + `alloc`; everything is deterministic given a
//! seed, including across platforms (see [`rng`]). IO, file formats and the
//! command line live in the companion `platypoos-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod budget;
pub mod env;
pub mod math;
pub mod oracle;
pub mod planners;
pub mod rng;
pub mod seq;
pub mod trace;
pub mod tree;

pub use budget::{BudgetExhausted, BudgetLedger, ChargeMode};
pub use env::{GenerativeModel, NoiseKind, NoiseModel, OracleAccess};
pub use planners::{PlannerError, PlannerResult, PlannerRun, RunOptions};
pub use rng::SplitMix64;
pub use seq::{Action, ActionSeq};
pub use tree::{EdgeStats, NodeId, PlanningTree};
