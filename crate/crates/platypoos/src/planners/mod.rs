//! The budgeted planners.
//!
//! Every planner maps `(environment, budget n, gamma, seed)` to a
//! recommended first action, never overdraws its ledger, and is
//! deterministic given its seed. Runs are single-threaded; parallelism
//! belongs to the caller and must derive disjoint seeds per run.

use crate::budget::BudgetLedger;
use crate::seq::{Action, ActionSeq};
use crate::trace::{SampleLog, TraceEvent};
use crate::tree::PlanningTree;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

mod olop;
mod platypoos;
mod sequool;
mod uniform;

pub use olop::{run_olop, OlopConfig};
pub use platypoos::{run_platypoos, PlatypoosSchedule};
pub use sequool::{run_sequool, run_sequool_reset, sequool_h_max};
pub use uniform::{run_uniform_good, run_uniform_naive};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlannerError {
    /// The budget is too small for the planner's schedule to be non-empty.
    BudgetTooSmall { n: u64 },
    /// The planner only handles deterministic rewards.
    NoisyEnvironment,
    /// Configuration violates a precondition.
    InvalidConfig(String),
    /// The requested uniform horizon does not fit in the budget.
    InfeasibleHorizon { horizon: u32, budget: u64 },
}

impl fmt::Display for PlannerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlannerError::BudgetTooSmall { n } => {
                write!(f, "budget n={n} too small: the opening schedule is empty")
            }
            PlannerError::NoisyEnvironment => {
                write!(f, "this planner requires deterministic rewards (noise kind `none`)")
            }
            PlannerError::InvalidConfig(why) => write!(f, "invalid config: {why}"),
            PlannerError::InfeasibleHorizon { horizon, budget } => {
                write!(f, "horizon {horizon} infeasible under budget {budget}")
            }
        }
    }
}

impl core::error::Error for PlannerError {}

/// What to collect during a run besides the result itself.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub collect_trace: bool,
    pub collect_sample_log: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { collect_trace: true, collect_sample_log: false }
    }
}

/// The recommendation and run statistics every planner reports.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerResult {
    pub first_action: Action,
    pub chosen_sequence: ActionSeq,
    /// Per-level candidates (schedule-driven planners only).
    pub candidates: Option<BTreeMap<u32, ActionSeq>>,
    pub budget_used: u64,
    pub max_opened_depth: u32,
}

/// A result together with the run's tree, ledger and diagnostics.
#[derive(Debug, Clone)]
pub struct PlannerRun<S> {
    pub result: PlannerResult,
    pub tree: PlanningTree<S>,
    pub ledger: BudgetLedger,
    pub trace: Vec<TraceEvent>,
    pub sample_log: Option<SampleLog>,
}

pub(crate) struct Collector {
    pub trace: Vec<TraceEvent>,
    pub log: Option<SampleLog>,
}

impl Collector {
    pub fn new(opts: &RunOptions) -> Self {
        Self {
            trace: Vec::new(),
            log: opts.collect_sample_log.then(SampleLog::default),
        }
    }

    pub fn log_mut(&mut self) -> Option<&mut SampleLog> {
        self.log.as_mut()
    }

    pub fn push(&mut self, collect: bool, event: TraceEvent) {
        if collect {
            self.trace.push(event);
        }
    }
}
