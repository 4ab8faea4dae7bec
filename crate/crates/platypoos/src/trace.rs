//! Run diagnostics: opening/evaluation traces and the raw sample log.

use crate::seq::{Action, ActionSeq};
use alloc::vec::Vec;

/// One planner decision, in execution order.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    /// A node was opened: `evals` samples drawn for each of its K children.
    Open {
        depth: u32,
        /// Evaluation level for schedule-driven planners, `None` otherwise.
        p: Option<u32>,
        seq: ActionSeq,
        evals: u64,
        /// Estimate the selection ranked on (0 for the root opening).
        u_hat: f64,
    },
    /// Extra evaluations of a single edge (candidate cross-validation).
    Evaluate { p: u32, t: u32, seq: ActionSeq, evals: u64 },
    /// Candidate chosen for an evaluation level.
    Candidate { p: u32, seq: ActionSeq, u_hat: f64 },
}

impl TraceEvent {
    /// Sequence the event concerns.
    pub fn seq(&self) -> &ActionSeq {
        match self {
            TraceEvent::Open { seq, .. }
            | TraceEvent::Evaluate { seq, .. }
            | TraceEvent::Candidate { seq, .. } => seq,
        }
    }
}

/// One generative-model call.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    /// State the call was made from, identified by its action sequence.
    pub state_seq: ActionSeq,
    pub action: Action,
    pub reward: f64,
    /// RNG draws consumed before this call; locates the call in the seed
    /// stream.
    pub stream_index: u64,
}

/// Append-only log of every generative call in a run, for replay oracles.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleLog {
    records: Vec<SampleRecord>,
}

impl SampleLog {
    pub fn push(&mut self, record: SampleRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
