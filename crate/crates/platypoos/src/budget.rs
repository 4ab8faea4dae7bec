//! Exact integer accounting of the evaluation budget.
//!
//! One opening with `m` evaluations charges `m` units. Under the reset
//! condition, opening a depth-`h` node additionally charges the `h` units it
//! takes to replay the path from the start state. A ledger never overdraws:
//! a charge that would exceed the limit fails atomically and the planner is
//! expected to stop opening and move to its output phase.

use core::fmt;

/// Whether reaching a node costs budget (reset access) or is free
/// (checkpoint access).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeMode {
    Free,
    Reset,
}

/// Attempted charge exceeding the remaining budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExhausted {
    pub needed: u64,
    pub remaining: u64,
}

impl fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "budget exhausted: needed {} units, {} remaining",
            self.needed, self.remaining
        )
    }
}

impl core::error::Error for BudgetExhausted {}

#[derive(Debug, Clone)]
pub struct BudgetLedger {
    limit: u64,
    charged: u64,
    mode: ChargeMode,
}

impl BudgetLedger {
    pub fn new(limit: u64, mode: ChargeMode) -> Self {
        Self { limit, charged: 0, mode }
    }

    pub fn free(limit: u64) -> Self {
        Self::new(limit, ChargeMode::Free)
    }

    pub fn reset(limit: u64) -> Self {
        Self::new(limit, ChargeMode::Reset)
    }

    pub fn mode(&self) -> ChargeMode {
        self.mode
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn charged(&self) -> u64 {
        self.charged
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.charged
    }

    /// Cost of opening a depth-`depth` node with `evals` evaluations under
    /// this ledger's access mode.
    pub fn opening_cost(&self, evals: u64, depth: u32) -> u64 {
        match self.mode {
            ChargeMode::Free => evals,
            ChargeMode::Reset => evals + depth as u64,
        }
    }

    /// Charge `units` or fail without charging anything.
    pub fn try_charge(&mut self, units: u64) -> Result<(), BudgetExhausted> {
        let remaining = self.remaining();
        if units > remaining {
            return Err(BudgetExhausted { needed: units, remaining });
        }
        self.charged += units;
        debug_assert!(self.charged <= self.limit);
        Ok(())
    }
}
