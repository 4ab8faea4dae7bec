//! Synthetic trees with controllable smoothness `(nu, rho)` and a designated
//! optimal path.
//!
//! On-path edges at depth `t` pay `nu * (1 - rho) * (rho / gamma)^t`, so the
//! discounted tail below any on-path node of depth `h` is exactly
//! `nu * rho^h` and the optimal value is `nu`. Leaving the path pays zero
//! forever. The instance is generated by a rule rather than a stored table,
//! so planners can descend arbitrarily deep; `to_depth_table` materialises
//! the explicit node-to-mean table for fixtures and oracles.
//!
//! With `KappaTarget::Branching { period }` every `period`-th depth lets all
//! actions continue optimally, which grows the number of optimal depth-`h`
//! nodes like `K^(h/period)`.

use super::{GenerativeModel, NoiseKind, NoiseModel, OracleAccess};
use crate::math::powi;
use crate::rng::{mix, SplitMix64};
use crate::seq::{Action, ActionSeq};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Near-optimal branching profile the construction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaTarget {
    /// A single optimal path.
    One,
    /// All actions stay optimal at depths `period-1, 2*period-1, ...`.
    Branching { period: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntheticError {
    InfeasibleParameters(String),
    TableTooLarge { nodes: u64 },
}

impl fmt::Display for SyntheticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntheticError::InfeasibleParameters(why) => {
                write!(f, "infeasible synthetic-tree parameters: {why}")
            }
            SyntheticError::TableTooLarge { nodes } => {
                write!(f, "requested table of {nodes} nodes exceeds the enumeration cap")
            }
        }
    }
}

impl core::error::Error for SyntheticError {}

/// `(depth, alive)`: once off every optimal continuation the subtree is
/// uniformly zero, so no further bookkeeping is needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SyntheticTreeState {
    pub depth: u32,
    pub alive: bool,
}

#[derive(Debug, Clone)]
pub struct SyntheticTree {
    k: usize,
    nu: f64,
    rho: f64,
    gamma: f64,
    kappa: KappaTarget,
    path_seed: u64,
    noise: NoiseModel,
}

impl SyntheticTree {
    pub fn new(
        k: usize,
        nu: f64,
        rho: f64,
        gamma: f64,
        kappa: KappaTarget,
        path_seed: u64,
    ) -> Result<Self, SyntheticError> {
        use alloc::string::ToString;
        if !(2..=10).contains(&k) {
            return Err(SyntheticError::InfeasibleParameters("need 2 <= K <= 10".to_string()));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(SyntheticError::InfeasibleParameters("need 0 < gamma < 1".to_string()));
        }
        if !(rho > 0.0 && rho <= gamma) {
            return Err(SyntheticError::InfeasibleParameters("need 0 < rho <= gamma".to_string()));
        }
        if nu.is_nan() || nu <= 0.0 {
            return Err(SyntheticError::InfeasibleParameters("need nu > 0".to_string()));
        }
        if let KappaTarget::Branching { period } = kappa {
            if period == 0 {
                return Err(SyntheticError::InfeasibleParameters("branch period must be >= 1".to_string()));
            }
        }
        Ok(Self { k, nu, rho, gamma, kappa, path_seed, noise: NoiseModel::none() })
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Value of the optimal path from the root.
    pub fn optimal_value(&self) -> f64 {
        self.nu
    }

    /// Designated optimal action at a given depth.
    pub fn optimal_action(&self, depth: u32) -> Action {
        (mix(self.path_seed ^ (depth as u64).wrapping_mul(0xA24B_AED4_963E_E407)) % self.k as u64)
            as Action
    }

    fn action_stays_alive(&self, depth: u32, action: Action) -> bool {
        match self.kappa {
            KappaTarget::One => action == self.optimal_action(depth),
            KappaTarget::Branching { period } => {
                (depth + 1).is_multiple_of(period) || action == self.optimal_action(depth)
            }
        }
    }

    /// Mean reward on an optimal edge at `depth`.
    fn on_path_reward(&self, depth: u32) -> f64 {
        self.nu * (1.0 - self.rho) * powi(self.rho / self.gamma, depth)
    }

    fn mean(&self, state: &SyntheticTreeState, action: Action) -> f64 {
        if state.alive && self.action_stays_alive(state.depth, action) {
            self.on_path_reward(state.depth)
        } else {
            0.0
        }
    }

    /// Explicit depth-ordered `(sequence, mean reward)` table down to
    /// `depth`, the serialization form used for fixtures.
    pub fn to_depth_table(&self, depth: u32) -> Result<Vec<(ActionSeq, f64)>, SyntheticError> {
        let mut nodes: u64 = 0;
        let mut layer: u64 = 1;
        for _ in 0..depth {
            layer = layer.saturating_mul(self.k as u64);
            nodes = nodes.saturating_add(layer);
            if nodes > 2_000_000 {
                return Err(SyntheticError::TableTooLarge { nodes });
            }
        }
        let mut out = Vec::with_capacity(nodes as usize);
        let mut frontier = alloc::vec![(ActionSeq::root(), self.root_state())];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(frontier.len() * self.k);
            for (seq, state) in &frontier {
                for a in 0..self.k as Action {
                    let child = seq.child(a);
                    out.push((child.clone(), self.mean(state, a)));
                    next.push((child, self.step(state, a)));
                }
            }
            frontier = next;
        }
        Ok(out)
    }
}

impl GenerativeModel for SyntheticTree {
    type State = SyntheticTreeState;

    fn num_actions(&self) -> usize {
        self.k
    }

    fn root_state(&self) -> SyntheticTreeState {
        SyntheticTreeState { depth: 0, alive: true }
    }

    fn step(&self, state: &SyntheticTreeState, action: Action) -> SyntheticTreeState {
        SyntheticTreeState {
            depth: state.depth + 1,
            alive: state.alive && self.action_stays_alive(state.depth, action),
        }
    }

    fn sample_reward(&self, state: &SyntheticTreeState, action: Action, rng: &mut SplitMix64) -> f64 {
        self.mean(state, action) + self.noise.draw(rng)
    }

    fn noise_kind(&self) -> NoiseKind {
        self.noise.kind
    }
}

impl OracleAccess for SyntheticTree {
    fn true_mean(&self, state: &SyntheticTreeState, action: Action) -> f64 {
        self.mean(state, action)
    }

    fn reward_bound(&self) -> f64 {
        // Largest mean reward: the on-path edge at the root.
        self.nu * (1.0 - self.rho)
    }

    fn noise(&self) -> NoiseModel {
        self.noise
    }
}
