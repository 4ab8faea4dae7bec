//! K-ary tree with independent seeded mean rewards, truncated at a fixed
//! depth (all deeper rewards are zero). The workhorse for exhaustive
//! counting checks, where an arbitrary reward landscape is wanted.

use super::{GenerativeModel, NoiseKind, NoiseModel, OracleAccess};
use crate::rng::SplitMix64;
use crate::seq::Action;
use alloc::vec::Vec;

/// Level-order node index plus depth; `idx == u64::MAX` is the absorbing
/// zero-reward state below the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RandomTreeState {
    pub idx: u64,
    pub depth: u32,
}

#[derive(Debug, Clone)]
pub struct RandomTree {
    k: usize,
    depth: u32,
    rewards: Vec<f64>, // indexed by child node id, entry 0 (the root) unused
    reward_bound: f64,
    noise: NoiseModel,
}

impl RandomTree {
    /// Mean rewards drawn uniformly from `[0, reward_bound]`.
    ///
    /// Panics if the table would exceed ~10^7 nodes; these trees exist to be
    /// enumerated.
    pub fn new(k: usize, depth: u32, reward_bound: f64, seed: u64) -> Self {
        assert!((2..=10).contains(&k));
        let mut count: u64 = 1;
        let mut layer: u64 = 1;
        for _ in 0..depth {
            layer *= k as u64;
            count += layer;
            assert!(count <= 10_000_000, "random tree too large to materialise");
        }
        let mut rng = SplitMix64::stream(seed, &[k as u64, depth as u64]);
        let mut rewards = Vec::with_capacity(count as usize);
        rewards.push(0.0);
        for _ in 1..count {
            rewards.push(reward_bound * rng.next_f64());
        }
        Self { k, depth, rewards, reward_bound, noise: NoiseModel::none() }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    fn mean(&self, state: &RandomTreeState, action: Action) -> f64 {
        if state.idx == u64::MAX || state.depth >= self.depth {
            return 0.0;
        }
        let child = state.idx * self.k as u64 + 1 + action as u64;
        self.rewards[child as usize]
    }
}

impl GenerativeModel for RandomTree {
    type State = RandomTreeState;

    fn num_actions(&self) -> usize {
        self.k
    }

    fn root_state(&self) -> RandomTreeState {
        RandomTreeState { idx: 0, depth: 0 }
    }

    fn step(&self, state: &RandomTreeState, action: Action) -> RandomTreeState {
        if state.idx == u64::MAX || state.depth >= self.depth {
            return RandomTreeState { idx: u64::MAX, depth: state.depth + 1 };
        }
        RandomTreeState {
            idx: state.idx * self.k as u64 + 1 + action as u64,
            depth: state.depth + 1,
        }
    }

    fn sample_reward(&self, state: &RandomTreeState, action: Action, rng: &mut SplitMix64) -> f64 {
        self.mean(state, action) + self.noise.draw(rng)
    }

    fn noise_kind(&self) -> NoiseKind {
        self.noise.kind
    }
}

impl OracleAccess for RandomTree {
    fn true_mean(&self, state: &RandomTreeState, action: Action) -> f64 {
        self.mean(state, action)
    }

    fn reward_bound(&self) -> f64 {
        self.reward_bound
    }

    fn noise(&self) -> NoiseModel {
        self.noise
    }
}
