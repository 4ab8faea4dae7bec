//! Tree environment backed by an explicit `(sequence -> mean reward)` table,
//! the in-memory form of the serialized tree fixtures. Rewards below the
//! table are zero.

use super::{GenerativeModel, NoiseKind, NoiseModel, OracleAccess};
use crate::rng::SplitMix64;
use crate::seq::{Action, ActionSeq};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct TableTree {
    k: usize,
    means: BTreeMap<ActionSeq, f64>,
    reward_bound: f64,
    noise: NoiseModel,
}

impl TableTree {
    pub fn from_entries(k: usize, entries: Vec<(ActionSeq, f64)>) -> Self {
        let mut reward_bound = 0.0f64;
        let mut means = BTreeMap::new();
        for (seq, mean) in entries {
            reward_bound = reward_bound.max(mean);
            means.insert(seq, mean);
        }
        Self { k, means, reward_bound, noise: NoiseModel::none() }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ActionSeq, f64)> {
        self.means.iter().map(|(s, &m)| (s, m))
    }

    fn mean(&self, state: &ActionSeq, action: Action) -> f64 {
        self.means.get(&state.child(action)).copied().unwrap_or(0.0)
    }
}

impl GenerativeModel for TableTree {
    type State = ActionSeq;

    fn num_actions(&self) -> usize {
        self.k
    }

    fn root_state(&self) -> ActionSeq {
        ActionSeq::root()
    }

    fn step(&self, state: &ActionSeq, action: Action) -> ActionSeq {
        state.child(action)
    }

    fn sample_reward(&self, state: &ActionSeq, action: Action, rng: &mut SplitMix64) -> f64 {
        self.mean(state, action) + self.noise.draw(rng)
    }

    fn noise_kind(&self) -> NoiseKind {
        self.noise.kind
    }
}

impl OracleAccess for TableTree {
    fn true_mean(&self, state: &ActionSeq, action: Action) -> f64 {
        self.mean(state, action)
    }

    fn reward_bound(&self) -> f64 {
        self.reward_bound
    }

    fn noise(&self) -> NoiseModel {
        self.noise
    }
}
