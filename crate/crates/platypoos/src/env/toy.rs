//! Two-bin counter MDP.
//!
//! A state is `(bin, streak)` with `bin` binary and `streak` counting
//! consecutive visits. Switching bins pays a flat base reward of 2 and
//! resets the streak; staying pays the current streak and increments it.
//! Staying is optimal in the long run, but greedy lookahead prefers
//! switching, which is what makes the instance discriminating. All rewards
//! carry a constant positive shift so that noise of any shipped range keeps
//! samples positive; reporting subtracts the shift back out.

use super::{GenerativeModel, NoiseKind, NoiseModel, OracleAccess};
use crate::rng::SplitMix64;
use crate::seq::Action;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ToyState {
    pub bin: u8,
    pub streak: u32,
}

#[derive(Debug, Clone)]
pub struct ToyMdp {
    pub shift: f64,
    pub reward_bound: f64,
    pub noise: NoiseModel,
}

impl Default for ToyMdp {
    fn default() -> Self {
        Self { shift: 100.0, reward_bound: 130.0, noise: NoiseModel::none() }
    }
}

impl ToyMdp {
    pub fn new(shift: f64, reward_bound: f64, noise: NoiseModel) -> Self {
        Self { shift, reward_bound, noise }
    }

    /// Shift-free variant, used by value oracles checked against closed forms.
    pub fn unshifted() -> Self {
        Self { shift: 0.0, reward_bound: 130.0, noise: NoiseModel::none() }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    fn mean(&self, state: &ToyState, action: Action) -> f64 {
        if state.bin != action {
            2.0 + self.shift
        } else {
            state.streak as f64 + self.shift
        }
    }
}

impl GenerativeModel for ToyMdp {
    type State = ToyState;

    fn num_actions(&self) -> usize {
        2
    }

    fn root_state(&self) -> ToyState {
        ToyState { bin: 0, streak: 0 }
    }

    fn step(&self, state: &ToyState, action: Action) -> ToyState {
        debug_assert!(action < 2);
        if state.bin != action {
            ToyState { bin: action, streak: 0 }
        } else {
            ToyState { bin: action, streak: state.streak + 1 }
        }
    }

    fn sample_reward(&self, state: &ToyState, action: Action, rng: &mut SplitMix64) -> f64 {
        self.mean(state, action) + self.noise.draw(rng)
    }

    fn noise_kind(&self) -> NoiseKind {
        self.noise.kind
    }
}

impl OracleAccess for ToyMdp {
    fn true_mean(&self, state: &ToyState, action: Action) -> f64 {
        self.mean(state, action)
    }

    fn reward_bound(&self) -> f64 {
        self.reward_bound
    }

    fn noise(&self) -> NoiseModel {
        self.noise
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_and_reward_rules() {
        let env = ToyMdp::default();
        let mut rng = SplitMix64::new(0);

        // switch from (0,0)
        let s = ToyState { bin: 0, streak: 0 };
        assert_eq!(env.sample_reward(&s, 1, &mut rng), 102.0);
        assert_eq!(env.step(&s, 1), ToyState { bin: 1, streak: 0 });

        // stay at (0,3)
        let s = ToyState { bin: 0, streak: 3 };
        assert_eq!(env.sample_reward(&s, 0, &mut rng), 103.0);
        assert_eq!(env.step(&s, 0), ToyState { bin: 0, streak: 4 });

        // stay at (0,0)
        let s = ToyState { bin: 0, streak: 0 };
        assert_eq!(env.sample_reward(&s, 0, &mut rng), 100.0);
        assert_eq!(env.step(&s, 0), ToyState { bin: 0, streak: 1 });

        // oracle accessors
        assert_eq!(env.true_mean(&ToyState { bin: 0, streak: 5 }, 0), 105.0);
        assert_eq!(env.true_mean(&ToyState { bin: 1, streak: 0 }, 0), 102.0);
    }

    #[test]
    fn dynamics_deterministic() {
        let env = ToyMdp::default();
        let mut rng = SplitMix64::new(5);
        for _ in 0..1000 {
            let s = ToyState { bin: (rng.below(2)) as u8, streak: rng.below(50) as u32 };
            let a = rng.below(2) as Action;
            assert_eq!(env.step(&s, a), env.step(&s, a));
        }
    }
}
