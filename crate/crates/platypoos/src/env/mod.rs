//! Generative models: deterministic transitions, stochastic bounded rewards.
//!
//! Planners see only [`GenerativeModel`]: the action count, the transition
//! function, reward *samples*, and the noise kind (so that algorithms
//! restricted to the deterministic setting can refuse noisy inputs). True
//! means, the reward range and the noise range live behind [`OracleAccess`]
//! and are reserved for oracles, diagnostics and baselines that declare the
//! dependency explicitly. The scale-free planners never touch them.

use crate::rng::SplitMix64;
use crate::seq::Action;
use core::fmt;

mod random_tree;
mod synthetic;
mod table;
mod toy;

pub use random_tree::{RandomTree, RandomTreeState};
pub use synthetic::{KappaTarget, SyntheticError, SyntheticTree, SyntheticTreeState};
pub use table::TableTree;
pub use toy::{ToyMdp, ToyState};

/// Reward-noise distribution, zero mean with support in `[-range, range]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Uniform,
    Rademacher,
    TruncatedGaussian,
}

impl NoiseKind {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::Uniform => "uniform",
            NoiseKind::Rademacher => "rademacher",
            NoiseKind::TruncatedGaussian => "truncated-gaussian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub range: f64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, range: 0.0 }
    }

    pub fn new(kind: NoiseKind, range: f64) -> Self {
        debug_assert!(range >= 0.0);
        match kind {
            NoiseKind::None => Self::none(),
            _ => Self { kind, range },
        }
    }

    /// One zero-mean draw in `[-range, range]`.
    ///
    /// Draws are `range`-linear for a fixed RNG state: scaling `range` by
    /// `alpha` scales the draw by `alpha` while consuming the identical
    /// stream, which is what the scale-equivariance checks rely on.
    pub fn draw(&self, rng: &mut SplitMix64) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Uniform => self.range * (2.0 * rng.next_f64() - 1.0),
            NoiseKind::Rademacher => {
                if rng.next_u64() & 1 == 0 {
                    self.range
                } else {
                    -self.range
                }
            }
            NoiseKind::TruncatedGaussian => {
                // Standard normal via Box-Muller, rejected outside 3 sigma,
                // rescaled so the support is exactly [-range, range].
                loop {
                    let u1 = 1.0 - rng.next_f64();
                    let u2 = rng.next_f64();
                    let z = crate::math::sqrt(-2.0 * crate::math::log(u1))
                        * crate::math::cos(2.0 * core::f64::consts::PI * u2);
                    if z.abs() <= 3.0 {
                        return self.range * z / 3.0;
                    }
                }
            }
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(b={})", self.kind.name(), self.range)
    }
}

/// What a planner is allowed to query.
pub trait GenerativeModel {
    /// State handle. `Ord + Clone` so oracles can memoize over states.
    type State: Clone + Ord;

    /// Number of actions K.
    fn num_actions(&self) -> usize;

    fn root_state(&self) -> Self::State;

    /// Deterministic transition: the same `(state, action)` always yields
    /// the same successor.
    fn step(&self, state: &Self::State, action: Action) -> Self::State;

    /// One reward sample: the true mean perturbed by bounded zero-mean noise.
    fn sample_reward(&self, state: &Self::State, action: Action, rng: &mut SplitMix64) -> f64;

    /// Noise kind only; the range stays hidden from planners.
    fn noise_kind(&self) -> NoiseKind;
}

/// Analysis-side accessors. Never handed to the scale-free planners.
pub trait OracleAccess: GenerativeModel {
    /// Exact mean reward `r(x, a)`.
    fn true_mean(&self, state: &Self::State, action: Action) -> f64;

    /// Configured reward range bound `R_max`.
    fn reward_bound(&self) -> f64;

    /// Full noise model including its range.
    fn noise(&self) -> NoiseModel;
}

impl<M: GenerativeModel> GenerativeModel for &M {
    type State = M::State;

    fn num_actions(&self) -> usize {
        (**self).num_actions()
    }

    fn root_state(&self) -> Self::State {
        (**self).root_state()
    }

    fn step(&self, state: &Self::State, action: Action) -> Self::State {
        (**self).step(state, action)
    }

    fn sample_reward(&self, state: &Self::State, action: Action, rng: &mut SplitMix64) -> f64 {
        (**self).sample_reward(state, action, rng)
    }

    fn noise_kind(&self) -> NoiseKind {
        (**self).noise_kind()
    }
}

impl<M: OracleAccess> OracleAccess for &M {
    fn true_mean(&self, state: &Self::State, action: Action) -> f64 {
        (**self).true_mean(state, action)
    }

    fn reward_bound(&self) -> f64 {
        (**self).reward_bound()
    }

    fn noise(&self) -> NoiseModel {
        (**self).noise()
    }
}

/// Environment with every reward (mean and noise alike) multiplied by a
/// positive factor. Consumes the identical RNG stream as the inner model.
#[derive(Debug, Clone)]
pub struct ScaledEnv<M> {
    pub inner: M,
    pub factor: f64,
}

impl<M> ScaledEnv<M> {
    pub fn new(inner: M, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        Self { inner, factor }
    }
}

impl<M: GenerativeModel> GenerativeModel for ScaledEnv<M> {
    type State = M::State;

    fn num_actions(&self) -> usize {
        self.inner.num_actions()
    }

    fn root_state(&self) -> Self::State {
        self.inner.root_state()
    }

    fn step(&self, state: &Self::State, action: Action) -> Self::State {
        self.inner.step(state, action)
    }

    fn sample_reward(&self, state: &Self::State, action: Action, rng: &mut SplitMix64) -> f64 {
        self.factor * self.inner.sample_reward(state, action, rng)
    }

    fn noise_kind(&self) -> NoiseKind {
        self.inner.noise_kind()
    }
}

impl<M: OracleAccess> OracleAccess for ScaledEnv<M> {
    fn true_mean(&self, state: &Self::State, action: Action) -> f64 {
        self.factor * self.inner.true_mean(state, action)
    }

    fn reward_bound(&self) -> f64 {
        self.factor * self.inner.reward_bound()
    }

    fn noise(&self) -> NoiseModel {
        let n = self.inner.noise();
        NoiseModel { kind: n.kind, range: self.factor * n.range }
    }
}

/// Same model, planning from a different start state. Receding-horizon
/// rollouts re-root the environment at the state reached so far.
#[derive(Debug, Clone)]
pub struct RootedEnv<M: GenerativeModel> {
    pub inner: M,
    pub root: M::State,
}

impl<M: GenerativeModel> RootedEnv<M> {
    pub fn new(inner: M, root: M::State) -> Self {
        Self { inner, root }
    }
}

impl<M: GenerativeModel> GenerativeModel for RootedEnv<M> {
    type State = M::State;

    fn num_actions(&self) -> usize {
        self.inner.num_actions()
    }

    fn root_state(&self) -> Self::State {
        self.root.clone()
    }

    fn step(&self, state: &Self::State, action: Action) -> Self::State {
        self.inner.step(state, action)
    }

    fn sample_reward(&self, state: &Self::State, action: Action, rng: &mut SplitMix64) -> f64 {
        self.inner.sample_reward(state, action, rng)
    }

    fn noise_kind(&self) -> NoiseKind {
        self.inner.noise_kind()
    }
}

impl<M: OracleAccess> OracleAccess for RootedEnv<M> {
    fn true_mean(&self, state: &Self::State, action: Action) -> f64 {
        self.inner.true_mean(state, action)
    }

    fn reward_bound(&self) -> f64 {
        self.inner.reward_bound()
    }

    fn noise(&self) -> NoiseModel {
        self.inner.noise()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_is_bounded_and_scale_linear() {
        for kind in [NoiseKind::Uniform, NoiseKind::Rademacher, NoiseKind::TruncatedGaussian] {
            let base = NoiseModel::new(kind, 10.0);
            let scaled = NoiseModel::new(kind, 37.0);
            let mut r1 = SplitMix64::new(99);
            let mut r2 = SplitMix64::new(99);
            for _ in 0..100_000 {
                let a = base.draw(&mut r1);
                let b = scaled.draw(&mut r2);
                assert!(a.abs() <= 10.0);
                assert!((b - 3.7 * a).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn uniform_mean_within_clt_band() {
        // 3 sigma band for the mean of 1e5 uniform draws of range b:
        // sd = b / sqrt(3), so 3 * (b/sqrt(3)) / sqrt(n).
        let noise = NoiseModel::new(NoiseKind::Uniform, 10.0);
        let mut rng = SplitMix64::new(2024);
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += noise.draw(&mut rng);
        }
        let mean = acc / n as f64;
        let band = 3.0 * (10.0 / crate::math::sqrt(3.0)) / crate::math::sqrt(n as f64);
        assert!(mean.abs() <= band, "mean {mean} outside {band}");
    }
}
