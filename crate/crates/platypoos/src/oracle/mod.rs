//! Ground truth at desk scale: truncated Bellman values with a certified
//! tail, root Q-values, and simple regret.

use crate::env::OracleAccess;
use crate::math::powi;
use crate::seq::{Action, ActionSeq};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

mod counts;
mod coverage;

pub use counts::{check_prop2, count_near_optimal, fit_kappa, CountKind, CountProfile, Prop2Report};
pub use coverage::{concentration_coverage, CoverageReport};

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// The truncation tail bound exceeds the requested tolerance; raise the
    /// horizon.
    HorizonTooShallow { horizon: u32, tail: f64, tol: f64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::HorizonTooShallow { horizon, tail, tol } => write!(
                f,
                "horizon {horizon} too shallow: tail bound {tail:e} exceeds tolerance {tol:e}"
            ),
        }
    }
}

impl core::error::Error for OracleError {}

/// Memoized finite-horizon optimal values over reachable states.
///
/// `value(x, h)` is the exact optimum of the next `h` rewards. States repeat
/// heavily in the shipped environments, so memoization keeps even
/// several-hundred-step horizons cheap.
pub struct ValueOracle<'a, M: OracleAccess> {
    env: &'a M,
    gamma: f64,
    memo: BTreeMap<(M::State, u32), f64>,
}

impl<'a, M: OracleAccess> ValueOracle<'a, M> {
    pub fn new(env: &'a M, gamma: f64) -> Self {
        assert!((0.0..1.0).contains(&gamma));
        Self { env, gamma, memo: BTreeMap::new() }
    }

    pub fn value(&mut self, state: &M::State, horizon: u32) -> f64 {
        if horizon == 0 {
            return 0.0;
        }
        if let Some(&v) = self.memo.get(&(state.clone(), horizon)) {
            return v;
        }
        let mut best = f64::NEG_INFINITY;
        for a in 0..self.env.num_actions() as Action {
            let next = self.env.step(state, a);
            let q = self.env.true_mean(state, a) + self.gamma * self.value(&next, horizon - 1);
            best = best.max(q);
        }
        self.memo.insert((state.clone(), horizon), best);
        best
    }

    /// Exact discounted value of a finite prefix from the root.
    pub fn u_value(&self, seq: &ActionSeq) -> f64 {
        let mut state = self.env.root_state();
        let mut acc = 0.0;
        for (t, &a) in seq.actions().iter().enumerate() {
            acc += powi(self.gamma, t as u32) * self.env.true_mean(&state, a);
            state = self.env.step(&state, a);
        }
        acc
    }

    /// Truncated node value `u(a) + gamma^h * V_(H-h)(state(a))`.
    pub fn node_value(&mut self, seq: &ActionSeq, horizon: u32) -> f64 {
        let mut state = self.env.root_state();
        for &a in seq.actions() {
            state = self.env.step(&state, a);
        }
        let h = seq.depth();
        self.u_value(seq) + powi(self.gamma, h) * self.value(&state, horizon.saturating_sub(h))
    }
}

/// Root-level ground truth with a certified truncation tail.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable {
    pub horizon: u32,
    /// Certified bound on `v - v_H` under the configured reward range:
    /// `gamma^H * reward_bound / (1 - gamma)`.
    pub tail: f64,
    pub v_star: f64,
    pub q_star: Vec<f64>,
    /// Root actions within a hair of the optimum.
    pub optimal_actions: Vec<Action>,
}

impl OracleTable {
    pub fn build<M: OracleAccess>(
        env: &M,
        gamma: f64,
        horizon: u32,
        tol: f64,
    ) -> Result<Self, OracleError> {
        let tail = if gamma == 0.0 {
            0.0
        } else {
            powi(gamma, horizon) * env.reward_bound() / (1.0 - gamma)
        };
        if tail > tol {
            return Err(OracleError::HorizonTooShallow { horizon, tail, tol });
        }
        let mut oracle = ValueOracle::new(env, gamma);
        let root = env.root_state();
        let mut q_star = Vec::with_capacity(env.num_actions());
        for a in 0..env.num_actions() as Action {
            let next = env.step(&root, a);
            q_star.push(env.true_mean(&root, a) + gamma * oracle.value(&next, horizon - 1));
        }
        let v_star = q_star.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tie = 1e-9 * v_star.abs().max(1.0);
        let optimal_actions = (0..env.num_actions() as Action)
            .filter(|&a| q_star[a as usize] >= v_star - tie)
            .collect();
        Ok(Self { horizon, tail, v_star, q_star, optimal_actions })
    }

    /// Q-value gap of a recommended first action; zero iff optimal.
    pub fn simple_regret(&self, action: Action) -> f64 {
        self.v_star - self.q_star[action as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{GenerativeModel, KappaTarget, RandomTree, SyntheticTree, ToyMdp};
    use crate::tree::b_value;

    #[test]
    fn toy_v_star_matches_closed_form() {
        // stay forever from (0,0): sum t * gamma^t = gamma / (1-gamma)^2 = 380
        let env = ToyMdp::unshifted();
        let table = OracleTable::build(&env, 0.95, 350, 1e-3).unwrap();
        assert!((table.v_star - 380.0).abs() <= 1e-3, "v* = {}", table.v_star);
        assert_eq!(table.optimal_actions, alloc::vec![0]);
        // switching first: 2 + gamma * 380 = 363, so the gap is 17
        assert!((table.simple_regret(1) - 17.0).abs() <= 2e-3);
        assert_eq!(table.simple_regret(0), 0.0);
    }

    #[test]
    fn horizon_too_shallow_is_reported() {
        let env = ToyMdp::unshifted();
        let err = OracleTable::build(&env, 0.95, 50, 1e-3).unwrap_err();
        assert!(matches!(err, OracleError::HorizonTooShallow { .. }));
    }

    #[test]
    fn gamma_zero_is_single_step_max() {
        let env = ToyMdp::default();
        let table = OracleTable::build(&env, 0.0, 1, 1e-12).unwrap();
        assert_eq!(table.v_star, 102.0);
        assert_eq!(table.optimal_actions, alloc::vec![1]);
    }

    #[test]
    fn synthetic_v_star_is_nu_and_gap_is_known() {
        let env = SyntheticTree::new(2, 1.0, 0.25, 0.8, KappaTarget::One, 3).unwrap();
        let table = OracleTable::build(&env, 0.8, 120, 1e-9).unwrap();
        assert!((table.v_star - 1.0).abs() <= 1e-9);
        let wrong = 1 - env.optimal_action(0);
        // a deviation is worth zero forever
        assert!((table.simple_regret(wrong) - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn sandwich_u_le_v_le_b_on_enumerated_tree() {
        let env = RandomTree::new(2, 6, 4.0, 99);
        let gamma = 0.9;
        let mut oracle = ValueOracle::new(&env, gamma);
        let mut stack = alloc::vec![ActionSeq::root()];
        while let Some(seq) = stack.pop() {
            let u = oracle.u_value(&seq);
            let v = oracle.node_value(&seq, 40);
            let b = b_value(u, seq.depth(), 4.0, gamma);
            assert!(u <= v + 1e-12 && v <= b + 1e-12);
            if seq.depth() < 6 {
                for a in 0..2 {
                    stack.push(seq.child(a));
                }
            }
        }
    }

    #[test]
    fn tail_certificate_between_horizons() {
        let env = RandomTree::new(2, 8, 4.0, 5);
        let gamma = 0.9;
        let mut oracle = ValueOracle::new(&env, gamma);
        for h in [4u32, 8, 12] {
            let a = oracle.value(&env.root_state(), h);
            let b = oracle.value(&env.root_state(), h + 2);
            let cert = powi(gamma, h) * 4.0 / (1.0 - gamma);
            assert!((b - a).abs() <= cert);
        }
    }
}
