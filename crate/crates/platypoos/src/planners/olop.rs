//! Open-loop optimistic planning baseline.
//!
//! Plays `M` episodes of length `L`. Each episode follows the depth-`L`
//! sequence maximizing the sharpest upper bound over its prefixes,
//!
//! `B(a) = min over prefixes a' of [ u_hat(a')
//!         + sum_t gamma^t * noise_bound * sqrt(2 ln M / T_(t+1))
//!         + reward_bound * gamma^(h(a')) / (1 - gamma) ]`,
//!
//! with unvisited prefixes scored unbounded. Unlike the scale-free
//! planners, this baseline requires assumed ranges for both the noise
//! (`noise_bound`) and the rewards (`reward_bound`); its budget is episodic,
//! `M * L` generative calls against the `K * n` calls an opening budget of
//! `n` allows. `budget_used` reports opening-equivalents,
//! `ceil(M * L / K)`.

use super::{Collector, PlannerError, PlannerResult, PlannerRun, RunOptions};
use crate::budget::BudgetLedger;
use crate::env::GenerativeModel;
use crate::math::{ceil, log, sqrt};
use crate::rng::SplitMix64;
use crate::seq::{Action, ActionSeq};
use crate::trace::SampleRecord;
use crate::tree::{NodeId, PlanningTree};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlopConfig {
    /// Assumed noise range; meant to be the true range, and handing in a
    /// wrong one is exactly what the misspecification sweeps probe.
    pub noise_bound: f64,
    /// Assumed reward range.
    pub reward_bound: f64,
    /// Episode count M.
    pub episodes: u64,
    /// Episode length L.
    pub episode_len: u32,
}

impl OlopConfig {
    /// Canonical sizing: `L = max(1, ceil(ln M / (2 ln(1/gamma))))` and the
    /// largest `M` with `M * L <= n * K` generative calls.
    pub fn for_budget(
        n: u64,
        k: usize,
        gamma: f64,
        noise_bound: f64,
        reward_bound: f64,
    ) -> Result<Self, PlannerError> {
        if n == 0 {
            return Err(PlannerError::InvalidConfig("budget must be positive".into()));
        }
        if noise_bound.is_nan() || noise_bound < 0.0 {
            return Err(PlannerError::InvalidConfig("noise bound must be >= 0".into()));
        }
        if reward_bound.is_nan() || reward_bound <= 0.0 {
            return Err(PlannerError::InvalidConfig("reward bound must be > 0".into()));
        }
        let budget_evals = n * k as u64;
        let (mut lo, mut hi) = (1u64, budget_evals);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if mid.saturating_mul(episode_len_for(mid, gamma) as u64) <= budget_evals {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let episodes = lo;
        Ok(Self { noise_bound, reward_bound, episodes, episode_len: episode_len_for(episodes, gamma) })
    }
}

fn episode_len_for(episodes: u64, gamma: f64) -> u32 {
    if gamma <= 0.0 {
        return 1;
    }
    let l = ceil(log(episodes as f64) / (2.0 * log(1.0 / gamma))) as u32;
    l.max(1)
}

pub fn run_olop<M: GenerativeModel>(
    env: &M,
    n: u64,
    gamma: f64,
    cfg: &OlopConfig,
    seed: u64,
    opts: &RunOptions,
) -> Result<PlannerRun<M::State>, PlannerError> {
    let k = env.num_actions();
    if cfg.episodes == 0 || cfg.episode_len == 0 {
        return Err(PlannerError::InvalidConfig("need M >= 1 and L >= 1".into()));
    }
    if cfg.episodes.saturating_mul(cfg.episode_len as u64) > n * k as u64 {
        return Err(PlannerError::InvalidConfig(alloc::format!(
            "episodic budget M*L = {} exceeds the {} evaluations allowed by n = {n}",
            cfg.episodes * cfg.episode_len as u64,
            n * k as u64,
        )));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(PlannerError::InvalidConfig("gamma must be in [0, 1)".into()));
    }

    let mut rng = SplitMix64::stream(seed, &[3]);
    let mut tree = PlanningTree::new(k, gamma, env.root_state());
    // The ledger counts raw generative calls here; openings are not this
    // planner's unit.
    let mut ledger = BudgetLedger::free(n * k as u64);
    let mut col = Collector::new(opts);

    let bonus_coef = cfg.noise_bound * sqrt(2.0 * log(cfg.episodes as f64));
    let tail_coef = cfg.reward_bound / (1.0 - gamma);

    for _ in 0..cfg.episodes {
        let seq = best_episode(&tree, gamma, bonus_coef, tail_coef, cfg.episode_len);
        // play it, feeding every observed reward back into the shared tree
        let mut node = tree.root();
        for &a in seq.actions() {
            let child = tree.ensure_child(node, a, env);
            let state = tree.state(node).clone();
            ledger.try_charge(1).expect("episode budget was validated upfront");
            let stream_index = rng.draws();
            let reward = env.sample_reward(&state, a, &mut rng);
            tree.add_sample(child, reward);
            if let Some(log) = col.log_mut() {
                log.push(SampleRecord { state_seq: tree.seq_of(node), action: a, reward, stream_index });
            }
            node = child;
        }
    }

    // Most played root action wins; ties lexicographic.
    let mut best: Option<(Action, u64)> = None;
    for a in 0..k as Action {
        let visits = tree
            .child(tree.root(), a)
            .map(|c| tree.stats(c).count)
            .unwrap_or(0);
        if best.is_none_or(|(_, bv)| visits > bv) {
            best = Some((a, visits));
        }
    }
    let (action, _) = best.expect("K >= 1");

    let result = PlannerResult {
        first_action: action,
        chosen_sequence: ActionSeq::from_actions([action]),
        candidates: None,
        budget_used: ledger.charged().div_ceil(k as u64),
        max_opened_depth: tree.max_depth(),
    };
    Ok(PlannerRun { result, tree, ledger, trace: col.trace, sample_log: col.log })
}

/// The depth-`len` sequence maximizing the min-over-prefixes bound, walking
/// only sampled nodes; an unvisited edge inherits the running minimum and
/// is completed lexicographically. Ties pick the smaller action.
fn best_episode<S: Clone>(
    tree: &PlanningTree<S>,
    gamma: f64,
    bonus_coef: f64,
    tail_coef: f64,
    len: u32,
) -> ActionSeq {
    let root_bound = tail_coef; // u_hat(root) = 0, no bonus terms
    let (_, actions) = descend(tree, gamma, bonus_coef, tail_coef, len, tree.root(), 0, 0.0, 0.0, 1.0, root_bound);
    ActionSeq::from_actions(actions)
}

#[allow(clippy::too_many_arguments)]
fn descend<S: Clone>(
    tree: &PlanningTree<S>,
    gamma: f64,
    bonus_coef: f64,
    tail_coef: f64,
    len: u32,
    node: NodeId,
    depth: u32,
    u_acc: f64,
    bonus_acc: f64,
    gpow: f64,
    min_bound: f64,
) -> (f64, Vec<Action>) {
    if depth == len {
        return (min_bound, Vec::new());
    }
    let mut best_val = f64::NEG_INFINITY;
    let mut best_suffix = Vec::new();
    let mut best_action = 0;
    for a in 0..tree.k() as Action {
        let sampled_child = tree.child(node, a).filter(|&c| tree.stats(c).count > 0);
        let (val, suffix) = match sampled_child {
            None => (min_bound, alloc::vec![0; (len - depth - 1) as usize]),
            Some(child) => {
                let stats = tree.stats(child);
                let u2 = u_acc + gpow * stats.mean().expect("sampled child");
                let bonus2 = bonus_acc + gpow * bonus_coef / sqrt(stats.count as f64);
                let bound = u2 + bonus2 + gpow * gamma * tail_coef;
                descend(
                    tree,
                    gamma,
                    bonus_coef,
                    tail_coef,
                    len,
                    child,
                    depth + 1,
                    u2,
                    bonus2,
                    gpow * gamma,
                    min_bound.min(bound),
                )
            }
        };
        if val > best_val {
            best_val = val;
            best_suffix = suffix;
            best_action = a;
        }
    }
    best_suffix.insert(0, best_action);
    (best_val, best_suffix)
}
