//! The two uniform strategies: one depth-`H` episode per sequence in `A^H`.
//!
//! Both collect identical data. The naive estimator values a sequence using
//! only its own episode (every prefix count is one); the good estimator
//! pools rewards across the `K^(H-h)` sequences sharing each prefix. With
//! zero noise the two recommendations coincide; with noise the pooled
//! root-level estimates have visibly lower variance.

use super::{Collector, PlannerError, PlannerResult, PlannerRun, RunOptions};
use crate::budget::BudgetLedger;
use crate::env::GenerativeModel;
use crate::math::powi;
use crate::rng::SplitMix64;
use crate::seq::{Action, ActionSeq};
use crate::trace::SampleRecord;
use crate::tree::PlanningTree;

pub fn run_uniform_naive<M: GenerativeModel>(
    env: &M,
    budget: u64,
    horizon: u32,
    gamma: f64,
    seed: u64,
    opts: &RunOptions,
) -> Result<PlannerRun<M::State>, PlannerError> {
    run_impl(env, budget, horizon, gamma, seed, opts, false)
}

pub fn run_uniform_good<M: GenerativeModel>(
    env: &M,
    budget: u64,
    horizon: u32,
    gamma: f64,
    seed: u64,
    opts: &RunOptions,
) -> Result<PlannerRun<M::State>, PlannerError> {
    run_impl(env, budget, horizon, gamma, seed, opts, true)
}

fn run_impl<M: GenerativeModel>(
    env: &M,
    budget: u64,
    horizon: u32,
    gamma: f64,
    seed: u64,
    opts: &RunOptions,
    pooled: bool,
) -> Result<PlannerRun<M::State>, PlannerError> {
    let k = env.num_actions();
    if horizon == 0 {
        return Err(PlannerError::InvalidConfig("horizon must be >= 1".into()));
    }
    let episodes = (k as u64)
        .checked_pow(horizon)
        .filter(|&e| e <= 10_000_000)
        .ok_or(PlannerError::InfeasibleHorizon { horizon, budget })?;
    let total_evals = episodes
        .checked_mul(horizon as u64)
        .ok_or(PlannerError::InfeasibleHorizon { horizon, budget })?;
    // An opening budget of `budget` buys K * budget generative calls.
    if total_evals > budget.saturating_mul(k as u64) {
        return Err(PlannerError::InfeasibleHorizon { horizon, budget });
    }

    let mut rng = SplitMix64::stream(seed, &[4]);
    let mut tree = PlanningTree::new(k, gamma, env.root_state());
    let mut ledger = BudgetLedger::free(budget * k as u64);
    let mut col = Collector::new(opts);

    // One episode per depth-H sequence, in lexicographic order.
    let mut best_naive: Option<(f64, ActionSeq)> = None;
    let mut digits = alloc::vec![0 as Action; horizon as usize];
    loop {
        let mut node = tree.root();
        let mut own_u = 0.0;
        for (t, &a) in digits.iter().enumerate() {
            let child = tree.ensure_child(node, a, env);
            let state = tree.state(node).clone();
            ledger.try_charge(1).expect("episode budget was validated upfront");
            let stream_index = rng.draws();
            let reward = env.sample_reward(&state, a, &mut rng);
            tree.add_sample(child, reward);
            own_u += powi(gamma, t as u32) * reward;
            if let Some(log) = col.log_mut() {
                log.push(SampleRecord { state_seq: tree.seq_of(node), action: a, reward, stream_index });
            }
            node = child;
        }
        let seq = ActionSeq::from_actions(digits.clone());
        if best_naive.as_ref().is_none_or(|(bu, _)| own_u > *bu) {
            best_naive = Some((own_u, seq));
        }
        // next sequence
        let mut t = horizon as usize;
        loop {
            if t == 0 {
                break;
            }
            t -= 1;
            if digits[t] as usize + 1 < k {
                digits[t] += 1;
                break;
            }
            digits[t] = 0;
            if t == 0 {
                t = usize::MAX; // done marker
                break;
            }
        }
        if t == usize::MAX {
            break;
        }
    }

    let chosen = if pooled {
        let (id, _) = tree
            .argmax_u_hat_where(|_, depth| depth == horizon)
            .expect("all depth-H nodes sampled");
        tree.seq_of(id)
    } else {
        best_naive.expect("at least one episode ran").1
    };

    let result = PlannerResult {
        first_action: chosen.first().expect("horizon >= 1"),
        chosen_sequence: chosen,
        candidates: None,
        budget_used: ledger.charged().div_ceil(k as u64),
        max_opened_depth: tree.max_depth(),
    };
    Ok(PlannerRun { result, tree, ledger, trace: col.trace, sample_log: col.log })
}
