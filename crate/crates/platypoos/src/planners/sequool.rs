//! Sequential deterministic planner: depth by depth, open the
//! highest-valued unopened nodes with one evaluation each.
//!
//! Free variant: at depth `h` open up to `floor(h_max / h)` nodes, with
//! `h_max = floor(n / harmonic(n))`. Reset variant: quota
//! `floor(h_max / h^2)` and every opening additionally pays the depth of
//! the node, which caps the reachable depth near `sqrt(h_max)`.

use super::{Collector, PlannerError, PlannerResult, PlannerRun, RunOptions};
use crate::budget::BudgetLedger;
use crate::env::{GenerativeModel, NoiseKind};
use crate::math::{floor, harmonic};
use crate::rng::SplitMix64;
use crate::trace::TraceEvent;
use crate::tree::{OpenError, PlanningTree};

/// `floor(n / harmonic(n))`, the depth budget of both variants.
pub fn sequool_h_max(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    floor(n as f64 / harmonic(n)) as u64
}

pub fn run_sequool<M: GenerativeModel>(
    env: &M,
    n: u64,
    gamma: f64,
    seed: u64,
    opts: &RunOptions,
) -> Result<PlannerRun<M::State>, PlannerError> {
    run_impl(env, n, gamma, seed, opts, false)
}

pub fn run_sequool_reset<M: GenerativeModel>(
    env: &M,
    n: u64,
    gamma: f64,
    seed: u64,
    opts: &RunOptions,
) -> Result<PlannerRun<M::State>, PlannerError> {
    run_impl(env, n, gamma, seed, opts, true)
}

fn run_impl<M: GenerativeModel>(
    env: &M,
    n: u64,
    gamma: f64,
    seed: u64,
    opts: &RunOptions,
    reset: bool,
) -> Result<PlannerRun<M::State>, PlannerError> {
    if env.noise_kind() != NoiseKind::None {
        return Err(PlannerError::NoisyEnvironment);
    }
    let h_max = sequool_h_max(n);
    if h_max == 0 {
        return Err(PlannerError::BudgetTooSmall { n });
    }

    let mut ledger = if reset { BudgetLedger::reset(n) } else { BudgetLedger::free(n) };
    let mut rng = SplitMix64::stream(seed, &[if reset { 1 } else { 0 }]);
    let mut tree = PlanningTree::new(env.num_actions(), gamma, env.root_state());
    let mut col = Collector::new(opts);

    // n >= 1 whenever h_max >= 1, so the root opening always fits.
    tree.open(tree.root(), 1, env, &mut ledger, &mut rng, col.log_mut())
        .expect("root opening fits in any nonzero budget");
    col.push(
        opts.collect_trace,
        TraceEvent::Open { depth: 0, p: None, seq: tree.seq_of(tree.root()), evals: 1, u_hat: 0.0 },
    );

    'depths: for h in 1..=h_max {
        let quota = if reset { h_max / (h * h) } else { h_max / h };
        if quota == 0 {
            // quotas only shrink with depth
            break;
        }
        let selected = tree.select_top_nodes(h as u32, quota as usize, |_| true);
        for id in selected {
            let u = tree.u_hat(id);
            match tree.open(id, 1, env, &mut ledger, &mut rng, col.log_mut()) {
                Ok(()) => col.push(
                    opts.collect_trace,
                    TraceEvent::Open { depth: h as u32, p: None, seq: tree.seq_of(id), evals: 1, u_hat: u },
                ),
                Err(OpenError::Budget(_)) => break 'depths,
                Err(e) => unreachable!("selection produced an unopenable node: {e}"),
            }
        }
    }

    // Recommend the best value seen anywhere in the expanded tree.
    let (best, _) = tree.argmax_u_hat().expect("root opening created sampled nodes");
    let chosen = tree.seq_of(best);
    let result = PlannerResult {
        first_action: chosen.first().expect("chosen node has depth >= 1"),
        chosen_sequence: chosen,
        candidates: None,
        budget_used: ledger.charged(),
        max_opened_depth: tree.max_opened_depth(),
    };
    Ok(PlannerRun { result, tree, ledger, trace: col.trace, sample_log: col.log })
}
