//! Scale-free noisy planner.
//!
//! The schedule spends its budget on openings at every depth and, within a
//! depth, on a geometric ladder of evaluation counts indexed by `p`: a few
//! nodes receive many evaluations, exponentially more nodes receive
//! exponentially fewer, with everything damped by `gamma^(2h)` so deeper
//! depths stay affordable. Candidates are read off per level `p` under the
//! matching sample-count guarantees, cross-validated with fresh evaluations
//! along their paths, and the best refreshed estimate wins. The planner
//! consumes neither the reward range nor the noise range.

use super::{Collector, PlannerError, PlannerResult, PlannerRun, RunOptions};
use crate::budget::BudgetLedger;
use crate::env::GenerativeModel;
use crate::math::{ceil_pos, floor, floor_log2_ratio, floor_log2_u64, log2, powi};
use crate::rng::SplitMix64;
use crate::seq::ActionSeq;
use crate::trace::TraceEvent;
use crate::tree::{NodeId, OpenError, PlanningTree};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// All schedule quantities derived from `(n, gamma)`; pure arithmetic,
/// no environment involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatypoosSchedule {
    pub n: u64,
    pub gamma: f64,
    pub h_max: u64,
    pub p_max: u32,
}

impl PlatypoosSchedule {
    pub fn new(n: u64, gamma: f64) -> Result<Self, PlannerError> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(PlannerError::InvalidConfig(alloc::format!(
                "gamma must be in [0, 1), got {gamma}"
            )));
        }
        if n == 0 {
            return Err(PlannerError::BudgetTooSmall { n });
        }
        let l = log2(n as f64) + 1.0;
        let h_max = floor(n as f64 / (2.0 * l * l)) as u64;
        if h_max == 0 {
            return Err(PlannerError::BudgetTooSmall { n });
        }
        Ok(Self { n, gamma, h_max, p_max: floor_log2_u64(h_max) })
    }

    fn gamma2h(&self, h: u64) -> f64 {
        powi(self.gamma * self.gamma, h as u32)
    }

    /// Evaluations per opening at depth `h`, level `p`:
    /// `ceil(h * 2^p * gamma^(2h))`, at least one.
    pub fn evals(&self, h: u64, p: u32) -> u64 {
        ceil_pos(h as f64 * (1u64 << p) as f64 * self.gamma2h(h)).max(1)
    }

    /// Node quota at `(h, p)`: `floor(h_max / (h * evals(h, p)))`.
    pub fn quota(&self, h: u64, p: u32) -> u64 {
        self.h_max / (h * self.evals(h, p))
    }

    /// Sample-count threshold a depth-`h` node must meet to be opened at
    /// level `p`. Vacuous (zero) at depth one; by construction it equals
    /// `evals(h - 1, p)`, the count children inherit from a level-`p`
    /// opening of their parent.
    pub fn eligibility(&self, h: u64, p: u32) -> u64 {
        if h <= 1 {
            return 0;
        }
        ceil_pos((h - 1) as f64 * (1u64 << p) as f64 * self.gamma2h(h - 1))
    }

    /// Highest level `p` scheduled at depth `h`:
    /// `floor(log2(h_max / ceil(h^2 * gamma^(2h))))`, or `None` when the
    /// ceiling already exceeds `h_max` and the depth is skipped.
    pub fn top_p(&self, h: u64) -> Option<u32> {
        let c = ceil_pos((h * h) as f64 * self.gamma2h(h)).max(1);
        floor_log2_ratio(self.h_max, c)
    }

    /// Prefix count required of a candidate at prefix position `t >= 2`.
    pub fn candidate_threshold(&self, t: u32, p: u32) -> u64 {
        debug_assert!(t >= 2);
        ceil_pos((t - 1) as f64 * (1u64 << p) as f64 * self.gamma2h(t as u64 - 1))
    }

    /// Cross-validation evaluations of the `t`-th action of a candidate:
    /// `ceil((t+1) * gamma^(2t) * h_max * (1 - gamma^2)^2)`, at least one.
    pub fn cross_validation_evals(&self, t: u32) -> u64 {
        let g2 = self.gamma * self.gamma;
        ceil_pos((t + 1) as f64 * powi(g2, t) * self.h_max as f64 * (1.0 - g2) * (1.0 - g2))
            .max(1)
    }

    /// Total evaluations the exploration loop can schedule.
    pub fn scheduled_exploration_charge(&self) -> u64 {
        let mut total = 0u64;
        for h in 1..=self.h_max {
            if let Some(top) = self.top_p(h) {
                for p in 0..=top {
                    total += self.quota(h, p) * self.evals(h, p);
                }
            }
        }
        total
    }
}

pub fn run_platypoos<M: GenerativeModel>(
    env: &M,
    n: u64,
    gamma: f64,
    seed: u64,
    opts: &RunOptions,
) -> Result<PlannerRun<M::State>, PlannerError> {
    let sched = PlatypoosSchedule::new(n, gamma)?;
    let mut ledger = BudgetLedger::free(n + 1);
    let mut rng = SplitMix64::stream(seed, &[2]);
    let mut tree = PlanningTree::new(env.num_actions(), gamma, env.root_state());
    let mut col = Collector::new(opts);

    // Initialization: the root is opened h_max times, so every depth-1 node
    // starts with h_max samples (>= 2^p_max).
    tree.open(tree.root(), sched.h_max, env, &mut ledger, &mut rng, col.log_mut())
        .expect("h_max <= n/2 always fits the initial opening");
    col.push(
        opts.collect_trace,
        TraceEvent::Open {
            depth: 0,
            p: None,
            seq: ActionSeq::root(),
            evals: sched.h_max,
            u_hat: 0.0,
        },
    );

    'explore: for h in 1..=sched.h_max {
        let Some(top) = sched.top_p(h) else { continue };
        for p in (0..=top).rev() {
            let evals = sched.evals(h, p);
            let quota = sched.quota(h, p);
            if quota == 0 {
                continue;
            }
            let min_count = sched.eligibility(h, p);
            let selected =
                tree.select_top_nodes(h as u32, quota as usize, |s| s.count >= min_count);
            for id in selected {
                let u = tree.u_hat(id);
                match tree.open(id, evals, env, &mut ledger, &mut rng, col.log_mut()) {
                    Ok(()) => col.push(
                        opts.collect_trace,
                        TraceEvent::Open {
                            depth: h as u32,
                            p: Some(p),
                            seq: tree.seq_of(id),
                            evals,
                            u_hat: u,
                        },
                    ),
                    Err(OpenError::Budget(_)) => break 'explore,
                    Err(e) => unreachable!("selection produced an unopenable node: {e}"),
                }
            }
        }
    }

    // Candidate per level: the best estimate among sampled sequences whose
    // every prefix position t in [2 : h(a)] carries at least
    // candidate_threshold(t, p) samples. Depth-1 sequences qualify at every
    // level, so each candidate set is nonempty.
    let candidates = select_candidates(&tree, &sched);
    for (p, (id, _)) in &candidates {
        col.push(
            opts.collect_trace,
            TraceEvent::Candidate { p: *p, seq: tree.seq_of(*id), u_hat: tree.u_hat(*id) },
        );
    }

    // Cross-validation: fresh evaluations along each candidate's path.
    'cv: for (&p, &(id, _)) in &candidates {
        let mut path = Vec::new();
        let mut cur = id;
        while let Some(parent) = tree.parent(cur) {
            path.push(cur);
            cur = parent;
        }
        path.reverse();
        for (t, &node) in path.iter().enumerate() {
            let evals = sched.cross_validation_evals(t as u32);
            match tree.evaluate_edge(node, evals, env, &mut ledger, &mut rng, col.log_mut()) {
                Ok(()) => col.push(
                    opts.collect_trace,
                    TraceEvent::Evaluate { p, t: t as u32, seq: tree.seq_of(node), evals },
                ),
                Err(OpenError::Budget(_)) => break 'cv,
                Err(e) => unreachable!("candidate path node lost its parent: {e}"),
            }
        }
    }

    // Output: refreshed estimates decide among the candidates; ties go to
    // the smaller level.
    let mut best: Option<(u32, f64)> = None;
    for (&p, &(id, _)) in &candidates {
        let u = tree.u_hat(id);
        if best.is_none_or(|(_, bu)| u > bu) {
            best = Some((p, u));
        }
    }
    let (best_p, _) = best.expect("candidate map is never empty");
    let chosen = candidates[&best_p].1.clone();

    let result = PlannerResult {
        first_action: chosen.first().expect("candidates have depth >= 1"),
        chosen_sequence: chosen,
        candidates: Some(candidates.into_iter().map(|(p, (_, seq))| (p, seq)).collect()),
        budget_used: ledger.charged(),
        max_opened_depth: tree.max_opened_depth(),
    };
    Ok(PlannerRun { result, tree, ledger, trace: col.trace, sample_log: col.log })
}

fn select_candidates<S: Clone>(
    tree: &PlanningTree<S>,
    sched: &PlatypoosSchedule,
) -> BTreeMap<u32, (NodeId, ActionSeq)> {
    let mut best: Vec<Option<(NodeId, f64, ActionSeq)>> =
        alloc::vec![None; sched.p_max as usize + 1];
    tree.walk_sampled(|id, depth, counts| {
        // largest level this node's prefix counts support
        let mut p_ok: Option<u32> = None;
        'levels: for p in (0..=sched.p_max).rev() {
            for t in 2..=depth {
                if counts[t as usize - 1] < sched.candidate_threshold(t, p) {
                    continue 'levels;
                }
            }
            p_ok = Some(p);
            break;
        }
        let Some(p_ok) = p_ok else { return };
        let u = tree.u_hat(id);
        for p in 0..=p_ok {
            let slot = &mut best[p as usize];
            let better = match slot {
                None => true,
                Some((_, bu, bseq)) => u > *bu || (u == *bu && tree.seq_of(id) < *bseq),
            };
            if better {
                *slot = Some((id, u, tree.seq_of(id)));
            }
        }
    });
    best.into_iter()
        .enumerate()
        .map(|(p, slot)| {
            let (id, _, seq) = slot.expect("depth-1 nodes qualify at every level");
            (p as u32, (id, seq))
        })
        .collect()
}
