//! Empirical check of the estimate-concentration event.
//!
//! A replication runs the noisy planner's sampling and then audits every
//! sampled sequence `a` and level `p`: whenever all prefix positions
//! `t in [2 : h(a)]` carry at least `ceil((t-1) 2^p gamma^(2(t-1)))`
//! samples, the estimate must satisfy
//! `|u_hat(a) - u(a)| <= b * sqrt(p_max * ln(4n/delta) / 2^(p+1))`.
//! The reported violation rate is measured, not asserted; callers compare
//! it to `delta` themselves.

use super::ValueOracle;
use crate::env::OracleAccess;
use crate::math::{log, sqrt};
use crate::planners::{run_platypoos, PlatypoosSchedule, RunOptions};
use crate::rng::SplitMix64;
use crate::PlannerError;

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub replications: u32,
    /// Replications containing at least one out-of-interval estimate.
    pub violations: u32,
    pub rate: f64,
    /// Eligible (sequence, level) pairs audited across all replications.
    pub pairs_checked: u64,
}

pub fn concentration_coverage<M: OracleAccess>(
    env: &M,
    gamma: f64,
    n: u64,
    delta: f64,
    replications: u32,
    seed: u64,
) -> Result<CoverageReport, PlannerError> {
    assert!(delta > 0.0 && replications >= 1);
    let sched = PlatypoosSchedule::new(n, gamma)?;
    let noise_range = env.noise().range;
    let log_term = log(4.0 * n as f64 / delta);
    let opts = RunOptions { collect_trace: false, collect_sample_log: false };

    let mut violations = 0u32;
    let mut pairs_checked = 0u64;
    for rep in 0..replications {
        let run_seed = SplitMix64::stream(seed, &[rep as u64]).next_u64();
        let run = run_platypoos(env, n, gamma, run_seed, &opts)?;
        let tree = &run.tree;
        let oracle = ValueOracle::new(env, gamma);
        let mut violated = false;
        tree.walk_sampled(|id, depth, counts| {
            if violated {
                return;
            }
            let mut deviation: Option<f64> = None;
            for p in 0..=sched.p_max {
                let eligible = (2..=depth)
                    .all(|t| counts[t as usize - 1] >= sched.candidate_threshold(t, p));
                if !eligible {
                    continue;
                }
                pairs_checked += 1;
                let dev = *deviation.get_or_insert_with(|| {
                    let seq = tree.seq_of(id);
                    (tree.u_hat(id) - oracle.u_value(&seq)).abs()
                });
                let bound = noise_range
                    * sqrt(sched.p_max as f64 * log_term / (1u64 << (p + 1)) as f64);
                // small float guard so exact zero-noise estimates do not
                // trip a zero-width interval
                if dev > bound + 1e-9 * (1.0 + dev) {
                    violated = true;
                    return;
                }
            }
        });
        if violated {
            violations += 1;
        }
    }
    Ok(CoverageReport {
        replications,
        violations,
        rate: violations as f64 / replications as f64,
        pairs_checked,
    })
}
