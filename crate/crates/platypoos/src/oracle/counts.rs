//! Near-optimality counting: how many depth-`h` nodes sit within `eps` of
//! the optimum, by prefix value `u` and by achievable value `v`, plus the
//! branching-factor fit and the two-sided count comparison.

use super::ValueOracle;
use crate::env::OracleAccess;
use crate::math::{pow, powi};
use crate::seq::Action;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountKind {
    U,
    V,
}

/// Sorted per-depth value tables; counts for any threshold fall out of a
/// binary search, so no epsilon grid is baked in.
#[derive(Debug, Clone)]
pub struct CountProfile {
    pub v_star: f64,
    /// Index h in 0..=depth; values sorted descending.
    u_by_depth: Vec<Vec<f64>>,
    v_by_depth: Vec<Vec<f64>>,
}

/// Exhaustive enumeration of all nodes to `count_depth`. Node values are
/// truncated at `value_horizon` (exact for trees whose rewards end above
/// that horizon).
pub fn count_near_optimal<M: OracleAccess>(
    env: &M,
    gamma: f64,
    count_depth: u32,
    value_horizon: u32,
) -> CountProfile {
    let k = env.num_actions();
    let mut nodes: u64 = 1;
    for _ in 0..count_depth {
        nodes = nodes.saturating_mul(k as u64);
        assert!(nodes <= 10_000_000, "count enumeration too large");
    }

    let mut oracle = ValueOracle::new(env, gamma);
    let mut u_by_depth: Vec<Vec<f64>> = (0..=count_depth).map(|_| Vec::new()).collect();
    let mut v_by_depth: Vec<Vec<f64>> = (0..=count_depth).map(|_| Vec::new()).collect();

    // DFS carrying (state, depth, u so far)
    let root = env.root_state();
    let v_star = oracle.value(&root, value_horizon);
    u_by_depth[0].push(0.0);
    v_by_depth[0].push(v_star);

    let mut stack = alloc::vec![(root, 0u32, 0.0f64)];
    while let Some((state, depth, u)) = stack.pop() {
        if depth == count_depth {
            continue;
        }
        for a in 0..k as Action {
            let next = env.step(&state, a);
            let u2 = u + powi(gamma, depth) * env.true_mean(&state, a);
            let v2 = u2
                + powi(gamma, depth + 1)
                    * oracle.value(&next, value_horizon.saturating_sub(depth + 1));
            u_by_depth[depth as usize + 1].push(u2);
            v_by_depth[depth as usize + 1].push(v2);
            stack.push((next, depth + 1, u2));
        }
    }
    for column in u_by_depth.iter_mut().chain(v_by_depth.iter_mut()) {
        column.sort_by(|a, b| b.total_cmp(a));
    }
    CountProfile { v_star, u_by_depth, v_by_depth }
}

impl CountProfile {
    pub fn depth(&self) -> u32 {
        self.u_by_depth.len() as u32 - 1
    }

    fn count(values: &[f64], threshold: f64) -> usize {
        values.partition_point(|&v| v >= threshold)
    }

    /// Number of depth-`h` nodes with `u(a) >= v_star - eps`.
    pub fn n_u(&self, h: u32, eps: f64) -> usize {
        Self::count(&self.u_by_depth[h as usize], self.v_star - eps)
    }

    /// Number of depth-`h` nodes with `v(a) >= v_star - eps`.
    pub fn n_v(&self, h: u32, eps: f64) -> usize {
        Self::count(&self.v_by_depth[h as usize], self.v_star - eps)
    }

    pub fn n(&self, kind: CountKind, h: u32, eps: f64) -> usize {
        match kind {
            CountKind::U => self.n_u(h, eps),
            CountKind::V => self.n_v(h, eps),
        }
    }
}

/// Smallest branching factor `kappa` satisfying
/// `N_h(3 nu rho^h) <= C * kappa^h` for all `1 <= h <= depth` at the given
/// explicit constant `C`, clipped below at one:
/// `max_h (N_h / C)^(1/h)`.
pub fn fit_kappa(profile: &CountProfile, nu: f64, rho: f64, c: f64, kind: CountKind) -> f64 {
    assert!(c > 1.0);
    let mut kappa: f64 = 1.0;
    for h in 1..=profile.depth() {
        let n_h = profile.n(kind, h, 3.0 * nu * powi(rho, h)) as f64;
        kappa = kappa.max(pow(n_h / c, 1.0 / h as f64));
    }
    kappa
}

/// Outcome of the two-sided count comparison
/// `N_v(eps) <= N_u(eps + tail_h)` and `N_u(eps) <= N_v(eps + tail_h)`
/// with `tail_h = gamma^h * reward_bound / (1 - gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Report {
    pub pass: bool,
    pub checks: usize,
    /// First violating `(h, eps, direction)`, direction naming the failing
    /// inequality side.
    pub first_violation: Option<(u32, f64, &'static str)>,
}

pub fn check_prop2(
    profile: &CountProfile,
    gamma: f64,
    reward_bound: f64,
    eps_grid: &[f64],
) -> Prop2Report {
    let mut checks = 0;
    for h in 0..=profile.depth() {
        let tail = powi(gamma, h) * reward_bound / (1.0 - gamma);
        for &eps in eps_grid {
            checks += 2;
            if profile.n_v(h, eps) > profile.n_u(h, eps + tail) {
                return Prop2Report { pass: false, checks, first_violation: Some((h, eps, "N_v(eps) <= N_u(eps + tail)")) };
            }
            if profile.n_u(h, eps) > profile.n_v(h, eps + tail) {
                return Prop2Report { pass: false, checks, first_violation: Some((h, eps, "N_u(eps) <= N_v(eps + tail)")) };
            }
        }
    }
    Prop2Report { pass: true, checks, first_violation: None }
}
