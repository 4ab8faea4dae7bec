//! Structural diagnostics for an instance: near-optimality count profiles,
//! the fitted branching factor, the two-sided count comparison, estimate
//! concentration coverage, and per-level deepest-optimal-prefix depths from
//! a traced run.

use crate::config::DiagnoseConfig;
use crate::record::fmt_sig;
use crate::with_env;
use crate::CliError;
use platypoos::env::OracleAccess;
use platypoos::math::powi;
use platypoos::oracle::{
    check_prop2, concentration_coverage, count_near_optimal, fit_kappa, CountKind, ValueOracle,
};
use platypoos::planners::{run_platypoos, PlatypoosSchedule, RunOptions};
use platypoos::trace::TraceEvent;
use std::fmt::Write as _;

pub fn run_diagnose(cfg: &DiagnoseConfig) -> Result<String, CliError> {
    let spec = cfg.env.clone();
    let report = with_env!(&spec, cfg.gamma, |env| diagnose_in(&env, cfg)?);
    Ok(report)
}

fn diagnose_in<M: OracleAccess>(env: &M, cfg: &DiagnoseConfig) -> Result<String, CliError> {
    let mut out = String::new();
    let value_horizon = cfg.value_horizon.unwrap_or_else(|| {
        // deep enough that the tail is negligible next to the count bands
        let gamma = cfg.gamma.max(0.5);
        ((platypoos::math::log(1e-9) / platypoos::math::log(gamma)).ceil() as u32).clamp(40, 600)
    });
    let _ = writeln!(out, "env = {}", cfg.env.id());
    let _ = writeln!(out, "gamma = {}", fmt_sig(cfg.gamma));
    let _ = writeln!(out, "depth = {}", cfg.depth);
    let _ = writeln!(out, "value_horizon = {value_horizon}");
    let _ = writeln!(out, "nu = {}", fmt_sig(cfg.nu));
    let _ = writeln!(out, "rho = {}", fmt_sig(cfg.rho));

    let profile = count_near_optimal(env, cfg.gamma, cfg.depth, value_horizon);
    let _ = writeln!(out, "v_star = {}", fmt_sig(profile.v_star));

    let _ = writeln!(out, "\n# near-optimal counts at eps = 3 * nu * rho^h");
    let _ = writeln!(out, "h\teps\tn_u\tn_v");
    for h in 0..=cfg.depth {
        let eps = 3.0 * cfg.nu * powi(cfg.rho, h);
        let _ = writeln!(out, "{h}\t{}\t{}\t{}", fmt_sig(eps), profile.n_u(h, eps), profile.n_v(h, eps));
    }

    let _ = writeln!(out, "\nkappa.c = {}", fmt_sig(cfg.c));
    let ku = fit_kappa(&profile, cfg.nu, cfg.rho, cfg.c, CountKind::U);
    let kv = fit_kappa(&profile, cfg.nu, cfg.rho, cfg.c, CountKind::V);
    let _ = writeln!(out, "kappa.u_hat = {}", fmt_sig(ku));
    let _ = writeln!(out, "kappa.v_hat = {}", fmt_sig(kv));

    // two-sided count comparison on an even grid over the value range
    let top = env.reward_bound() / (1.0 - cfg.gamma);
    let grid: Vec<f64> = (0..cfg.eps_points.max(2))
        .map(|i| top * i as f64 / (cfg.eps_points.max(2) - 1) as f64)
        .collect();
    let prop2 = check_prop2(&profile, cfg.gamma, env.reward_bound(), &grid);
    let _ = writeln!(out, "\nprop2.checks = {}", prop2.checks);
    let _ = writeln!(out, "prop2.verdict = {}", if prop2.pass { "pass" } else { "fail" });
    if let Some((h, eps, side)) = prop2.first_violation {
        let _ = writeln!(out, "prop2.first_violation = h={h} eps={} side={side}", fmt_sig(eps));
    }

    if let Some(cov) = cfg.coverage {
        let report = concentration_coverage(
            env,
            cfg.gamma,
            cov.n,
            cov.delta,
            cov.replications,
            cfg.master_seed,
        )?;
        let _ = writeln!(out, "\ncoverage.n = {}", cov.n);
        let _ = writeln!(out, "coverage.delta = {}", fmt_sig(cov.delta));
        let _ = writeln!(out, "coverage.replications = {}", report.replications);
        let _ = writeln!(out, "coverage.violations = {}", report.violations);
        let _ = writeln!(out, "coverage.rate = {}", fmt_sig(report.rate));
        let _ = writeln!(out, "coverage.pairs_checked = {}", report.pairs_checked);
    }

    // deepest opened optimal-prefix depth per level, from one traced run
    if let Ok(sched) = PlatypoosSchedule::new(cfg.trace_n, cfg.gamma) {
        let opts = RunOptions { collect_trace: true, collect_sample_log: false };
        let run = run_platypoos(env, cfg.trace_n, cfg.gamma, cfg.master_seed, &opts)?;
        let mut oracle = ValueOracle::new(env, cfg.gamma);
        let v_star = oracle.value(&env.root_state(), value_horizon);
        let tol = 1e-9 * v_star.abs().max(1.0);
        let mut bottom = vec![0u32; sched.p_max as usize + 1];
        for event in &run.trace {
            if let TraceEvent::Open { depth, p: Some(p), seq, .. } = event {
                if oracle.node_value(seq, value_horizon) >= v_star - tol {
                    let slot = &mut bottom[*p as usize];
                    *slot = (*slot).max(*depth);
                }
            }
        }
        let _ = writeln!(out, "\n# deepest opened optimal prefix per level (traced run, n = {})", cfg.trace_n);
        let _ = writeln!(out, "p\tbottom_depth");
        for (p, depth) in bottom.iter().enumerate() {
            let _ = writeln!(out, "{p}\t{depth}");
        }
    }

    Ok(out)
}
