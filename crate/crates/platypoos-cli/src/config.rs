//! Flat `key = value` configuration with dotted sections.
//!
//! One assignment per line, `#` comments, blank lines ignored. Every key a
//! subcommand does not recognize is an error, reported with its line
//! number, so stale or misspelled settings never pass silently.

use crate::CliError;
use platypoos::env::{KappaTarget, NoiseKind, NoiseModel};
use std::collections::BTreeMap;

/// Parsed but untyped config: key -> (line number, value).
#[derive(Debug, Clone, Default)]
pub struct KvConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let Some((key, value)) = stripped.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {line}: expected `key = value`, got `{raw}`"
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {line}: empty key")));
            }
            if let Some((first_line, _)) = entries.get(&key) {
                return Err(CliError::Config(format!(
                    "line {line}: key `{key}` already set on line {first_line}"
                )));
            }
            entries.insert(key, (line, value));
        }
        Ok(Self { entries })
    }

    /// All entries in key order, for echoing a normalized config.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, (_, v))| (k.as_str(), v.as_str()))
    }

    fn take_raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.remove(key)
    }

    pub fn take_str(&mut self, key: &str) -> Option<String> {
        self.take_raw(key).map(|(_, v)| v)
    }

    pub fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.take_raw(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|_| {
                CliError::Config(format!(
                    "line {line}: key `{key}`: cannot parse `{v}` as {}",
                    std::any::type_name::<T>()
                ))
            }),
        }
    }

    pub fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, CliError> {
        self.take_parsed(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    pub fn take_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.take_parsed(key)?.unwrap_or(default))
    }

    pub fn take_list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        match self.take_raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|part| {
                    part.trim().parse::<T>().map_err(|_| {
                        CliError::Config(format!(
                            "line {line}: key `{key}`: cannot parse item `{}`",
                            part.trim()
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    /// Fails if any unconsumed (unknown) keys remain.
    pub fn ensure_empty(&self) -> Result<(), CliError> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let mut msgs: Vec<String> = self
            .entries
            .iter()
            .map(|(k, (line, _))| format!("`{k}` (line {line})"))
            .collect();
        msgs.sort();
        Err(CliError::Config(format!("unknown keys: {}", msgs.join(", "))))
    }
}

/// Environment selection plus parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    Toy {
        shift: f64,
        reward_bound: f64,
        noise: NoiseModel,
    },
    Synthetic {
        k: usize,
        nu: f64,
        rho: f64,
        kappa: KappaTarget,
        path_seed: u64,
        noise: NoiseModel,
    },
    RandomTree {
        k: usize,
        depth: u32,
        reward_bound: f64,
        table_seed: u64,
        noise: NoiseModel,
    },
}

impl EnvSpec {
    pub fn id(&self) -> &'static str {
        match self {
            EnvSpec::Toy { .. } => "toy",
            EnvSpec::Synthetic { .. } => "synthetic",
            EnvSpec::RandomTree { .. } => "random-tree",
        }
    }

    pub fn noise(&self) -> NoiseModel {
        match self {
            EnvSpec::Toy { noise, .. }
            | EnvSpec::Synthetic { noise, .. }
            | EnvSpec::RandomTree { noise, .. } => *noise,
        }
    }

    /// Reward shift the reporting subtracts back out of rollout returns.
    pub fn shift(&self) -> f64 {
        match self {
            EnvSpec::Toy { shift, .. } => *shift,
            _ => 0.0,
        }
    }

    pub fn reward_bound_hint(&self) -> f64 {
        match self {
            EnvSpec::Toy { reward_bound, .. } | EnvSpec::RandomTree { reward_bound, .. } => {
                *reward_bound
            }
            EnvSpec::Synthetic { nu, rho, .. } => nu * (1.0 - rho),
        }
    }

    pub fn with_noise(&self, noise: NoiseModel) -> EnvSpec {
        let mut out = self.clone();
        match &mut out {
            EnvSpec::Toy { noise: n, .. }
            | EnvSpec::Synthetic { noise: n, .. }
            | EnvSpec::RandomTree { noise: n, .. } => *n = noise,
        }
        out
    }

    /// Material parameters that seed per-cell RNG streams. Planner-side
    /// assumptions (assumed noise/reward ranges) are deliberately absent so
    /// planners that ignore them produce identical rows across those grid
    /// axes.
    pub fn fingerprint(&self) -> Vec<u64> {
        let noise = self.noise();
        let mut v = vec![
            platypoos::rng::mix(self.id().len() as u64 ^ self.id().as_bytes()[0] as u64),
            noise.kind.name().len() as u64,
            noise.range.to_bits(),
        ];
        match self {
            EnvSpec::Toy { shift, reward_bound, .. } => {
                v.push(shift.to_bits());
                v.push(reward_bound.to_bits());
            }
            EnvSpec::Synthetic { k, nu, rho, kappa, path_seed, .. } => {
                v.push(*k as u64);
                v.push(nu.to_bits());
                v.push(rho.to_bits());
                v.push(match kappa {
                    KappaTarget::One => 0,
                    KappaTarget::Branching { period } => *period as u64,
                });
                v.push(*path_seed);
            }
            EnvSpec::RandomTree { k, depth, reward_bound, table_seed, .. } => {
                v.push(*k as u64);
                v.push(*depth as u64);
                v.push(reward_bound.to_bits());
                v.push(*table_seed);
            }
        }
        v
    }
}

fn parse_noise(kv: &mut KvConfig) -> Result<NoiseModel, CliError> {
    let kind = kv.take_str("env.noise").unwrap_or_else(|| "none".into());
    let range: f64 = kv.take_or("env.noise_range", 0.0)?;
    if range < 0.0 {
        return Err(CliError::Config("env.noise_range must be >= 0".into()));
    }
    let kind = match kind.as_str() {
        "none" => NoiseKind::None,
        "uniform" => NoiseKind::Uniform,
        "rademacher" => NoiseKind::Rademacher,
        "truncated-gaussian" => NoiseKind::TruncatedGaussian,
        other => {
            return Err(CliError::Config(format!(
                "env.noise `{other}` unknown; use none, uniform, rademacher or truncated-gaussian"
            )))
        }
    };
    if kind != NoiseKind::None && range == 0.0 {
        return Err(CliError::Config("env.noise_range must be > 0 for a noisy kind".into()));
    }
    Ok(NoiseModel::new(kind, range))
}

pub fn parse_env(kv: &mut KvConfig) -> Result<(EnvSpec, f64), CliError> {
    let id = kv
        .take_str("env.id")
        .ok_or_else(|| CliError::Config("missing required key `env.id`".into()))?;
    let gamma: f64 = kv.require("env.gamma")?;
    if !(0.0..1.0).contains(&gamma) {
        return Err(CliError::Config(format!("env.gamma must be in [0, 1), got {gamma}")));
    }
    let noise = parse_noise(kv)?;
    let spec = match id.as_str() {
        "toy" => EnvSpec::Toy {
            shift: kv.take_or("env.shift", 100.0)?,
            reward_bound: kv.take_or("env.reward_bound", 130.0)?,
            noise,
        },
        "synthetic" => {
            let kappa = match kv.take_str("env.kappa").unwrap_or_else(|| "one".into()).as_str() {
                "one" => KappaTarget::One,
                other => match other.strip_prefix("branch:").and_then(|p| p.parse::<u32>().ok()) {
                    Some(period) if period >= 1 => KappaTarget::Branching { period },
                    _ => {
                        return Err(CliError::Config(format!(
                            "env.kappa `{other}` unknown; use `one` or `branch:<period>`"
                        )))
                    }
                },
            };
            EnvSpec::Synthetic {
                k: kv.take_or("env.k", 2usize)?,
                nu: kv.take_or("env.nu", 1.0)?,
                rho: kv.require("env.rho")?,
                kappa,
                path_seed: kv.take_or("env.path_seed", 0u64)?,
                noise,
            }
        }
        "random-tree" => EnvSpec::RandomTree {
            k: kv.take_or("env.k", 2usize)?,
            depth: kv.require("env.depth")?,
            reward_bound: kv.take_or("env.reward_bound", 1.0)?,
            table_seed: kv.take_or("env.table_seed", 0u64)?,
            noise,
        },
        other => {
            return Err(CliError::Config(format!(
                "env.id `{other}` unknown; valid ids: toy, synthetic, random-tree"
            )))
        }
    };
    Ok((spec, gamma))
}

pub const PLANNER_IDS: [&str; 6] =
    ["platypoos", "sequool", "sequool-reset", "olop", "uniform-naive", "uniform-good"];

#[derive(Debug, Clone, PartialEq)]
pub enum PlannerSpec {
    Platypoos,
    Sequool,
    SequoolReset,
    Olop { btilde: f64, rmax_tilde: f64 },
    UniformNaive { horizon: u32 },
    UniformGood { horizon: u32 },
}

impl PlannerSpec {
    pub fn id(&self) -> &'static str {
        match self {
            PlannerSpec::Platypoos => "platypoos",
            PlannerSpec::Sequool => "sequool",
            PlannerSpec::SequoolReset => "sequool-reset",
            PlannerSpec::Olop { .. } => "olop",
            PlannerSpec::UniformNaive { .. } => "uniform-naive",
            PlannerSpec::UniformGood { .. } => "uniform-good",
        }
    }

    pub fn btilde(&self) -> Option<f64> {
        match self {
            PlannerSpec::Olop { btilde, .. } => Some(*btilde),
            _ => None,
        }
    }

    pub fn rmax_tilde(&self) -> Option<f64> {
        match self {
            PlannerSpec::Olop { rmax_tilde, .. } => Some(*rmax_tilde),
            _ => None,
        }
    }

    /// Build a planner from its id and the optional assumption/horizon
    /// parameters, validating that required ones are present.
    pub fn from_parts(
        id: &str,
        btilde: Option<f64>,
        rmax_tilde: Option<f64>,
        horizon: Option<u32>,
    ) -> Result<Self, CliError> {
        match id {
            "platypoos" => Ok(PlannerSpec::Platypoos),
            "sequool" => Ok(PlannerSpec::Sequool),
            "sequool-reset" => Ok(PlannerSpec::SequoolReset),
            "olop" => match (btilde, rmax_tilde) {
                (Some(btilde), Some(rmax_tilde)) => Ok(PlannerSpec::Olop { btilde, rmax_tilde }),
                _ => Err(CliError::Config(
                    "olop requires planner.btilde and planner.rmax_tilde (assumed noise and reward ranges)"
                        .into(),
                )),
            },
            "uniform-naive" | "uniform-good" => {
                let horizon = horizon.ok_or_else(|| {
                    CliError::Config("uniform planners require planner.horizon".into())
                })?;
                Ok(if id == "uniform-naive" {
                    PlannerSpec::UniformNaive { horizon }
                } else {
                    PlannerSpec::UniformGood { horizon }
                })
            }
            other => Err(CliError::Config(format!(
                "planner.id `{other}` unknown; valid ids: {}",
                PLANNER_IDS.join(", ")
            ))),
        }
    }
}

fn parse_planner(kv: &mut KvConfig) -> Result<PlannerSpec, CliError> {
    let id = kv
        .take_str("planner.id")
        .ok_or_else(|| CliError::Config("missing required key `planner.id`".into()))?;
    let btilde = kv.take_parsed::<f64>("planner.btilde")?;
    let rmax_tilde = kv.take_parsed::<f64>("planner.rmax_tilde")?;
    let horizon = kv.take_parsed::<u32>("planner.horizon")?;
    PlannerSpec::from_parts(&id, btilde, rmax_tilde, horizon)
}

/// Config for `run` and `rollout`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub planner: PlannerSpec,
    pub env: EnvSpec,
    pub gamma: f64,
    pub n: u64,
    pub master_seed: u64,
    pub rollout_steps: u32,
    pub sample_log_path: Option<String>,
    /// Normalized config echo, key order.
    pub echo: Vec<(String, String)>,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig, CliError> {
    let mut kv = KvConfig::parse(text)?;
    let echo = kv.entries().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let planner = parse_planner(&mut kv)?;
    let (env, gamma) = parse_env(&mut kv)?;
    let n = kv.require("budget.n")?;
    let master_seed = kv.take_or("seeds.master", 0u64)?;
    let rollout_steps = kv.take_or("rollout.steps", 20u32)?;
    let sample_log_path = kv.take_str("output.sample_log");
    kv.ensure_empty()?;
    Ok(RunConfig { planner, env, gamma, n, master_seed, rollout_steps, sample_log_path, echo })
}

/// One grid axis value for the assumed noise range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BtildeSpec {
    /// Hand the planner the true range of the cell.
    Match,
    Value(f64),
}

/// Config for `sweep`.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub planner_ids: Vec<String>,
    pub budgets: Vec<u64>,
    pub noise_ranges: Vec<f64>,
    pub btildes: Vec<BtildeSpec>,
    pub rmax_tildes: Vec<f64>,
    pub replications: u32,
    pub rollout_steps: u32,
    pub horizon: Option<u32>,
    pub env: EnvSpec,
    pub gamma: f64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Plan,
    Rollout,
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig, CliError> {
    let mut kv = KvConfig::parse(text)?;
    let (env, gamma) = parse_env(&mut kv)?;
    let mode = match kv.take_str("sweep.mode").unwrap_or_else(|| "plan".into()).as_str() {
        "plan" => SweepMode::Plan,
        "rollout" => SweepMode::Rollout,
        other => {
            return Err(CliError::Config(format!(
                "sweep.mode `{other}` unknown; use `plan` or `rollout`"
            )))
        }
    };
    let planner_ids = kv
        .take_list::<String>("sweep.planners")?
        .ok_or_else(|| CliError::Config("missing required key `sweep.planners`".into()))?;
    for id in &planner_ids {
        if !PLANNER_IDS.contains(&id.as_str()) {
            return Err(CliError::Config(format!(
                "sweep.planners: `{id}` unknown; valid ids: {}",
                PLANNER_IDS.join(", ")
            )));
        }
    }
    let budgets = kv
        .take_list::<u64>("sweep.budgets")?
        .ok_or_else(|| CliError::Config("missing required key `sweep.budgets`".into()))?;
    let noise_ranges =
        kv.take_list::<f64>("sweep.noise_ranges")?.unwrap_or_else(|| vec![env.noise().range]);
    let btildes = match kv.take_str("sweep.btildes") {
        None => vec![BtildeSpec::Match],
        Some(raw) => raw
            .split(',')
            .map(|part| {
                let part = part.trim();
                if part == "match" {
                    Ok(BtildeSpec::Match)
                } else {
                    part.parse::<f64>().map(BtildeSpec::Value).map_err(|_| {
                        CliError::Config(format!("sweep.btildes: cannot parse `{part}`"))
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let rmax_tildes =
        kv.take_list::<f64>("sweep.rmax_tildes")?.unwrap_or_else(|| vec![env.reward_bound_hint()]);
    let replications = kv.take_or("sweep.replications", 1u32)?;
    let rollout_steps = kv.take_or("rollout.steps", 20u32)?;
    let horizon = kv.take_parsed::<u32>("planner.horizon")?;
    let master_seed = kv.take_or("seeds.master", 0u64)?;
    kv.ensure_empty()?;
    Ok(SweepConfig {
        mode,
        planner_ids,
        budgets,
        noise_ranges,
        btildes,
        rmax_tildes,
        replications,
        rollout_steps,
        horizon,
        env,
        gamma,
        master_seed,
    })
}

/// Config for `diagnose`.
#[derive(Debug, Clone)]
pub struct DiagnoseConfig {
    pub env: EnvSpec,
    pub gamma: f64,
    pub depth: u32,
    pub nu: f64,
    pub rho: f64,
    pub c: f64,
    pub eps_points: u32,
    pub value_horizon: Option<u32>,
    pub trace_n: u64,
    pub coverage: Option<CoverageSettings>,
    pub export_tree: Option<String>,
    pub master_seed: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct CoverageSettings {
    pub n: u64,
    pub delta: f64,
    pub replications: u32,
}

pub fn parse_diagnose_config(text: &str) -> Result<DiagnoseConfig, CliError> {
    let mut kv = KvConfig::parse(text)?;
    let (env, gamma) = parse_env(&mut kv)?;
    let depth = kv.require("diagnose.depth")?;
    let nu = kv.take_or("diagnose.nu", 1.0)?;
    let rho = kv.take_or("diagnose.rho", gamma)?;
    let c = kv.take_or("diagnose.c", 2.0)?;
    let eps_points = kv.take_or("diagnose.eps_points", 20u32)?;
    let value_horizon = kv.take_parsed::<u32>("diagnose.value_horizon")?;
    let trace_n = kv.take_or("diagnose.trace_n", 1000u64)?;
    let coverage = match (
        kv.take_parsed::<u64>("diagnose.coverage_n")?,
        kv.take_parsed::<f64>("diagnose.coverage_delta")?,
        kv.take_parsed::<u32>("diagnose.coverage_replications")?,
    ) {
        (None, None, None) => None,
        (Some(n), Some(delta), Some(replications)) => {
            Some(CoverageSettings { n, delta, replications })
        }
        _ => {
            return Err(CliError::Config(
                "coverage needs all of diagnose.coverage_n, diagnose.coverage_delta, diagnose.coverage_replications"
                    .into(),
            ))
        }
    };
    let export_tree = kv.take_str("diagnose.export_tree");
    let master_seed = kv.take_or("seeds.master", 0u64)?;
    kv.ensure_empty()?;
    Ok(DiagnoseConfig {
        env,
        gamma,
        depth,
        nu,
        rho,
        c,
        eps_points,
        value_horizon,
        trace_n,
        coverage,
        export_tree,
        master_seed,
    })
}
