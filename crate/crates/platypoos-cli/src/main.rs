use clap::{Args, Parser, Subcommand, ValueEnum};
use platypoos_cli::config::{
    parse_diagnose_config, parse_run_config, parse_sweep_config, EnvSpec,
};
use platypoos_cli::diagnose::run_diagnose;
use platypoos_cli::fixtures::{sample_log_to_string, tree_table_to_string};
use platypoos_cli::record::RunRecord;
use platypoos_cli::runner::{execute_rollout, execute_run};
use platypoos_cli::sweep::{run_sweep, sweep_csv, sweep_json};
use platypoos_cli::CliError;
use std::path::PathBuf;

/// Budgeted open-loop planners for deterministic-dynamics MDPs.
#[derive(Parser)]
#[command(name = "platypoos", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One planning run from the root state.
    Run(Common),
    /// Receding-horizon rollout: plan, act, repeat.
    Rollout(Common),
    /// Grid sweep producing one CSV/JSON row per cell and replication.
    Sweep(Common),
    /// Count profiles, branching-factor fit, count comparison, coverage.
    Diagnose(Common),
}

#[derive(Args)]
struct Common {
    /// Path to a key=value config file.
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Run(args) => {
            let text = read(&args.config)?;
            let mut cfg = parse_run_config(&text)?;
            if let Some(seed) = args.seed {
                cfg.master_seed = seed;
            }
            let (record, log) = execute_run(&cfg, cfg.master_seed)?;
            if let (Some(path), Some(log)) = (&cfg.sample_log_path, &log) {
                std::fs::write(path, sample_log_to_string(log))?;
            }
            emit(&args, &run_output(&record, args.format))
        }
        Cmd::Rollout(args) => {
            let text = read(&args.config)?;
            let mut cfg = parse_run_config(&text)?;
            if let Some(seed) = args.seed {
                cfg.master_seed = seed;
            }
            let record = execute_rollout(&cfg, cfg.master_seed)?;
            emit(&args, &run_output(&record, args.format))
        }
        Cmd::Sweep(args) => {
            let text = read(&args.config)?;
            let mut cfg = parse_sweep_config(&text)?;
            if let Some(seed) = args.seed {
                cfg.master_seed = seed;
            }
            let rows = run_sweep(&cfg, args.jobs)?;
            let body = match args.format {
                Format::Csv => sweep_csv(&rows),
                Format::Json => sweep_json(&rows),
            };
            emit(&args, &body)
        }
        Cmd::Diagnose(args) => {
            let text = read(&args.config)?;
            let mut cfg = parse_diagnose_config(&text)?;
            if let Some(seed) = args.seed {
                cfg.master_seed = seed;
            }
            if let Some(path) = &cfg.export_tree {
                let EnvSpec::Synthetic { k, .. } = cfg.env else {
                    return Err(CliError::Config(
                        "diagnose.export_tree requires env.id = synthetic".into(),
                    ));
                };
                let platypoos_cli::runner::BuiltEnv::Synthetic(tree) =
                    platypoos_cli::runner::BuiltEnv::build(&cfg.env, cfg.gamma)?
                else {
                    unreachable!()
                };
                let entries = tree
                    .to_depth_table(cfg.depth)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                std::fs::write(path, tree_table_to_string(k, cfg.depth, &entries))?;
            }
            let report = run_diagnose(&cfg)?;
            emit(&args, &report)
        }
    }
}

fn run_output(record: &RunRecord, format: Format) -> String {
    match format {
        Format::Csv => format!("{}\n{}\n", RunRecord::run_csv_header(), record.run_csv_row()),
        Format::Json => format!("{}\n", record.run_json()),
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn emit(args: &Common, body: &str) -> Result<(), CliError> {
    match &args.out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}
