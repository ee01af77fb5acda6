use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use restless_bench::config::parse_oracle;
use restless_bench::experiment::compute_mu_star;
use restless_bench::timing::timing_csv;
use restless_bench::verify::verify_lemmas;
use restless_bench::{
    resolve_instance, run_experiment, timing_benchmark, ExperimentConfig, PolicySpec, VerifyConfig,
};
use restless_ucb::{OracleKind, SolveSettings};

#[derive(Parser)]
#[command(
    name = "restless-bench",
    version,
    about = "Restless bandit experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replicated regret experiment.
    Run(RunArgs),
    /// Solve an instance offline and write the policy table.
    Solve(SolveArgs),
    /// Run the property verification suite.
    Verify(VerifyArgs),
    /// Time full runs for several arm counts.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    /// Builtin instance name or instance file.
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tau_max: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// restless-ucb, ts-9, ts-4, ts, fixed-<arm>, oracle or myopic.
    #[arg(long)]
    policy: Option<String>,
    /// exact or myopic.
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Small sample sizes for a fast smoke run.
    #[arg(long)]
    quick: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "restless-ucb")]
    policy: String,
    #[arg(long, default_value = "myopic")]
    oracle: String,
    #[arg(long, default_value_t = 500_000)]
    horizon: u64,
    #[arg(long, default_value_t = 50)]
    reps: u64,
    /// Arm counts to time.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    arms: Vec<usize>,
}

fn run(args: RunArgs) -> Result<bool> {
    let mut cfg = match &args.common.config {
        Some(p) => ExperimentConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.common.instance {
        cfg.instance = v;
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.common.tau_max {
        cfg.tau_max = Some(v);
    }
    if let Some(v) = args.common.out {
        cfg.out = Some(v);
    }
    if let Some(v) = args.policy {
        cfg.policy = v.parse()?;
    }
    if let Some(v) = args.oracle {
        cfg.oracle = parse_oracle(&v)?;
    }
    if let Some(v) = args.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = args.reps {
        cfg.reps = v;
    }
    let result = run_experiment(&cfg)?;
    let summary = result.summary();
    println!(
        "{} on {}: T = {}, {} reps, mu* = {:.9}, final regret {:.3} (sd {:.3})",
        summary.policy,
        summary.instance,
        summary.horizon,
        summary.reps,
        summary.mu_star.value,
        summary.final_mean_regret,
        summary.final_std_regret
    );
    if cfg.out.is_none() {
        print!("{}", result.aggregate_csv()?);
    }
    Ok(true)
}

fn solve(args: SolveArgs) -> Result<bool> {
    let mut settings = SolveSettings::default();
    let mut instance = "paper-1".to_string();
    if let Some(p) = &args.common.config {
        let text = fs::read_to_string(p)?;
        let cfg = ExperimentConfig::from_toml_str(&text)?;
        instance = cfg.instance;
        settings.tau_max = cfg.tau_max;
    }
    if let Some(v) = args.common.instance {
        instance = v;
    }
    if let Some(v) = args.common.tau_max {
        settings.tau_max = Some(v);
    }
    let inst = resolve_instance(&instance)?;
    let table = settings.solve(&inst)?;
    let mu = compute_mu_star(&inst, &settings)?;
    println!(
        "{instance}: gain {:.12} (epsilon {:.1e}, tau_max {}, {} belief states, truncation allowance {:.3e})",
        table.gain(),
        table.epsilon(),
        table.tau_max(),
        table.states().len(),
        mu.truncation_bound.unwrap_or(f64::NAN)
    );
    match args.common.out {
        Some(path) => table.save(&path)?,
        None => print!("{}", table.to_text()),
    }
    Ok(true)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let mut cfg = match (&args.common.config, args.quick) {
        (Some(p), _) => VerifyConfig::from_toml_str(&fs::read_to_string(p)?)?,
        (None, true) => VerifyConfig::quick(),
        (None, false) => VerifyConfig::default(),
    };
    if let Some(v) = args.common.instance {
        cfg.instance = v;
    }
    if let Some(v) = args.common.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.common.tau_max {
        cfg.tau_max = Some(v);
    }
    let report = verify_lemmas(&cfg)?;
    for c in &report.checks {
        println!(
            "{:<8} {:<32} {}",
            format!("{:?}", c.status).to_uppercase(),
            c.name,
            c.detail
        );
    }
    let json = report.to_json();
    match args.common.out {
        Some(path) => fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(report.passed)
}

fn bench(args: BenchArgs) -> Result<bool> {
    if args.arms.is_empty() {
        bail!("--arms needs at least one value");
    }
    let policy: PolicySpec = args.policy.parse()?;
    let oracle: OracleKind = parse_oracle(&args.oracle)?;
    let rows = timing_benchmark(
        &args.arms,
        &policy,
        oracle,
        args.horizon,
        args.reps,
        args.common.seed.unwrap_or(0),
    )?;
    let csv = timing_csv(&rows)?;
    match args.common.out {
        Some(path) => fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
