use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use monotest::harness::{
    run_experiment_with, sweep_configs, write_report, write_report_to, ExperimentConfig, Format, HarnessError, Report,
};
use monotest::instances::{Family, FamilyParams, InstanceSpec};
use monotest::oracles::AccessModel;
use monotest::testers::{TestParams, TesterKind, ToleranceParams};
use monotest::Constants;

#[derive(Parser)]
#[command(name = "monotest", version, about = "Run monotonicity testers on seeded instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run(RunArgs),
    /// Print an instance with its exact distance to monotone.
    Certify(InstanceArgs),
    /// Run one experiment per (n, eps) cell.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Instance family.
    #[arg(long)]
    family: String,
    /// Domain size.
    #[arg(long, default_value_t = 4096)]
    n: usize,
    /// Distance parameter of eval_lb_d1/d2 and perturbed_monotone.
    #[arg(long)]
    inst_eps: Option<f64>,
    /// Decomposition parameter of staircase families.
    #[arg(long)]
    inst_alpha: Option<f64>,
    /// Band width of the eval_lb families.
    #[arg(long)]
    inst_m: Option<usize>,
    /// Base of the harpeled family.
    #[arg(long)]
    inst_l: Option<usize>,
    /// Raise a block of the harpeled sequence instead of hiding a spike.
    #[arg(long)]
    modified: bool,
    /// Seed of randomized families.
    #[arg(long, default_value_t = 0)]
    inst_seed: u64,
}

impl InstanceArgs {
    fn spec(&self) -> Result<InstanceSpec, String> {
        let p = FamilyParams {
            eps: self.inst_eps,
            alpha: self.inst_alpha,
            m: self.inst_m,
            l: self.inst_l,
            modified: self.modified,
            seed: self.inst_seed,
        };
        let family = Family::from_name(&self.family, &p).map_err(|e| e.to_string())?;
        Ok(InstanceSpec::new(family, self.n))
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long)]
    tester: String,
    /// Access model; defaults to the tester's own.
    #[arg(long)]
    model: Option<String>,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0.3)]
    eps: f64,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Growth slack of the exponential-property tester.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override a constant, e.g. `--set c_u=4`.
    #[arg(long = "set", value_name = "KEY=VAL")]
    set: Vec<String>,
    /// Report file; a summary goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
    /// Worker threads (MONOTEST_THREADS or all cores by default).
    #[arg(long)]
    threads: Option<usize>,
    /// Record per-trial wall time.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated domain sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    /// Comma-separated accuracy parameters.
    #[arg(long, value_delimiter = ',', required = true)]
    epss: Vec<f64>,
    /// Directory receiving one report per cell.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::Instance(_) => Failure::Config(e.to_string()),
            e => Failure::Run(e.to_string()),
        }
    }
}

fn config(a: &RunArgs) -> Result<(ExperimentConfig, Format), Failure> {
    let bad = Failure::Config;
    let tester: TesterKind = a.tester.parse().map_err(bad)?;
    let model: AccessModel = match &a.model {
        Some(m) => m.parse().map_err(bad)?,
        None => tester.model(),
    };
    let format: Format = a.format.parse().map_err(bad)?;
    let mut constants = Constants::default();
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| bad(format!("expected KEY=VAL, got `{kv}`")))?;
        constants.set(k.trim(), v.trim()).map_err(|e| bad(e.to_string()))?;
    }
    let tolerance = match (a.eps1, a.eps2, a.gamma) {
        (None, None, None) => None,
        (Some(e1), Some(e2), g) => {
            Some(ToleranceParams::new(e1, e2, g.unwrap_or(1.0)).map_err(|e| bad(e.to_string()))?)
        }
        _ => return Err(bad("--eps1 and --eps2 go together".into())),
    };
    let params = TestParams {
        eps: a.eps,
        tolerance,
        alpha: a.alpha,
    };
    let mut cfg = ExperimentConfig::new(tester, a.instance.spec().map_err(bad)?, params, a.trials, a.seed);
    cfg.model = model;
    cfg.constants = constants;
    cfg.timing = a.timing;
    cfg.validate()?;
    Ok((cfg, format))
}

fn summary(r: &Report) -> serde_json::Value {
    serde_json::json!({
        "schema": r.schema,
        "tester": r.config.tester,
        "family": r.config.instance.family.name(),
        "n": r.config.instance.n,
        "eps": r.config.params.eps,
        "certified": r.certified,
        "aggregates": r.aggregates,
        "checksPassed": r.checks.passed(),
    })
}

fn emit(r: &Report, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => write_report(r, format, p)?,
        None if format == Format::Csv => write_report_to(r, format, std::io::stdout().lock())?,
        None => println!("{}", serde_json::to_string_pretty(&summary(r)).expect("serializable")),
    }
    Ok(())
}

fn run(a: &RunArgs) -> Result<(), Failure> {
    let (cfg, format) = config(a)?;
    let r = run_experiment_with(&cfg, a.threads)?;
    emit(&r, format, a.out.as_deref())
}

fn certify(a: &InstanceArgs) -> Result<(), Failure> {
    let mut spec = a.spec().map_err(Failure::Config)?;
    spec.certify().map_err(|e| Failure::Config(e.to_string()))?;
    println!("{}", serde_json::to_string_pretty(&spec).expect("serializable"));
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    let (base, format) = config(&a.run)?;
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    for cfg in sweep_configs(&base, &a.ns, &a.epss) {
        cfg.validate()?;
        let r = run_experiment_with(&cfg, a.run.threads)?;
        let name = format!(
            "{}_{}_n{}_eps{}.{ext}",
            cfg.tester,
            cfg.instance.family.name(),
            cfg.instance.n,
            cfg.params.eps
        );
        emit(&r, format, Some(&a.out_dir.join(name)))?;
        println!("{}", serde_json::to_string(&summary(&r)).expect("serializable"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Certify(a) => certify(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::FAILURE
        }
    }
}
