use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cixlab::environments::EnvKind;
use cixlab::harness::{
    self, AdversaryKind, Algorithm, BanditSpec, ExperimentConfig, ExperimentKind, SweepArm,
};
use cixlab::reduction::{lemma_violation_rate, LemmaInstance};
use cixlab::{BoundInputs, SeededRng};

#[derive(Parser)]
#[command(name = "cixlab", version, about = "Capped implicit exploration experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Actor-critic runs on catch or cart pole.
    Agent(AgentArgs),
    /// Exp3-CIX on an oblivious bandit.
    Bandit(BanditArgs),
    /// NeuRD-CIX η sensitivity sweep with an SPG baseline.
    Sweep(SweepArgs),
    /// Regret quantiles against the high-probability bound.
    Bound(BanditArgs),
    /// Finite-difference gradient check of every model.
    Gradcheck(GradcheckArgs),
    /// Violation frequency of the concentration inequality.
    LemmaCheck(LemmaArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated seed list (may be empty).
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    seeds: Option<Vec<u64>>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a row every N steps or rounds (the last one is always emitted).
    #[arg(long)]
    log_every: Option<u64>,
    /// Run seeds one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct AgentArgs {
    #[command(flatten)]
    common: Common,
    /// Environment: catch or cartpole.
    #[arg(long)]
    env: Option<EnvKind>,
    /// Actor update: spg, neurd or neurd-cix.
    #[arg(long)]
    algo: Option<Algorithm>,
    /// CIX parameter for neurd-cix (default 1).
    #[arg(long)]
    eta: Option<f64>,
    /// Environment steps per seed.
    #[arg(long)]
    steps: Option<u64>,
    /// Adam learning rate (defaults per environment).
    #[arg(long)]
    lr: Option<f64>,
    /// 20 seeds × 300,000 steps unless overridden.
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    agent: AgentArgs,
    /// Comma-separated η grid.
    #[arg(long, value_delimiter = ',')]
    etas: Option<Vec<f64>>,
}

#[derive(Args)]
struct BanditArgs {
    #[command(flatten)]
    common: Common,
    /// Number of arms.
    #[arg(long)]
    arms: Option<usize>,
    /// Number of rounds T.
    #[arg(long)]
    horizon: Option<u64>,
    /// Scale ξ of the schedule η_t = ξ·sqrt(1 / (K t)), clipped to (0, 1].
    #[arg(long)]
    xi: Option<f64>,
    /// Confidence level δ of the slack bound.
    #[arg(long)]
    delta: Option<f64>,
    /// Constant η instead of the scaled schedule.
    #[arg(long)]
    eta: Option<f64>,
    /// Payoff sequence: fixed, stochastic or shifting.
    #[arg(long)]
    adversary: Option<AdversaryKind>,
    /// Rounds between permutations of the shifting adversary.
    #[arg(long)]
    shift_period: Option<u64>,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Seed for the random models and probe points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random coordinates probed per model.
    #[arg(long, default_value_t = 20)]
    probes: usize,
}

#[derive(Args)]
struct LemmaArgs {
    /// Nominal failure probability δ.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Monte-Carlo trials.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

type CliResult<T> = Result<T, String>;

fn load(common: &Common, kind: ExperimentKind) -> CliResult<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    config.kind = Some(kind);
    if let Some(seeds) = &common.seeds {
        config.seeds = seeds.clone();
    }
    if let Some(out) = &common.out {
        config.out = Some(out.clone());
    }
    if let Some(n) = common.log_every {
        config.log_every = n;
    }
    if common.sequential {
        config.parallel = false;
    }
    Ok(config)
}

fn apply_agent(args: &AgentArgs, kind: ExperimentKind) -> CliResult<ExperimentConfig> {
    let mut config = load(&args.common, kind)?;
    if args.paper_scale || config.paper_scale {
        let explicit_seeds = args.common.seeds.is_some();
        let seeds = config.seeds.clone();
        config = config.with_paper_scale();
        if explicit_seeds {
            config.seeds = seeds;
        }
    }
    if let Some(env) = args.env {
        config.env = env;
    }
    if let Some(algo) = args.algo {
        config.algo = algo;
    }
    if args.eta.is_some() {
        config.eta = args.eta;
    }
    if let Some(steps) = args.steps {
        config.steps = steps;
    }
    if args.lr.is_some() {
        config.lr = args.lr;
    }
    Ok(config)
}

fn apply_bandit(args: &BanditArgs, kind: ExperimentKind) -> CliResult<ExperimentConfig> {
    let mut config = load(&args.common, kind)?;
    config.algo = Algorithm::Exp3Cix;
    if let Some(k) = args.arms {
        config.arms = k;
    }
    if let Some(t) = args.horizon {
        config.horizon = t;
    }
    if let Some(xi) = args.xi {
        config.xi = xi;
    }
    if let Some(d) = args.delta {
        config.delta = d;
    }
    if args.eta.is_some() {
        config.eta = args.eta;
    }
    if let Some(a) = args.adversary {
        config.adversary = a;
    }
    if let Some(p) = args.shift_period {
        config.shift_period = p;
    }
    Ok(config)
}

fn sink(config: &ExperimentConfig) -> CliResult<Box<dyn Write>> {
    match &config.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Agent(args) => {
            let config = apply_agent(&args, ExperimentKind::Agent)?;
            if config.algo == Algorithm::Exp3Cix {
                return Err("exp3-cix runs with `cixlab bandit`".into());
            }
            let records = harness::run_agent_seeds(&config).map_err(err)?;
            harness::write_agent_csv(sink(&config)?, &records).map_err(err)?;
            Ok(true)
        }
        Command::Bandit(args) => {
            let config = apply_bandit(&args, ExperimentKind::Bandit)?;
            let runs = harness::run_bandit_seeds(&config).map_err(err)?;
            let records: Vec<_> = runs.into_iter().flat_map(|r| r.records).collect();
            harness::write_bandit_csv(sink(&config)?, &records).map_err(err)?;
            Ok(true)
        }
        Command::Sweep(args) => {
            let mut config = apply_agent(&args.agent, ExperimentKind::Sweep)?;
            if let Some(etas) = args.etas {
                config.etas = etas;
            }
            let table = harness::run_sweep(&config).map_err(err)?;
            harness::write_sweep_csv(sink(&config)?, &table).map_err(err)?;
            for &eta in &config.etas {
                let arm = SweepArm::NeurdCix { eta };
                if let (Some(m), v) = (table.mean(arm), table.variance(arm)) {
                    eprintln!("eta {eta}: mean {m:.1}, variance {}", v.map_or("n/a".into(), |v| format!("{v:.1}")));
                }
            }
            if let Some(m) = table.mean(SweepArm::SpgBaseline) {
                eprintln!("spg: mean {m:.1}");
            }
            Ok(true)
        }
        Command::Bound(args) => {
            let config = apply_bandit(&args, ExperimentKind::Bound)?;
            let runs = harness::run_bandit_seeds(&config).map_err(err)?;
            if runs.is_empty() {
                return Err("no seeds: nothing to report".into());
            }
            let seed = runs[0].seed;
            let inputs: BoundInputs = BanditSpec::from_config(&config, seed).map_err(err)?.bound_inputs();
            let rows = harness::report_bound(&runs, &inputs).map_err(err)?;
            harness::write_bound_csv(sink(&config)?, &rows).map_err(err)?;
            Ok(true)
        }
        Command::Gradcheck(args) => {
            let report = harness::gradcheck(args.seed, args.probes).map_err(err)?;
            println!("mlp max relative error:     {:.3e} (< {:e})", report.mlp, harness::MLP_TOLERANCE);
            println!("linear max relative error:  {:.3e} (< {:e})", report.linear, harness::LINEAR_TOLERANCE);
            println!("tabular max relative error: {:.3e} (exact)", report.tabular);
            Ok(report.passed())
        }
        Command::LemmaCheck(args) => {
            let mut rng = SeededRng::new(args.seed);
            let instance = LemmaInstance::small();
            let rate = lemma_violation_rate(&instance, args.delta, args.trials, &mut rng).map_err(err)?;
            let n = args.trials as f64;
            let limit = args.delta + 3.0 * (args.delta * (1.0 - args.delta) / n).sqrt();
            println!(
                "{}",
                serde_json::json!({ "delta": args.delta, "trials": args.trials, "violation_rate": rate, "limit": limit })
            );
            Ok(rate <= limit)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
