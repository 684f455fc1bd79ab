use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use escape_core::fixpoint::DEFAULT_ITERATION_BUDGET;
use escape_core::{adjoin_escape_demo, IterationBudget, Rational};
use escape_cli::check::run_checks;
use escape_cli::kt_selftest::run_kt_selftest;
use escape_cli::report::{demo_json, demo_text};
use escape_cli::{load_spec, run, CliError, ModeName, OutputFormat, RunConfig, BUDGET_ENV};

#[derive(Parser)]
#[command(name = "uncount", version)]
#[command(about = "Escape points of enumerations of reals, with exact certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute x0 and its certificate (exact mode) or an enclosure (interval mode).
    Escape(EscapeArgs),
    /// Run the invariant battery on a spec; exits 0 iff every property holds.
    Check(CheckArgs),
    /// Append x0 to a constant-tail spec and show the fixpoint jumps up.
    DemoAdjoin(DemoArgs),
    /// Knaster-Tarski self-test on random finite lattices.
    KtSelftest(KtArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,

    /// Maximum number of map evaluations per fixpoint descent.
    #[arg(long, env = BUDGET_ENV, default_value_t = DEFAULT_ITERATION_BUDGET)]
    budget: u64,
}

impl Common {
    fn budget(&self) -> Result<IterationBudget, CliError> {
        IterationBudget::new(self.budget)
            .ok_or_else(|| CliError::Config("iteration budget must be at least 1".into()))
    }
}

#[derive(Args)]
struct EscapeArgs {
    /// Spec files; several are processed concurrently and reported in order.
    #[arg(required = true)]
    specs: Vec<PathBuf>,

    #[arg(long, value_enum, default_value_t = ModeName::Exact)]
    mode: ModeName,

    /// Number of indices queried in interval mode.
    #[arg(long)]
    n_known: Option<u64>,

    /// Interval width requested from the oracle, as p/q.
    #[arg(long)]
    eps: Option<Rational>,

    /// Maximum offset of interval centers from the exact values, as p/q.
    #[arg(long)]
    jitter: Option<Rational>,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CheckArgs {
    spec: PathBuf,

    /// Seed for the random probes.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DemoArgs {
    spec: PathBuf,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct KtArgs {
    #[arg(long, default_value_t = 200)]
    count: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
}

fn escape(args: EscapeArgs) -> Result<(String, bool), CliError> {
    let config = RunConfig::from_flags(
        args.mode,
        args.n_known,
        args.eps,
        args.jitter,
        args.common.output,
        args.common.budget,
    )?;
    let results: Vec<Result<String, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = args
            .specs
            .iter()
            .map(|path| {
                let config = &config;
                scope.spawn(move || {
                    let spec = load_spec(path)?;
                    Ok(run(config, &spec)?.render(config.output))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = String::new();
    for result in results {
        out.push_str(&result?);
    }
    Ok((out, true))
}

fn check(args: CheckArgs) -> Result<(String, bool), CliError> {
    let spec = load_spec(&args.spec)?;
    let report = run_checks(&spec, args.common.budget()?, args.seed);
    let text = match args.common.output {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("json") + "\n",
        OutputFormat::Text => {
            let mut s = String::new();
            for o in &report.outcomes {
                let mark = if o.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("{mark} {}: {}\n", o.property, o.detail));
            }
            s
        }
    };
    Ok((text, report.all_passed()))
}

fn demo(args: DemoArgs) -> Result<(String, bool), CliError> {
    let spec = load_spec(&args.spec)?;
    let demo = adjoin_escape_demo(&spec, args.common.budget()?)?;
    let text = match args.common.output {
        OutputFormat::Json => serde_json::to_string_pretty(&demo_json(&demo)).expect("json") + "\n",
        OutputFormat::Text => demo_text(&demo),
    };
    Ok((text, true))
}

fn kt(args: KtArgs) -> Result<(String, bool), CliError> {
    let report = run_kt_selftest(args.count, args.seed);
    let text = match args.output {
        OutputFormat::Json => serde_json::to_string_pretty(&report).expect("json") + "\n",
        OutputFormat::Text => {
            let mut s = format!(
                "{}/{} lattices: iteration matches brute-force fixpoints (seed {})\n",
                report.passed, report.cases, report.seed
            );
            for f in &report.failures {
                s.push_str(&format!("FAIL {} ({} elements)\n", f.family, f.size));
            }
            s
        }
    };
    Ok((text, report.all_passed()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Escape(args) => escape(args),
        Command::Check(args) => check(args),
        Command::DemoAdjoin(args) => demo(args),
        Command::KtSelftest(args) => kt(args),
    };
    match result {
        Ok((text, ok)) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
