use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use supertrace_cli::{eval_jet_file, run_suite, EvalTarget, Suite, SuiteConfig};
use supertrace_core::rational::display_ratio;

/// Exact verification of heat-trace supertrace identities for
/// dilaton-twisted form Laplacians.
#[derive(Parser)]
#[command(name = "supertrace", version, about)]
struct Cli {
    /// Number of worker threads for case fan-out (default: all cores).
    #[arg(long, global = true)]
    parallel: Option<usize>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite and emit a line-delimited report.
    Suite(SuiteArgs),
    /// Evaluate one quantity on a serialized jet and print the exact value.
    Eval(EvalArgs),
    /// List the available suites.
    Suites,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite name (see `supertrace suites`).
    #[arg(long)]
    suite: String,

    /// Random trials per case family.
    #[arg(long, default_value_t = 5)]
    trials: u32,

    /// Base seed; reports are deterministic given (suite, seed).
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Comma-separated dimensions to exercise (suite default otherwise).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,

    /// Jet truncation override.
    #[arg(long)]
    degree: Option<u32>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(subcommand)]
    what: EvalCommand,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Alternating supertrace of order n.
    Supertrace {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Heat coefficient of order n on the degree-p form bundle.
    Coeff {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Named density: pfaffian, odd-divergence, or even-divergence.
    Invariant {
        #[arg(long)]
        name: String,
        #[arg(long)]
        jet: PathBuf,
        #[arg(long)]
        degree: Option<u32>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path:?}"))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.parallel {
        if k == 0 {
            eprintln!("error: --parallel must be positive");
            return ExitCode::FAILURE;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            eprintln!("error: could not configure {k} workers: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Suites => {
            let mut text = String::new();
            for s in Suite::ALL {
                text.push_str(s.name());
                text.push('\n');
            }
            emit(&cli.out, &text)?;
            Ok(true)
        }
        Command::Suite(args) => {
            let suite = Suite::parse(&args.suite)?;
            let mut cfg = SuiteConfig::new(suite, args.trials, args.seed, args.dims);
            cfg.degree = args.degree;
            if args.trials == 0 {
                bail!("--trials must be positive");
            }
            let report = run_suite(suite, &cfg)?;
            emit(&cli.out, &report.render(true))?;
            Ok(report.overall_pass())
        }
        Command::Eval(args) => {
            let (target, jet_path, degree) = match args.what {
                EvalCommand::Supertrace { n, jet, degree } => {
                    (EvalTarget::Supertrace { n }, jet, degree)
                }
                EvalCommand::Coeff { n, p, jet, degree } => {
                    (EvalTarget::Coefficient { n, p }, jet, degree)
                }
                EvalCommand::Invariant { name, jet, degree } => {
                    (EvalTarget::Invariant { name }, jet, degree)
                }
            };
            let text = fs::read_to_string(&jet_path)
                .with_context(|| format!("reading jet file {jet_path:?}"))?;
            let outcome = eval_jet_file(&text, &target, degree)?;
            let rendered = format!(
                "{}\nvalue = {}\nnormalization = (4*pi)^(m/2) * a_(n,m)(x, D) at the origin\n",
                outcome.description,
                display_ratio(&outcome.value)
            );
            emit(&cli.out, &rendered)?;
            Ok(true)
        }
    }
}
