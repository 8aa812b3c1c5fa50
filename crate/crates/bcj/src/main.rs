use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use bcj::commands::{cmd_dims, cmd_eval, cmd_orbits, cmd_search, cmd_verify, Format, GenusRange, Outcome, RunConfig};
use bcj::error::{CliError, EXIT_USAGE};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bcj", version, about = "Birman-Craggs-Johnson homomorphism toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the dimensions of B2, its exterior square, W and IM.
    Dims(Common),
    /// Classify exterior-square basis elements into orbits.
    Orbits(Common),
    /// Span the image of abelian cycles and compare against W.
    Search(SearchArgs),
    /// Randomized checks of the commuting diagrams.
    Verify(VerifyArgs),
    /// Evaluate sigma, rho and mu on a catalog of curves.
    Eval(EvalArgs),
}

#[derive(Args)]
struct Common {
    /// Genus or inclusive range, e.g. `3` or `1..4`.
    #[arg(long = "g", default_value = "2")]
    genus: GenusRange,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 3)]
    max_support: usize,
    /// Add the asserted two- and four-index families to the span.
    #[arg(long)]
    families: bool,
    /// Pair bounding-pair maps with separating twists.
    #[arg(long)]
    include_bp: bool,
    /// Disjointness certificate: `orthogonal` or `support`.
    #[arg(long, default_value = "orthogonal")]
    disjointness: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; falls back to BCJ_WORKERS, then the core count.
    #[arg(long, env = "BCJ_WORKERS")]
    workers: Option<usize>,
    /// Also check mu against selflink on every mod-2 class.
    #[arg(long)]
    exhaustive_mu: bool,
    /// JSON linking matrix to check the right square against.
    #[arg(long)]
    linking_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Catalog JSON file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    linking_matrix: Option<PathBuf>,
}

fn base(command: &str, c: &Common) -> RunConfig {
    RunConfig {
        command: command.into(),
        genus: c.genus,
        max_support: 0,
        include_families: false,
        include_bp: false,
        disjointness: String::new(),
        trials: 0,
        seed: 0,
        workers: 1,
        format: c.format,
        exhaustive_mu: false,
        linking_matrix: None,
        input: None,
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (cfg, output) = match &cli.command {
        Command::Dims(c) => (base("dims", c), c.output.clone()),
        Command::Orbits(c) => (base("orbits", c), c.output.clone()),
        Command::Search(s) => (
            RunConfig {
                max_support: s.max_support,
                include_families: s.families,
                include_bp: s.include_bp,
                disjointness: s.disjointness.clone(),
                ..base("search", &s.common)
            },
            s.common.output.clone(),
        ),
        Command::Verify(v) => {
            let workers = v
                .workers
                .filter(|&w| w > 0)
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            (
                RunConfig {
                    trials: v.trials,
                    seed: v.seed,
                    workers,
                    exhaustive_mu: v.exhaustive_mu,
                    linking_matrix: v.linking_matrix.clone(),
                    ..base("verify", &v.common)
                },
                v.common.output.clone(),
            )
        }
        Command::Eval(e) => {
            let c = Common {
                genus: GenusRange { lo: 1, hi: 1 },
                format: e.format,
                output: None,
            };
            (
                RunConfig {
                    input: Some(e.input.clone()),
                    linking_matrix: e.linking_matrix.clone(),
                    ..base("eval", &c)
                },
                e.output.clone(),
            )
        }
    };
    let outcome: Outcome = match cli.command {
        Command::Dims(_) => cmd_dims(&cfg)?,
        Command::Orbits(_) => cmd_orbits(&cfg)?,
        Command::Search(_) => cmd_search(&cfg)?,
        Command::Verify(_) => cmd_verify(&cfg)?,
        Command::Eval(_) => cmd_eval(&cfg)?,
    };
    match output {
        Some(p) => fs::write(&p, &outcome.text).map_err(|e| CliError::io(p, e))?,
        None => print!("{}", outcome.text),
    }
    eprint!("{}", outcome.summary);
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("bcj: {e}");
            if let CliError::LinkingMatrix(_) = e {
                eprintln!("bcj: consistency: L^T - L must equal J");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
