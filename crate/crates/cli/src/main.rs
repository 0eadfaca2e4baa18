use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::{CmdError, Output};

/// Explore blockchain pool-update groups: order analysis, axioms, subgroups,
/// representations and churn simulation.
#[derive(Debug, Parser)]
#[command(name = "blockgroup", version)]
struct Cli {
    /// Report format on standard output.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, Args)]
struct GroupArgs {
    /// Number of nodes (n).
    #[arg(long)]
    nodes: usize,
    /// Number of mining pools (r), including the singleton pool.
    #[arg(long)]
    pools: usize,
}

#[derive(Debug, Clone, Copy, Args)]
struct CapArg {
    /// Largest number of elements an exhaustive search may list.
    #[arg(long, default_value_t = blockgroup::DEFAULT_CAP)]
    cap: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orders, factorization, Sylow forms, Cauchy primes and Stirling estimates.
    Analyze {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Randomized associativity, identity and inverse checks.
    Axioms {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Full subgroup lattice with normality and containment.
    Subgroups {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        cap: CapArg,
    },
    /// One Sylow p-subgroup.
    Sylow {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        prime: u64,
        #[command(flatten)]
        cap: CapArg,
    },
    /// First element of order p in canonical order.
    Cauchy {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        prime: u64,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Cayley table and regular representation.
    Cayley {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Uniform pool-relabel subgroup and its isomorphism type.
    Relabel {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Generate (or load) a churn trace and fold it epoch by epoch.
    Simulate {
        /// Trace file to load instead of generating one.
        #[arg(long = "in", conflicts_with_all = ["nodes", "pools", "churn"])]
        input: Option<PathBuf>,
        #[arg(long, required_unless_present = "input")]
        nodes: Option<usize>,
        #[arg(long, required_unless_present = "input")]
        pools: Option<usize>,
        #[arg(long, default_value_t = 10)]
        epochs: u64,
        #[arg(long, default_value_t = 0.1)]
        churn: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write per-epoch cumulative snapshots (JSON lines).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the generated trace.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Fold an existing trace file into cumulative snapshots.
    Fold {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<Output, CmdError> {
    match &cli.command {
        Command::Analyze { group } => commands::analyze(group.nodes, group.pools),
        Command::Axioms { group, trials, seed } => commands::axioms(group.nodes, group.pools, *trials, *seed),
        Command::Subgroups { group, cap } => commands::subgroups(group.nodes, group.pools, cap.cap),
        Command::Sylow { group, prime, cap } => commands::sylow(group.nodes, group.pools, *prime, cap.cap),
        Command::Cauchy { group, prime, cap } => commands::cauchy(group.nodes, group.pools, *prime, cap.cap),
        Command::Cayley { group, cap } => commands::cayley(group.nodes, group.pools, cap.cap),
        Command::Relabel { group, cap } => commands::relabel(group.nodes, group.pools, cap.cap),
        Command::Simulate {
            input,
            nodes,
            pools,
            epochs,
            churn,
            seed,
            out,
            trace_out,
        } => {
            let source = match input {
                Some(path) => commands::TraceSource::File(path.clone()),
                None => commands::TraceSource::Generate {
                    nodes: nodes.expect("required by clap"),
                    pools: pools.expect("required by clap"),
                    churn: *churn,
                    seed: *seed,
                },
            };
            commands::simulate(source, *epochs, out.as_deref(), trace_out.as_deref())
        }
        Command::Fold { input, out } => commands::fold(input, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            let mut stdout = io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = match cli.format {
                Format::Json => writeln!(stdout, "{}", output.json),
                Format::Text => write!(stdout, "{}", output.text),
            };
            ExitCode::from(output.exit_code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
