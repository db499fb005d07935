use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod cache;
mod commands;
mod config;

use cache::Cache;
use config::Config;

#[derive(Parser, Debug)]
#[command(name = "dihedral", version)]
#[command(about = "Dihedral mod-p Galois representations, their theta series and Serre invariants")]
pub struct Cli {
    /// Directory for cached class groups and theta expansions
    #[arg(long, global = true, env = "DIHEDRAL_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// TOML file supplying the cache directory and default bounds
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Emit JSON (the default except for paper-examples, which prints a table)
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Emit CSV (coefficient and trace tables only)
    #[arg(long, global = true)]
    csv: bool,

    #[command(subcommand)]
    command: Command,
}

/// A character of the class group of `D`, optionally twisted.
#[derive(Args, Debug, Clone)]
pub struct CharArgs {
    /// Fundamental discriminant
    #[arg(long = "D", allow_negative_numbers = true)]
    d: i64,

    /// Exponents of the character, one per cyclic factor (comma separated)
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    chi: Vec<i64>,

    /// Twist by the first auxiliary element (real fields)
    #[arg(long)]
    twist: bool,

    /// Height bound for the auxiliary search
    #[arg(long)]
    aux_height: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Class group of a fundamental discriminant
    Classgroup {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: i64,
    },
    /// Invariants and a trace table of one representation
    Rep {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long)]
        p: u64,
        /// Largest prime in the trace table
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Exact and reduced Frobenius traces
    Traces {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Conductor, nebentypus, weight and exceptionality
    Serre {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long)]
        p: u64,
        /// Largest prime at which the nebentypus is tabulated
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Theta series coefficients a_0..a_B
    Theta {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long = "B")]
        b: Option<u64>,
        /// Reduce modulo the chosen prime above p
        #[arg(long)]
        mod_p: Option<u64>,
    },
    /// Compare theta coefficients with Frobenius traces and check the Hecke relations
    Verify {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        bound: Option<u64>,
        /// Add one to a_N before checking (exercises the checker)
        #[arg(long, value_name = "N")]
        perturb: Option<u64>,
    },
    /// Matrix of T_p on f(q), f(q^p), ..., f(q^(p^r)) over the integers
    Oldform {
        #[arg(long, allow_negative_numbers = true)]
        ap: i64,
        #[arg(long, allow_negative_numbers = true)]
        eps: i64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
        delta: u8,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long)]
        p: u64,
    },
    /// Search for an auxiliary element of negative prime norm congruent to 1 mod 4Df
    Trick {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: i64,
        #[arg(long, default_value_t = 1)]
        f: u64,
        /// Height bound for the search
        #[arg(long)]
        bound: Option<u64>,
        /// Character whose mod-2 trace at the auxiliary prime is checked
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        chi: Option<Vec<i64>>,
    },
    /// Look for a reducible pattern in the sampled traces
    Irred {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Check the worked examples for D = -23, 229 and 2089
    PaperExamples {
        #[arg(long)]
        bound: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub struct Context {
    pub cache: Cache,
    pub config: Config,
    /// `None` when neither `--json` nor `--csv` was given.
    pub format: Option<Format>,
}

/// What a command printed, and whether it found violations.
pub struct Outcome {
    pub body: String,
    pub violations: bool,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(jobs) = cli.jobs.or(config.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let cache = Cache::new(cli.cache_dir.clone().or_else(|| config.cache_dir.clone()));
    let format = match (cli.json, cli.csv) {
        (true, _) => Some(Format::Json),
        (_, true) => Some(Format::Csv),
        _ => None,
    };
    let ctx = Context {
        cache,
        config,
        format,
    };
    commands::dispatch(&ctx, cli.command)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            // a closed pipe (`| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{}", out.body);
            if out.violations {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
