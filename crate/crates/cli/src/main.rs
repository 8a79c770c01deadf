mod commands;
mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "twistcalc", version, about = "Twisted vertex operators on truncated graded modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a spec.
    Validate(Common),
    /// Build the modules a spec describes and print graded dimensions.
    Build(Common),
    /// Locality orders of all pairs of generating fields.
    Locality(Common),
    /// Modes of the n-th product of two fields.
    Product {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Basis of the fields generated under n-th products and derivatives.
    Closure {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "2")]
        weight_cap: String,
    },
    /// Shift untwisted fields by the Δ-operator of h_σ.
    Shift {
        #[command(flatten)]
        common: Common,
        /// Matrix of σ on the distinguished subspace, one row per line.
        #[arg(long)]
        sigma: Option<PathBuf>,
        /// Comma-separated labels spanning the subspace σ acts on.
        #[arg(long)]
        plus: Option<String>,
    },
    /// Run verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// jacobi, iterate, commutator, virasoro, nilpotency, stability.
        #[arg(long, value_delimiter = ',', default_value = "jacobi")]
        suite: Vec<Suite>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Jacobi,
    Iterate,
    Commutator,
    Virasoro,
    Nilpotency,
    Stability,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, conflicts_with = "fixture")]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long, default_value = "4", allow_hyphen_values = true)]
    pub cutoff: String,
    #[arg(long, default_value = "-4:4", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, allow_hyphen_values = true)]
    pub level: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub charge: Option<String>,
    /// Probe vectors up to this degree.
    #[arg(long, default_value = "2")]
    pub probe_degree: String,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let common = match &cli.command {
        Command::Validate(c) | Command::Build(c) | Command::Locality(c) => c,
        Command::Product { common, .. } | Command::Closure { common, .. } => common,
        Command::Shift { common, .. } | Command::Verify { common, .. } => common,
    };
    let json = common.json;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(common.workers.unwrap_or(0)).build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(commands::EXIT_INPUT);
        }
    };
    let outcome = pool.install(|| commands::run(&cli.command));
    match outcome {
        Ok((value, code)) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&value).expect("report serializes"));
            } else {
                print!("{}", render::text(&value));
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(commands::EXIT_INPUT)
        }
    }
}
