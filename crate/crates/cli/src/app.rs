use std::io::Write;

use clap::{Args, Parser, Subcommand};

use runwait_core::chain::build_run_chain;
use runwait_core::{parse_distribution, parse_rational, parse_runs, validate_query, Query};

use crate::crosscheck::{crosscheck, Fault};
use crate::output::{Format, Route};
use crate::paradox::search;
use crate::routes::{compute, RouteOptions};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "runwait",
    version,
    about = "Exact moments of the waiting time for runs of equal letters"
)]
pub struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expectation (and variance where available) of B_j by one route.
    Moments(MomentsArgs),
    /// Compare all routes exactly; exit code 2 on any mismatch.
    Crosscheck(CrosscheckArgs),
    /// Search dice on a k/D grid whose run-2 and run-3 orderings disagree.
    Paradox(ParadoxArgs),
    /// Print the run-detecting chain, one transition per line.
    Chain(QueryArgs),
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Letter probabilities, e.g. "1/6,1/6,1/6,1/6,1/6,1/6".
    #[arg(long)]
    pub dist: String,
    /// Run length for all letters ("3") or per letter ("3,2,4").
    #[arg(long)]
    pub runs: String,
    /// Number of distinct letters that must complete their run.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
}

impl QueryArgs {
    fn query(&self) -> Result<Query, CliError> {
        let dist = parse_distribution(&self.dist)?;
        let runs = parse_runs(&self.runs, dist.len())?;
        Ok(validate_query(&dist, &runs, self.j)?)
    }
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long, value_enum, default_value_t = Route::Operator)]
    pub route: Route,
    /// Enclosure width for the tail route, as an exact rational.
    #[arg(long, default_value = "1/1000")]
    pub tol: String,
    /// Maximum number of survival terms for the tail route.
    #[arg(long, default_value_t = 10_000_000)]
    pub n_cap: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lift the r <= 20 limit of the operator route.
    #[arg(long)]
    pub allow_large_alphabet: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CrosscheckArgs {
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub runs: String,
    /// Largest j to check (default: r).
    #[arg(long)]
    pub jmax: Option<usize>,
    /// Largest word length for the CDF and series identities.
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, Args)]
pub struct ParadoxArgs {
    #[arg(long, default_value_t = 6)]
    pub r: usize,
    /// Face probabilities are searched on the grid k/D.
    #[arg(long)]
    pub grid_denominator: u64,
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

/// Executes a parsed command, writing results to `out`. Errors are returned
/// for the caller to report.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Invariant(format!("write failed: {e}"));
    match &cli.command {
        Command::Moments(args) => {
            let query = args.query.query()?;
            let tol = parse_rational(&args.tol)
                .ok_or_else(|| CliError::Validation(format!("malformed --tol {:?}", args.tol)))?;
            let opts = RouteOptions {
                tol,
                n_cap: args.n_cap,
                trials: args.trials,
                seed: args.seed,
                max_letters: if args.allow_large_alphabet {
                    usize::MAX
                } else {
                    RouteOptions::default().max_letters
                },
            };
            let result = compute(&query, args.route, &opts)?;
            out.write_all(result.render(args.format).as_bytes())
                .map_err(io)?;
        }
        Command::Crosscheck(args) => {
            let dist = parse_distribution(&args.dist)?;
            let runs = parse_runs(&args.runs, dist.len())?;
            let query = validate_query(&dist, &runs, 1)?;
            let j_max = args.jmax.unwrap_or(dist.len());
            let report = crosscheck(&query, j_max, args.nmax, args.inject_fault)?;
            out.write_all(report.render().as_bytes()).map_err(io)?;
            if let Some(failure) = report.first_failure() {
                return Err(CliError::Invariant(format!(
                    "cross-check failed: {}: {}",
                    failure.name,
                    failure.counterexample.as_deref().unwrap_or("")
                )));
            }
        }
        Command::Paradox(args) => {
            let report = search(args.r, args.grid_denominator, args.limit)?;
            let text = match args.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).expect("serializable");
                    s.push('\n');
                    s
                }
                _ => report.to_table(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        Command::Chain(args) => {
            let chain = build_run_chain(&args.query()?)?;
            out.write_all(chain.dump().as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}
