//! Command-line interface.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbox_core::bench::{feasibility_row, ScoreTable};
use sbox_core::optimizers::{run_optimizer, Algorithm};
use sbox_core::problems::registry::{self, Suite};

use crate::config::{parse_algorithm, resolve, PartialConfig};
use crate::error::CliError;
use crate::io;
use crate::runner;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "SBOX_OUT";
/// Output root when neither flag, file nor environment set one.
pub const DEFAULT_OUT: &str = "results";
/// Exit code of `run --strict` with failed cells.
pub const EXIT_FAILED_CELLS: u8 = 2;
/// Exit code of `score` when the stored scores are not reproduced.
pub const EXIT_SCORE_MISMATCH: u8 = 3;

/// Surrogate-based black-box optimization benchmarks.
#[derive(Debug, Parser)]
#[command(name = "sbox", version)]
pub struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Subcommand.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a benchmark suite and write its results directory.
    Run(RunArgs),
    /// Run one algorithm on one problem and write its trajectory CSV.
    Optimize(OptimizeArgs),
    /// Recompute scores.json of a results directory from its trajectories.
    Score(ScoreArgs),
    /// List suites, problems and algorithms.
    List(ListArgs),
}

/// `run` flags; each overrides the same field of `--config`.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// unconstrained, constrained or casestudies.
    #[arg(long)]
    pub suite: Option<String>,
    /// Explicit problem keys instead of a suite.
    #[arg(long, value_delimiter = ',')]
    pub problems: Option<Vec<String>>,
    /// Algorithm tags.
    #[arg(long, value_delimiter = ',')]
    pub algos: Option<Vec<String>>,
    /// Dimensions of the unconstrained suite.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Evaluation budget for every problem.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Warm-up length for every problem.
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Repetitions per cell.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Feasibility threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Output root (default: $SBOX_OUT, else `results`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Exit with status 2 when any cell fails.
    #[arg(long)]
    pub strict: bool,
}

impl RunArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            suite: self.suite.clone(),
            problems: self.problems.clone(),
            algorithms: self.algos.clone(),
            dims: self.dims.clone(),
            repetitions: self.reps,
            seed: self.seed,
            violation_threshold: self.threshold,
            budget: self.budget,
            warmup: self.warmup,
            jobs: self.jobs,
            out: self.out.clone(),
            cstr: None,
            williams_otto: None,
        }
    }
}

/// `optimize` flags.
#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Algorithm tag.
    #[arg(long)]
    pub algo: String,
    /// Problem key.
    #[arg(long)]
    pub problem: String,
    /// Evaluation budget (default: the problem's preset).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// TOML file with case-study settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV (default: standard output).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// `score` arguments.
#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Suite directory containing manifest.json.
    pub dir: PathBuf,
}

/// `list` flags.
#[derive(Debug, Args)]
pub struct ListArgs {
    /// Dimensions shown for the unconstrained families.
    #[arg(long, value_delimiter = ',', default_value = "2,5,7")]
    pub dims: Vec<usize>,
}

/// Execute a parsed command line.
pub fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run(a) => run(a),
        Command::Optimize(a) => optimize(a),
        Command::Score(a) => score(a),
        Command::List(a) => list(a),
    }
}

fn run(a: RunArgs) -> Result<ExitCode, CliError> {
    let file = match &a.config {
        Some(p) => PartialConfig::from_file(p)?,
        None => PartialConfig::default(),
    };
    let merged = a.partial().over(file);
    let out = merged
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let jobs = merged.jobs;
    let cfg = resolve(merged)?;
    let outcome = runner::run_suite(&cfg, &out, jobs)?;
    print_table(&outcome.table);
    println!("results: {}", outcome.dir.display());
    let failed = outcome.failed();
    if failed > 0 {
        eprintln!(
            "{failed} of {} cells failed; see status.json",
            outcome.records.len()
        );
        if a.strict {
            return Ok(ExitCode::from(EXIT_FAILED_CELLS));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn optimize(a: OptimizeArgs) -> Result<ExitCode, CliError> {
    let algorithm = parse_algorithm(&a.algo)?;
    let file = match &a.config {
        Some(p) => PartialConfig::from_file(p)?,
        None => PartialConfig::default(),
    };
    let cfg = resolve(
        PartialConfig {
            problems: Some(vec![a.problem.clone()]),
            algorithms: Some(vec![a.algo.clone()]),
            budget: a.budget,
            ..Default::default()
        }
        .over(file),
    )?;
    let problem = cfg.problem(&a.problem)?;
    let budget = match a.budget {
        Some(b) => b,
        None => registry::preset(&a.problem)?.budget,
    };
    let t = run_optimizer(algorithm, &problem, budget, a.seed)?;
    let (dim, ng, thr) = (
        problem.dim(),
        problem.n_constraints(),
        cfg.violation_threshold,
    );
    match &a.output {
        Some(path) => io::write_trajectory(path, &t, dim, ng, thr)?,
        None => io::write_trajectory_to(std::io::stdout().lock(), &t, dim, ng, thr)
            .map_err(CliError::csv("<stdout>"))?,
    }
    match t.best_feasible(thr) {
        Some(e) => eprintln!("best y = {:e} at evaluation {}", e.y, e.index),
        None => eprintln!("no feasible evaluation"),
    }
    if !t.is_complete() {
        eprintln!("run stopped early: {:?}", t.status);
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn score(a: ScoreArgs) -> Result<ExitCode, CliError> {
    let (table, same) = runner::verify(&a.dir)?;
    print_table(&table);
    if same {
        println!("scores.json reproduced exactly");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("scores.json differs from the rescored trajectories");
        Ok(ExitCode::from(EXIT_SCORE_MISMATCH))
    }
}

fn list(a: ListArgs) -> Result<ExitCode, CliError> {
    let mut out = std::io::stdout().lock();
    let w = |e| CliError::io("<stdout>")(e);
    for suite in Suite::ALL {
        writeln!(out, "{}:", suite.tag()).map_err(w)?;
        for key in suite.keys(&a.dims) {
            let p = registry::preset(&key)?;
            let problem = registry::lookup(&key)?;
            let algos: Vec<&str> = Algorithm::ALL
                .iter()
                .filter(|al| al.supports(&problem))
                .map(|al| al.tag())
                .collect();
            writeln!(
                out,
                "  {key:<16} budget {:>3}  warm-up {:>2}  {}",
                p.budget,
                p.warmup,
                algos.join(",")
            )
            .map_err(w)?;
        }
    }
    let all: Vec<&str> = Algorithm::ALL.iter().map(|al| al.tag()).collect();
    writeln!(out, "algorithms: {}", all.join(", ")).map_err(w)?;
    Ok(ExitCode::SUCCESS)
}

fn print_table(table: &ScoreTable) {
    for p in &table.problems {
        println!("{} (budget {}, warm-up {})", p.problem, p.budget, p.warmup);
        for s in &p.algorithms {
            let score = s.p.map_or("-".to_string(), |v| format!("{v:.2}"));
            if p.constrained {
                println!("  {:<8} {}", s.algorithm.tag(), feasibility_row(s));
            } else {
                println!("  {:<8} {score}", s.algorithm.tag());
            }
        }
    }
    let overall: Vec<String> = table
        .overall()
        .iter()
        .map(|(a, p)| format!("{}={p:.2}", a.tag()))
        .collect();
    println!("overall: {}", overall.join(" "));
}
