use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use optsort::harness::{mine_counterexamples, run_benchmark_with, BenchConfig, OracleMethod};
use optsort::oracles::{branch_and_bound_optimum, brute_force_optimum, export_milp, OracleResult};
use optsort::{generate_instance, optimal_sort, parse_instance, Instance};

#[derive(Parser)]
#[command(
    name = "optsort",
    version,
    about = "Single-machine sequencing with release times: minimise total waiting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Bnb,
}

#[derive(Subcommand)]
enum Command {
    /// Run the local search on an instance file
    Solve {
        file: PathBuf,
        /// Write the accepted-move log here (JSON)
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Solve exactly
    Oracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        limit_nodes: Option<u64>,
        #[arg(long)]
        limit_ms: Option<u64>,
    },
    /// Compare the local search with an exact oracle; exit 2 on a strict gap
    Verify {
        file: PathBuf,
        /// Defaults to brute force up to 11 jobs, branch and bound above
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Draw an instance from the default distribution
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Benchmark against the oracles
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
        /// One instance at a time (steadier timings)
        #[arg(long)]
        sequential: bool,
    },
    /// Search for instances where the local search is not optimal
    Mine {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the MILP model in LP format
    ExportLp {
        file: PathBuf,
        #[arg(long)]
        big_m: Option<i64>,
    },
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run_oracle(inst: &Instance, method: Method, nodes: Option<u64>, ms: Option<u64>) -> Result<OracleResult, Failure> {
    Ok(match method {
        Method::Brute => brute_force_optimum(inst)?,
        Method::Bnb => branch_and_bound_optimum(inst, nodes, ms.map(Duration::from_millis)),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { file, log, json } => {
            let inst = read_instance(&file)?;
            let res = optimal_sort(&inst);
            if let Some(path) = log {
                fs::write(&path, serde_json::to_string_pretty(&res.move_log)?)?;
            }
            let elapsed_ms = res.elapsed.as_secs_f64() * 1e3;
            if json {
                let out = json!({
                    "objective": res.best_objective,
                    "order": res.best_sequence.job_ids(),
                    "iterations": res.iterations,
                    "elapsed_ms": elapsed_ms,
                    "safety_tripped": res.safety_tripped,
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                let order: Vec<String> = res.best_sequence.job_ids().iter().map(ToString::to_string).collect();
                println!("objective {}", res.best_objective);
                println!("order {}", order.join(" "));
                println!("iterations {}, {elapsed_ms:.3} ms", res.iterations);
                if res.safety_tripped {
                    println!("warning: pass limit reached");
                }
            }
        }
        Command::Oracle {
            file,
            method,
            limit_nodes,
            limit_ms,
        } => {
            let inst = read_instance(&file)?;
            let r = run_oracle(&inst, method, limit_nodes, limit_ms)?;
            let out = json!({
                "objective": r.objective,
                "order": r.sequence.job_ids(),
                "proved_optimal": r.proved_optimal,
                "nodes": r.nodes_explored,
                "elapsed_ms": r.elapsed.as_secs_f64() * 1e3,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Verify { file, method } => {
            let inst = read_instance(&file)?;
            let method = method.unwrap_or(match OracleMethod::for_size(inst.len()) {
                OracleMethod::BruteForce => Method::Brute,
                _ => Method::Bnb,
            });
            let solved = optimal_sort(&inst);
            let exact = run_oracle(&inst, method, None, None)?;
            let verdict = format!(
                "solver {} oracle {}{}",
                solved.best_objective,
                exact.objective,
                if exact.proved_optimal { "" } else { " (unproven)" }
            );
            if exact.proved_optimal && solved.best_objective > exact.objective {
                return Err(Failure::Mismatch(verdict));
            }
            println!("ok: {verdict}");
        }
        Command::Gen { n, seed, out } => {
            if n == 0 {
                return Err(Failure::Usage("--n must be at least 1".into()));
            }
            let text = generate_instance(n, seed).to_text();
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Bench {
            sizes,
            count,
            seed,
            json,
            sequential,
        } => {
            let mut config = BenchConfig::new(sizes, count, seed);
            config.parallel = !sequential;
            let report = run_benchmark_with(&config)?;
            println!("{report}");
            if let Some(path) = json {
                fs::write(path, report.to_json())?;
            }
        }
        Command::Mine { n, count, seed, out } => {
            let found = mine_counterexamples(n, count, seed)?;
            fs::create_dir_all(&out)?;
            for (k, ce) in found.iter().enumerate() {
                fs::write(out.join(format!("counterexample_{k:03}.json")), ce.to_json())?;
            }
            println!("{} counterexample(s) in {count} instance(s) of size {n}", found.len());
        }
        Command::ExportLp { file, big_m } => {
            let inst = read_instance(&file)?;
            print!("{}", export_milp(&inst, big_m));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(2)
        }
    }
}
