//! Benchmarks against the exact oracles and counterexample mining.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::Stopwatch;
use crate::driver::optimal_sort;
use crate::instances::{derive_seed, generate_instance, parse_instance, Instance, Sequence, Time};
use crate::move_calculus::{apply_move, Direction};
use crate::oracles::{branch_and_bound_optimum, brute_force_optimum, OracleResult, BRUTE_FORCE_LIMIT};
use crate::solution_sets::full_solution_space;
use crate::timeline::{compute_profile, objective_of};

/// Largest size the default pairing sends to branch and bound.
pub const BRANCH_AND_BOUND_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    BruteForce,
    BranchAndBound,
    /// No reference solution: the row only reports solver time.
    RuntimeOnly,
}

impl OracleMethod {
    /// Brute force up to 11 jobs, branch and bound up to 16, timing beyond.
    pub fn for_size(n: usize) -> Self {
        if n <= BRUTE_FORCE_LIMIT {
            OracleMethod::BruteForce
        } else if n <= BRANCH_AND_BOUND_LIMIT {
            OracleMethod::BranchAndBound
        } else {
            OracleMethod::RuntimeOnly
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OracleMethod::BruteForce => "brute",
            OracleMethod::BranchAndBound => "bnb",
            OracleMethod::RuntimeOnly => "none",
        }
    }

    /// Runs the oracle; `None` for runtime-only.
    pub fn solve(self, inst: &Instance) -> Result<Option<OracleResult>, HarnessError> {
        match self {
            OracleMethod::BruteForce => brute_force_optimum(inst)
                .map(Some)
                .map_err(|_| HarnessError::Infeasible {
                    n: inst.len(),
                    method: self,
                }),
            OracleMethod::BranchAndBound => Ok(Some(branch_and_bound_optimum(inst, None, None))),
            OracleMethod::RuntimeOnly => Ok(None),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error("size {n} cannot be checked with {method:?}")]
    Infeasible { n: usize, method: OracleMethod },
    #[error("counterexample does not re-verify: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    /// Per-size oracle; `None` picks [`OracleMethod::for_size`].
    pub method: Option<OracleMethod>,
    /// Solve instances on worker threads. Timings are cleaner without.
    pub parallel: bool,
}

impl BenchConfig {
    pub fn new(sizes: Vec<usize>, count: usize, seed: u64) -> Self {
        BenchConfig {
            sizes,
            count,
            seed,
            method: None,
            parallel: true,
        }
    }
}

/// Result of one benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub n: usize,
    pub index: usize,
    pub seed: u64,
    pub solver_objective: Time,
    pub oracle_objective: Option<Time>,
    pub oracle_proved: bool,
    pub solver_ms: f64,
    pub oracle_ms: Option<f64>,
    pub iterations: u64,
    pub safety_tripped: bool,
    /// Accepted objectives in the move log strictly decrease.
    pub log_monotone: bool,
}

impl InstanceOutcome {
    /// `(solver - oracle) / max(1, oracle)` in percent, when the oracle proved
    /// its value.
    pub fn gap_pct(&self) -> Option<f64> {
        match self.oracle_objective {
            Some(opt) if self.oracle_proved => Some(100.0 * (self.solver_objective - opt) as f64 / opt.max(1) as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub instances: usize,
    pub oracle: OracleMethod,
    pub mean_solver_ms: f64,
    pub max_solver_ms: f64,
    pub mean_oracle_ms: Option<f64>,
    pub mean_gap_pct: Option<f64>,
    pub max_gap_pct: Option<f64>,
    pub mismatches: usize,
    pub unproven: usize,
    pub safety_trips: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub os: String,
    pub arch: String,
    pub threads: usize,
    pub version: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub environment: Environment,
    pub rows: Vec<BenchRow>,
    pub outcomes: Vec<InstanceOutcome>,
}

/// Per-instance `(n, index, seed, solver, oracle, proved, iterations)`.
pub type UntimedOutcome = (usize, usize, u64, Time, Option<Time>, bool, u64);

impl BenchReport {
    /// Everything except wall-clock times; equal for equal configurations.
    pub fn results_without_timing(&self) -> Vec<UntimedOutcome> {
        self.outcomes
            .iter()
            .map(|o| {
                (
                    o.n,
                    o.index,
                    o.seed,
                    o.solver_objective,
                    o.oracle_objective,
                    o.oracle_proved,
                    o.iterations,
                )
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn mismatches(&self) -> usize {
        self.rows.iter().map(|r| r.mismatches).sum()
    }
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"))
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>4} {:>6} {:>12} {:>12} {:>7} {:>12} {:>10} {:>10} {:>9}",
            "n", "count", "solver (s)", "max (s)", "oracle", "oracle (s)", "gap (%)", "max gap", "mismatch"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>4} {:>6} {:>12.4} {:>12.4} {:>7} {:>12} {:>10} {:>10} {:>9}",
                r.n,
                r.instances,
                r.mean_solver_ms / 1e3,
                r.max_solver_ms / 1e3,
                r.oracle.label(),
                fmt_opt(r.mean_oracle_ms.map(|ms| ms / 1e3), 4),
                fmt_opt(r.mean_gap_pct, 4),
                fmt_opt(r.max_gap_pct, 4),
                r.mismatches,
            );
        }
        if self.rows.iter().any(|r| r.oracle == OracleMethod::RuntimeOnly) {
            out.push_str("rows with oracle \"none\" have no proven optimum and report solver time only\n");
        }
        let _ = write!(
            out,
            "seed {}, {} {} with {} threads, version {}",
            self.config.seed,
            self.environment.os,
            self.environment.arch,
            self.environment.threads,
            self.environment.version
        );
        f.write_str(&out)
    }
}

/// Seed of instance `index` of size `n` in a run seeded with `seed`.
pub fn instance_seed(seed: u64, n: usize, index: usize) -> u64 {
    derive_seed(seed, n as u64, index as u64)
}

fn evaluate(n: usize, index: usize, seed: u64, method: OracleMethod) -> Result<InstanceOutcome, HarnessError> {
    let inst = generate_instance(n, seed);
    let clock = Stopwatch::start();
    let solved = optimal_sort(&inst);
    let solver_ms = clock.elapsed().as_secs_f64() * 1e3;
    let clock = Stopwatch::start();
    let oracle = method.solve(&inst)?;
    let oracle_ms = oracle.as_ref().map(|_| clock.elapsed().as_secs_f64() * 1e3);
    let log_monotone = solved
        .move_log
        .windows(2)
        .all(|w| w[1].objective_after < w[0].objective_after);
    Ok(InstanceOutcome {
        n,
        index,
        seed,
        solver_objective: solved.best_objective,
        oracle_objective: oracle.as_ref().map(|o| o.objective),
        oracle_proved: oracle.as_ref().is_some_and(|o| o.proved_optimal),
        solver_ms,
        oracle_ms,
        iterations: solved.iterations,
        safety_tripped: solved.safety_tripped,
        log_monotone,
    })
}

fn aggregate(n: usize, method: OracleMethod, outcomes: &[InstanceOutcome]) -> BenchRow {
    let count = outcomes.len();
    let mean = |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let gaps: Vec<f64> = outcomes.iter().filter_map(InstanceOutcome::gap_pct).collect();
    BenchRow {
        n,
        instances: count,
        oracle: method,
        mean_solver_ms: mean(outcomes.iter().map(|o| o.solver_ms).collect()).unwrap_or(0.0),
        max_solver_ms: outcomes.iter().map(|o| o.solver_ms).fold(0.0, f64::max),
        mean_oracle_ms: mean(outcomes.iter().filter_map(|o| o.oracle_ms).collect()),
        max_gap_pct: gaps.iter().copied().reduce(f64::max),
        mean_gap_pct: mean(gaps),
        mismatches: outcomes
            .iter()
            .filter(|o| o.oracle_proved && o.oracle_objective.is_some_and(|v| v != o.solver_objective))
            .count(),
        unproven: outcomes
            .iter()
            .filter(|o| method != OracleMethod::RuntimeOnly && !o.oracle_proved)
            .count(),
        safety_trips: outcomes.iter().filter(|o| o.safety_tripped).count(),
    }
}

pub fn run_benchmark(sizes: &[usize], count: usize, seed: u64) -> Result<BenchReport, HarnessError> {
    run_benchmark_with(&BenchConfig::new(sizes.to_vec(), count, seed))
}

pub fn run_benchmark_with(config: &BenchConfig) -> Result<BenchReport, HarnessError> {
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for &n in &config.sizes {
        let method = config.method.unwrap_or_else(|| OracleMethod::for_size(n));
        if n == 0 || (method == OracleMethod::BruteForce && n > BRUTE_FORCE_LIMIT) {
            return Err(HarnessError::Infeasible { n, method });
        }
        if config.count == 0 {
            continue;
        }
        let run = |index: usize| evaluate(n, index, instance_seed(config.seed, n, index), method);
        let batch = if config.parallel {
            par_map(config.count, run)
        } else {
            (0..config.count).map(run).collect()
        };
        let batch = batch.into_iter().collect::<Result<Vec<_>, _>>()?;
        rows.push(aggregate(n, method, &batch));
        outcomes.extend(batch);
    }
    Ok(BenchReport {
        config: config.clone(),
        environment: Environment::current(),
        rows,
        outcomes,
    })
}

#[cfg(feature = "parallel")]
fn par_map<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T>(count: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..count).map(f).collect()
}

/// An instance on which the solver is strictly worse than the exact optimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    /// Canonical instance text.
    pub instance: String,
    pub solver_objective: Time,
    pub oracle_objective: Time,
    /// One-based job ids.
    pub solver_sequence: Vec<usize>,
    pub oracle_sequence: Vec<usize>,
    pub shrunk: bool,
}

impl Counterexample {
    /// Re-derives both objectives from the stored sequences and checks the
    /// strict gap.
    pub fn verify(&self) -> Result<(), HarnessError> {
        let inst = parse_instance(&self.instance).map_err(|e| HarnessError::Invalid(e.to_string()))?;
        let objective = |ids: &[usize]| {
            Sequence::from_job_ids(ids, inst.len())
                .map(|s| objective_of(&inst, &s))
                .map_err(|e| HarnessError::Invalid(e.to_string()))
        };
        let solver = objective(&self.solver_sequence)?;
        let oracle = objective(&self.oracle_sequence)?;
        if solver != self.solver_objective || oracle != self.oracle_objective {
            return Err(HarnessError::Invalid(
                "stored objectives disagree with the sequences".into(),
            ));
        }
        if solver <= oracle {
            return Err(HarnessError::Invalid(format!(
                "no gap: solver {solver}, oracle {oracle}"
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("counterexample serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let ce: Counterexample = serde_json::from_str(text).map_err(|e| HarnessError::Invalid(e.to_string()))?;
        ce.verify()?;
        Ok(ce)
    }
}

/// Compares the solver with brute force. `Some` on a strict gap.
pub fn check_instance(inst: &Instance) -> Result<Option<Counterexample>, HarnessError> {
    check_instance_with(inst, &|i: &Instance| optimal_sort(i).best_sequence)
}

/// [`check_instance`] for an arbitrary solver.
pub fn check_instance_with(
    inst: &Instance,
    solver: &dyn Fn(&Instance) -> Sequence,
) -> Result<Option<Counterexample>, HarnessError> {
    let solved = solver(inst);
    let solver_objective = objective_of(inst, &solved);
    let exact = OracleMethod::BruteForce
        .solve(inst)?
        .expect("brute force yields a result");
    if solver_objective <= exact.objective {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        instance: inst.to_text(),
        solver_objective,
        oracle_objective: exact.objective,
        solver_sequence: solved.job_ids(),
        oracle_sequence: exact.sequence.job_ids(),
        shrunk: false,
    }))
}

/// Drops one job at a time while the gap persists.
pub fn shrink(found: Counterexample) -> Counterexample {
    shrink_with(found, &|i: &Instance| optimal_sort(i).best_sequence)
}

pub fn shrink_with(found: Counterexample, solver: &dyn Fn(&Instance) -> Sequence) -> Counterexample {
    let mut current = found;
    loop {
        let inst = parse_instance(&current.instance).expect("counterexample instance parses");
        if inst.len() <= 1 {
            return current;
        }
        let smaller = (0..inst.len()).find_map(|drop| {
            let keep: Vec<usize> = (0..inst.len()).filter(|&j| j != drop).collect();
            let sub = inst.subset(&keep).expect("nonempty subset");
            check_instance_with(&sub, solver).ok().flatten()
        });
        match smaller {
            Some(next) => current = Counterexample { shrunk: true, ..next },
            None => return current,
        }
    }
}

/// Checks `count` generated instances of size `n`; every strict gap is shrunk
/// and returned.
pub fn mine_counterexamples(n: usize, count: usize, seed: u64) -> Result<Vec<Counterexample>, HarnessError> {
    mine_with(n, count, seed, &|i: &Instance| optimal_sort(i).best_sequence)
}

pub fn mine_with(
    n: usize,
    count: usize,
    seed: u64,
    solver: &(dyn Fn(&Instance) -> Sequence + Sync),
) -> Result<Vec<Counterexample>, HarnessError> {
    if n == 0 || n > BRUTE_FORCE_LIMIT {
        return Err(HarnessError::Infeasible {
            n,
            method: OracleMethod::BruteForce,
        });
    }
    let found = par_map(count, |index| {
        check_instance_with(&generate_instance(n, instance_seed(seed, n, index)), solver)
    });
    let mut out = Vec::new();
    for ce in found {
        if let Some(ce) = ce? {
            out.push(shrink_with(ce, solver));
        }
    }
    Ok(out)
}

/// A strictly improving single relocation outside the candidate sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissedMove {
    pub direction: Direction,
    pub i: usize,
    pub k: usize,
    pub delta: Time,
}

/// Enumerates every single relocation of `seq` and returns the strictly
/// improving ones whose result no member of the solution space produces.
pub fn missed_improving_moves(inst: &Instance, seq: &Sequence) -> Vec<MissedMove> {
    let profile = compute_profile(inst, seq);
    let space = full_solution_space(&profile, inst, seq);
    let reachable: HashSet<Vec<usize>> = space
        .union()
        .into_iter()
        .map(|(d, i, k)| apply_move(seq, i, k, d).expect("candidate in range").into_order())
        .collect();
    let n = seq.len();
    let mut out = Vec::new();
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            let direction = if i < k { Direction::Forward } else { Direction::Backward };
            let moved = apply_move(seq, i, k, direction).expect("positions in range");
            let delta = objective_of(inst, &moved) - profile.objective;
            if delta < 0 && !reachable.contains(moved.order()) {
                out.push(MissedMove { direction, i, k, delta });
            }
        }
    }
    out
}
