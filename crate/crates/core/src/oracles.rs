//! Exact reference solvers and an MILP exporter.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clock::Stopwatch;
use crate::instances::{Instance, Sequence, Time};

/// Largest instance the exhaustive search accepts.
pub const BRUTE_FORCE_LIMIT: usize = 11;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force is limited to {limit} jobs, got {n}")]
    TooLarge { n: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub objective: Time,
    pub sequence: Sequence,
    pub proved_optimal: bool,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Exhaustive search over all orders. Prefixes whose accrued waiting already
/// reaches the incumbent are cut.
pub fn brute_force_optimum(inst: &Instance) -> Result<OracleResult, OracleError> {
    let n = inst.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let clock = Stopwatch::start();

    struct Search<'a> {
        inst: &'a Instance,
        prefix: Vec<usize>,
        used: Vec<bool>,
        best: Time,
        best_order: Vec<usize>,
        nodes: u64,
    }

    impl Search<'_> {
        fn dfs(&mut self, finish: Option<Time>, accrued: Time) {
            self.nodes += 1;
            let n = self.inst.len();
            if self.prefix.len() == n {
                if accrued < self.best {
                    self.best = accrued;
                    self.best_order.clone_from(&self.prefix);
                }
                return;
            }
            for j in 0..n {
                if self.used[j] {
                    continue;
                }
                let r = self.inst.release(j);
                let (start, wait) = match finish {
                    None => (r, 0),
                    Some(c) => (c.max(r), (c - r).max(0)),
                };
                if accrued + wait >= self.best {
                    continue;
                }
                self.used[j] = true;
                self.prefix.push(j);
                self.dfs(Some(start + self.inst.processing(j)), accrued + wait);
                self.prefix.pop();
                self.used[j] = false;
            }
        }
    }

    let mut search = Search {
        inst,
        prefix: Vec::with_capacity(n),
        used: vec![false; n],
        best: Time::MAX,
        best_order: Vec::new(),
        nodes: 0,
    };
    search.dfs(None, 0);

    Ok(OracleResult {
        objective: search.best,
        sequence: Sequence::from_order_unchecked(search.best_order, 0),
        proved_optimal: true,
        nodes_explored: search.nodes,
        elapsed: clock.elapsed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BnbOptions {
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Only branch on jobs that can start before every other unscheduled job
    /// could already be finished (active schedules). Always safe.
    pub active_only: bool,
    /// Skip a released job when another released job is both shorter and
    /// released earlier. This can cut every optimal order (see
    /// `release_dominance_is_unsafe` in the tests), so it is off by default.
    pub dominance: bool,
}

impl Default for BnbOptions {
    fn default() -> Self {
        BnbOptions {
            node_limit: None,
            time_limit: None,
            active_only: true,
            dominance: false,
        }
    }
}

/// Lower bound on the remaining waiting of `jobs` when the machine frees up
/// at `now`: the preemptive shortest-remaining-time schedule from `now`.
pub fn srpt_bound(inst: &Instance, jobs: &[usize], now: Option<Time>) -> Time {
    if jobs.is_empty() {
        return 0;
    }
    let mut pending: Vec<(Time, Time)> = jobs.iter().map(|&j| (inst.release(j), inst.processing(j))).collect();
    pending.sort_unstable();
    let mut clock = now.unwrap_or(pending[0].0).max(0);
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<(Time, Time)>> = Default::default();
    let mut next = 0;
    let mut total = 0;
    while next < pending.len() || !ready.is_empty() {
        if ready.is_empty() && clock < pending[next].0 {
            clock = pending[next].0;
        }
        while next < pending.len() && pending[next].0 <= clock {
            let (r, p) = pending[next];
            ready.push(std::cmp::Reverse((p, r + p)));
            next += 1;
        }
        let std::cmp::Reverse((remaining, base)) = ready.pop().expect("ready job");
        let horizon = pending.get(next).map_or(Time::MAX, |&(r, _)| r);
        if clock + remaining <= horizon {
            clock += remaining;
            // waiting = completion - release - processing
            total += clock - base;
        } else {
            ready.push(std::cmp::Reverse((remaining - (horizon - clock), base)));
            clock = horizon;
        }
    }
    total
}

/// Bound for a node: accrued waiting of `prefix` plus [`srpt_bound`] on the
/// rest. An empty prefix bounds the whole problem.
pub fn lower_bound(inst: &Instance, prefix: &[usize]) -> Time {
    let mut finish: Option<Time> = None;
    let mut accrued: Time = 0;
    let mut used = vec![false; inst.len()];
    for &j in prefix {
        let r = inst.release(j);
        let start = match finish {
            None => r,
            Some(c) => {
                accrued += (c - r).max(0);
                r.max(c)
            }
        };
        finish = Some(start + inst.processing(j));
        used[j] = true;
    }
    let rest: Vec<usize> = (0..inst.len()).filter(|&j| !used[j]).collect();
    accrued + srpt_bound(inst, &rest, finish)
}

/// Depth-first branch and bound with default options and the given limits.
pub fn branch_and_bound_optimum(
    inst: &Instance,
    node_limit: Option<u64>,
    time_limit: Option<Duration>,
) -> OracleResult {
    branch_and_bound_with(
        inst,
        &BnbOptions {
            node_limit,
            time_limit,
            ..BnbOptions::default()
        },
    )
}

pub fn branch_and_bound_with(inst: &Instance, options: &BnbOptions) -> OracleResult {
    let clock = Stopwatch::start();
    let n = inst.len();

    struct Search<'a> {
        inst: &'a Instance,
        options: &'a BnbOptions,
        clock: Stopwatch,
        prefix: Vec<usize>,
        rest: Vec<usize>,
        best: Time,
        best_order: Vec<usize>,
        nodes: u64,
        aborted: bool,
    }

    impl Search<'_> {
        fn out_of_budget(&mut self) -> bool {
            if self.options.node_limit.is_some_and(|limit| self.nodes >= limit) {
                self.aborted = true;
            }
            if self.nodes.is_multiple_of(1024)
                && self
                    .options
                    .time_limit
                    .is_some_and(|limit| self.clock.elapsed() >= limit)
            {
                self.aborted = true;
            }
            self.aborted
        }

        fn children(&self, finish: Option<Time>) -> Vec<(Time, usize)> {
            let inst = self.inst;
            let start_of = |j: usize| finish.map_or(inst.release(j), |c| c.max(inst.release(j)));
            let earliest_finish = self
                .rest
                .iter()
                .map(|&j| start_of(j) + inst.processing(j))
                .min()
                .unwrap_or(Time::MAX);
            let mut out = Vec::with_capacity(self.rest.len());
            for &j in &self.rest {
                if self.options.active_only && start_of(j) >= earliest_finish {
                    continue;
                }
                if self.options.dominance {
                    let released = |k: usize| finish.is_some_and(|c| inst.release(k) <= c);
                    let dominated = released(j)
                        && self.rest.iter().any(|&k| {
                            released(k) && inst.processing(k) < inst.processing(j) && inst.release(k) < inst.release(j)
                        });
                    if dominated {
                        continue;
                    }
                }
                out.push((start_of(j) + inst.processing(j), j));
            }
            out.sort_unstable();
            out
        }

        fn dfs(&mut self, finish: Option<Time>, accrued: Time) {
            self.nodes += 1;
            if self.rest.is_empty() {
                if accrued < self.best {
                    self.best = accrued;
                    self.best_order.clone_from(&self.prefix);
                }
                return;
            }
            if self.out_of_budget() {
                return;
            }
            if accrued + srpt_bound(self.inst, &self.rest, finish) >= self.best {
                return;
            }
            for (completion, j) in self.children(finish) {
                let wait = finish.map_or(0, |c| (c - self.inst.release(j)).max(0));
                if accrued + wait >= self.best {
                    continue;
                }
                let slot = self.rest.iter().position(|&x| x == j).expect("unscheduled job");
                self.rest.remove(slot);
                self.prefix.push(j);
                self.dfs(Some(completion), accrued + wait);
                self.prefix.pop();
                self.rest.insert(slot, j);
                if self.aborted {
                    return;
                }
            }
        }
    }

    let (seed_order, seed_objective) = greedy_schedule(inst);
    let mut search = Search {
        inst,
        options,
        clock,
        prefix: Vec::with_capacity(n),
        rest: (0..n).collect(),
        best: seed_objective,
        best_order: seed_order,
        nodes: 0,
        aborted: false,
    };
    search.dfs(None, 0);

    OracleResult {
        objective: search.best,
        sequence: Sequence::from_order_unchecked(search.best_order, 0),
        proved_optimal: !search.aborted,
        nodes_explored: search.nodes,
        elapsed: clock.elapsed(),
    }
}

/// Starting incumbent: whenever the machine frees up, run the job that would
/// finish first.
fn greedy_schedule(inst: &Instance) -> (Vec<usize>, Time) {
    let mut rest: Vec<usize> = (0..inst.len()).collect();
    let mut order = Vec::with_capacity(rest.len());
    let mut finish: Option<Time> = None;
    let mut total = 0;
    while !rest.is_empty() {
        let start_of = |j: usize| finish.map_or(inst.release(j), |c| c.max(inst.release(j)));
        let slot = (0..rest.len())
            .min_by_key(|&s| (start_of(rest[s]) + inst.processing(rest[s]), rest[s]))
            .expect("nonempty");
        let j = rest.remove(slot);
        if let Some(c) = finish {
            total += (c - inst.release(j)).max(0);
        }
        finish = Some(start_of(j) + inst.processing(j));
        order.push(j);
    }
    (order, total)
}

/// `max r + sum p`: no start time of a reasonable schedule exceeds it.
pub fn auto_big_m(inst: &Instance) -> Time {
    inst.releases().iter().copied().max().unwrap_or(0) + inst.total_processing()
}

/// The disjunctive model in LP text format. Jobs are numbered from 1.
pub fn export_milp(inst: &Instance, big_m: Option<Time>) -> String {
    let n = inst.len();
    let m = big_m.unwrap_or_else(|| auto_big_m(inst));
    let mut out = String::new();
    let _ = writeln!(out, "\\ total waiting time, {n} jobs, big-M {m}");
    out.push_str("Minimize\n obj:");
    for i in 1..=n {
        let _ = write!(out, "{} w{i}", if i == 1 { "" } else { " +" });
    }
    out.push_str("\nSubject To\n");
    for i in 1..=n {
        let _ = writeln!(out, " wait{i}: w{i} - S{i} >= {}", -inst.release(i - 1));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let (pi, pj) = (inst.processing(i - 1), inst.processing(j - 1));
            let _ = writeln!(out, " before{i}_{j}: S{i} - S{j} + {m} x{i}_{j} <= {}", m - pi);
            let _ = writeln!(out, " after{i}_{j}: S{j} - S{i} - {m} x{i}_{j} <= {}", -pj);
        }
    }
    out.push_str("Bounds\n");
    for i in 1..=n {
        let _ = writeln!(out, " S{i} >= {}", inst.release(i - 1));
    }
    out.push_str("Binaries\n");
    for i in 1..=n {
        for j in i + 1..=n {
            let _ = writeln!(out, " x{i}_{j}");
        }
    }
    out.push_str("End\n");
    out
}
