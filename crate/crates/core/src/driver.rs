//! The Optimal Sort search: forward-solution sweeps, each candidate refined by
//! the segment rules, the consumption operator and the backward-solution
//! traversal.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::clock::Stopwatch;
use crate::instances::{initial_sequence, Instance, Sequence, Time};
use crate::move_calculus::{apply_move, backward_move_delta, forward_move_delta, idle_adjustment, Direction};
use crate::rules::{adjacent_exchange, bottleneck_breakthrough, SegmentContext, SegmentRole};
use crate::solution_sets::{backward_solution_set, forward_solution_set};
use crate::timeline::{compute_profile, objective_of, segment_profile, WaitingProfile};

/// One accepted update of the outer loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub iteration: u64,
    pub kind: Direction,
    /// Source position of the forward solution that seeded the update.
    pub i: usize,
    /// Anchor position of that forward solution.
    pub k: usize,
    /// Closed-form change of the single seeding move.
    pub predicted_delta: Time,
    /// Objective of the sweep's base sequence.
    pub objective_before: Time,
    /// Objective of the accepted sequence.
    pub objective_after: Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_sequence: Sequence,
    pub best_objective: Time,
    /// Outer passes run.
    pub iterations: u64,
    pub move_log: Vec<MoveRecord>,
    pub elapsed: Duration,
    pub safety_tripped: bool,
}

/// Objective value no sequence of `inst` can reach.
pub fn unreachable_objective(inst: &Instance) -> Time {
    inst.total_processing() * inst.len() as Time + inst.releases().iter().sum::<Time>() + 1
}

fn forward_candidate(
    inst: &Instance,
    base: &Sequence,
    profile: &WaitingProfile,
    i: usize,
    k: usize,
    exchange_whole: bool,
) -> Sequence {
    let n = base.len();
    let mover = base.job_at(i);
    let moved = apply_move(base, i, k, Direction::Forward).expect("forward solution in range");

    // Jobs the mover jumped over now sit at i..k and receive its removal.
    let decrease = inst.processing(mover) - profile.waits[i].min(0);
    let pd = SegmentContext::in_sequence(inst, &moved, i..k, SegmentRole::Decreasing, decrease);
    let entry = pd.realised_entry();
    let before = segment_profile(inst, &moved.order()[i..k], entry);
    let (mut candidate, _) = bottleneck_breakthrough(&pd, inst, &moved).expect("decreasing segment");
    let after = segment_profile(inst, &candidate.order()[i..k], entry);
    let idle_shift = idle_adjustment(&before, &after).expect("same segment jobs");

    if k + 1 < n {
        let shift = forward_move_delta(profile, inst, base, i, k)
            .expect("forward solution in range")
            .part_flow;
        // A negative shift is a decrease for the tail; the exchange then runs
        // without inflow and judges swaps at the realised entry anyway.
        let inflow = (shift + idle_shift).max(0);
        let pi = SegmentContext::in_sequence(inst, &candidate, k + 1..n, SegmentRole::Increasing, inflow);
        candidate = adjacent_exchange(&pi, inst, &candidate).expect("increasing segment").0;
    }
    if exchange_whole {
        let all = SegmentContext::in_sequence(inst, &candidate, 0..n, SegmentRole::Increasing, 0);
        candidate = adjacent_exchange(&all, inst, &candidate).expect("increasing segment").0;
    }
    candidate
}

fn backward_candidate(inst: &Instance, base: &Sequence, profile: &WaitingProfile, i: usize, k: usize) -> Sequence {
    let n = base.len();
    let eval = backward_move_delta(profile, inst, base, i, k).expect("backward solution in range");
    let moved = apply_move(base, i, k, Direction::Backward).expect("backward solution in range");

    // Crossed jobs now sit at k+1..=i and are pushed back by the insertion.
    let crossed_p: Time = (k..i).map(|j| inst.processing(base.job_at(j))).sum();
    let crossed_idle: Time = (k..i).map(|j| profile.waits[j].min(0)).sum();
    let p_mover = inst.processing(base.job_at(i));
    let insertion = p_mover.max(crossed_p + p_mover - crossed_idle - profile.waits[i]);

    let pi = SegmentContext::in_sequence(inst, &moved, k + 1..i + 1, SegmentRole::Increasing, insertion);
    let entry = pi.realised_entry();
    let before = segment_profile(inst, &moved.order()[k + 1..=i], entry);
    let (mut candidate, _) = adjacent_exchange(&pi, inst, &moved).expect("increasing segment");
    let after = segment_profile(inst, &candidate.order()[k + 1..=i], entry);
    let idle_shift = idle_adjustment(&before, &after).expect("same segment jobs");

    if i + 1 < n {
        // `part_flow` is the signed shift handed to the tail; the decrease the
        // tail sees is its negation, reduced by any idle the exchange added.
        let outflow = -eval.part_flow - idle_shift;
        let pd = SegmentContext::in_sequence(inst, &candidate, i + 1..n, SegmentRole::Decreasing, outflow);
        candidate = bottleneck_breakthrough(&pd, inst, &candidate)
            .expect("decreasing segment")
            .0;
    }
    candidate
}

/// Consumes improving forward solutions until none helps, then applies the
/// bottleneck rule to the whole sequence with zero inflow until that stops
/// helping. Never returns something worse than the input.
pub fn consumption_operator(seq: &Sequence, inst: &Instance) -> Sequence {
    let input_objective = objective_of(inst, seq);
    let mut best = seq.clone();
    let mut best_objective = input_objective;
    let n = seq.len();

    loop {
        let base = best.clone();
        let profile = compute_profile(inst, &base);
        let mut improved = false;
        for i in 0..n {
            for k in forward_solution_set(&profile, inst, &base, i) {
                let candidate = forward_candidate(inst, &base, &profile, i, k, false);
                let objective = objective_of(inst, &candidate);
                if objective < best_objective {
                    best = candidate;
                    best_objective = objective;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }

    loop {
        let ctx = SegmentContext::in_sequence(inst, &best, 0..n, SegmentRole::Decreasing, 0);
        let (candidate, _) = bottleneck_breakthrough(&ctx, inst, &best).expect("decreasing segment");
        let objective = objective_of(inst, &candidate);
        if objective < best_objective {
            best = candidate;
            best_objective = objective;
        } else {
            break;
        }
    }
    debug_assert!(best_objective <= input_objective);
    best.with_iteration(seq.iteration())
}

/// Traverses backward solutions, refining each with the exchange rule on the
/// crossed block and the bottleneck rule on the tail, and keeps the strictly
/// best result. Repeats from the new best until nothing improves.
pub fn backward_traversal(seq: &Sequence, inst: &Instance) -> Sequence {
    let n = seq.len();
    let mut best = seq.clone();
    let mut best_objective = objective_of(inst, seq);
    loop {
        let base = best.clone();
        let profile = compute_profile(inst, &base);
        let mut improved = false;
        for i in 0..n {
            for k in backward_solution_set(&profile, inst, &base, i) {
                let candidate = backward_candidate(inst, &base, &profile, i, k);
                let objective = objective_of(inst, &candidate);
                if objective < best_objective {
                    best = candidate;
                    best_objective = objective;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    best.with_iteration(seq.iteration())
}

/// Solves from the release-sorted start.
pub fn optimal_sort(inst: &Instance) -> SolveResult {
    optimal_sort_from(inst, initial_sequence(inst))
}

/// Runs the outer loop from `start`. The first sweep accepts its best
/// candidate unconditionally (the incumbent starts at an unreachable value);
/// later sweeps accept only strict improvements. The returned sequence is the
/// best seen, `start` included. More than `n^2` passes trips the safety valve.
pub fn optimal_sort_from(inst: &Instance, start: Sequence) -> SolveResult {
    let clock = Stopwatch::start();
    let n = inst.len();
    let pass_limit = (n * n).max(1) as u64;

    let mut sigma = start.with_iteration(0);
    let mut best = sigma.clone();
    let mut best_objective = objective_of(inst, &sigma);
    let mut incumbent = unreachable_objective(inst);
    let mut move_log = Vec::new();
    let mut t: u64 = 0;
    let mut safety_tripped = false;

    loop {
        if t >= pass_limit {
            safety_tripped = true;
            break;
        }
        let base = sigma.clone().with_iteration(t);
        let profile = compute_profile(inst, &base);
        let mut improved = false;
        for i in 0..n {
            for k in forward_solution_set(&profile, inst, &base, i) {
                let forward = forward_candidate(inst, &base, &profile, i, k, t == 0 && k + 1 == n);
                let consumed = consumption_operator(&forward, inst);
                let traversed = backward_traversal(&consumed, inst);
                let candidate = consumption_operator(&traversed, inst);
                let objective = objective_of(inst, &candidate);
                if incumbent > objective {
                    incumbent = objective;
                    improved = true;
                    move_log.push(MoveRecord {
                        iteration: t,
                        kind: Direction::Forward,
                        i,
                        k,
                        predicted_delta: forward_move_delta(&profile, inst, &base, i, k)
                            .expect("forward solution in range")
                            .delta_total,
                        objective_before: profile.objective,
                        objective_after: objective,
                    });
                    sigma = candidate;
                }
            }
        }
        t += 1;
        if objective_of(inst, &sigma) < best_objective {
            best_objective = objective_of(inst, &sigma);
            best = sigma.clone();
        }
        if !improved {
            break;
        }
    }

    SolveResult {
        best_sequence: best.with_iteration(t),
        best_objective,
        iterations: t,
        move_log,
        elapsed: clock.elapsed(),
        safety_tripped,
    }
}
