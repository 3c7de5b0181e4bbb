//! Closed-form objective changes for relocating one job.
//!
//! A forward move takes the job at position `i` and reinserts it right after
//! the job at position `k > i`. A backward move reinserts it right before the
//! job at position `k < i`. Both are split into a local part (the block the
//! mover crosses plus the mover itself), the signed shift handed to the first
//! untouched position, and the flow that shift produces in the tail.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instances::{Instance, Sequence, Time};
use crate::propagation::{propagate_decrease, propagate_increase, signed_flow_delta};
use crate::timeline::WaitingProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("{direction:?} move from {i} to {k} is not admissible for {n} positions")]
    InvalidPositions {
        direction: Direction,
        i: usize,
        k: usize,
        n: usize,
    },
    #[error("segments cover different job sets")]
    MismatchedSegments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveEvaluation {
    pub direction: Direction,
    /// Source position.
    pub i: usize,
    /// Anchor position.
    pub k: usize,
    /// Predicted change of the total waiting time.
    pub delta_total: Time,
    /// Local term of the crossed block.
    pub part_local: Time,
    /// Signed shift passed to the first position after the affected block.
    pub part_flow: Time,
    /// Objective change of the flow `part_flow` produces in the tail.
    pub flow_tail: Time,
    /// Signed wait of the moved job after the move.
    pub new_wait: Time,
}

fn check(direction: Direction, i: usize, k: usize, n: usize) -> Result<(), MoveError> {
    let ok = match direction {
        Direction::Forward => i < k && k < n,
        Direction::Backward => k < i && i < n,
    };
    if ok {
        Ok(())
    } else {
        Err(MoveError::InvalidPositions { direction, i, k, n })
    }
}

/// Evaluates moving the job at `i` to just after the job at `k` (`i < k`).
pub fn forward_move_delta(
    profile: &WaitingProfile,
    inst: &Instance,
    seq: &Sequence,
    i: usize,
    k: usize,
) -> Result<MoveEvaluation, MoveError> {
    let n = seq.len();
    check(Direction::Forward, i, k, n)?;
    let w = &profile.waits;
    let p = |pos: usize| inst.processing(seq.job_at(pos));

    // Removing the mover lowers the signed wait of its successor by this much.
    let removal = p(i) - w[i].min(0);
    let decrease = propagate_decrease(profile, i + 1, removal);

    let block: Time = (i + 1..=k).map(|j| p(j) - w[j].min(0)).sum();
    let block_drop: Time = (i + 2..=k + 1).map(|j| decrease.at(j)).sum();
    let part_local = block - block_drop;

    let part_flow = if (i + 1..=k).all(|j| w[j] > 0) {
        let crossed: Time = (i + 1..=k).map(p).sum();
        let tightest = (i + 1..=k).map(|j| p(i) - w[j]).max().expect("k > i");
        w[i].min(0).max(-crossed).max(tightest)
    } else {
        p(i)
    };

    let flow_tail = signed_flow_delta(profile, k + 1, part_flow);

    let new_wait = (i..=k).map(p).sum::<Time>() - (i + 1..=k).map(|j| w[j].min(0)).sum::<Time>() - decrease.at(k + 1)
        + w[i].max(0);

    Ok(MoveEvaluation {
        direction: Direction::Forward,
        i,
        k,
        delta_total: part_local + part_flow + flow_tail,
        part_local,
        part_flow,
        flow_tail,
        new_wait,
    })
}

/// Evaluates moving the job at `i` to just before the job at `k` (`k < i`).
pub fn backward_move_delta(
    profile: &WaitingProfile,
    inst: &Instance,
    seq: &Sequence,
    i: usize,
    k: usize,
) -> Result<MoveEvaluation, MoveError> {
    let n = seq.len();
    check(Direction::Backward, i, k, n)?;
    let w = &profile.waits;
    let p = |pos: usize| inst.processing(seq.job_at(pos));

    let crossed_p: Time = (k..i).map(p).sum();
    let crossed_idle: Time = (k..i).map(|j| w[j].min(0)).sum();

    // Inserting the mover before `k` raises the signed wait at `k` by this much.
    let insertion = p(i).max(crossed_p + p(i) - crossed_idle - w[i]);
    let increase = propagate_increase(profile, k, insertion);

    let part_local = (crossed_idle - crossed_p) + (k..i).map(|j| increase.at(j)).sum::<Time>();
    let part_flow = (-p(i)).max(crossed_idle).max(crossed_p - w[i].max(0));
    let flow_tail = signed_flow_delta(profile, i + 1, part_flow);
    // The first position has no predecessor and carries wait 0 by convention.
    let new_wait = if k == 0 { 0 } else { crossed_idle - crossed_p + w[i] };

    Ok(MoveEvaluation {
        direction: Direction::Backward,
        i,
        k,
        delta_total: part_local + part_flow + flow_tail,
        part_local,
        part_flow,
        flow_tail,
        new_wait,
    })
}

/// Dispatches on the relative order of `i` and `k`.
pub fn move_delta(
    profile: &WaitingProfile,
    inst: &Instance,
    seq: &Sequence,
    i: usize,
    k: usize,
) -> Result<MoveEvaluation, MoveError> {
    if i < k {
        forward_move_delta(profile, inst, seq, i, k)
    } else {
        backward_move_delta(profile, inst, seq, i, k)
    }
}

/// Relocates the job at `i`: after the job at `k` (forward) or before it
/// (backward). The iteration counter is kept.
pub fn apply_move(seq: &Sequence, i: usize, k: usize, direction: Direction) -> Result<Sequence, MoveError> {
    check(direction, i, k, seq.len())?;
    let mut order = seq.order().to_vec();
    match direction {
        Direction::Forward => order[i..=k].rotate_left(1),
        Direction::Backward => order[k..=i].rotate_right(1),
    }
    Ok(Sequence::from_order_unchecked(order, seq.iteration()))
}

/// Shift of the segment's idle: `sum min(0, w_before) - sum min(0, w_after)`.
/// Positive when re-sorting adds idle (the segment finishes later).
pub fn idle_adjustment(before: &WaitingProfile, after: &WaitingProfile) -> Result<Time, MoveError> {
    let mut a = before.jobs.clone();
    let mut b = after.jobs.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Err(MoveError::MismatchedSegments);
    }
    Ok(before.negative_sum() - after.negative_sum())
}
