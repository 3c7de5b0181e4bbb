//! Signed waiting profiles.
//!
//! A job's signed wait is the completion time of its predecessor minus its own
//! release. A non-positive wait marks a queue leader: the machine idled for
//! `-w` before it and it starts at its release. Inside a contiguous queue the
//! wait of position `j` is `r_leader + sum(p since leader) - r_j`, which is the
//! recursion [`compute_profile`] runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instances::{Instance, Sequence, Time};

/// Position-indexed schedule of one sequence (or of a contiguous segment).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaitingProfile {
    /// Job at each position.
    pub jobs: Vec<usize>,
    pub waits: Vec<Time>,
    pub leader: Vec<bool>,
    pub starts: Vec<Time>,
    pub completions: Vec<Time>,
    /// `sum max(0, w)`.
    pub objective: Time,
}

impl WaitingProfile {
    #[inline]
    pub fn len(&self) -> usize {
        self.waits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.waits.is_empty()
    }

    #[inline]
    pub fn wait(&self, position: usize) -> Time {
        self.waits[position]
    }

    #[inline]
    pub fn positive_wait(&self, position: usize) -> Time {
        self.waits[position].max(0)
    }

    /// Machine idle inserted right before `position`.
    #[inline]
    pub fn idle_before(&self, position: usize) -> Time {
        -self.waits[position].min(0)
    }

    /// `sum min(0, w)`, i.e. minus the total idle.
    pub fn negative_sum(&self) -> Time {
        self.waits.iter().map(|w| (*w).min(0)).sum()
    }

    /// Cheap fingerprint used to catch traces applied to a stale profile.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xCBF2_9CE4_8422_2325;
        for (&j, &w) in self.jobs.iter().zip(&self.waits) {
            h = (h ^ j as u64).wrapping_mul(0x1000_0000_01B3);
            h = (h ^ w as u64).wrapping_mul(0x1000_0000_01B3);
        }
        h
    }
}

/// Profile of the full sequence. Position 0 is a leader with wait 0.
pub fn compute_profile(inst: &Instance, seq: &Sequence) -> WaitingProfile {
    segment_profile(inst, seq.order(), None)
}

/// Profile of `jobs` processed back to back after a predecessor that
/// completes at `entry`. With `entry = None` the first job is a leader with
/// wait 0.
pub fn segment_profile(inst: &Instance, jobs: &[usize], entry: Option<Time>) -> WaitingProfile {
    let n = jobs.len();
    let mut waits = Vec::with_capacity(n);
    let mut leader = Vec::with_capacity(n);
    let mut starts = Vec::with_capacity(n);
    let mut completions = Vec::with_capacity(n);
    let mut objective = 0;

    // Queue anchor: release of the current leader (or the entry time when the
    // segment opens inside a running queue) and processing accumulated since.
    let (mut anchor, mut cumulative) = match (entry, jobs.first()) {
        (Some(e), _) => (e, 0),
        (None, Some(&first)) => (inst.release(first), 0),
        (None, None) => (0, 0),
    };
    for &job in jobs {
        let r = inst.release(job);
        let w = anchor + cumulative - r;
        let is_leader = w <= 0;
        if is_leader {
            anchor = r;
            cumulative = 0;
        }
        let start = r + w.max(0);
        cumulative += inst.processing(job);
        waits.push(w);
        leader.push(is_leader);
        starts.push(start);
        completions.push(start + inst.processing(job));
        objective += w.max(0);
    }
    WaitingProfile {
        jobs: jobs.to_vec(),
        waits,
        leader,
        starts,
        completions,
        objective,
    }
}

/// Objective of `jobs` after `entry` without building a profile.
pub fn segment_objective(inst: &Instance, jobs: &[usize], entry: Option<Time>) -> Time {
    let mut clock = match (entry, jobs.first()) {
        (Some(e), _) => e,
        (None, Some(&first)) => inst.release(first),
        (None, None) => return 0,
    };
    let mut total = 0;
    for &job in jobs {
        let r = inst.release(job);
        let start = clock.max(r);
        total += start - r;
        clock = start + inst.processing(job);
    }
    total
}

/// Completion time of the last job of `jobs` after `entry`.
pub fn segment_makespan(inst: &Instance, jobs: &[usize], entry: Option<Time>) -> Option<Time> {
    let mut clock = match (entry, jobs.first()) {
        (Some(e), _) => e,
        (None, Some(&first)) => inst.release(first),
        (None, None) => return entry,
    };
    for &job in jobs {
        clock = clock.max(inst.release(job)) + inst.processing(job);
    }
    Some(clock)
}

pub fn objective_of(inst: &Instance, seq: &Sequence) -> Time {
    segment_objective(inst, seq.order(), None)
}

pub fn total_waiting(profile: &WaitingProfile) -> Time {
    profile.waits.iter().map(|w| (*w).max(0)).sum()
}

/// Completion of the last position; `None` for an empty profile.
pub fn makespan(profile: &WaitingProfile) -> Option<Time> {
    profile.completions.last().copied()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdjacentOrder {
    /// `r_k <= r_{k+1}`: `max(0, w_k) + p_k >= max(0, w_{k+1})`.
    FcfsConsistent,
    /// `r_k > r_{k+1}`: `max(0, w_k) + p_k < max(0, w_{k+1})`.
    LcfsSwapped,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TimelineError {
    #[error("position {position} has no successor in a sequence of {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error(
        "adjacency invariant broken at position {position}: release order says {expected:?} \
         but max(0,w)+p = {lhs}, max(0,w_next) = {rhs}"
    )]
    InvariantViolation {
        position: usize,
        expected: AdjacentOrder,
        lhs: Time,
        rhs: Time,
    },
}

/// Classifies the pair at positions `k, k+1` by release order and checks the
/// matching waiting-time inequality.
pub fn classify_adjacent(
    profile: &WaitingProfile,
    inst: &Instance,
    seq: &Sequence,
    k: usize,
) -> Result<AdjacentOrder, TimelineError> {
    let n = seq.len();
    if k + 1 >= n {
        return Err(TimelineError::PositionOutOfRange { position: k, len: n });
    }
    let (a, b) = (seq.job_at(k), seq.job_at(k + 1));
    let lhs = profile.positive_wait(k) + inst.processing(a);
    let rhs = profile.positive_wait(k + 1);
    let (expected, holds) = if inst.release(a) <= inst.release(b) {
        (AdjacentOrder::FcfsConsistent, lhs >= rhs)
    } else {
        (AdjacentOrder::LcfsSwapped, lhs < rhs)
    };
    if holds {
        Ok(expected)
    } else {
        Err(TimelineError::InvariantViolation {
            position: k,
            expected,
            lhs,
            rhs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{initial_sequence, reference_instance};

    fn seq(ids: &[usize], n: usize) -> Sequence {
        Sequence::from_job_ids(ids, n).unwrap()
    }

    #[test]
    fn reference_profile() {
        let inst = reference_instance();
        let p = compute_profile(&inst, &initial_sequence(&inst));
        assert_eq!(p.waits, vec![0, 2, 1, -8, 1]);
        assert_eq!(p.leader, vec![true, false, false, true, false]);
        assert_eq!(p.objective, 4);
        assert_eq!(total_waiting(&p), 4);
        assert_eq!(makespan(&p), Some(31));
        assert_eq!(p.idle_before(3), 8);
    }

    #[test]
    fn swapped_tail_profile() {
        let inst = reference_instance();
        let p = compute_profile(&inst, &seq(&[1, 2, 3, 5, 4], 5));
        assert_eq!(p.waits, vec![0, 2, 1, -12, 10]);
        assert_eq!(total_waiting(&p), 13);
    }

    #[test]
    fn single_job() {
        let inst = Instance::new(vec![0], vec![7]).unwrap();
        let p = compute_profile(&inst, &Sequence::identity(1));
        assert_eq!(p.waits, vec![0]);
        assert_eq!(p.objective, 0);
        assert_eq!(makespan(&p), Some(7));
    }

    #[test]
    fn widely_spaced_releases_never_wait() {
        let inst = Instance::new(vec![0, 100, 200], vec![5, 5, 5]).unwrap();
        let p = compute_profile(&inst, &Sequence::identity(3));
        assert!(p.leader.iter().all(|&l| l));
        assert_eq!(total_waiting(&p), 0);
    }

    #[test]
    fn back_to_back_makespan() {
        let inst = Instance::new(vec![3, 3, 3, 4], vec![2, 3, 4, 1]).unwrap();
        let p = compute_profile(&inst, &Sequence::identity(4));
        assert_eq!(makespan(&p), Some(3 + 10));
    }

    #[test]
    fn makespan_from_idle() {
        let inst = reference_instance();
        let p = compute_profile(&inst, &initial_sequence(&inst));
        let idle: Time = (1..p.len()).map(|k| p.idle_before(k)).sum();
        assert_eq!(makespan(&p), Some(p.starts[0] + inst.total_processing() + idle));
    }

    #[test]
    fn classify_examples() {
        let inst = reference_instance();
        let s = initial_sequence(&inst);
        let p = compute_profile(&inst, &s);
        assert_eq!(classify_adjacent(&p, &inst, &s, 0), Ok(AdjacentOrder::FcfsConsistent));

        let inst = Instance::new(vec![0, 1, 2], vec![2, 5, 3]).unwrap();
        let s = seq(&[1, 3, 2], 3);
        let p = compute_profile(&inst, &s);
        assert_eq!(p.waits, vec![0, 0, 4]);
        assert_eq!(classify_adjacent(&p, &inst, &s, 1), Ok(AdjacentOrder::LcfsSwapped));

        let inst = Instance::new(vec![4, 4, 4], vec![9, 1, 3]).unwrap();
        let s = Sequence::identity(3);
        let p = compute_profile(&inst, &s);
        for k in 0..2 {
            assert_eq!(classify_adjacent(&p, &inst, &s, k), Ok(AdjacentOrder::FcfsConsistent));
        }
        assert!(matches!(
            classify_adjacent(&p, &inst, &s, 2),
            Err(TimelineError::PositionOutOfRange { .. })
        ));
    }

    #[test]
    fn corrupted_profile_is_reported() {
        let inst = reference_instance();
        let s = initial_sequence(&inst);
        let mut p = compute_profile(&inst, &s);
        p.waits[1] = 50;
        assert!(matches!(
            classify_adjacent(&p, &inst, &s, 0),
            Err(TimelineError::InvariantViolation { position: 0, .. })
        ));
    }

    #[test]
    fn segment_entry_shifts_first_wait() {
        let inst = reference_instance();
        let p = segment_profile(&inst, &[3, 4], Some(25));
        assert_eq!(p.waits, vec![5, 6]);
        assert_eq!(segment_objective(&inst, &[3, 4], Some(25)), 11);
        assert_eq!(segment_makespan(&inst, &[3, 4], Some(25)), Some(36));
    }
}
