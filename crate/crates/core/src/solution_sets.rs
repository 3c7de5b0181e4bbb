//! Candidate relocations: the forward and backward solution sets and their
//! union.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::instances::{Instance, Sequence, Time};
use crate::move_calculus::Direction;
use crate::timeline::WaitingProfile;

/// Per-position candidate anchors. `forward[i]` holds anchors `k > i` (insert
/// after `k`), `backward[i]` holds anchors `k < i` (insert before `k`).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolutionSets {
    pub forward: Vec<Vec<usize>>,
    pub backward: Vec<Vec<usize>>,
}

impl SolutionSets {
    /// The union as `(direction, i, k)` triples, forward ones first.
    pub fn union(&self) -> BTreeSet<(Direction, usize, usize)> {
        let fw = self
            .forward
            .iter()
            .enumerate()
            .flat_map(|(i, ks)| ks.iter().map(move |&k| (Direction::Forward, i, k)));
        let bw = self
            .backward
            .iter()
            .enumerate()
            .flat_map(|(i, ks)| ks.iter().map(move |&k| (Direction::Backward, i, k)));
        fw.chain(bw).collect()
    }

    pub fn contains(&self, direction: Direction, i: usize, k: usize) -> bool {
        let sets = match direction {
            Direction::Forward => &self.forward,
            Direction::Backward => &self.backward,
        };
        sets.get(i).is_some_and(|ks| ks.contains(&k))
    }

    pub fn forward_count(&self) -> usize {
        self.forward.iter().map(Vec::len).sum()
    }

    pub fn backward_count(&self) -> usize {
        self.backward.iter().map(Vec::len).sum()
    }
}

/// `{k > i : sum_{j=i+1..k} (p_j - (p_i - min(0, w_i))) <= 0}`.
pub fn forward_solution_set(profile: &WaitingProfile, inst: &Instance, seq: &Sequence, i: usize) -> Vec<usize> {
    let n = seq.len();
    let budget = inst.processing(seq.job_at(i)) - profile.waits[i].min(0);
    let mut running: Time = 0;
    let mut out = Vec::new();
    for k in i + 1..n {
        running += inst.processing(seq.job_at(k)) - budget;
        if running <= 0 {
            out.push(k);
        }
    }
    out
}

/// Insertion anchors for moving the job at `i` earlier. Empty when `w_i <= 0`.
/// Otherwise walks back one step at a time accumulating `p - min(0, w)` of the
/// crossed jobs; the first step whose total reaches `w_i` is the last one
/// taken (all `i - 1` steps when none does). Anchors are returned nearest
/// first.
pub fn backward_solution_set(profile: &WaitingProfile, inst: &Instance, seq: &Sequence, i: usize) -> Vec<usize> {
    let wait = profile.waits[i];
    if wait <= 0 || i == 0 {
        return Vec::new();
    }
    let mut running: Time = 0;
    let mut out = Vec::new();
    for step in 1..=i {
        let pos = i - step;
        running += inst.processing(seq.job_at(pos)) - profile.waits[pos].min(0);
        out.push(pos);
        if wait <= running {
            break;
        }
    }
    out
}

pub fn full_solution_space(profile: &WaitingProfile, inst: &Instance, seq: &Sequence) -> SolutionSets {
    let n = seq.len();
    SolutionSets {
        forward: (0..n).map(|i| forward_solution_set(profile, inst, seq, i)).collect(),
        backward: (0..n).map(|i| backward_solution_set(profile, inst, seq, i)).collect(),
    }
}
