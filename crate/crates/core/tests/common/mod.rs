//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use optsort::instances::{derive_seed, SplitMix64};
use optsort::{generate_instance, Instance, Sequence, Time};

/// Plain single-server simulation of `order`.
pub struct Simulation {
    pub starts: Vec<Time>,
    pub completions: Vec<Time>,
    /// Machine idle right before each position (0 for the first).
    pub idle: Vec<Time>,
    pub objective: Time,
}

pub fn simulate(inst: &Instance, order: &[usize]) -> Simulation {
    simulate_from(inst, order, None)
}

/// Simulation with the machine busy until `entry` (free at the first release
/// when `None`).
pub fn simulate_from(inst: &Instance, order: &[usize], entry: Option<Time>) -> Simulation {
    let mut starts = Vec::new();
    let mut completions = Vec::new();
    let mut idle = Vec::new();
    let mut objective = 0;
    let mut free_at = entry;
    for &j in order {
        let r = inst.release(j);
        let start = match free_at {
            Some(c) => c.max(r),
            None => r,
        };
        idle.push(free_at.map_or(0, |c| (start - c).max(0)));
        objective += start - r;
        starts.push(start);
        completions.push(start + inst.processing(j));
        free_at = Some(start + inst.processing(j));
    }
    Simulation {
        starts,
        completions,
        idle,
        objective,
    }
}

pub fn random_order(rng: &mut SplitMix64, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.uniform_inclusive(0, i as Time) as usize;
        order.swap(i, j);
    }
    order
}

pub fn random_sequence(rng: &mut SplitMix64, n: usize) -> Sequence {
    Sequence::new(random_order(rng, n), n).unwrap()
}

/// Instance `index` of a test stream.
pub fn instance(n: usize, stream: u64, index: u64) -> Instance {
    generate_instance(n, derive_seed(0x5EED, stream, index))
}

/// Minimum waiting over all orders of `rest` after a machine free at `entry`.
pub fn best_completion(inst: &Instance, rest: &mut Vec<usize>, entry: Option<Time>) -> Time {
    if rest.is_empty() {
        return 0;
    }
    let mut best = Time::MAX;
    for slot in 0..rest.len() {
        let j = rest.remove(slot);
        let r = inst.release(j);
        let start = entry.map_or(r, |c| c.max(r));
        let tail = best_completion(inst, rest, Some(start + inst.processing(j)));
        best = best.min(start - r + tail);
        rest.insert(slot, j);
    }
    best
}

/// `sum_k (n - k) * p_(k)` over processing times sorted ascending: the
/// total completion time of SPT minus the processing of each job itself.
pub fn spt_waiting(p: &[Time]) -> Time {
    let mut sorted = p.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    sorted.iter().enumerate().map(|(k, &pk)| (n - 1 - k) as Time * pk).sum()
}
