mod common;

use common::{instance, random_sequence};
use optsort::instances::SplitMix64;
use optsort::solution_sets::full_solution_space;
use optsort::{compute_profile, initial_sequence, Time};

#[test]
fn members_satisfy_their_definitions() {
    let mut rng = SplitMix64::new(5);
    for t in 0..100 {
        let inst = instance(12, 31, t);
        let seq = if t % 2 == 0 {
            initial_sequence(&inst)
        } else {
            random_sequence(&mut rng, 12)
        };
        let prof = compute_profile(&inst, &seq);
        let p = |pos: usize| inst.processing(seq.job_at(pos));
        let sets = full_solution_space(&prof, &inst, &seq);
        for i in 0..12 {
            let budget = p(i) - prof.waits[i].min(0);
            for k in i + 1..12 {
                let sum: Time = (i + 1..=k).map(|j| p(j) - budget).sum();
                assert_eq!(sets.forward[i].contains(&k), sum <= 0, "forward {i}->{k}");
            }
            if prof.waits[i] <= 0 {
                assert!(sets.backward[i].is_empty());
                continue;
            }
            // smallest step count whose cumulative reaches the wait, else all
            let steps = (1..=i)
                .find(|&s| {
                    let c: Time = (1..=s).map(|m| p(i - m) - prof.waits[i - m].min(0)).sum();
                    prof.waits[i] <= c
                })
                .unwrap_or(i);
            let expected: Vec<usize> = (1..=steps).map(|m| i - m).collect();
            assert_eq!(sets.backward[i], expected, "backward from {i}");
        }
    }
}
