mod common;

use common::{instance, spt_waiting};
use optsort::driver::{backward_traversal, consumption_operator, optimal_sort_from};
use optsort::instances::{reference_instance, SplitMix64};
use optsort::oracles::brute_force_optimum;
use optsort::timeline::objective_of;
use optsort::{compute_profile, initial_sequence, optimal_sort, Instance, Sequence, Time};

#[test]
fn reference_solution() {
    let res = optimal_sort(&reference_instance());
    assert_eq!(res.best_objective, 4);
    assert_eq!(res.best_sequence.job_ids(), vec![1, 2, 3, 4, 5]);
}

#[test]
fn result_is_consistent_and_log_decreases() {
    for t in 0..60 {
        let inst = instance(10, 61, t);
        let res = optimal_sort(&inst);
        assert_eq!(res.best_objective, compute_profile(&inst, &res.best_sequence).objective);
        assert!(res.best_objective <= objective_of(&inst, &initial_sequence(&inst)));
        assert!(!res.safety_tripped);
        assert!(res
            .move_log
            .windows(2)
            .all(|w| w[1].objective_after < w[0].objective_after));
        if let Some(last) = res.move_log.last() {
            assert!(res.best_objective <= last.objective_after);
        }
    }
}

#[test]
fn resolving_the_output_changes_nothing() {
    for t in 0..30 {
        let inst = instance(11, 62, t);
        let first = optimal_sort(&inst);
        let again = optimal_sort_from(&inst, first.best_sequence.clone());
        assert_eq!(again.best_objective, first.best_objective);
    }
}

#[test]
fn operators_never_worsen() {
    let mut rng = SplitMix64::new(63);
    for t in 0..40 {
        let inst = instance(9, 63, t);
        let seq = common::random_sequence(&mut rng, 9);
        let before = objective_of(&inst, &seq);
        assert!(objective_of(&inst, &consumption_operator(&seq, &inst)) <= before);
        assert!(objective_of(&inst, &backward_traversal(&seq, &inst)) <= before);
    }
}

#[test]
fn already_optimal_is_kept() {
    for t in 0..20 {
        let inst = instance(8, 64, t);
        let best = brute_force_optimum(&inst).unwrap().sequence;
        assert_eq!(consumption_operator(&best, &inst), best);
        assert_eq!(backward_traversal(&best, &inst), best);
    }
}

#[test]
fn two_jobs_match_brute_force() {
    let mut rng = SplitMix64::new(65);
    for _ in 0..200 {
        let r = vec![rng.uniform_inclusive(0, 30), rng.uniform_inclusive(0, 30)];
        let p = vec![rng.uniform_inclusive(1, 20), rng.uniform_inclusive(1, 20)];
        let inst = Instance::new(r, p).unwrap();
        let exact = brute_force_optimum(&inst).unwrap().objective;
        for ids in [[1, 2], [2, 1]] {
            let seq = Sequence::from_job_ids(&ids, 2).unwrap();
            let refined = consumption_operator(&backward_traversal(&seq, &inst), &inst);
            assert_eq!(objective_of(&inst, &refined), exact);
        }
        assert_eq!(optimal_sort(&inst).best_objective, exact);
    }
}

#[test]
fn long_job_parked_after_a_block_is_recovered() {
    // The long job is released first; the short ones arrive while it runs.
    let inst = Instance::new(vec![0, 1, 2, 3, 4, 5, 6, 7], vec![30, 2, 2, 2, 2, 2, 2, 2]).unwrap();
    let parked = Sequence::from_job_ids(&[2, 3, 4, 5, 6, 7, 8, 1], 8).unwrap();
    let front = initial_sequence(&inst);
    let exact = brute_force_optimum(&inst).unwrap().objective;
    assert!(objective_of(&inst, &front) > exact);
    let res = optimal_sort(&inst);
    assert_eq!(res.best_objective, exact);
    let improved = backward_traversal(&consumption_operator(&front, &inst), &inst);
    assert!(objective_of(&inst, &improved) < objective_of(&inst, &front));
    assert_eq!(optimal_sort_from(&inst, parked).best_objective, exact);
}

#[test]
fn equal_releases_give_spt() {
    let mut rng = SplitMix64::new(66);
    for _ in 0..50 {
        let n = rng.uniform_inclusive(1, 15) as usize;
        let p: Vec<Time> = (0..n).map(|_| rng.uniform_inclusive(1, 50)).collect();
        let inst = Instance::new(vec![0; n], p.clone()).unwrap();
        let res = optimal_sort(&inst);
        let got: Vec<Time> = res.best_sequence.order().iter().map(|&j| inst.processing(j)).collect();
        assert!(got.windows(2).all(|w| w[0] <= w[1]), "{got:?}");
        assert_eq!(res.best_objective, spt_waiting(&p));
    }
}
