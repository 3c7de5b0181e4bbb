//! The ten acceptance gates. Runs without the libtest harness so every gate
//! prints its own PASS/FAIL line; exits non-zero when any gate fails.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{random_sequence, simulate, simulate_from, spt_waiting};
use optsort::driver::optimal_sort_from;
use optsort::harness::{
    check_instance, instance_seed, missed_improving_moves, run_benchmark_with, shrink, BenchConfig, OracleMethod,
};
use optsort::instances::{derive_seed, SplitMix64};
use optsort::move_calculus::{apply_move, backward_move_delta, forward_move_delta, Direction};
use optsort::propagation::{objective_delta, propagate_decrease, propagate_increase};
use optsort::timeline::{classify_adjacent, objective_of, AdjacentOrder};
use optsort::{compute_profile, generate_instance, initial_sequence, optimal_sort, Instance, Sequence, Time};

const GAP_TOLERANCE_PCT: f64 = 0.01;

struct Gate {
    pass: bool,
    detail: String,
}

fn gate(pass: bool, detail: impl Into<String>) -> Gate {
    Gate {
        pass,
        detail: detail.into(),
    }
}

/// The 1000 (instance, permutation) pairs of gates 1 and 2.
fn engine_corpus() -> Vec<(Instance, Sequence)> {
    let mut rng = SplitMix64::new(0xAC01);
    (0..1000)
        .map(|t| {
            let n = rng.uniform_inclusive(1, 50) as usize;
            let inst = generate_instance(n, derive_seed(0xAC01, n as u64, t));
            let seq = random_sequence(&mut rng, n);
            (inst, seq)
        })
        .collect()
}

fn ac1_engine(corpus: &[(Instance, Sequence)]) -> Gate {
    let clock = Instant::now();
    let mut bad = 0;
    for (inst, seq) in corpus {
        let prof = compute_profile(inst, seq);
        let sim = simulate(inst, seq.order());
        let idle_ok = (1..seq.len()).all(|k| prof.idle_before(k) == sim.idle[k]);
        if prof.starts != sim.starts
            || prof.completions != sim.completions
            || !idle_ok
            || prof.objective != sim.objective
        {
            bad += 1;
        }
    }
    let elapsed = clock.elapsed();
    gate(
        bad == 0 && elapsed < Duration::from_secs(10),
        format!(
            "{} pairs, {bad} mismatches, {:.3}s",
            corpus.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn ac2_adjacency(corpus: &[(Instance, Sequence)]) -> Gate {
    let mut pairs = 0;
    let mut violations = 0;
    for (inst, seq) in corpus {
        let prof = compute_profile(inst, seq);
        for k in 0..seq.len().saturating_sub(1) {
            pairs += 1;
            let expected = if inst.release(seq.job_at(k)) <= inst.release(seq.job_at(k + 1)) {
                AdjacentOrder::FcfsConsistent
            } else {
                AdjacentOrder::LcfsSwapped
            };
            if classify_adjacent(&prof, inst, seq, k) != Ok(expected) {
                violations += 1;
            }
        }
    }
    gate(
        violations == 0,
        format!("{pairs} adjacent pairs, {violations} violations"),
    )
}

fn ac3_propagation() -> Gate {
    let mut rng = SplitMix64::new(0xAC03);
    let mut bad = 0;
    for t in 0..1000u64 {
        let increase = t % 2 == 1;
        let n = rng.uniform_inclusive(2, 40) as usize;
        let inst = generate_instance(n, derive_seed(0xAC03, n as u64, t));
        let seq = if t % 4 < 2 {
            initial_sequence(&inst)
        } else {
            random_sequence(&mut rng, n)
        };
        let prof = compute_profile(&inst, &seq);
        let origin = rng.uniform_inclusive(1, n as Time - 1) as usize;
        let delta = rng.uniform_inclusive(0, 150);
        let trace = if increase {
            propagate_increase(&prof, origin, delta)
        } else {
            propagate_decrease(&prof, origin, delta)
        };
        let base = simulate(&inst, seq.order());
        let entry = base.completions[origin - 1] + if increase { delta } else { -delta };
        let tail = simulate_from(&inst, &seq.order()[origin..], Some(entry));
        let per_position = (origin..n).all(|k| trace.at(k + 1) == (tail.starts[k - origin] - base.starts[k]).abs());
        let head: Time = (0..origin).map(|k| base.starts[k] - inst.release(seq.job_at(k))).sum();
        if !per_position || objective_delta(&trace) != head + tail.objective - base.objective {
            bad += 1;
        }
    }
    gate(
        bad == 0,
        format!("500 decrease + 500 increase triples, {bad} mismatches"),
    )
}

fn ac4_gold() -> Gate {
    let clock = Instant::now();
    let (mut moves, mut bad) = (0, 0);
    for t in 0..200 {
        let inst = generate_instance(12, derive_seed(0xAC04, 12, t));
        let seq = initial_sequence(&inst);
        let prof = compute_profile(&inst, &seq);
        for i in 0..12 {
            for k in 0..12 {
                let (ev, dir) = if i < k {
                    (
                        forward_move_delta(&prof, &inst, &seq, i, k).unwrap(),
                        Direction::Forward,
                    )
                } else if i > k {
                    (
                        backward_move_delta(&prof, &inst, &seq, i, k).unwrap(),
                        Direction::Backward,
                    )
                } else {
                    continue;
                };
                moves += 1;
                let after = apply_move(&seq, i, k, dir).unwrap();
                let after_prof = compute_profile(&inst, &after);
                if ev.delta_total != after_prof.objective - prof.objective || ev.new_wait != after_prof.waits[k] {
                    bad += 1;
                }
            }
        }
    }
    let elapsed = clock.elapsed();
    gate(
        bad == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{moves} moves on release-sorted n=12 starts, {bad} mismatches, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn ac5_completeness() -> Gate {
    let mut missed = 0;
    let mut instances = 0;
    let mut first = None;
    for t in 0..200 {
        let inst = generate_instance(9, derive_seed(0xAC05, 9, t));
        let seq = initial_sequence(&inst);
        let found = missed_improving_moves(&inst, &seq);
        if !found.is_empty() {
            instances += 1;
            missed += found.len();
            if first.is_none() {
                let m = &found[0];
                first = Some(format!(
                    "; e.g. {:?} {}->{} (delta {}) on r={:?} p={:?}",
                    m.direction,
                    m.i + 1,
                    m.k + 1,
                    m.delta,
                    inst.releases(),
                    inst.processing_times()
                ));
            }
        }
    }
    gate(
        missed == 0,
        format!(
            "200 n=9 instances, {missed} improving relocations outside the space on {instances} instances{}",
            first.unwrap_or_default()
        ),
    )
}

fn counterexample_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("counterexamples");
    std::fs::create_dir_all(&dir).expect("artifact directory");
    dir
}

fn ac6_exactness(worst_gap: &mut f64) -> Gate {
    let mut mismatches = Vec::new();
    for n in [8usize, 9, 10] {
        for index in 0..100 {
            let inst = generate_instance(n, instance_seed(0xAC06, n, index));
            if let Some(ce) = check_instance(&inst).expect("brute force applies") {
                let gap =
                    100.0 * (ce.solver_objective - ce.oracle_objective) as f64 / ce.oracle_objective.max(1) as f64;
                *worst_gap = worst_gap.max(gap);
                let ce = shrink(ce);
                let path = counterexample_dir().join(format!("n{n}_{index}.json"));
                std::fs::write(&path, ce.to_json()).expect("write counterexample");
                mismatches.push(path.display().to_string());
            }
        }
    }
    let pass = mismatches.is_empty();
    let mut detail = format!(
        "300 instances (n=8,9,10), {} strict mismatches, max gap {:.4}%",
        mismatches.len(),
        worst_gap
    );
    if !pass {
        detail.push_str(&format!("; artifacts: {}", mismatches.join(", ")));
    }
    gate(pass && *worst_gap <= GAP_TOLERANCE_PCT, detail)
}

fn ac7_table(benchmark: &optsort::harness::BenchReport) -> Gate {
    let rows: Vec<String> = benchmark
        .rows
        .iter()
        .map(|r| {
            format!(
                "n={} gap max {:.4}% unproven {} solver mean {:.3}s max {:.3}s",
                r.n,
                r.max_gap_pct.unwrap_or(f64::NAN),
                r.unproven,
                r.mean_solver_ms / 1e3,
                r.max_solver_ms / 1e3
            )
        })
        .collect();
    let pass = benchmark.rows.iter().all(|r| {
        r.oracle == OracleMethod::BranchAndBound
            && r.unproven == 0
            && r.max_gap_pct.is_some_and(|g| g <= GAP_TOLERANCE_PCT)
            && r.max_solver_ms <= 60_000.0
    });
    gate(pass, rows.join("; "))
}

fn ac8_termination(benchmark: &optsort::harness::BenchReport) -> Gate {
    let mut solves = 0;
    let mut tripped = 0;
    let mut non_monotone = 0;
    let mut not_idempotent = 0;
    let mut check = |inst: &Instance| {
        let res = optimal_sort(inst);
        solves += 1;
        tripped += res.safety_tripped as usize;
        non_monotone += !res
            .move_log
            .windows(2)
            .all(|w| w[1].objective_after < w[0].objective_after) as usize;
        let again = optimal_sort_from(inst, res.best_sequence.clone());
        if again.best_objective != res.best_objective || again.best_sequence.order() != res.best_sequence.order() {
            not_idempotent += 1;
        }
    };
    for n in [8usize, 9, 10] {
        for index in 0..100 {
            check(&generate_instance(n, instance_seed(0xAC06, n, index)));
        }
    }
    for o in &benchmark.outcomes {
        check(&generate_instance(o.n, o.seed));
    }
    gate(
        tripped == 0 && non_monotone == 0 && not_idempotent == 0,
        format!("{solves} solves, {tripped} safety trips, {non_monotone} non-monotone logs, {not_idempotent} not idempotent"),
    )
}

fn ac9_spt() -> Gate {
    let mut rng = SplitMix64::new(0xAC09);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.uniform_inclusive(1, 20) as usize;
        let p: Vec<Time> = (0..n).map(|_| rng.uniform_inclusive(1, 50)).collect();
        let inst = Instance::new(vec![0; n], p.clone()).unwrap();
        let res = optimal_sort(&inst);
        let sorted = res
            .best_sequence
            .order()
            .windows(2)
            .all(|w| inst.processing(w[0]) <= inst.processing(w[1]));
        if !sorted || res.best_objective != spt_waiting(&p) {
            bad += 1;
        }
    }
    gate(
        bad == 0,
        format!("100 equal-release instances, {bad} deviations from SPT"),
    )
}

fn ac10_growth() -> Gate {
    let sizes = [10usize, 12, 14, 16, 18, 20];
    let mut means = Vec::new();
    for &n in &sizes {
        let mut total = 0.0;
        for index in 0..50 {
            let inst = generate_instance(n, instance_seed(0xAC10, n, index));
            let clock = Instant::now();
            let res = optimal_sort(&inst);
            total += clock.elapsed().as_secs_f64();
            assert!(objective_of(&inst, &res.best_sequence) == res.best_objective);
        }
        means.push(total / 50.0);
    }
    let monotone = means.windows(2).all(|w| w[1] > w[0]);
    let last = *means.last().unwrap();
    let listing: Vec<String> = sizes
        .iter()
        .zip(&means)
        .map(|(n, m)| format!("n={n} {m:.4}s"))
        .collect();
    gate(
        monotone && last <= 120.0,
        format!("mean solve time {}", listing.join(", ")),
    )
}

type GateFn<'a> = Box<dyn FnOnce() -> Gate + 'a>;

fn main() {
    let corpus = engine_corpus();
    let mut config = BenchConfig::new(vec![12, 14, 16], 25, 0xAC07);
    config.parallel = false;
    let benchmark = run_benchmark_with(&config).expect("bench sizes fit branch and bound");
    let mut worst_gap = 0.0;

    let gates: Vec<(&str, GateFn<'_>)> = vec![
        ("AC1 engine equivalence", Box::new(|| ac1_engine(&corpus))),
        ("AC2 adjacency relation", Box::new(|| ac2_adjacency(&corpus))),
        ("AC3 flow propagation", Box::new(ac3_propagation)),
        ("AC4 move-delta gold invariant", Box::new(ac4_gold)),
        ("AC5 solution-space completeness", Box::new(ac5_completeness)),
        (
            "AC6 exactness vs brute force",
            Box::new(|| ac6_exactness(&mut worst_gap)),
        ),
        (
            "AC7 desk-scale table vs branch and bound",
            Box::new(|| ac7_table(&benchmark)),
        ),
        (
            "AC8 termination, monotonicity, idempotence",
            Box::new(|| ac8_termination(&benchmark)),
        ),
        ("AC9 equal releases give SPT", Box::new(ac9_spt)),
        ("AC10 runtime growth", Box::new(ac10_growth)),
    ];

    let mut failed = Vec::new();
    for (name, run) in gates {
        let g = run();
        println!("{} {name}: {}", if g.pass { "PASS" } else { "FAIL" }, g.detail);
        if !g.pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 gates pass");
    } else {
        println!("acceptance: {} gate(s) failed: {}", failed.len(), failed.join(", "));
        std::process::exit(1);
    }
}
