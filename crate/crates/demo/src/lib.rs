//! WebAssembly bindings for the static page in `www/`. Every export takes the
//! instance as text and returns JSON; positions and job ids are one-based.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use optsort::driver::optimal_sort;
use optsort::move_calculus::{apply_move, move_delta, Direction};
use optsort::solution_sets::full_solution_space;
use optsort::timeline::objective_of;
use optsort::{compute_profile, generate_instance, initial_sequence, parse_instance, Instance, Sequence};

fn schedule(inst: &Instance, seq: &Sequence) -> Value {
    let prof = compute_profile(inst, seq);
    let bars: Vec<Value> = (0..seq.len())
        .map(|k| {
            let job = seq.job_at(k);
            json!({
                "job": job + 1,
                "release": inst.release(job),
                "start": prof.starts[k],
                "end": prof.completions[k],
                "wait": prof.waits[k],
            })
        })
        .collect();
    json!({ "order": seq.job_ids(), "objective": prof.objective, "bars": bars })
}

fn parse(text: &str) -> Result<Instance, String> {
    parse_instance(text).map_err(|e| e.to_string())
}

fn parse_order(inst: &Instance, order: &str) -> Result<Sequence, String> {
    if order.trim().is_empty() {
        return Ok(initial_sequence(inst));
    }
    let ids = order
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| format!("`{t}` is not a job id")))
        .collect::<Result<Vec<_>, _>>()?;
    Sequence::from_job_ids(&ids, inst.len()).map_err(|e| e.to_string())
}

/// Release-order schedule and the solved schedule of `text`.
pub fn solve_json(text: &str) -> Result<Value, String> {
    let inst = parse(text)?;
    let res = optimal_sort(&inst);
    Ok(json!({
        "initial": schedule(&inst, &initial_sequence(&inst)),
        "solved": schedule(&inst, &res.best_sequence),
        "iterations": res.iterations,
        "safety_tripped": res.safety_tripped,
    }))
}

/// Closed-form evaluation of moving the job at position `i` next to the job
/// at position `k` of `order` (release order when empty), next to the
/// recomputed result.
pub fn explore_json(text: &str, order: &str, i: usize, k: usize) -> Result<Value, String> {
    let inst = parse(text)?;
    let seq = parse_order(&inst, order)?;
    let n = inst.len();
    if i == 0 || k == 0 || i > n || k > n || i == k {
        return Err(format!("positions must be distinct and within 1..={n}"));
    }
    let (i, k) = (i - 1, k - 1);
    let prof = compute_profile(&inst, &seq);
    let ev = move_delta(&prof, &inst, &seq, i, k).map_err(|e| e.to_string())?;
    let direction = if i < k { Direction::Forward } else { Direction::Backward };
    let moved = apply_move(&seq, i, k, direction).map_err(|e| e.to_string())?;
    let space = full_solution_space(&prof, &inst, &seq);
    let one_based = |sets: &Vec<Vec<usize>>| -> Vec<Vec<usize>> {
        sets.iter().map(|ks| ks.iter().map(|k| k + 1).collect()).collect()
    };
    Ok(json!({
        "direction": format!("{direction:?}").to_lowercase(),
        "predicted": {
            "delta": ev.delta_total,
            "local": ev.part_local,
            "shift": ev.part_flow,
            "tail": ev.flow_tail,
            "new_wait": ev.new_wait,
        },
        "actual": {
            "delta": objective_of(&inst, &moved) - prof.objective,
            "new_wait": compute_profile(&inst, &moved).waits[k],
        },
        "in_space": space.contains(direction, i, k),
        "forward_sets": one_based(&space.forward),
        "backward_sets": one_based(&space.backward),
        "before": schedule(&inst, &seq),
        "after": schedule(&inst, &moved),
    }))
}

#[wasm_bindgen]
pub fn generate(n: usize, seed: u32) -> Result<String, JsValue> {
    if n == 0 || n > 200 {
        return Err(JsValue::from_str("n must be between 1 and 200"));
    }
    Ok(generate_instance(n, u64::from(seed)).to_text())
}

#[wasm_bindgen]
pub fn solve(text: &str) -> Result<String, JsValue> {
    solve_json(text)
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn explore(text: &str, order: &str, i: usize, k: usize) -> Result<String, JsValue> {
    explore_json(text, order, i, k)
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e))
}
