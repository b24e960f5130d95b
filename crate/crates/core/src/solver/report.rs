use serde::Serialize;

use super::hensel::{NewtonStep, ZeroWitness};
use super::SearchReport;

/// `x<i> = <element>` per variable, the valuation line, then the trace.
pub fn witness_text(w: &ZeroWitness) -> String {
    let mut out = String::new();
    for (i, x) in w.assignment.iter().enumerate() {
        out.push_str(&format!("x{} = {}\n", i + 1, x));
    }
    out.push_str(&format!("valuation >= {}\n", w.precision));
    for line in &w.trace {
        out.push_str(line);
        out.push('\n');
    }
    for s in &w.lift_log {
        out.push_str(&format!(
            "newton {}: val f = {}, val f' = {}\n",
            s.iteration, s.val_f, s.val_fprime
        ));
    }
    out
}

#[derive(Serialize)]
struct WitnessJson<'a> {
    field: String,
    degree: u32,
    assignment: Vec<String>,
    valuation_at_least: u32,
    pivot: usize,
    trace: &'a [String],
    lift_log: &'a [NewtonStep],
}

pub fn witness_json(w: &ZeroWitness) -> serde_json::Value {
    serde_json::to_value(WitnessJson {
        field: w.field.name().to_string(),
        degree: w.degree,
        assignment: w.assignment.iter().map(ToString::to_string).collect(),
        valuation_at_least: w.precision,
        pivot: w.pivot + 1,
        trace: &w.trace,
        lift_log: &w.lift_log,
    })
    .expect("witness serializes")
}

pub fn not_found_text(r: &SearchReport) -> String {
    let mut out = format!(
        "NOT_FOUND after {} search nodes (budget {}{})\n",
        r.nodes,
        r.budget,
        if r.budget_exhausted { ", exhausted" } else { "" }
    );
    if r.frontier_truncated {
        out.push_str("frontier was truncated\n");
    }
    out.push_str(&format!("deepest contraction depth {}, best raise {}\n", r.max_depth, r.max_raise));
    for p in &r.deepest_profiles {
        out.push_str(&format!("reached {p}\n"));
    }
    out
}

pub fn not_found_json(r: &SearchReport) -> serde_json::Value {
    serde_json::to_value(r).expect("report serializes")
}
