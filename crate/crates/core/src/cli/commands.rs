use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::certifier::{
    self, classify_power_residues, distinct_level_certificate, exhaustive_no_primitive_zero, lemma_audit,
    projected_nodes, AuditId, AuditReport, CertifierError, ExhaustiveOptions, ExhaustiveOutcome,
};
use crate::field_ring::{check_degree, Family, FieldId};
use crate::forms::catalog::{extremal_f, extremal_g};
use crate::forms::{normalize, profile, random_form, serialize_form, serialize_form_json, Degree, LevelDistribution};
use crate::solver::{
    find_zero, not_found_json, not_found_text, verify_witness, witness_json, witness_text, SolveOptions,
    SolveOutcome, SolverError, DEFAULT_BUDGET,
};

use super::{
    load_form, CertMethodArg, Cli, CmdResult, Command, Extremal, Failure, Global, DEFAULT_CERT_BUDGET, EXIT_INDETERMINATE,
    EXIT_NEGATIVE, EXIT_OK,
};

/// Projected unpruned leaves beyond which `certify` warns.
const WARN_NODES: f64 = 1e10;

pub(crate) fn dispatch(cli: &Cli, out: &mut Vec<u8>, err: &mut dyn Write) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Solve { file, extremal, target } => solve(g, file.as_deref(), *extremal, *target, out),
        Command::Certify {
            file,
            extremal,
            modulus,
            method,
            no_prune,
        } => certify(g, file.as_deref(), *extremal, *modulus, *method, !no_prune, out, err),
        Command::Audit { id } => audit(g, id, out),
        Command::Normalize { file } => normalize_cmd(g, file.as_deref(), out),
        Command::Reproduce { trials } => reproduce(g, *trials, out),
        Command::Powers { k } => powers(g, *k, out),
    }
}

fn emit(out: &mut Vec<u8>, text: &str) {
    out.extend_from_slice(text.as_bytes());
}

fn emit_json(out: &mut Vec<u8>, value: &serde_json::Value) {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    emit(out, &text);
    emit(out, "\n");
}

fn solver_failure(e: SolverError) -> Failure {
    match e {
        SolverError::Precision { .. } => Failure::indeterminate(e),
        other => Failure::indeterminate(format!("solver failed: {other}")),
    }
}

fn solve(g: &Global, file: Option<&str>, extremal: Option<Extremal>, target: Option<u32>, out: &mut Vec<u8>) -> CmdResult {
    let form = load_form(g, file, extremal)?;
    let options = SolveOptions {
        target_precision: target,
        budget: g.budget.unwrap_or(DEFAULT_BUDGET),
    };
    let outcome = find_zero(&form, options).map_err(solver_failure)?;
    match outcome {
        SolveOutcome::Found(w) => {
            let check = verify_witness(&form, &w);
            if !check.passed {
                return Err(Failure::indeterminate(format!(
                    "witness failed verification: {}",
                    check.failures.join("; ")
                )));
            }
            if g.emit_json {
                emit_json(
                    out,
                    &json!({
                        "config": g.header_json("solve", Some(options.budget)),
                        "form_hash": form.fingerprint(),
                        "verdict": "FOUND",
                        "witness": witness_json(&w),
                        "verification": check,
                    }),
                );
            } else {
                emit(out, &g.header("solve", Some(options.budget), &[("form", form.fingerprint())]));
                emit(out, "FOUND\n");
                emit(out, &witness_text(&w));
                emit(
                    out,
                    &format!(
                        "verified: valuation {} >= {}, primitive, Newton slack holds\n",
                        check.measured, check.claimed
                    ),
                );
            }
            Ok(EXIT_OK)
        }
        SolveOutcome::NotFound(r) => {
            if g.emit_json {
                emit_json(
                    out,
                    &json!({
                        "config": g.header_json("solve", Some(options.budget)),
                        "form_hash": form.fingerprint(),
                        "verdict": "NOT_FOUND",
                        "report": not_found_json(&r),
                    }),
                );
            } else {
                emit(out, &g.header("solve", Some(options.budget), &[("form", form.fingerprint())]));
                emit(out, &not_found_text(&r));
                emit(out, "hint: `ramiform certify` may prove the form anisotropic\n");
            }
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cert_failure(e: CertifierError) -> Failure {
    Failure::input(e)
}

#[allow(clippy::too_many_arguments)]
fn certify(
    g: &Global,
    file: Option<&str>,
    extremal: Option<Extremal>,
    modulus: Option<u32>,
    method: CertMethodArg,
    prune: bool,
    out: &mut Vec<u8>,
    err: &mut dyn Write,
) -> CmdResult {
    let form = load_form(g, file, extremal)?;
    let n = modulus.unwrap_or(form.d());
    let budget = g.budget.unwrap_or(DEFAULT_CERT_BUDGET);
    let header = g.header("certify", Some(budget), &[("form", form.fingerprint()), ("modulus", n.to_string())]);
    if method != CertMethodArg::Exhaustive {
        if let Some(cert) = distinct_level_certificate(&form) {
            if g.emit_json {
                emit_json(out, &json!({ "config": g.header_json("certify", Some(budget)), "result": cert.to_json() }));
            } else {
                emit(out, &header);
                emit(out, &cert.to_text());
            }
            return Ok(EXIT_OK);
        }
        if method == CertMethodArg::Distinct {
            if g.emit_json {
                emit_json(
                    out,
                    &json!({ "config": g.header_json("certify", Some(budget)), "result": { "verdict": "NOT_APPLICABLE" } }),
                );
            } else {
                emit(out, &header);
                emit(out, "NOT_APPLICABLE two variables share a level\n");
            }
            return Ok(EXIT_NEGATIVE);
        }
    }
    let projected = projected_nodes(&form, n);
    if projected > WARN_NODES {
        let _ = writeln!(
            err,
            "warning: up to {projected:.1e} search nodes before pruning; consider a smaller modulus"
        );
    }
    let options = ExhaustiveOptions {
        prune,
        budget,
        workers: g.workers,
    };
    let outcome = exhaustive_no_primitive_zero(&form, n, options).map_err(cert_failure)?;
    let (code, json_result, text) = match &outcome {
        ExhaustiveOutcome::Certified(c) => (EXIT_OK, c.to_json(), c.to_text()),
        ExhaustiveOutcome::Counterexample(x) => (
            EXIT_NEGATIVE,
            certifier::counterexample_json(&form, n, x),
            certifier::counterexample_text(&form, n, x),
        ),
        ExhaustiveOutcome::Indeterminate(s) => (
            EXIT_INDETERMINATE,
            certifier::indeterminate_json(s, budget),
            certifier::indeterminate_text(s, budget),
        ),
    };
    if g.emit_json {
        emit_json(out, &json!({ "config": g.header_json("certify", Some(budget)), "result": json_result }));
    } else {
        emit(out, &header);
        emit(out, &text);
    }
    Ok(code)
}

fn audit(g: &Global, id: &str, out: &mut Vec<u8>) -> CmdResult {
    let d = g.degree_checked()?.unwrap_or(6);
    let field = g.field_id()?;
    let ids: Vec<AuditId> = if id.eq_ignore_ascii_case("all") {
        AuditId::ALL.to_vec()
    } else {
        vec![id.parse::<AuditId>().map_err(cert_failure)?]
    };
    let mut reports: Vec<AuditReport> = Vec::new();
    for &id in &ids {
        match field {
            Some(f) if ids.len() == 1 => reports.push(lemma_audit(id, f, d).map_err(cert_failure)?),
            Some(f) => {
                if id.applies_to(f) {
                    reports.push(lemma_audit(id, f, d).map_err(cert_failure)?);
                }
            }
            None => {
                for f in FieldId::ALL.into_iter().filter(|f| id.applies_to(*f)) {
                    reports.push(lemma_audit(id, f, d).map_err(cert_failure)?);
                }
            }
        }
    }
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    if g.emit_json {
        emit_json(
            out,
            &json!({
                "config": g.header_json("audit", None),
                "degree": d,
                "reports": reports,
                "violations": violations,
            }),
        );
    } else {
        emit(out, &g.header("audit", None, &[("degree", d.to_string())]));
        for r in &reports {
            emit(out, &format!("{r}\n"));
        }
        emit(out, &format!("{} audits, {} violations\n", reports.len(), violations));
    }
    Ok(if violations == 0 { EXIT_OK } else { EXIT_NEGATIVE })
}

fn normalize_cmd(g: &Global, file: Option<&str>, out: &mut Vec<u8>) -> CmdResult {
    let form = load_form(g, file, None)?;
    let (normal, t) = normalize(&form).map_err(Failure::input)?;
    let before = profile(&form);
    let after = profile(&normal);
    if g.emit_json {
        let form_json: serde_json::Value =
            serde_json::from_str(&serialize_form_json(&normal)).expect("form json round-trips");
        emit_json(
            out,
            &json!({
                "config": g.header_json("normalize", None),
                "rotation": t,
                "profile_before": before.to_string(),
                "profile_after": after.to_string(),
                "form": form_json,
            }),
        );
    } else {
        emit(out, &g.header("normalize", None, &[("form", form.fingerprint())]));
        emit(out, &format!("# rotation {t}\n# profile {before} -> {after}\n"));
        emit(out, &serialize_form(&normal));
    }
    Ok(EXIT_OK)
}

fn powers(g: &Global, k: u32, out: &mut Vec<u8>) -> CmdResult {
    let d = g.degree_checked()?.unwrap_or(6);
    let fields: Vec<FieldId> = match g.field_id()? {
        Some(f) => vec![f],
        None => FieldId::ALL.to_vec(),
    };
    let mut sets = Vec::new();
    for f in fields {
        sets.push(classify_power_residues(f, d, k).map_err(cert_failure)?);
    }
    if g.emit_json {
        let rows: Vec<serde_json::Value> = sets
            .iter()
            .map(|s| json!({ "field": s.field.name(), "degree": s.degree, "k": s.k, "residues": s.display_set() }))
            .collect();
        emit_json(out, &json!({ "config": g.header_json("powers", None), "sets": rows }));
    } else {
        emit(out, &g.header("powers", None, &[("degree", d.to_string()), ("k", k.to_string())]));
        for s in &sets {
            emit(out, &format!("{s}\n"));
        }
    }
    Ok(EXIT_OK)
}

struct Trial {
    seed: u64,
    outcome: Result<Option<u32>, String>,
}

fn run_trial(field: FieldId, degree: Degree, s: usize, seed: u64, bits: u32, budget: u64) -> Trial {
    let attempt = || -> Result<Option<u32>, String> {
        let form = random_form(field, degree, s, seed, &LevelDistribution::Uniform, bits).map_err(|e| e.to_string())?;
        let options = SolveOptions {
            target_precision: None,
            budget,
        };
        match find_zero(&form, options).map_err(|e| e.to_string())? {
            SolveOutcome::Found(w) => {
                let check = verify_witness(&form, &w);
                if check.passed {
                    Ok(Some(w.precision))
                } else {
                    Err(format!("verification failed: {}", check.failures.join("; ")))
                }
            }
            SolveOutcome::NotFound(_) => Ok(None),
        }
    };
    Trial {
        seed,
        outcome: attempt(),
    }
}

enum Bound {
    Certified(String),
    Refuted,
    Indeterminate,
}

fn lower_bound(field: FieldId, degree: Degree, bits: u32, budget: u64, workers: usize) -> Result<(char, usize, Bound), Failure> {
    match field.family() {
        Family::RamifiedJ0 => {
            let f = extremal_f(field, degree, bits).map_err(Failure::input)?;
            let options = ExhaustiveOptions {
                prune: true,
                budget,
                workers,
            };
            let bound = match exhaustive_no_primitive_zero(&f, degree.get(), options).map_err(cert_failure)? {
                ExhaustiveOutcome::Certified(c) => Bound::Certified(c.method.to_string()),
                ExhaustiveOutcome::Counterexample(_) => Bound::Refuted,
                ExhaustiveOutcome::Indeterminate(_) => Bound::Indeterminate,
            };
            Ok(('f', f.len(), bound))
        }
        Family::RamifiedJ1 => {
            let g = extremal_g(field, degree, bits).map_err(Failure::input)?;
            let bound = match distinct_level_certificate(&g) {
                Some(c) => Bound::Certified(c.method.to_string()),
                None => Bound::Refuted,
            };
            Ok(('g', g.len(), bound))
        }
    }
}

fn reproduce(g: &Global, trials: Option<usize>, out: &mut Vec<u8>) -> CmdResult {
    let d = g.degree.unwrap_or(6);
    check_degree(d).map_err(Failure::input)?;
    let degree = Degree::new(d).map_err(Failure::input)?;
    let trials = trials.unwrap_or(if d == 6 { 500 } else { 100 });
    let bits = g.bits();
    let fields: Vec<FieldId> = match g.field_id()? {
        Some(f) => vec![f],
        None => FieldId::ALL.to_vec(),
    };
    let solver_budget = g.budget.unwrap_or(DEFAULT_BUDGET);
    let cert_budget = g.budget.unwrap_or(DEFAULT_CERT_BUDGET);

    // sub-seeds are drawn in a fixed order before any work is scheduled
    let mut master = ChaCha8Rng::seed_from_u64(g.seed);
    let plan: Vec<(FieldId, Vec<u64>)> = fields
        .iter()
        .map(|&f| (f, (0..trials).map(|_| master.next_u64()).collect()))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.workers)
        .build()
        .map_err(|e| Failure::input(e.to_string()))?;
    let results: Vec<(FieldId, Vec<Trial>)> = pool.install(|| {
        plan.iter()
            .map(|(f, seeds)| {
                let s = f.gamma_star(d) as usize;
                let runs = seeds
                    .par_iter()
                    .map(|&seed| run_trial(*f, degree, s, seed, bits, solver_budget))
                    .collect();
                (*f, runs)
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut trial_lines = String::new();
    let mut trial_json = Vec::new();
    let mut code = EXIT_OK;
    for (field, runs) in &results {
        let gamma = field.gamma_star(d);
        let mut solved = 0;
        for (i, t) in runs.iter().enumerate() {
            let status = match &t.outcome {
                Ok(Some(p)) => {
                    solved += 1;
                    format!("solved valuation>={p}")
                }
                Ok(None) => "NOT_FOUND".to_string(),
                Err(e) => format!("error {e}"),
            };
            trial_lines.push_str(&format!("{:<14} trial {:>4} seed {:016x} {}\n", field.name(), i, t.seed, status));
            trial_json.push(json!({ "field": field.name(), "trial": i, "seed": t.seed, "status": status }));
        }
        if solved < runs.len() {
            code = code.max(EXIT_NEGATIVE);
        }
        let (name, s, bound) = lower_bound(*field, degree, bits, cert_budget, g.workers)?;
        let verdict = match &bound {
            Bound::Certified(m) => m.clone(),
            Bound::Refuted => {
                code = code.max(EXIT_NEGATIVE);
                "REFUTED".to_string()
            }
            Bound::Indeterminate => {
                code = EXIT_INDETERMINATE;
                "INDETERMINATE".to_string()
            }
        };
        rows.push((field.name(), field.family(), gamma, runs.len(), solved, name, s, verdict));
    }

    if g.emit_json {
        let table: Vec<serde_json::Value> = rows
            .iter()
            .map(|(f, fam, gamma, n, solved, name, s, verdict)| {
                json!({
                    "field": f,
                    "family": fam.to_string(),
                    "gamma_star": gamma,
                    "trials": n,
                    "solved": solved,
                    "lower_bound_form": name.to_string(),
                    "lower_bound_variables": s,
                    "certificate": verdict,
                })
            })
            .collect();
        emit_json(
            out,
            &json!({
                "config": g.header_json("reproduce", Some(solver_budget)),
                "degree": d,
                "trials": trial_json,
                "table": table,
            }),
        );
    } else {
        emit(out, &g.header("reproduce", Some(solver_budget), &[("degree", d.to_string()), ("trials", trials.to_string())]));
        emit(out, &trial_lines);
        emit(
            out,
            &format!(
                "\n{:<14} {:<6} {:>6} {:>6} {:>6}  {:<4} {:>3}  {}\n",
                "field", "family", "Gamma*", "trials", "solved", "form", "s", "certificate"
            ),
        );
        for (f, fam, gamma, n, solved, name, s, verdict) in &rows {
            emit(
                out,
                &format!("{f:<14} {:<6} {gamma:>6} {n:>6} {solved:>6}  {name:<4} {s:>3}  {verdict}\n", fam.to_string()),
            );
        }
    }
    Ok(code)
}
