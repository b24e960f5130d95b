use serde::Serialize;

use crate::contraction::SubstitutionTree;
use crate::field_ring::{FieldId, RingElement, Valuation};
use crate::forms::AdditiveForm;

use super::SolverError;

/// One Newton iteration as recorded in the lifting log.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonStep {
    pub iteration: u32,
    pub val_f: Valuation,
    pub val_fprime: u32,
    /// `val(f) - 2 val(f')`; `None` once `f` vanishes to working precision.
    pub surplus: Option<i64>,
}

/// A nontrivial zero of a form to a stated precision.
#[derive(Clone, Debug)]
pub struct ZeroWitness {
    pub field: FieldId,
    pub degree: u32,
    pub assignment: Vec<RingElement>,
    /// The form vanishes at `assignment` modulo `pi^precision`.
    pub precision: u32,
    /// Coordinate Newton's method runs on; its criterion holds at `assignment`.
    pub pivot: usize,
    pub tree: Option<SubstitutionTree>,
    pub trace: Vec<String>,
    pub lift_log: Vec<NewtonStep>,
}

fn valuation_of_derivative(form: &AdditiveForm, x: &RingElement, pivot: usize) -> Result<u32, SolverError> {
    let a = form.coeffs()[pivot];
    let d = form.d();
    let fp = RingElement::from_int(form.field(), d as i64, form.bits())?
        .checked_mul(&a)?
        .checked_mul(&x.pow(d as u64 - 1))?;
    // val(d) = 2, so only the exponent and the coefficient matter
    let vx = x.valuation().finite().ok_or_else(|| SolverError::Internal("pivot value vanishes".into()))?;
    let va = a.valuation().finite().ok_or_else(|| SolverError::Internal("pivot coefficient vanishes".into()))?;
    let expected = 2 + va + (d - 1) * vx;
    match fp.valuation() {
        Valuation::Finite(v) if v == expected => Ok(v),
        _ if expected >= fp.guaranteed_digits() => Err(SolverError::Precision {
            needed: expected + 1,
            available: fp.guaranteed_digits(),
        }),
        other => Err(SolverError::Internal(format!(
            "derivative valuation {other} differs from {expected}"
        ))),
    }
}

/// Newton's method on the pivot coordinate alone.
///
/// The criterion is the usual `val f > 2 val f'` for the one-variable
/// polynomial `a_p t^d + rest` rescaled so its leading term is a unit:
/// with `tau = val(a_p x_p^d)` and `e = val(x_p)` it reads
/// `val f - tau > 2 (val f' + e - tau)`, which is `val f >= tau + 5`.
/// For a unit pivot with a unit coefficient it is exactly `val f > 2 val f'`.
/// Iteration continues until `val f >= target` and `val f > 2 val f'`.
pub fn hensel_lift(
    form: &AdditiveForm,
    assignment: &[RingElement],
    pivot: usize,
    target: u32,
) -> Result<ZeroWitness, SolverError> {
    if assignment.len() != form.len() {
        return Err(SolverError::Internal(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            form.len()
        )));
    }
    if pivot >= form.len() {
        return Err(SolverError::Internal(format!("pivot {pivot} out of range")));
    }
    let n = form.bits() * 2 - 2;
    let mut x = assignment.to_vec();
    let vx = x[pivot]
        .valuation()
        .finite()
        .ok_or_else(|| SolverError::Internal("pivot value is zero".into()))?;
    let va = form.coeffs()[pivot].valuation().finite().unwrap_or(0);
    let tau = va + form.d() * vx;
    let val_fp = valuation_of_derivative(form, &x[pivot], pivot)?;
    let goal = target.max(2 * val_fp + 1);
    if goal > n {
        return Err(SolverError::Precision { needed: goal, available: n });
    }
    let fp = RingElement::from_int(form.field(), form.d() as i64, form.bits())?
        .checked_mul(&form.coeffs()[pivot])?;
    let mut log = Vec::new();
    let mut f = form.evaluate(&x)?;
    match f.valuation() {
        Valuation::Finite(v) if v < tau + 5 => {
            return Err(SolverError::Internal(format!(
                "Newton criterion unmet: val f = {v}, val f' = {val_fp}"
            )))
        }
        _ => {}
    }
    for iteration in 0.. {
        let vf = f.valuation();
        let surplus = vf.finite().map(|v| v as i64 - 2 * val_fp as i64);
        if let (Some(s), Some(prev)) = (surplus, log.last().and_then(|s: &NewtonStep| s.surplus)) {
            if s <= prev {
                return Err(SolverError::Internal("Newton surplus failed to grow".into()));
            }
        }
        log.push(NewtonStep {
            iteration,
            val_f: vf,
            val_fprime: val_fp,
            surplus,
        });
        if vf.at_least(goal) {
            break;
        }
        if iteration >= 64 {
            return Err(SolverError::Internal("Newton iteration did not converge".into()));
        }
        let derivative = fp.checked_mul(&x[pivot].pow(form.d() as u64 - 1))?;
        let step = f.exact_div(&derivative)?;
        x[pivot] = x[pivot].checked_sub(&step)?;
        f = form.evaluate(&x)?;
    }
    let precision = f.valuation().finite().unwrap_or(n).min(n);
    Ok(ZeroWitness {
        field: form.field(),
        degree: form.d(),
        assignment: x,
        precision,
        pivot,
        tree: None,
        trace: Vec::new(),
        lift_log: log,
    })
}

/// Outcome of re-checking a witness from scratch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub measured: Valuation,
    pub claimed: u32,
    pub primitive: bool,
    pub newton_slack: bool,
    pub failures: Vec<String>,
}

/// Value of the form at `x` by schoolbook arithmetic on raw coordinates,
/// independent of the ring element operations.
fn fresh_value(form: &AdditiveForm, x: &[RingElement]) -> Result<RingElement, SolverError> {
    let dd = form.field().radicand() as i128 as u128;
    let mul = |(a, b): (u128, u128), (c, e): (u128, u128)| -> (u128, u128) {
        (
            a.wrapping_mul(c).wrapping_add(dd.wrapping_mul(b.wrapping_mul(e))),
            a.wrapping_mul(e).wrapping_add(b.wrapping_mul(c)),
        )
    };
    let mut acc = (0u128, 0u128);
    for (coef, xi) in form.coeffs().iter().zip(x) {
        let (a, b) = coef.coords();
        let (p, q) = xi.coords();
        let mut term = (a as u128, b as u128);
        for _ in 0..form.d() {
            term = mul(term, (p as u128, q as u128));
        }
        acc = (acc.0.wrapping_add(term.0), acc.1.wrapping_add(term.1));
    }
    Ok(RingElement::new(form.field(), acc.0 as u64 as i128, acc.1 as u64 as i128, form.bits())?)
}

/// Re-evaluate the form at the witness, check primitivity and the Newton
/// slack at the pivot. Never relies on anything the solver computed.
pub fn verify_witness(form: &AdditiveForm, witness: &ZeroWitness) -> VerifyReport {
    let mut failures = Vec::new();
    let mut report = VerifyReport {
        passed: false,
        measured: Valuation::Finite(0),
        claimed: witness.precision,
        primitive: false,
        newton_slack: false,
        failures: Vec::new(),
    };
    if witness.assignment.len() != form.len() {
        failures.push(format!(
            "witness has {} values for {} variables",
            witness.assignment.len(),
            form.len()
        ));
        report.failures = failures;
        return report;
    }
    if witness
        .assignment
        .iter()
        .any(|x| x.field() != form.field() || x.bits() != form.bits())
    {
        failures.push("witness values do not match the form's field or precision".into());
        report.failures = failures;
        return report;
    }
    report.measured = match fresh_value(form, &witness.assignment) {
        Ok(v) => v.valuation(),
        Err(e) => {
            failures.push(e.to_string());
            report.failures = failures;
            return report;
        }
    };
    if !report.measured.at_least(witness.precision) {
        failures.push(format!(
            "form value has valuation {} < claimed {}",
            report.measured, witness.precision
        ));
    }
    report.primitive = witness.assignment.iter().any(RingElement::is_unit);
    if !report.primitive {
        failures.push("no assigned value is a unit".into());
    }
    match witness.assignment.get(witness.pivot) {
        Some(xp) if !xp.is_zero() => match valuation_of_derivative(form, xp, witness.pivot) {
            Ok(vfp) => {
                report.newton_slack = report.measured.at_least(2 * vfp + 1);
                if !report.newton_slack {
                    failures.push(format!(
                        "Newton slack fails: val f = {} but 2 val f' + 1 = {}",
                        report.measured,
                        2 * vfp + 1
                    ));
                }
            }
            Err(e) => failures.push(e.to_string()),
        },
        _ => failures.push("pivot value is zero or out of range".into()),
    }
    report.passed = failures.is_empty();
    report.failures = failures;
    report
}
