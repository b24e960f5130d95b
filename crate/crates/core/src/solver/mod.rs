//! Finding nontrivial zeros: normalization, a best-first search over the
//! contraction moves proposed by the tactics, and Newton lifting.

mod hensel;
mod report;
mod tactics;
mod work;

pub use hensel::{hensel_lift, verify_witness, NewtonStep, VerifyReport, ZeroWitness};
pub use report::{not_found_json, not_found_text, witness_json, witness_text};
pub use tactics::{apply_tactic, Tactic, TacticMove};

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BinaryHeap, HashSet};
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::contraction::{ContractionError, Origin, SubstitutionTree};
use crate::field_ring::{RingElement, RingError};
use crate::forms::{normalize, profile, AdditiveForm, FormError, LevelProfile};

use work::Work;

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// States kept in the frontier at once; beyond this new states are dropped
/// and the report says the search was truncated.
const FRONTIER_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error("precision error: need {needed} pi-digits but only {available} are available; rerun with a larger precision")]
    Precision { needed: u32, available: u32 },
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Pi-digits the witness must vanish to; `2d + 8` when `None`.
    pub target_precision: Option<u32>,
    /// Search states the solver may create.
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            target_precision: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

pub fn default_target(d: u32) -> u32 {
    2 * d + 8
}

/// Why the search stopped without a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub nodes: u64,
    pub budget: u64,
    pub budget_exhausted: bool,
    pub frontier_truncated: bool,
    /// Rotation applied by normalization.
    pub rotation: u32,
    pub max_depth: usize,
    pub max_raise: u32,
    /// Level profiles of the deepest states reached, at most five.
    pub deepest_profiles: Vec<String>,
    /// Hensel-ready states whose lift needed more precision than available.
    pub precision_failures: u32,
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Found(ZeroWitness),
    NotFound(SearchReport),
}

impl SolveOutcome {
    pub fn witness(&self) -> Option<&ZeroWitness> {
        match self {
            SolveOutcome::Found(w) => Some(w),
            SolveOutcome::NotFound(_) => None,
        }
    }
}

struct Entry {
    score: (u8, u32, usize),
    seq: u64,
    work: Work,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score.cmp(&other.score).then(other.seq.cmp(&self.seq))
    }
}

fn state_hash(w: &Work) -> u64 {
    let mut h = DefaultHasher::new();
    w.key().hash(&mut h);
    h.finish()
}

/// Values `pi^e * u` assigned to each root variable when the derived
/// variable `target` is set to one and all others to zero.
fn exact_pullback(tree: &SubstitutionTree, target: usize, one: RingElement) -> Vec<Option<(u32, RingElement)>> {
    let mut out = vec![None; tree.root_len()];
    let mut stack: Vec<(&Origin, u32, RingElement)> = vec![(&tree.origins()[target], 0, one)];
    while let Some((origin, e, u)) = stack.pop() {
        match origin {
            Origin::Root(i) => out[*i] = Some((e, u)),
            Origin::Merged(node) => {
                let s = &node.step;
                let e1 = s.b1.valuation().finite().unwrap_or(0);
                let e2 = s.b2.valuation().finite().unwrap_or(0);
                let mut u2 = u;
                if s.c == 1 {
                    let pi = RingElement::pi(u.field(), u.bits()).expect("valid precision");
                    u2 = u * (RingElement::one(u.field(), u.bits()).expect("valid precision") + pi);
                }
                stack.push((&node.left, e + e1, u));
                stack.push((&node.right, e + e2, u2));
            }
        }
    }
    out
}

/// Turn a Hensel-ready state into a verified witness for `form`.
fn witness_from(form: &AdditiveForm, w: &Work, target: u32) -> Result<Option<ZeroWitness>, SolverError> {
    let t = w.terminal.ok_or_else(|| SolverError::Internal("state is not terminal".into()))?;
    let field = form.field();
    let bits = form.bits();
    let one = RingElement::one(field, bits)?;
    let parts = exact_pullback(&w.tree, t, one);
    let shift = parts.iter().flatten().map(|(e, _)| *e).min().unwrap_or(0);
    let zero = RingElement::zero(field, bits)?;
    let x: Vec<RingElement> = parts
        .iter()
        .map(|p| match p {
            Some((e, u)) => RingElement::pi_pow(field, e - shift, bits).map(|pe| pe * *u),
            None => Ok(zero),
        })
        .collect::<Result<_, _>>()?;
    let value = form.evaluate(&x)?.valuation();
    let d = form.d();
    // pivot: criterion val f >= val(a_p x_p^d) + 5, smallest derivative first
    let mut best: Option<(u32, usize)> = None;
    for (i, xi) in x.iter().enumerate() {
        let (Some(vx), Some(va)) = (xi.valuation().finite(), form.coeffs()[i].valuation().finite()) else {
            continue;
        };
        let tau = va + d * vx;
        if value.at_least(tau + 5) {
            let vfp = 2 + va + (d - 1) * vx;
            if best.is_none_or(|(b, _)| vfp < b) {
                best = Some((vfp, i));
            }
        }
    }
    let Some((_, pivot)) = best else {
        return Ok(None);
    };
    let mut witness = hensel_lift(form, &x, pivot, target)?;
    let selected: Vec<usize> = vec![t];
    witness.trace = w.tree.trace(&selected);
    witness.tree = Some(w.tree.clone());
    if verify_witness(form, &witness).passed {
        Ok(Some(witness))
    } else {
        Ok(None)
    }
}

/// Search for a nontrivial zero of `form`.
///
/// The form is normalized, then states are expanded best first: moves from
/// the case tactics are preferred to generic pair contractions, then states
/// with a larger raise, then deeper states. A state is finished as soon as
/// one variable has been raised five levels over an origin (or its
/// coefficient vanishes); the zero is then pulled back, lifted and verified.
pub fn find_zero(form: &AdditiveForm, options: SolveOptions) -> Result<SolveOutcome, SolverError> {
    let target = options.target_precision.unwrap_or_else(|| default_target(form.d()));
    let available = form.bits() * 2 - 2;
    if target > available {
        return Err(SolverError::Precision {
            needed: target,
            available,
        });
    }
    let (root, rotation) = normalize(form)?;
    let max_depth = 2 * form.d() as usize;
    let mut report = SearchReport {
        nodes: 1,
        budget: options.budget,
        budget_exhausted: false,
        frontier_truncated: false,
        rotation,
        max_depth: 0,
        max_raise: 0,
        deepest_profiles: Vec::new(),
        precision_failures: 0,
    };
    let mut deepest: Vec<LevelProfile> = Vec::new();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut heap = BinaryHeap::new();
    let start = Work::new(&root);
    seen.insert(state_hash(&start));
    heap.push(Entry {
        score: (0, 0, 0),
        seq: 0,
        work: start,
    });
    let mut seq = 1u64;
    let mut precision_error = None;

    while let Some(Entry { work, .. }) = heap.pop() {
        let depth = root.len() - work.len();
        if depth > report.max_depth {
            report.max_depth = depth;
            deepest.clear();
        }
        if depth == report.max_depth && deepest.len() < 5 {
            deepest.push(LevelProfile::from_levels(
                work.d,
                (0..work.len()).map(|i| (work.level(i), work.class(i))),
            ));
        }
        report.max_raise = report.max_raise.max(work.max_raise());
        if depth >= max_depth {
            continue;
        }
        for tactic in Tactic::SEARCH_ORDER {
            for mut child in tactics::own_moves(tactic, &work) {
                if child.is_terminal() {
                    match witness_from(form, &child, target) {
                        Ok(Some(w)) => return Ok(SolveOutcome::Found(w)),
                        Ok(None) => {}
                        Err(SolverError::Precision { needed, available }) => {
                            report.precision_failures += 1;
                            precision_error = Some(SolverError::Precision { needed, available });
                        }
                        Err(e) => return Err(e),
                    }
                    continue;
                }
                if !seen.insert(state_hash(&child)) {
                    continue;
                }
                report.nodes += 1;
                if report.nodes >= options.budget {
                    report.budget_exhausted = true;
                    return finish_report(report, deepest, precision_error);
                }
                if heap.len() >= FRONTIER_CAP {
                    report.frontier_truncated = true;
                    continue;
                }
                child.steps.clear();
                let chained = u8::from(tactic != Tactic::GenericPair);
                heap.push(Entry {
                    score: (chained, child.max_raise(), root.len() - child.len()),
                    seq,
                    work: child,
                });
                seq += 1;
            }
        }
    }
    finish_report(report, deepest, precision_error)
}

fn finish_report(
    mut report: SearchReport,
    deepest: Vec<LevelProfile>,
    precision_error: Option<SolverError>,
) -> Result<SolveOutcome, SolverError> {
    if let Some(e) = precision_error {
        return Err(e);
    }
    report.deepest_profiles = deepest.iter().map(ToString::to_string).collect();
    Ok(SolveOutcome::NotFound(report))
}

/// Level profile of the normalized form, as the search starts from it.
pub fn normalized_profile(form: &AdditiveForm) -> Result<LevelProfile, SolverError> {
    Ok(profile(&normalize(form)?.0))
}
