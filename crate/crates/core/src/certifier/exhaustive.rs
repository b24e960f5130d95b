use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::field_ring::RingElement;
use crate::forms::AdditiveForm;

use super::{AnisotropyCertificate, CertMethod, CertifierError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExhaustiveOptions {
    /// Reject partial assignments as soon as the form value is forced
    /// nonzero; without it only complete assignments are tested.
    pub prune: bool,
    /// Digit assignments the search may visit before giving up.
    pub budget: u64,
    pub workers: usize,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions {
            prune: true,
            budget: 1_000_000_000,
            workers: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub pruned: u64,
    /// One subtree per choice of the first unit variable.
    pub subtrees: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExhaustiveOutcome {
    Certified(AnisotropyCertificate),
    /// A primitive zero modulo `pi^N`, by original variable.
    Counterexample(Vec<RingElement>),
    /// The budget ran out first; nothing is claimed.
    Indeterminate(SearchStats),
}

/// Digits needed from a variable: `x = y (mod pi^q)` implies
/// `x^d = y^d (mod pi^min(q + 2, 2q))`, so `q` digits fix the term
/// `a x^d` modulo `pi^(v + min(q + 2, 2q))`.
fn digits_needed(v: u32, n: u32) -> u32 {
    (1..).find(|&q| v + determined(q) >= n).unwrap_or(1)
}

/// Precision to which `x^d` is known from `q` digits of `x`.
fn determined(q: u32) -> u32 {
    if q == 0 {
        0
    } else {
        (q + 2).min(2 * q)
    }
}

struct Search<'a> {
    n: u32,
    d: u64,
    prune: bool,
    coeffs: Vec<RingElement>,
    vals: Vec<u32>,
    need: Vec<u32>,
    powers: Vec<RingElement>,
    planes: u32,
    budget: u64,
    /// Nodes counted locally between updates of the shared counter.
    chunk: u64,
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
}

struct Cursor {
    x: Vec<RingElement>,
    terms: Vec<RingElement>,
    value: RingElement,
    known: Vec<u32>,
    nodes: u64,
    pruned: u64,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    /// Precision to which term `i` is already fixed by its known digits.
    /// A value still `0 (mod pi^q)` gives `a (pi^q y)^d`, fixed to `v + dq`.
    fn term_precision(&self, cur: &Cursor, i: usize) -> u32 {
        let q = cur.known[i];
        if q >= self.need[i] {
            u32::MAX
        } else if cur.x[i].is_zero() {
            self.vals[i].saturating_add((self.d as u32).saturating_mul(q))
        } else {
            self.vals[i] + determined(q)
        }
    }

    /// Precision to which the current partial value equals the true one.
    fn horizon(&self, cur: &Cursor) -> u32 {
        (0..cur.known.len())
            .map(|i| self.term_precision(cur, i))
            .fold(self.n, u32::min)
    }

    fn set_digit(&self, cur: &mut Cursor, i: usize, plane: u32, digit: u8) {
        cur.known[i] = plane + 1;
        if digit == 1 {
            cur.x[i] = cur.x[i] + self.powers[plane as usize];
            let term = self.coeffs[i] * cur.x[i].pow(self.d);
            cur.value = cur.value - cur.terms[i] + term;
            cur.terms[i] = term;
        }
    }

    fn unset_digit(&self, cur: &mut Cursor, i: usize, plane: u32, digit: u8) {
        cur.known[i] = plane;
        if digit == 1 {
            cur.x[i] = cur.x[i] - self.powers[plane as usize];
            let term = self.coeffs[i] * cur.x[i].pow(self.d);
            cur.value = cur.value - cur.terms[i] + term;
            cur.terms[i] = term;
        }
    }

    fn consistent(&self, cur: &Cursor) -> bool {
        let l = self.horizon(cur);
        cur.value.valuation().at_least(l)
    }

    /// Depth-first over (plane, position) in `order`; `fixed` gives the
    /// forced plane-0 digits of the variables before the first unit.
    fn dfs(&self, cur: &mut Cursor, order: &[usize], plane: u32, pos: usize, fixed: &[Option<u8>]) -> Step {
        if self.stop.load(Ordering::Relaxed) {
            return Step::OutOfBudget;
        }
        if pos == order.len() {
            if plane + 1 >= self.planes {
                return if cur.value.valuation().at_least(self.n) {
                    Step::Found
                } else {
                    Step::Exhausted
                };
            }
            return self.dfs(cur, order, plane + 1, 0, fixed);
        }
        let i = order[pos];
        if self.term_precision(cur, i) >= self.n {
            return self.dfs(cur, order, plane, pos + 1, fixed);
        }
        let choices: &[u8] = match (plane, fixed[pos]) {
            (0, Some(0)) => &[0],
            (0, Some(1)) => &[1],
            _ => &[0, 1],
        };
        for &digit in choices {
            cur.nodes += 1;
            if cur.nodes.is_multiple_of(self.chunk) {
                let total = self.nodes.fetch_add(self.chunk, Ordering::Relaxed) + self.chunk;
                if total > self.budget {
                    self.stop.store(true, Ordering::Relaxed);
                    return Step::OutOfBudget;
                }
            }
            self.set_digit(cur, i, plane, digit);
            if self.prune && !self.consistent(cur) {
                cur.pruned += 1;
                self.unset_digit(cur, i, plane, digit);
                continue;
            }
            match self.dfs(cur, order, plane, pos + 1, fixed) {
                Step::Exhausted => {}
                other => return other,
            }
            self.unset_digit(cur, i, plane, digit);
        }
        Step::Exhausted
    }
}

/// Decide whether `form` has a primitive zero modulo `pi^n` by complete
/// enumeration of digit planes.
///
/// Variables are ordered by valuation so that low terms constrain early
/// planes. The search is split by the first variable (in that order) whose
/// value is a unit; the subtrees are disjoint and may run in parallel.
pub fn exhaustive_no_primitive_zero(
    form: &AdditiveForm,
    n: u32,
    options: ExhaustiveOptions,
) -> Result<ExhaustiveOutcome, CertifierError> {
    let field = form.field();
    let bits = form.bits();
    let available = bits * 2 - 2;
    if n == 0 || n > available {
        return Err(CertifierError::InvalidArgument(format!(
            "modulus pi^{n} outside 1..={available} at this precision"
        )));
    }
    let s = form.len();
    let vals: Vec<u32> = form
        .coeffs()
        .iter()
        .map(|c| c.valuation().finite().unwrap_or(available))
        .collect();
    let need: Vec<u32> = vals.iter().map(|&v| digits_needed(v, n)).collect();
    let planes = need.iter().copied().max().unwrap_or(1);
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by_key(|&i| (vals[i], i));
    let pi = RingElement::pi(field, bits)?;
    let mut powers = vec![RingElement::one(field, bits)?];
    for _ in 1..planes.max(1) {
        let last = *powers.last().expect("nonempty");
        powers.push(last * pi);
    }
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let search = Search {
        n,
        d: form.d() as u64,
        prune: options.prune,
        coeffs: form.coeffs().to_vec(),
        vals,
        need,
        powers,
        planes,
        budget: options.budget,
        chunk: options.budget.clamp(1, 4096),
        nodes: &nodes,
        stop: &stop,
    };
    let zero = RingElement::zero(field, bits)?;

    let run_root = |first: usize| -> (Option<Vec<RingElement>>, u64, u64, bool) {
        let fixed: Vec<Option<u8>> = (0..s)
            .map(|p| match p.cmp(&first) {
                std::cmp::Ordering::Less => Some(0),
                std::cmp::Ordering::Equal => Some(1),
                std::cmp::Ordering::Greater => None,
            })
            .collect();
        let mut cur = Cursor {
            x: vec![zero; s],
            terms: vec![zero; s],
            value: zero,
            known: vec![0; s],
            nodes: 0,
            pruned: 0,
        };
        let step = search.dfs(&mut cur, &order, 0, 0, &fixed);
        nodes.fetch_add(cur.nodes % search.chunk, Ordering::Relaxed);
        match step {
            Step::Found => (Some(cur.x.clone()), cur.nodes, cur.pruned, false),
            Step::Exhausted => (None, cur.nodes, cur.pruned, false),
            Step::OutOfBudget => (None, cur.nodes, cur.pruned, true),
        }
    };

    let results: Vec<(Option<Vec<RingElement>>, u64, u64, bool)> = if options.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .map_err(|e| CertifierError::InvalidArgument(e.to_string()))?;
        pool.install(|| (0..s).into_par_iter().map(run_root).collect())
    } else {
        let mut out = Vec::with_capacity(s);
        for first in 0..s {
            let r = run_root(first);
            let done = r.0.is_some();
            out.push(r);
            if done {
                break;
            }
        }
        out
    };

    let stats = SearchStats {
        nodes: results.iter().map(|r| r.1).sum(),
        pruned: results.iter().map(|r| r.2).sum(),
        subtrees: s,
    };
    if let Some(x) = results.iter().find_map(|r| r.0.clone()) {
        return Ok(ExhaustiveOutcome::Counterexample(x));
    }
    if results.iter().any(|r| r.3) {
        return Ok(ExhaustiveOutcome::Indeterminate(stats));
    }
    Ok(ExhaustiveOutcome::Certified(AnisotropyCertificate {
        method: CertMethod::ExhaustiveMod(n),
        field,
        degree: form.d(),
        variables: s,
        form_hash: form.fingerprint(),
        stats: Some(stats),
    }))
}

/// Upper bound on the leaves of the unpruned search, as a float.
pub fn projected_nodes(form: &AdditiveForm, n: u32) -> f64 {
    let total: u32 = form
        .coeffs()
        .iter()
        .map(|c| digits_needed(c.valuation().finite().unwrap_or(n), n))
        .sum();
    2f64.powi(total as i32)
}

/// `true` when `x` is a primitive zero of `form` modulo `pi^n`.
pub fn is_primitive_zero(form: &AdditiveForm, x: &[RingElement], n: u32) -> bool {
    x.iter().any(RingElement::is_unit)
        && form
            .evaluate(x)
            .map(|v| v.valuation().at_least(n))
            .unwrap_or(false)
}
