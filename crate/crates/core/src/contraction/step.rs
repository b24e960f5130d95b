use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field_ring::{Family, FieldId, RingElement, Valuation};

use super::ContractionError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ContractionKind {
    D,
    S2,
    S3,
    T,
    ST,
}

impl ContractionKind {
    /// Guaranteed gain; `S2` and `ST` gain exactly this much, `D` exactly one.
    pub fn min_gain(self) -> u32 {
        match self {
            ContractionKind::D => 1,
            ContractionKind::S2 | ContractionKind::ST => 2,
            ContractionKind::S3 => 3,
            ContractionKind::T => 4,
        }
    }
}

impl fmt::Display for ContractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContractionKind::D => "D",
            ContractionKind::S2 => "S2",
            ContractionKind::S3 => "S3",
            ContractionKind::T => "T",
            ContractionKind::ST => "ST",
        })
    }
}

/// One change of variables `x_i = b1 y`, `x_j = b2 y`.
///
/// `b1` and `b2` include the power of pi that aligns two coefficients whose
/// valuations differ by a multiple of `d`, so `new_coefficient` is exactly
/// `a_i b1^d + a_j b2^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionStep {
    pub kind: ContractionKind,
    /// Indices in the form the step was planned on.
    pub merged: (usize, usize),
    /// All indices offered to a `T`/`ST` step; the two merged ones for pair steps.
    pub candidates: Vec<usize>,
    /// Digit selecting `b2 = 1 + c pi` (before alignment).
    pub c: u8,
    pub b1: RingElement,
    pub b2: RingElement,
    pub new_coefficient: RingElement,
    /// `val(new_coefficient) - val(a_i b1^d)`.
    pub level_gain: Valuation,
}

impl ContractionStep {
    /// At least five levels in one step: enough for Hensel lifting.
    pub fn hensel_ready(&self) -> bool {
        self.level_gain.at_least(5)
    }

    pub fn gain(&self) -> Option<u32> {
        self.level_gain.finite()
    }
}

/// Result of trying one pair with one digit `c`.
#[derive(Clone, Debug)]
pub(crate) struct PairTrial {
    pub c: u8,
    pub b1: RingElement,
    pub b2: RingElement,
    pub new_coefficient: RingElement,
    pub gain: Valuation,
    pub class: Option<u8>,
}

fn level_of(a: &RingElement, d: u32) -> Result<(u32, u32), ContractionError> {
    let v = a
        .valuation()
        .finite()
        .ok_or_else(|| ContractionError::Precondition("coefficient vanishes to working precision".into()))?;
    Ok((v, v % d))
}

pub(crate) fn same_level(a: &RingElement, b: &RingElement, d: u32) -> Result<bool, ContractionError> {
    Ok(level_of(a, d)?.1 == level_of(b, d)?.1)
}

pub(crate) fn class_of(a: &RingElement) -> u8 {
    a.pi_coefficient().unwrap_or(0)
}

/// `a_i b1^d + a_j b2^d` with `b1 = pi^s1`, `b2 = pi^s2 (1 + c pi)`.
pub(crate) fn trial(a_i: &RingElement, a_j: &RingElement, d: u32, c: u8) -> Result<PairTrial, ContractionError> {
    let (vi, li) = level_of(a_i, d)?;
    let (vj, lj) = level_of(a_j, d)?;
    if li != lj {
        return Err(ContractionError::Precondition(format!(
            "variables at different levels {li} and {lj}"
        )));
    }
    let top = vi.max(vj);
    let field = a_i.field();
    let bits = a_i.bits();
    let b1 = RingElement::pi_pow(field, (top - vi) / d, bits)?;
    let mut unit = RingElement::one(field, bits)?;
    if c == 1 {
        unit = unit + RingElement::pi(field, bits)?;
    }
    let b2 = RingElement::pi_pow(field, (top - vj) / d, bits)? * unit;
    let new_coefficient = a_i.checked_mul(&b1.pow(d as u64))?.checked_add(&a_j.checked_mul(&b2.pow(d as u64))?)?;
    let gain = match new_coefficient.valuation() {
        Valuation::Finite(v) => Valuation::Finite(v - top),
        Valuation::Infinite => Valuation::Infinite,
    };
    let class = new_coefficient.pi_coefficient();
    Ok(PairTrial {
        c,
        b1,
        b2,
        new_coefficient,
        gain,
        class,
    })
}

fn into_step(kind: ContractionKind, merged: (usize, usize), candidates: Vec<usize>, t: PairTrial) -> ContractionStep {
    ContractionStep {
        kind,
        merged,
        candidates,
        c: t.c,
        b1: t.b1,
        b2: t.b2,
        new_coefficient: t.new_coefficient,
        level_gain: t.gain,
    }
}

fn check_pair(
    a_i: &RingElement,
    a_j: &RingElement,
    d: u32,
    same_class: bool,
) -> Result<(), ContractionError> {
    if !same_level(a_i, a_j, d)? {
        return Err(ContractionError::Precondition("variables are not in the same level".into()));
    }
    let classes_equal = class_of(a_i) == class_of(a_j);
    if classes_equal != same_class {
        return Err(ContractionError::Precondition(if same_class {
            "pi-coefficients differ".into()
        } else {
            "pi-coefficients agree".into()
        }));
    }
    Ok(())
}

/// Pair with differing pi-coefficients, raised exactly one level with the
/// requested pi-coefficient.
pub fn plan_d(
    coeffs: &[RingElement],
    d: u32,
    (i, j): (usize, usize),
    want: u8,
) -> Result<ContractionStep, ContractionError> {
    let (a_i, a_j) = pair(coeffs, i, j)?;
    check_pair(a_i, a_j, d, false)?;
    for c in 0..2 {
        let t = trial(a_i, a_j, d, c)?;
        if t.gain == Valuation::Finite(1) && t.class == Some(want & 1) {
            return Ok(into_step(ContractionKind::D, (i, j), vec![i, j], t));
        }
    }
    Err(ContractionError::Violation(format!("no digit gives a d-contraction to class {want}")))
}

/// Same pi-coefficient, raised exactly two levels.
pub fn plan_s2(coeffs: &[RingElement], d: u32, (i, j): (usize, usize)) -> Result<ContractionStep, ContractionError> {
    let (a_i, a_j) = pair(coeffs, i, j)?;
    check_pair(a_i, a_j, d, true)?;
    for c in 0..2 {
        let t = trial(a_i, a_j, d, c)?;
        if t.gain == Valuation::Finite(2) {
            return Ok(into_step(ContractionKind::S2, (i, j), vec![i, j], t));
        }
    }
    Err(ContractionError::Violation("no digit gives an s2-contraction".into()))
}

/// Same pi-coefficient, raised at least three levels.
pub fn plan_s3(coeffs: &[RingElement], d: u32, (i, j): (usize, usize)) -> Result<ContractionStep, ContractionError> {
    let (a_i, a_j) = pair(coeffs, i, j)?;
    check_pair(a_i, a_j, d, true)?;
    for c in 0..2 {
        let t = trial(a_i, a_j, d, c)?;
        if t.gain.at_least(3) {
            return Ok(into_step(ContractionKind::S3, (i, j), vec![i, j], t));
        }
    }
    Err(ContractionError::Violation("no digit gives an s3-contraction".into()))
}

fn check_triple(coeffs: &[RingElement], d: u32, candidates: &[usize]) -> Result<[usize; 3], ContractionError> {
    let idx: [usize; 3] = candidates
        .try_into()
        .map_err(|_| ContractionError::Interface(format!("expected 3 candidates, got {}", candidates.len())))?;
    if idx[0] == idx[1] || idx[0] == idx[2] || idx[1] == idx[2] {
        return Err(ContractionError::Interface("candidates must be distinct".into()));
    }
    for &k in &idx {
        if k >= coeffs.len() {
            return Err(ContractionError::Interface(format!("index {k} out of range")));
        }
    }
    check_pair(&coeffs[idx[0]], &coeffs[idx[1]], d, true)?;
    check_pair(&coeffs[idx[0]], &coeffs[idx[2]], d, true)?;
    Ok(idx)
}

fn require_family(field: FieldId, family: Family) -> Result<(), ContractionError> {
    if field.family() == family {
        Ok(())
    } else {
        Err(ContractionError::WrongFamily { field, required: family })
    }
}

fn triple_pairs(idx: [usize; 3]) -> [(usize, usize); 3] {
    [(idx[0], idx[1]), (idx[0], idx[2]), (idx[1], idx[2])]
}

/// J1 fields: among three same-class variables, a pair raised at least four levels.
pub fn plan_t(coeffs: &[RingElement], d: u32, candidates: &[usize]) -> Result<ContractionStep, ContractionError> {
    let idx = check_triple(coeffs, d, candidates)?;
    require_family(coeffs[idx[0]].field(), Family::RamifiedJ1)?;
    for (i, j) in triple_pairs(idx) {
        for c in 0..2 {
            let t = trial(&coeffs[i], &coeffs[j], d, c)?;
            if t.gain.at_least(4) {
                return Ok(into_step(ContractionKind::T, (i, j), idx.to_vec(), t));
            }
        }
    }
    Err(ContractionError::Violation("no pair gives a t-contraction".into()))
}

/// J0 fields: among three same-class variables, a pair raised exactly two
/// levels that keeps the common pi-coefficient.
pub fn plan_st(coeffs: &[RingElement], d: u32, candidates: &[usize]) -> Result<ContractionStep, ContractionError> {
    let idx = check_triple(coeffs, d, candidates)?;
    require_family(coeffs[idx[0]].field(), Family::RamifiedJ0)?;
    let class = class_of(&coeffs[idx[0]]);
    for (i, j) in triple_pairs(idx) {
        for c in 0..2 {
            let t = trial(&coeffs[i], &coeffs[j], d, c)?;
            if t.gain == Valuation::Finite(2) && t.class == Some(class) {
                return Ok(into_step(ContractionKind::ST, (i, j), idx.to_vec(), t));
            }
        }
    }
    Err(ContractionError::Violation("no pair gives an st-contraction".into()))
}

fn pair(coeffs: &[RingElement], i: usize, j: usize) -> Result<(&RingElement, &RingElement), ContractionError> {
    if i == j {
        return Err(ContractionError::Interface("a variable cannot be contracted with itself".into()));
    }
    match (coeffs.get(i), coeffs.get(j)) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(ContractionError::Interface(format!("index out of range ({i}, {j})"))),
    }
}
