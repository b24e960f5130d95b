use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::contraction::{plan_d, plan_s2, plan_s3, plan_st, plan_t, ContractionStep};
use crate::field_ring::{check_degree, enumerate_units_mod, Family, FieldId, RingElement, Valuation, DEFAULT_BITS};
use crate::forms::{normalizing_rotation, LevelProfile};

use super::CertifierError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AuditId {
    /// d-contraction: differing classes, one level up, chosen class.
    D,
    /// s2-contraction: same class, exactly two levels up.
    S2,
    /// s3-contraction: same class, at least three levels up.
    S3,
    /// t-contraction (J1): some pair of three raised at least four levels.
    T,
    /// st-contraction (J0): some pair of three raised exactly two levels, class kept.
    ST,
    PowersModPi4,
    TwoModPi4,
    Normalization,
}

impl AuditId {
    pub const ALL: [AuditId; 8] = [
        AuditId::D,
        AuditId::S2,
        AuditId::S3,
        AuditId::T,
        AuditId::ST,
        AuditId::PowersModPi4,
        AuditId::TwoModPi4,
        AuditId::Normalization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuditId::D => "L2.1",
            AuditId::S2 => "L2.2",
            AuditId::S3 => "L2.3",
            AuditId::T => "L2.4",
            AuditId::ST => "L2.5",
            AuditId::PowersModPi4 => "powers_mod_pi4",
            AuditId::TwoModPi4 => "two_mod_pi4",
            AuditId::Normalization => "L1_normalization",
        }
    }

    /// The family an audit is restricted to, if any.
    pub fn family(self) -> Option<Family> {
        match self {
            AuditId::T => Some(Family::RamifiedJ1),
            AuditId::ST => Some(Family::RamifiedJ0),
            _ => None,
        }
    }

    pub fn applies_to(self, field: FieldId) -> bool {
        self.family().is_none_or(|f| f == field.family())
    }
}

impl fmt::Display for AuditId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AuditId {
    type Err = CertifierError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AuditId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CertifierError::UnknownAudit(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub id: AuditId,
    pub field: FieldId,
    pub degree: u32,
    /// Hypothesis instances enumerated.
    pub instances: u64,
    /// Individual conclusions checked (several per instance).
    pub checks: u64,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {:<14} d={:<3} instances={:<6} checks={:<6} violations={}",
            self.id.name(),
            self.field.name(),
            self.degree,
            self.instances,
            self.checks,
            self.violations.len()
        )?;
        for v in &self.violations {
            write!(f, "\n    {v}")?;
        }
        Ok(())
    }
}

struct Tally {
    instances: u64,
    checks: u64,
    violations: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            instances: 0,
            checks: 0,
            violations: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(describe());
        }
    }
}

/// A unit residue mod `pi^4` as its digits `a1, a2, a3` after the leading 1.
fn tail(u: &RingElement) -> Result<[u8; 3], CertifierError> {
    let digits = u.digit_expand(4)?;
    let d = digits.digits();
    Ok([d[1], d[2], d[3]])
}

fn show(t: [u8; 3]) -> String {
    format!("({},{},{})", t[0], t[1], t[2])
}

/// Gain and class of `a + b (1 + c pi)^d`, computed directly.
fn combine(a: &RingElement, b: &RingElement, d: u32, c: u8) -> Result<(Valuation, Option<u8>), CertifierError> {
    let mut u = RingElement::one(a.field(), a.bits())?;
    if c == 1 {
        u = u.checked_add(&RingElement::pi(a.field(), a.bits())?)?;
    }
    let s = a.checked_add(&b.checked_mul(&u.pow(d as u64))?)?;
    Ok((s.valuation(), s.pi_coefficient()))
}

/// Recompute a planned step's result from its own substitution.
fn replay(coeffs: &[RingElement], d: u32, step: &ContractionStep) -> Result<(Valuation, Option<u8>), CertifierError> {
    let (i, j) = step.merged;
    let s = coeffs[i]
        .checked_mul(&step.b1.pow(d as u64))?
        .checked_add(&coeffs[j].checked_mul(&step.b2.pow(d as u64))?)?;
    if s != step.new_coefficient {
        return Err(CertifierError::InvalidArgument("step coefficient does not match its substitution".into()));
    }
    Ok((s.valuation(), s.pi_coefficient()))
}

fn audit_pairs(field: FieldId, d: u32, id: AuditId, t: &mut Tally) -> Result<(), CertifierError> {
    let units = enumerate_units_mod(field, 4, DEFAULT_BITS)?;
    for a in &units {
        for b in &units {
            let (ta, tb) = (tail(a)?, tail(b)?);
            let same = ta[0] == tb[0];
            let coeffs = [*a, *b];
            let what = |s: &str| format!("{} a={} b={}: {s}", id.name(), show(ta), show(tb));
            match id {
                AuditId::D if !same => {
                    for want in 0..2u8 {
                        t.instances += 1;
                        let c = (want + 1 + ta[1] + tb[1]) & 1;
                        let (v, class) = combine(a, b, d, c)?;
                        t.check(v == Valuation::Finite(1) && class == Some(want), || {
                            what(&format!("c={c} gives val {v} class {class:?}, want class {want}"))
                        });
                        match plan_d(&coeffs, d, (0, 1), want) {
                            Ok(step) => {
                                let (v, class) = replay(&coeffs, d, &step)?;
                                t.check(v == Valuation::Finite(1) && class == Some(want), || {
                                    what(&format!("constructor gives val {v} class {class:?}"))
                                });
                            }
                            Err(e) => t.check(false, || what(&e.to_string())),
                        }
                    }
                }
                AuditId::S2 | AuditId::S3 if same => {
                    t.instances += 1;
                    let (c, ok): (u8, fn(Valuation) -> bool) = if id == AuditId::S2 {
                        ((ta[1] + tb[1]) & 1, |v| v == Valuation::Finite(2))
                    } else {
                        ((1 + ta[1] + tb[1]) & 1, |v| v.at_least(3))
                    };
                    let (v, _) = combine(a, b, d, c)?;
                    t.check(ok(v), || what(&format!("c={c} gives val {v}")));
                    let planned = if id == AuditId::S2 {
                        plan_s2(&coeffs, d, (0, 1))
                    } else {
                        plan_s3(&coeffs, d, (0, 1))
                    };
                    match planned {
                        Ok(step) => {
                            let (v, _) = replay(&coeffs, d, &step)?;
                            t.check(ok(v), || what(&format!("constructor gives val {v}")));
                        }
                        Err(e) => t.check(false, || what(&e.to_string())),
                    }
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn audit_triples(field: FieldId, d: u32, id: AuditId, t: &mut Tally) -> Result<(), CertifierError> {
    let units = enumerate_units_mod(field, 4, DEFAULT_BITS)?;
    for class in 0..2u8 {
        let pool: Vec<(RingElement, [u8; 3])> = units
            .iter()
            .map(|u| Ok((*u, tail(u)?)))
            .collect::<Result<Vec<_>, CertifierError>>()?
            .into_iter()
            .filter(|(_, tl)| tl[0] == class)
            .collect();
        for x in &pool {
            for y in &pool {
                for z in &pool {
                    t.instances += 1;
                    let triple = [x, y, z];
                    let what = |s: &str| {
                        format!(
                            "{} ({},{},{}): {s}",
                            id.name(),
                            show(x.1),
                            show(y.1),
                            show(z.1)
                        )
                    };
                    let mut formula_ok = false;
                    for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                        let (a, b) = (triple[p], triple[q]);
                        let (v, cls) = if id == AuditId::T {
                            combine(&a.0, &b.0, d, (1 + a.1[1] + b.1[1]) & 1)?
                        } else {
                            combine(&a.0, &b.0, d, (a.1[1] + b.1[1]) & 1)?
                        };
                        formula_ok |= if id == AuditId::T {
                            v.at_least(4)
                        } else {
                            v == Valuation::Finite(2) && cls == Some(class)
                        };
                    }
                    t.check(formula_ok, || what("no pair meets the conclusion with the explicit digit"));
                    let coeffs = [x.0, y.0, z.0];
                    let planned = if id == AuditId::T {
                        plan_t(&coeffs, d, &[0, 1, 2])
                    } else {
                        plan_st(&coeffs, d, &[0, 1, 2])
                    };
                    match planned {
                        Ok(step) => {
                            let (v, cls) = replay(&coeffs, d, &step)?;
                            let ok = if id == AuditId::T {
                                v.at_least(4)
                            } else {
                                v == Valuation::Finite(2) && cls == Some(class)
                            };
                            t.check(ok, || what(&format!("constructor gives val {v} class {cls:?}")));
                        }
                        Err(e) => t.check(false, || what(&e.to_string())),
                    }
                }
            }
        }
    }
    Ok(())
}

/// `u^d = 1 + a pi^2 + a pi^3 (mod pi^4)` where `a` is the pi-digit of `u`.
fn audit_powers(field: FieldId, d: u32, t: &mut Tally) -> Result<(), CertifierError> {
    for u in enumerate_units_mod(field, 4, DEFAULT_BITS)? {
        t.instances += 1;
        let tl = tail(&u)?;
        let got = u.pow(d as u64).digit_expand(4)?.digits().to_vec();
        let want = vec![1, 0, tl[0], tl[0]];
        t.check(got == want, || format!("unit {} ^ {d} = {:?}, expected {:?}", show(tl), got, want));
    }
    Ok(())
}

/// The digits of 2 modulo `pi^4`, from raw arithmetic and from the field table.
fn audit_two(field: FieldId, t: &mut Tally) -> Result<(), CertifierError> {
    t.instances += 1;
    let two = RingElement::from_int(field, 2, DEFAULT_BITS)?;
    let raw = two.digit_expand(4)?.digits().to_vec();
    let expected: [u8; 4] = match field.family() {
        Family::RamifiedJ0 => [0, 0, 1, 0],
        Family::RamifiedJ1 => [0, 0, 1, 1],
    };
    t.check(raw == expected, || format!("2 = {raw:?} mod pi^4, expected {expected:?}"));
    let table = field.descriptor().two_mod_pi4;
    t.check(table == expected, || format!("descriptor lists {table:?}, expected {expected:?}"));
    t.check(
        u32::from(expected[3]) == u32::from(field.family().j()),
        || format!("family digit j = {} disagrees", field.family().j()),
    );
    Ok(())
}

/// Largest variable count whose profiles are enumerated for degree `d`.
fn profile_limit(d: u32) -> usize {
    if d == 6 {
        9
    } else {
        6
    }
}

fn compositions(d: usize, s: usize, prefix: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if prefix.len() + 1 == d {
        prefix.push(s);
        out(prefix);
        prefix.pop();
        return;
    }
    for k in 0..=s {
        prefix.push(k);
        compositions(d, s - k, prefix, out);
        prefix.pop();
    }
}

/// Every level profile with at most `profile_limit(d)` variables has a
/// rotation meeting all prefix inequalities, and the chosen one does.
fn audit_normalization(d: u32, t: &mut Tally) -> Result<(), CertifierError> {
    for s in 1..=profile_limit(d) {
        compositions(d as usize, s, &mut Vec::new(), &mut |counts| {
            t.instances += 1;
            let levels = counts
                .iter()
                .enumerate()
                .flat_map(|(l, &n)| std::iter::repeat_n((l as u32, 0u8), n));
            let p = LevelProfile::from_levels(d, levels);
            let r = normalizing_rotation(&p);
            let q = p.rotated(r);
            t.check(q.satisfies_prefix_inequalities(), || {
                format!("profile {p} rotated by {r} is {q}, which fails a prefix inequality")
            });
            t.check(normalizing_rotation(&q) == 0, || format!("normalizing {q} again moves it"));
        });
    }
    Ok(())
}

/// Exhaustively check one modular identity or construction over `field`.
///
/// Contraction audits instantiate every pair (or triple) of unit classes
/// modulo `pi^4`; each contraction's conclusion depends only on those digits.
/// Both the explicit digit choice and the library constructor are checked.
pub fn lemma_audit(id: AuditId, field: FieldId, d: u32) -> Result<AuditReport, CertifierError> {
    check_degree(d)?;
    if let Some(required) = id.family() {
        if field.family() != required {
            return Err(CertifierError::WrongFamily {
                audit: id.name(),
                field,
                required,
            });
        }
    }
    let mut t = Tally::new();
    match id {
        AuditId::D | AuditId::S2 | AuditId::S3 => audit_pairs(field, d, id, &mut t)?,
        AuditId::T | AuditId::ST => audit_triples(field, d, id, &mut t)?,
        AuditId::PowersModPi4 => audit_powers(field, d, &mut t)?,
        AuditId::TwoModPi4 => audit_two(field, &mut t)?,
        AuditId::Normalization => audit_normalization(d, &mut t)?,
    }
    Ok(AuditReport {
        id,
        field,
        degree: d,
        instances: t.instances,
        checks: t.checks,
        violations: t.violations,
    })
}

/// Every applicable audit over every field.
pub fn audit_all(d: u32) -> Result<Vec<AuditReport>, CertifierError> {
    let mut out = Vec::new();
    for id in AuditId::ALL {
        for field in FieldId::ALL {
            if id.applies_to(field) {
                out.push(lemma_audit(id, field, d)?);
            }
        }
    }
    Ok(out)
}
