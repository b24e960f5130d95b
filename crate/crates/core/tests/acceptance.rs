//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines show up in the
//! output of `cargo test`; the process fails when any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramiform::certifier::{
    classify_power_residues, distinct_level_certificate, exhaustive_no_primitive_zero, lemma_audit, AuditId, CertMethod,
    ExhaustiveOptions, ExhaustiveOutcome, Residue,
};
use ramiform::field_ring::{Family, FieldId, RingElement, DEFAULT_BITS};
use ramiform::forms::catalog::{extremal_f, extremal_g};
use ramiform::forms::{normalize, profile, random_form, random_unit, AdditiveForm, Degree, LevelDistribution};
use ramiform::solver::{find_zero, hensel_lift, verify_witness, SolveOptions, SolveOutcome};

use common::Pair;

const B: u32 = DEFAULT_BITS;
const SEED: u64 = 20_201_130;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn deg(d: u32) -> Degree {
    Degree::new(d).unwrap()
}

fn j0_fields() -> impl Iterator<Item = FieldId> {
    FieldId::ALL.into_iter().filter(|f| f.family() == Family::RamifiedJ0)
}

fn j1_fields() -> impl Iterator<Item = FieldId> {
    FieldId::ALL.into_iter().filter(|f| f.family() == Family::RamifiedJ1)
}

fn power_classification() -> Outcome {
    let expected: BTreeSet<Residue> = ["0", "1", "1+pi^2+pi^3"]
        .iter()
        .map(|s| Residue::parse(s, 4).unwrap())
        .collect();
    for f in FieldId::ALL {
        for d in [6, 10, 14] {
            let got = classify_power_residues(f, d, 4).map_err(|e| e.to_string())?;
            ensure(got.residues == expected, || format!("{f} d={d}: {}", got.display_set().join(", ")))?;
        }
    }
    Ok("6 fields x d in {6, 10, 14}".into())
}

fn two_mod_pi4() -> Outcome {
    for f in FieldId::ALL {
        let raw = RingElement::from_int(f, 2, B).unwrap().digit_expand(4).unwrap().digits().to_vec();
        let oracle = common::digits(f, Pair::from_i128(2, 0), 4);
        let expected = match f.family() {
            Family::RamifiedJ0 => vec![0, 0, 1, 0],
            Family::RamifiedJ1 => vec![0, 0, 1, 1],
        };
        ensure(raw == expected && oracle == expected, || format!("{f}: library {raw:?}, oracle {oracle:?}"))?;
    }
    Ok("(0,0,1,0) for J0, (0,0,1,1) for J1".into())
}

fn contraction_audits() -> Outcome {
    let mut checks = 0;
    let mut reports = 0;
    for d in [6, 10] {
        for f in FieldId::ALL {
            for id in [AuditId::D, AuditId::S2, AuditId::S3, AuditId::T, AuditId::ST] {
                if !id.applies_to(f) {
                    continue;
                }
                let r = lemma_audit(id, f, d).map_err(|e| e.to_string())?;
                ensure(r.passed(), || format!("{r}"))?;
                checks += r.checks;
                reports += 1;
            }
        }
    }
    Ok(format!("{reports} audits, {checks} checks, 0 violations"))
}

/// `trials` random forms with `Gamma*` variables per field, all solved with
/// independently re-checked witnesses of precision at least 20.
fn upper_bounds(d: u32, trials: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ d as u64);
    let mut min_precision = u32::MAX;
    for f in FieldId::ALL {
        let s = f.gamma_star(d) as usize;
        for t in 0..trials {
            let seed = rng.gen();
            let form = random_form(f, deg(d), s, seed, &LevelDistribution::Uniform, B).unwrap();
            let out = find_zero(&form, SolveOptions::default()).map_err(|e| format!("{f} trial {t}: {e}"))?;
            let w = out.witness().ok_or_else(|| format!("{f} trial {t}: no witness for {}", form.fingerprint()))?;
            let report = verify_witness(&form, w);
            let measured = common::value_valuation(f, form.coeffs(), &w.assignment, d, B);
            ensure(report.passed && w.precision >= 20 && measured >= w.precision, || {
                format!("{f} trial {t}: claimed {} measured {measured}", w.precision)
            })?;
            min_precision = min_precision.min(measured);
        }
    }
    Ok(format!("{} of {} solved, min precision {min_precision}", trials * 6, trials * 6))
}

fn lower_bounds() -> Outcome {
    let mut nodes = Vec::new();
    for f in j0_fields() {
        let form = extremal_f(f, deg(6), B).unwrap();
        match exhaustive_no_primitive_zero(&form, 6, ExhaustiveOptions::default()).map_err(|e| e.to_string())? {
            ExhaustiveOutcome::Certified(c) => {
                ensure(c.method == CertMethod::ExhaustiveMod(6), || format!("{f}: {}", c.method))?;
                nodes.push(c.stats.map_or(0, |s| s.nodes));
            }
            other => return Err(format!("f over {f}: {other:?}")),
        }
    }
    for f in j1_fields() {
        for d in [6, 10] {
            let g = extremal_g(f, deg(d), B).unwrap();
            ensure(g.len() as u32 == f.gamma_star(d) - 1, || format!("g over {f} has {} variables", g.len()))?;
            ensure(distinct_level_certificate(&g).is_some(), || format!("g over {f} d={d}: levels repeat"))?;
        }
        let g = extremal_g(f, deg(6), B).unwrap();
        let out = exhaustive_no_primitive_zero(&g, 6, ExhaustiveOptions::default()).map_err(|e| e.to_string())?;
        ensure(matches!(out, ExhaustiveOutcome::Certified(_)), || format!("g over {f}: {out:?}"))?;
    }
    Ok(format!("f certified mod pi^6 with {nodes:?} nodes, g certified both ways"))
}

fn normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    for t in 0..1000 {
        let f = FieldId::ALL[t % 6];
        let d = if t % 2 == 0 { 6 } else { 10 };
        let s = rng.gen_range(1..=2 * d as usize);
        let form = random_form(f, deg(d), s, rng.gen(), &LevelDistribution::Uniform, B).unwrap();
        let (norm, _) = normalize(&form).unwrap();
        // prefix inequalities recomputed from raw coefficient valuations
        let mut counts = vec![0usize; d as usize];
        for c in norm.coeffs() {
            counts[(c.valuation().finite().unwrap() % d) as usize] += 1;
        }
        let mut prefix = 0;
        for (k, c) in counts.iter().enumerate() {
            prefix += c;
            ensure((k + 1) * s <= d as usize * prefix, || format!("{f} d={d}: {counts:?} fails at level {k}"))?;
        }
        ensure(profile(&norm).satisfies_prefix_inequalities(), || format!("{counts:?}"))?;
        let (again, t2) = normalize(&norm).unwrap();
        ensure(t2 == 0 && again == norm, || format!("{f} d={d}: not idempotent, rotation {t2}"))?;
    }
    Ok("1000 forms".into())
}

fn pi_pair(f: FieldId) -> Pair {
    match f.family() {
        Family::RamifiedJ0 => Pair(0, 1),
        Family::RamifiedJ1 => Pair(1, 1),
    }
}

/// Brute force over `x mod pi^3`, which fixes `x^6 mod pi^4`.
fn brute_primitive_zero(form: &AdditiveForm) -> bool {
    let f = form.field();
    let dd = f.radicand();
    let pi = pi_pair(f);
    let reps: Vec<Pair> = (0..8u32)
        .map(|c| {
            let mut x = Pair(0, 0);
            let mut p = Pair(1, 0);
            for bit in 0..3 {
                if c >> bit & 1 == 1 {
                    x = x.add(p);
                }
                p = p.mul(pi, dd);
            }
            x
        })
        .collect();
    let coeffs: Vec<Pair> = form.coeffs().iter().map(common::pair_of).collect();
    let s = coeffs.len();
    (0..8usize.pow(s as u32)).any(|mut code| {
        let mut sum = Pair(0, 0);
        let mut unit = false;
        for a in &coeffs {
            let x = reps[code % 8];
            code /= 8;
            unit |= common::is_unit(f, x);
            sum = sum.add(a.mul(x.pow(form.d(), dd), dd));
        }
        unit && common::valuation(f, sum, B) >= 4
    })
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let (mut witnesses, mut certified) = (0, 0);
    for t in 0..200 {
        let f = FieldId::ALL[t % 6];
        let s = rng.gen_range(1..=4);
        let form = random_form(f, deg(6), s, rng.gen(), &LevelDistribution::Uniform, B).unwrap();
        let brute = brute_primitive_zero(&form);
        let exhaustive = exhaustive_no_primitive_zero(&form, 4, ExhaustiveOptions::default()).unwrap();
        let cert = matches!(exhaustive, ExhaustiveOutcome::Certified(_));
        ensure(cert != brute, || format!("{}: brute force {brute}, exhaustive {exhaustive:?}", form.fingerprint()))?;
        if let SolveOutcome::Found(w) = find_zero(&form, SolveOptions::default()).map_err(|e| e.to_string())? {
            witnesses += 1;
            // rescale to a primitive vector before reducing mod pi^4
            let v = w.assignment.iter().filter_map(|x| x.valuation().finite()).min().unwrap();
            let x: Vec<RingElement> = w.assignment.iter().map(|x| x.div_pi_pow(v).unwrap()).collect();
            let unit = x.iter().any(|xi| common::is_unit(f, common::pair_of(xi)));
            let val = common::value_valuation(f, form.coeffs(), &x, 6, B);
            ensure(unit && val >= 4 && !cert, || {
                format!("{}: witness {:?} vs certificate {cert}", form.fingerprint(), w.assignment)
            })?;
        }
        certified += cert as usize;
    }
    Ok(format!("200 forms, {witnesses} witnesses, {certified} certified"))
}

fn hensel_instances() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut iterations = 0;
    for t in 0..100 {
        let f = FieldId::ALL[t % 6];
        let d = if t % 2 == 0 { 6 } else { 10 };
        let k = rng.gen_range(5..12);
        // r sums s - 1 terms congruent to units mod pi, so s - 1 is odd
        let s = 2 * rng.gen_range(1..4);
        // choose the others until their sum r is a unit, so a_1 is one too
        let (mut coeffs, x, r) = loop {
            let coeffs: Vec<RingElement> = (0..s).map(|_| random_unit(&mut rng, f, B).unwrap()).collect();
            let x: Vec<RingElement> = (0..s).map(|_| random_unit(&mut rng, f, B).unwrap()).collect();
            let r = (1..s).fold(RingElement::zero(f, B).unwrap(), |acc, i| acc + coeffs[i] * x[i].pow(d as u64));
            if r.is_unit() {
                break (coeffs, x, r);
            }
        };
        let u = random_unit(&mut rng, f, B).unwrap();
        let x1d = x[0].pow(d as u64);
        coeffs[0] = RingElement::zero(f, B).unwrap() - r.exact_div(&x1d).unwrap() + RingElement::pi_pow(f, k, B).unwrap() * u;
        let form = AdditiveForm::new(f, deg(d), B, coeffs).unwrap();
        let start = common::value_valuation(f, form.coeffs(), &x, d, B);
        ensure(start == k, || format!("instance {t}: start valuation {start}, wanted {k}"))?;
        // the oracle reads valuations from the norm mod 2^B, so it caps at B
        let target = 40;
        let w = hensel_lift(&form, &x, 0, target).map_err(|e| format!("instance {t}: {e}"))?;
        let surplus: Vec<i64> = w.lift_log.iter().map(|s| s.surplus.unwrap_or(i64::MAX)).collect();
        ensure(surplus.windows(2).all(|p| p[0] < p[1]), || format!("instance {t}: surplus {surplus:?}"))?;
        let measured = common::value_valuation(f, form.coeffs(), &w.assignment, d, B);
        ensure(verify_witness(&form, &w).passed && measured >= target, || {
            format!("instance {t}: measured {measured}")
        })?;
        iterations += w.lift_log.len() - 1;
    }
    Ok(format!("100 instances, {iterations} Newton steps"))
}

fn endgame_family() -> Outcome {
    let mut solved = 0;
    for f in j0_fields() {
        let pi = RingElement::pi(f, B).unwrap();
        let one = RingElement::one(f, B).unwrap();
        for d in [6, 10] {
            for pattern in ["alternating", "constant 0", "constant 1"] {
                let mut coeffs = Vec::new();
                for (n, level) in (0..d).step_by(2).enumerate() {
                    let class = match pattern {
                        "alternating" => n % 2,
                        "constant 0" => 0,
                        _ => 1,
                    };
                    let unit = if class == 0 { one } else { one + pi };
                    let c = RingElement::pi_pow(f, level, B).unwrap() * unit;
                    coeffs.extend([c, c, c]);
                }
                let form = AdditiveForm::new(f, deg(d), B, coeffs).unwrap();
                let out = find_zero(&form, SolveOptions::default()).map_err(|e| e.to_string())?;
                let w = out.witness().ok_or_else(|| format!("{f} d={d} {pattern}: not solved"))?;
                ensure(verify_witness(&form, w).passed, || format!("{f} d={d} {pattern}: witness rejected"))?;
                solved += 1;
            }
        }
    }
    Ok(format!("{solved} forms solved"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("power classification mod pi^4", power_classification),
        ("2 mod pi^4 per field", two_mod_pi4),
        ("contraction audits", contraction_audits),
        ("upper bounds at d=6, 500 trials per field", || upper_bounds(6, 500)),
        ("upper bounds at d=10, 100 trials per field", || upper_bounds(10, 100)),
        ("lower bounds for f and g", lower_bounds),
        ("normalization", normalization),
        ("solver vs exhaustive vs brute force", oracle_equivalence),
        ("Hensel lifting", hensel_instances),
        ("endgame family", endgame_family),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({detail}) [{secs:.2}s]", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{secs:.2}s]", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
