mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramiform::certifier::{exhaustive_no_primitive_zero, ExhaustiveOptions, ExhaustiveOutcome};
use ramiform::contraction::{d_contract, s2_contract, s3_contract, st_contract, t_contract, TrackedForm};
use ramiform::field_ring::{Family, FieldId, RingElement, Valuation, DEFAULT_BITS};
use ramiform::forms::{random_form, random_unit, AdditiveForm, Degree, LevelDistribution};
use ramiform::solver::{apply_tactic, find_zero, verify_witness, SolveOptions, SolveOutcome, Tactic};

const B: u32 = DEFAULT_BITS;

fn field() -> impl Strategy<Value = FieldId> {
    prop::sample::select(FieldId::ALL.to_vec())
}

fn degree() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![6u32, 10])
}

/// Form with `classes.len()` unit coefficients (times `pi^level`) whose
/// pi-digits are the given classes.
fn form_with_classes(field: FieldId, d: u32, level: u32, classes: &[u8], seed: u64) -> AdditiveForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = RingElement::pi(field, B).unwrap();
    let scale = RingElement::pi_pow(field, level, B).unwrap();
    let coeffs = classes
        .iter()
        .map(|&c| {
            let mut u = random_unit(&mut rng, field, B).unwrap();
            if u.pi_coefficient() != Some(c) {
                u = u + pi;
            }
            u * scale
        })
        .collect();
    AdditiveForm::new(field, Degree::new(d).unwrap(), B, coeffs).unwrap()
}

fn random_assignment(rng: &mut ChaCha8Rng, field: FieldId, n: usize) -> Vec<RingElement> {
    (0..n)
        .map(|_| RingElement::new(field, rng.gen_range(-1000..1000), rng.gen_range(-1000..1000), B).unwrap())
        .collect()
}

/// `G(y) = F(pullback(y))` for random `y`, checked on raw coordinates.
fn pullback_preserves_values(t: &TrackedForm, rng: &mut ChaCha8Rng) -> bool {
    let field = t.form().field();
    let d = t.form().d();
    (0..4).all(|_| {
        let y = random_assignment(rng, field, t.form().len());
        let x = t.pullback(&y).unwrap();
        let g = common::evaluate(field, t.form().coeffs(), &y, d).mask(B);
        let f = common::evaluate(field, t.root().coeffs(), &x, d).mask(B);
        f == g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn d_contraction_gains_one_with_chosen_class(f in field(), d in degree(), level in 0u32..12, want in 0u8..2, seed: u64) {
        let form = form_with_classes(f, d, level, &[0, 1], seed);
        let (next, step) = d_contract(&form, 0, 1, want).unwrap();
        prop_assert_eq!(step.level_gain, Valuation::Finite(1));
        let new = next.coeffs().last().unwrap();
        prop_assert_eq!(new.valuation(), Valuation::Finite(level + 1));
        prop_assert_eq!(new.pi_coefficient(), Some(want));
    }

    #[test]
    fn same_class_pairs_gain_two_or_three(f in field(), d in degree(), class in 0u8..2, seed: u64) {
        let form = form_with_classes(f, d, 0, &[class, class], seed);
        let (_, s2) = s2_contract(&form, 0, 1).unwrap();
        prop_assert_eq!(s2.level_gain, Valuation::Finite(2));
        let (_, s3) = s3_contract(&form, 0, 1).unwrap();
        prop_assert!(s3.level_gain.at_least(3));
    }

    #[test]
    fn triples_by_family(f in field(), d in degree(), class in 0u8..2, seed: u64) {
        let form = form_with_classes(f, d, 0, &[class, class, class], seed);
        match f.family() {
            Family::RamifiedJ1 => {
                let (_, t) = t_contract(&form, &[0, 1, 2]).unwrap();
                prop_assert!(t.level_gain.at_least(4));
                prop_assert!(st_contract(&form, &[0, 1, 2]).is_err());
            }
            Family::RamifiedJ0 => {
                let (next, st) = st_contract(&form, &[0, 1, 2]).unwrap();
                prop_assert_eq!(st.level_gain, Valuation::Finite(2));
                prop_assert_eq!(next.coeffs().last().unwrap().pi_coefficient(), Some(class));
                prop_assert!(t_contract(&form, &[0, 1, 2]).is_err());
            }
        }
    }

    #[test]
    fn contraction_chains_pull_back(f in field(), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = form_with_classes(f, 6, 0, &[0, 0, 1, 1, 0, 1], seed);
        let mut t = TrackedForm::new(form);
        // contract random same-level pairs until none is left
        for _ in 0..4 {
            let cur = t.form().clone();
            let pairs: Vec<(usize, usize)> = (0..cur.len())
                .flat_map(|i| (i + 1..cur.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| cur.level_and_class(i).0 == cur.level_and_class(j).0)
                .collect();
            if pairs.is_empty() {
                break;
            }
            let (i, j) = pairs[rng.gen_range(0..pairs.len())];
            let same = cur.level_and_class(i).1 == cur.level_and_class(j).1;
            let step = if same {
                s2_contract(&cur, i, j).unwrap().1
            } else {
                d_contract(&cur, i, j, rng.gen_range(0..2)).unwrap().1
            };
            t = t.contract(&step).unwrap();
            prop_assert!(pullback_preserves_values(&t, &mut rng));
        }
    }

    #[test]
    fn tactic_moves_are_sound(f in field(), d in degree(), seed: u64) {
        let s = f.gamma_star(d) as usize;
        let form = random_form(f, Degree::new(d).unwrap(), s, seed, &LevelDistribution::Uniform, B).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ac7);
        for tactic in Tactic::ALL {
            for mv in apply_tactic(&form, tactic).into_iter().take(3) {
                let mut t = TrackedForm::new(form.clone());
                for step in &mv.steps {
                    t = t.contract(step).unwrap();
                }
                if let Some(expected) = &mv.form {
                    prop_assert_eq!(t.form().coeffs(), expected.coeffs());
                }
                prop_assert!(pullback_preserves_values(&t, &mut rng));
                let gains: Vec<Valuation> = mv.steps.iter().map(|s| s.level_gain).collect();
                prop_assert!(gains.iter().all(|g| g.at_least(1)), "{tactic}: {gains:?}");
            }
        }
    }

    #[test]
    fn witnesses_verify_independently(f in field(), seed: u64) {
        let s = f.gamma_star(6) as usize;
        let form = random_form(f, Degree::new(6).unwrap(), s, seed, &LevelDistribution::Uniform, B).unwrap();
        let out = find_zero(&form, SolveOptions::default()).unwrap();
        let w = out.witness().expect("forms with Gamma* variables have zeros");
        prop_assert!(verify_witness(&form, w).passed);
        let v = common::value_valuation(f, form.coeffs(), &w.assignment, 6, B);
        prop_assert!(v >= w.precision, "measured {v} < claimed {}", w.precision);
        let unit = w.assignment.iter().any(|x| common::is_unit(f, common::pair_of(x)));
        prop_assert!(unit);
    }
}

#[test]
fn solver_and_certifier_never_disagree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut seen = [0usize; 2];
    for trial in 0..300u64 {
        let f = FieldId::ALL[trial as usize % 6];
        let s = rng.gen_range(2..=6);
        let form = random_form(f, Degree::new(6).unwrap(), s, trial, &LevelDistribution::Uniform, B).unwrap();
        let out = find_zero(&form, SolveOptions::default()).unwrap();
        let cert = exhaustive_no_primitive_zero(&form, 6, ExhaustiveOptions::default()).unwrap();
        match (&out, &cert) {
            (SolveOutcome::Found(w), ExhaustiveOutcome::Certified(_)) => {
                panic!("form {} has witness {:?} and a certificate", form.fingerprint(), w.assignment)
            }
            (SolveOutcome::Found(_), _) => seen[0] += 1,
            (_, ExhaustiveOutcome::Certified(_)) => seen[1] += 1,
            _ => {}
        }
    }
    // the sample exercises both sides
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn solver_output_is_deterministic() {
    let form = random_form(FieldId::SqrtMinus5, Degree::new(10).unwrap(), 11, 7, &LevelDistribution::Uniform, B).unwrap();
    let a = find_zero(&form, SolveOptions::default()).unwrap();
    let b = find_zero(&form, SolveOptions::default()).unwrap();
    assert_eq!(a.witness().unwrap().assignment, b.witness().unwrap().assignment);
}
