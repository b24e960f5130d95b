//! The five contraction types as explicit changes of variables, plus the
//! bookkeeping to pull zeros of contracted forms back to the original form.

mod step;
mod tree;

pub use step::{plan_d, plan_s2, plan_s3, plan_st, plan_t, ContractionKind, ContractionStep};
pub use tree::{MergeNode, Origin, SubstitutionTree};

use std::sync::Arc;

use thiserror::Error;

use crate::field_ring::{Family, FieldId, RingElement, RingError};
use crate::forms::{AdditiveForm, FormError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractionError {
    /// The variables offered do not satisfy the contraction's hypothesis.
    #[error("tactic error: {0}")]
    Precondition(String),
    #[error("tactic error: {field} is not a {required} field")]
    WrongFamily { field: FieldId, required: Family },
    #[error("interface error: {0}")]
    Interface(String),
    #[error("precision error: {0}; rerun with a larger precision")]
    Precision(String),
    /// A contraction failed to deliver its guaranteed gain. Never expected.
    #[error("contraction guarantee violated: {0}")]
    Violation(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// The form obtained by performing `step` on `form`.
pub fn apply_step(form: &AdditiveForm, step: &ContractionStep) -> Result<AdditiveForm, ContractionError> {
    let (i, j) = step.merged;
    if i >= form.len() || j >= form.len() {
        return Err(ContractionError::Interface(format!("step indices ({i}, {j}) do not fit the form")));
    }
    if step.new_coefficient.is_zero() {
        return Err(ContractionError::Precision(format!(
            "contracted coefficient vanishes to {} pi-digits",
            step.new_coefficient.guaranteed_digits()
        )));
    }
    let mut coeffs: Vec<RingElement> = form
        .coeffs()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i && k != j)
        .map(|(_, c)| *c)
        .collect();
    coeffs.push(step.new_coefficient);
    Ok(AdditiveForm::new(form.field(), form.degree(), form.bits(), coeffs)?)
}

fn run(
    form: &AdditiveForm,
    plan: impl FnOnce(&[RingElement], u32) -> Result<ContractionStep, ContractionError>,
) -> Result<(AdditiveForm, ContractionStep), ContractionError> {
    let step = plan(form.coeffs(), form.d())?;
    Ok((apply_step(form, &step)?, step))
}

pub fn d_contract(
    form: &AdditiveForm,
    i: usize,
    j: usize,
    want_pi_coeff: u8,
) -> Result<(AdditiveForm, ContractionStep), ContractionError> {
    run(form, |c, d| plan_d(c, d, (i, j), want_pi_coeff))
}

pub fn s2_contract(form: &AdditiveForm, i: usize, j: usize) -> Result<(AdditiveForm, ContractionStep), ContractionError> {
    run(form, |c, d| plan_s2(c, d, (i, j)))
}

pub fn s3_contract(form: &AdditiveForm, i: usize, j: usize) -> Result<(AdditiveForm, ContractionStep), ContractionError> {
    run(form, |c, d| plan_s3(c, d, (i, j)))
}

pub fn t_contract(form: &AdditiveForm, candidates: &[usize]) -> Result<(AdditiveForm, ContractionStep), ContractionError> {
    run(form, |c, d| plan_t(c, d, candidates))
}

pub fn st_contract(form: &AdditiveForm, candidates: &[usize]) -> Result<(AdditiveForm, ContractionStep), ContractionError> {
    run(form, |c, d| plan_st(c, d, candidates))
}

/// A derived form together with the way back to its root.
#[derive(Clone, Debug)]
pub struct TrackedForm {
    root: Arc<AdditiveForm>,
    form: AdditiveForm,
    tree: SubstitutionTree,
}

impl TrackedForm {
    pub fn new(root: AdditiveForm) -> Self {
        let tree = SubstitutionTree::identity(root.len());
        TrackedForm {
            form: root.clone(),
            root: Arc::new(root),
            tree,
        }
    }

    pub fn root(&self) -> &AdditiveForm {
        &self.root
    }

    pub fn form(&self) -> &AdditiveForm {
        &self.form
    }

    pub fn tree(&self) -> &SubstitutionTree {
        &self.tree
    }

    pub fn contract(&self, step: &ContractionStep) -> Result<Self, ContractionError> {
        Ok(TrackedForm {
            root: Arc::clone(&self.root),
            form: apply_step(&self.form, step)?,
            tree: self.tree.apply(step)?,
        })
    }

    pub fn pullback(&self, assignment: &[RingElement]) -> Result<Vec<RingElement>, ContractionError> {
        self.tree.pullback(assignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_ring::{Valuation, DEFAULT_BITS};
    use crate::forms::Degree;

    const B: u32 = DEFAULT_BITS;

    fn form(field: FieldId, d: u32, coeffs: &[RingElement]) -> AdditiveForm {
        AdditiveForm::new(field, Degree::new(d).unwrap(), B, coeffs.to_vec()).unwrap()
    }

    fn one(f: FieldId) -> RingElement {
        RingElement::one(f, B).unwrap()
    }

    fn pi(f: FieldId) -> RingElement {
        RingElement::pi(f, B).unwrap()
    }

    #[test]
    fn d_contraction_targets() {
        let f = FieldId::Sqrt2;
        let fm = form(f, 6, &[one(f), one(f) + pi(f)]);
        for want in 0..2u8 {
            let (g, step) = d_contract(&fm, 0, 1, want).unwrap();
            assert_eq!(step.level_gain, Valuation::Finite(1));
            assert_eq!(g.level_and_class(0), (1, want));
            let digits = step.new_coefficient.digit_expand(3).unwrap();
            assert_eq!(digits.digits(), &[0, 1, want]);
        }
        let same = form(f, 6, &[one(f), one(f)]);
        assert!(matches!(d_contract(&same, 0, 1, 0), Err(ContractionError::Precondition(_))));
    }

    #[test]
    fn s2_and_s3_on_ones() {
        let f = FieldId::Sqrt2;
        let fm = form(f, 6, &[one(f), one(f)]);
        let (_, s2) = s2_contract(&fm, 0, 1).unwrap();
        assert_eq!(s2.c, 0);
        assert_eq!(s2.new_coefficient, RingElement::from_int(f, 2, B).unwrap());
        assert_eq!(s2.level_gain, Valuation::Finite(2));

        // 1 + (1 + pi)^6 = pi^3 (mod pi^4)
        let expected = one(f) + (one(f) + pi(f)).pow_d(6).unwrap();
        assert_eq!(expected.digit_expand(4).unwrap().digits(), &[0, 0, 0, 1]);
        let (_, s3) = s3_contract(&fm, 0, 1).unwrap();
        assert_eq!(s3.c, 1);
        assert_eq!(s3.new_coefficient, expected);
        assert!(s3.level_gain.at_least(3));

        let mixed = form(f, 6, &[one(f), one(f) + pi(f)]);
        assert!(s2_contract(&mixed, 0, 1).is_err());
        assert!(s3_contract(&mixed, 0, 1).is_err());
    }

    #[test]
    fn t_contraction_on_ones() {
        let f = FieldId::SqrtMinus1;
        let fm = form(f, 6, &[one(f), one(f), one(f)]);
        let (g, step) = t_contract(&fm, &[0, 1, 2]).unwrap();
        assert!(step.level_gain.at_least(4));
        assert_eq!(step.new_coefficient.digit_expand(4).unwrap().digits(), &[0, 0, 0, 0]);
        assert_eq!(g.len(), 2);

        let f2 = FieldId::Sqrt2;
        let wrong = form(f2, 6, &[one(f2), one(f2), one(f2)]);
        assert!(matches!(t_contract(&wrong, &[0, 1, 2]), Err(ContractionError::WrongFamily { .. })));
        let mixed = form(f, 6, &[one(f), one(f) + pi(f), one(f)]);
        assert!(matches!(t_contract(&mixed, &[0, 1, 2]), Err(ContractionError::Precondition(_))));
    }

    #[test]
    fn st_contraction_on_ones() {
        let f = FieldId::Sqrt2;
        let fm = form(f, 6, &[one(f), one(f), one(f)]);
        let (_, step) = st_contract(&fm, &[0, 1, 2]).unwrap();
        assert_eq!(step.level_gain, Valuation::Finite(2));
        assert_eq!(step.new_coefficient.digit_expand(4).unwrap().digits(), &[0, 0, 1, 0]);

        let j1 = FieldId::SqrtMinus1;
        let wrong = form(j1, 6, &[one(j1), one(j1), one(j1)]);
        assert!(matches!(st_contract(&wrong, &[0, 1, 2]), Err(ContractionError::WrongFamily { .. })));
        assert!(matches!(st_contract(&fm, &[0, 1]), Err(ContractionError::Interface(_))));
    }

    #[test]
    fn aligned_levels_modulo_d() {
        // 1 and pi^6 share level 0 for d = 6
        let f = FieldId::SqrtMinus5;
        let fm = form(f, 6, &[RingElement::pi_pow(f, 6, B).unwrap(), one(f)]);
        let (_, step) = s2_contract(&fm, 0, 1).unwrap();
        let recomputed = fm.coeffs()[0] * step.b1.pow(6) + fm.coeffs()[1] * step.b2.pow(6);
        assert_eq!(recomputed, step.new_coefficient);
        assert_eq!(step.new_coefficient.valuation(), Valuation::Finite(8));
    }

    #[test]
    fn pullback_identity_and_single_step() {
        let f = FieldId::Sqrt10;
        let fm = form(f, 6, &[one(f), one(f) + pi(f), pi(f)]);
        let tracked = TrackedForm::new(fm.clone());
        let w = vec![one(f), pi(f), one(f)];
        assert_eq!(tracked.pullback(&w).unwrap(), w);

        let (_, step) = d_contract(&fm, 0, 1, 1).unwrap();
        let next = tracked.contract(&step).unwrap();
        let zero = RingElement::zero(f, B).unwrap();
        let x = next.pullback(&[zero, one(f)]).unwrap();
        assert_eq!(x, vec![step.b1, step.b2, zero]);
        assert_eq!(fm.evaluate(&x).unwrap(), step.new_coefficient);
        assert!(next.pullback(&[one(f)]).is_err());
    }

    #[test]
    fn chained_pullback_vanishes() {
        // 1 + 1 at level 0 -> pi^2 class c; combine with a level-2 partner.
        let f = FieldId::Sqrt2;
        let root = form(f, 6, &[one(f), one(f), -RingElement::from_int(f, 2, B).unwrap()]);
        let t0 = TrackedForm::new(root.clone());
        let (_, s) = s2_contract(t0.form(), 0, 1).unwrap();
        let t1 = t0.contract(&s).unwrap();
        // the new variable is 2 and the remaining one is -2: exact zero
        let step = plan_s3(t1.form().coeffs(), 6, (0, 1)).unwrap();
        assert!(step.level_gain.is_infinite());
        assert!(step.hensel_ready());
        let zero_form = apply_step(t1.form(), &step);
        assert!(matches!(zero_form, Err(ContractionError::Precision(_))));
        let tree = t1.tree().apply(&step).unwrap();
        let x = tree.pullback(&[one(f)]).unwrap();
        assert!(root.evaluate(&x).unwrap().valuation().at_least(6 + 4));
        assert_eq!(tree.trace(&[0]).len(), 2);
    }
}
