use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field_ring::{FieldId, RingElement};

use super::model::{AdditiveForm, Degree};
use super::FormError;

/// How levels are drawn for random coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum LevelDistribution {
    /// Uniform over `0..d`.
    #[default]
    Uniform,
    /// Relative weight per level; missing levels get weight 0.
    Weighted(Vec<u32>),
}

/// A uniformly random unit modulo `2^bits`.
pub fn random_unit<R: Rng>(rng: &mut R, field: FieldId, bits: u32) -> Result<RingElement, FormError> {
    let a: u64 = rng.gen();
    let b: u64 = rng.gen();
    let x = RingElement::new(field, a as i128, b as i128, bits)?;
    if x.is_unit() {
        Ok(x)
    } else {
        // flipping the low bit of `a` maps nonunits onto units bijectively
        Ok(RingElement::new(field, (a ^ 1) as i128, b as i128, bits)?)
    }
}

pub fn random_form(
    field: FieldId,
    degree: Degree,
    s: usize,
    seed: u64,
    levels: &LevelDistribution,
    bits: u32,
) -> Result<AdditiveForm, FormError> {
    let d = degree.get();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<u32> = match levels {
        LevelDistribution::Uniform => vec![1; d as usize],
        LevelDistribution::Weighted(w) => (0..d as usize).map(|i| w.get(i).copied().unwrap_or(0)).collect(),
    };
    let total: u32 = weights.iter().sum();
    if total == 0 {
        return Err(FormError::Invalid("level distribution has no weight".into()));
    }
    let mut coeffs = Vec::with_capacity(s);
    for _ in 0..s {
        let mut pick = rng.gen_range(0..total);
        let level = weights
            .iter()
            .position(|&w| {
                if pick < w {
                    true
                } else {
                    pick -= w;
                    false
                }
            })
            .unwrap_or(0) as u32;
        let unit = random_unit(&mut rng, field, bits)?;
        coeffs.push(unit * RingElement::pi_pow(field, level, bits)?);
    }
    AdditiveForm::new(field, degree, bits, coeffs)
}
