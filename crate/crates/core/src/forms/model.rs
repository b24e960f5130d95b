use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::field_ring::{check_degree, FieldId, RingElement, Valuation};

use super::FormError;

/// A validated degree `d = 2m` with `m` odd and `m >= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Degree(u32);

impl Degree {
    pub fn new(d: u32) -> Result<Self, FormError> {
        check_degree(d).map_err(|_| FormError::InvalidDegree(d))?;
        Ok(Degree(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Degree {
    type Error = FormError;
    fn try_from(d: u32) -> Result<Self, FormError> {
        Degree::new(d)
    }
}

impl From<Degree> for u32 {
    fn from(d: Degree) -> u32 {
        d.0
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `a_1 x_1^d + ... + a_s x_s^d` with nonzero coefficients in the ring of
/// integers, all at one coordinate precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdditiveForm {
    field: FieldId,
    degree: Degree,
    bits: u32,
    coeffs: Vec<RingElement>,
}

impl AdditiveForm {
    pub fn new(
        field: FieldId,
        degree: Degree,
        bits: u32,
        coeffs: Vec<RingElement>,
    ) -> Result<Self, FormError> {
        RingElement::zero(field, bits)?;
        for (i, c) in coeffs.iter().enumerate() {
            if c.field() != field || c.bits() != bits {
                return Err(FormError::IncompatibleCoefficient { index: i });
            }
            if c.is_zero() {
                return Err(FormError::ZeroCoefficient { index: i });
            }
        }
        Ok(AdditiveForm {
            field,
            degree,
            bits,
            coeffs,
        })
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn d(&self) -> u32 {
        self.degree.0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn coeffs(&self) -> &[RingElement] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Level (valuation mod `d`) and pi-coefficient of variable `i` (0-based).
    pub fn level_and_class(&self, i: usize) -> (u32, u8) {
        let c = &self.coeffs[i];
        let v = c
            .valuation()
            .finite()
            .expect("form coefficients are nonzero to working precision");
        (v % self.d(), c.pi_coefficient().unwrap_or(0))
    }

    /// Form value at `x`.
    pub fn evaluate(&self, x: &[RingElement]) -> Result<RingElement, FormError> {
        if x.len() != self.len() {
            return Err(FormError::ArityMismatch {
                expected: self.len(),
                got: x.len(),
            });
        }
        let mut acc = RingElement::zero(self.field, self.bits)?;
        for (a, xi) in self.coeffs.iter().zip(x) {
            acc = acc.checked_add(&a.checked_mul(&xi.pow(self.d() as u64))?)?;
        }
        Ok(acc)
    }

    pub fn evaluation_valuation(&self, x: &[RingElement]) -> Result<Valuation, FormError> {
        Ok(self.evaluate(x)?.valuation())
    }

    /// The form multiplied by `pi^t`.
    pub fn scale_by_pi_pow(&self, t: u32) -> Result<Self, FormError> {
        let p = RingElement::pi_pow(self.field, t, self.bits)?;
        Self::new(
            self.field,
            self.degree,
            self.bits,
            self.coeffs.iter().map(|c| *c * p).collect(),
        )
    }

    /// Same integer coordinates read at another precision.
    pub fn with_bits(&self, bits: u32) -> Result<Self, FormError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.with_bits(bits))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.field, self.degree, bits, coeffs)
    }

    /// Short SHA-256 fingerprint of the canonical serialization.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(super::format::serialize_form(self).as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
