//! The extremal forms behind the lower bounds.

use crate::field_ring::{Family, FieldId, RingElement};

use super::model::{AdditiveForm, Degree};
use super::FormError;

/// `f = sum_i pi^(4i) [x^d + x^d + x^d + (pi^2 + pi^3)(x^d + x^d + x^d)] + pi y^d + pi^(d-2) z^d`
/// with `i` in `0 .. (d-2)/4`: a form in `3d/2 - 1` variables with no
/// primitive zero modulo `pi^d` over the J0 fields.
pub fn extremal_f(field: FieldId, degree: Degree, bits: u32) -> Result<AdditiveForm, FormError> {
    if field.family() != Family::RamifiedJ0 {
        return Err(FormError::Invalid(format!("f is defined for the J0 fields, not {field}")));
    }
    let d = degree.get();
    let pi = |k: u32| RingElement::pi_pow(field, k, bits);
    let mut coeffs = Vec::new();
    for i in 0..(d - 2) / 4 {
        let base = pi(4 * i)?;
        for _ in 0..3 {
            coeffs.push(base);
        }
        let twisted = base * (pi(2)? + pi(3)?);
        for _ in 0..3 {
            coeffs.push(twisted);
        }
    }
    coeffs.push(pi(1)?);
    coeffs.push(pi(d - 2)?);
    AdditiveForm::new(field, degree, bits, coeffs)
}

/// `g = sum_{i < d} pi^i x_i^d`: one variable per level.
pub fn extremal_g(field: FieldId, degree: Degree, bits: u32) -> Result<AdditiveForm, FormError> {
    let coeffs = (0..degree.get())
        .map(|i| RingElement::pi_pow(field, i, bits))
        .collect::<Result<Vec<_>, _>>()?;
    AdditiveForm::new(field, degree, bits, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_ring::DEFAULT_BITS;
    use crate::forms::profile;

    #[test]
    fn f_profile_by_hand() {
        // d = 6: 1,1,1 at level 0; pi^2 + pi^3 (level 2, pi-coefficient 1) three
        // times; pi at level 1; pi^4 at level 4.
        let f = extremal_f(FieldId::Sqrt2, Degree::new(6).unwrap(), DEFAULT_BITS).unwrap();
        assert_eq!(f.len(), 8);
        let p = profile(&f);
        assert_eq!(p.counts(), &[3, 1, 3, 0, 1, 0]);
        assert_eq!(p.classes()[2], [0, 3]);
        let f10 = extremal_f(FieldId::SqrtMinus10, Degree::new(10).unwrap(), DEFAULT_BITS).unwrap();
        assert_eq!(f10.len(), 14);
        assert_eq!(profile(&f10).counts(), &[3, 1, 3, 0, 3, 0, 3, 0, 1, 0]);
    }

    #[test]
    fn f_rejects_j1() {
        assert!(extremal_f(FieldId::SqrtMinus1, Degree::new(6).unwrap(), DEFAULT_BITS).is_err());
    }

    #[test]
    fn g_profile() {
        let g = extremal_g(FieldId::SqrtMinus1, Degree::new(6).unwrap(), DEFAULT_BITS).unwrap();
        let p = profile(&g);
        assert_eq!(p.counts(), &[1; 6]);
        assert!(p.classes().iter().all(|c| *c == [1, 0]));
    }
}
