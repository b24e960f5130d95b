use super::descriptor::FieldId;
use super::element::{RingElement, Valuation};
use super::RingError;

/// Canonical pi-adic digits `c_0, c_1, ...` with `c_i` in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitExpansion {
    digits: Vec<u8>,
    valuation: Valuation,
}

impl DigitExpansion {
    pub fn new(digits: Vec<u8>) -> Self {
        let valuation = digits
            .iter()
            .position(|&c| c == 1)
            .map_or(Valuation::Infinite, |i| Valuation::Finite(i as u32));
        DigitExpansion { digits, valuation }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Index of the first nonzero digit.
    pub fn valuation(&self) -> Valuation {
        self.valuation
    }

    pub fn reassemble(&self, field: FieldId, bits: u32) -> Result<RingElement, RingError> {
        RingElement::from_digits(field, &self.digits, bits)
    }
}
