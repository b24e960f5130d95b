use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::descriptor::{Family, FieldId};
use super::digits::DigitExpansion;
use super::RingError;

pub const MIN_BITS: u32 = 2;
pub const MAX_BITS: u32 = 64;
/// Default 2-adic coordinate width: 94 guaranteed pi-digits.
pub const DEFAULT_BITS: u32 = 48;

/// A pi-adic valuation, with `Infinite` standing for "zero to working precision".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// True when the valuation is at least `n`.
    pub fn at_least(self, n: u32) -> bool {
        match self {
            Valuation::Finite(v) => v >= n,
            Valuation::Infinite => true,
        }
    }
}

/// Serialized as the number, or the string `"inf"`.
impl serde::Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

pub(crate) fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn trailing_zeros_capped(x: u64, cap: u32) -> u32 {
    if x == 0 {
        cap
    } else {
        x.trailing_zeros().min(cap)
    }
}

/// Inverse of an odd number modulo 2^128.
fn inverse_odd_u128(u: u128) -> u128 {
    debug_assert!(u & 1 == 1);
    let mut x = u;
    for _ in 0..7 {
        x = x.wrapping_mul(2u128.wrapping_sub(u.wrapping_mul(x)));
    }
    x
}

/// Inverse of an odd number modulo 2^64.
fn inverse_odd_u64(u: u64) -> u64 {
    debug_assert!(u & 1 == 1);
    let mut x = u;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(u.wrapping_mul(x)));
    }
    x
}

/// Exact division by pi on 128-bit coordinate representatives.
///
/// The input must be divisible by pi. Each call pushes one bit of garbage in
/// at the top of the 128-bit words, which stays far above any digit read back
/// from elements of at most 64 bits.
pub(crate) fn div_pi_wide(field: FieldId, a: u128, b: u128) -> (u128, u128) {
    let d = field.radicand() as i128;
    match field.family() {
        Family::RamifiedJ0 => {
            // (a + b w) / w = b + (a / D) w, with D = 2u.
            let u = (d / 2) as u128;
            let half = ((a as i128) >> 1) as u128;
            (b, half.wrapping_mul(inverse_odd_u128(u)))
        }
        Family::RamifiedJ1 => {
            // (a + b w)(1 - w) / (1 - D), with 1 - D = 2u.
            let u = ((1 - d) / 2) as u128;
            let inv = inverse_odd_u128(u);
            let re = a.wrapping_sub(b.wrapping_mul(d as u128));
            let im = b.wrapping_sub(a);
            let re = (((re as i128) >> 1) as u128).wrapping_mul(inv);
            let im = (((im as i128) >> 1) as u128).wrapping_mul(inv);
            (re, im)
        }
    }
}

pub(crate) fn is_unit_coords(field: FieldId, a: u128, b: u128) -> bool {
    match field.family() {
        Family::RamifiedJ0 => a & 1 == 1,
        Family::RamifiedJ1 => (a ^ b) & 1 == 1,
    }
}

/// An element `a + b w` of the ring of integers, `w = sqrt(D)`, with both
/// coordinates reduced modulo `2^bits`.
///
/// The ring of integers is `Z2[w]` for all six fields, so the coordinates
/// describe the residue ring `O / pi^(2 bits)` exactly. Valuations and digits
/// are only reported up to `guaranteed_digits() = 2 bits - 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    field: FieldId,
    a: u64,
    b: u64,
    bits: u32,
}

impl RingElement {
    fn check_bits(bits: u32) -> Result<(), RingError> {
        if (MIN_BITS..=MAX_BITS).contains(&bits) {
            Ok(())
        } else {
            Err(RingError::InvalidPrecision(bits))
        }
    }

    fn raw(field: FieldId, a: u64, b: u64, bits: u32) -> Self {
        let m = mask(bits);
        RingElement {
            field,
            a: a & m,
            b: b & m,
            bits,
        }
    }

    /// Build `a + b w`, reducing both integers modulo `2^bits`.
    pub fn new(field: FieldId, a: i128, b: i128, bits: u32) -> Result<Self, RingError> {
        Self::check_bits(bits)?;
        Ok(Self::raw(field, a as u64, b as u64, bits))
    }

    pub fn from_int(field: FieldId, n: i64, bits: u32) -> Result<Self, RingError> {
        Self::new(field, n as i128, 0, bits)
    }

    pub fn zero(field: FieldId, bits: u32) -> Result<Self, RingError> {
        Self::from_int(field, 0, bits)
    }

    pub fn one(field: FieldId, bits: u32) -> Result<Self, RingError> {
        Self::from_int(field, 1, bits)
    }

    /// `w = sqrt(D)`.
    pub fn omega(field: FieldId, bits: u32) -> Result<Self, RingError> {
        Self::new(field, 0, 1, bits)
    }

    /// The uniformizer of `field`.
    pub fn pi(field: FieldId, bits: u32) -> Result<Self, RingError> {
        match field.family() {
            Family::RamifiedJ0 => Self::new(field, 0, 1, bits),
            Family::RamifiedJ1 => Self::new(field, 1, 1, bits),
        }
    }

    pub fn pi_pow(field: FieldId, k: u32, bits: u32) -> Result<Self, RingError> {
        Ok(Self::pi(field, bits)?.pow(k as u64))
    }

    /// `sum c_i pi^i` for a digit string.
    pub fn from_digits(field: FieldId, digits: &[u8], bits: u32) -> Result<Self, RingError> {
        let pi = Self::pi(field, bits)?;
        let mut acc = Self::zero(field, bits)?;
        let mut power = Self::one(field, bits)?;
        for &c in digits {
            if c > 1 {
                return Err(RingError::Syntax(format!("digit {c} is not 0 or 1")));
            }
            if c == 1 {
                acc = acc + power;
            }
            power = power * pi;
        }
        Ok(acc)
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The pi-precision every operation guarantees.
    pub fn guaranteed_digits(&self) -> u32 {
        2 * self.bits - 2
    }

    pub fn coords(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    /// The same integers `a + b w` read at another coordinate width.
    pub fn with_bits(&self, bits: u32) -> Result<Self, RingError> {
        Self::check_bits(bits)?;
        Ok(Self::raw(self.field, self.a, self.b, bits))
    }

    fn compatible(&self, other: &Self) -> Result<(), RingError> {
        if self.field != other.field {
            return Err(RingError::FieldMismatch(self.field, other.field));
        }
        if self.bits != other.bits {
            return Err(RingError::PrecisionMismatch(self.bits, other.bits));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.compatible(other)?;
        Ok(Self::raw(
            self.field,
            self.a.wrapping_add(other.a),
            self.b.wrapping_add(other.b),
            self.bits,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.compatible(other)?;
        Ok(Self::raw(
            self.field,
            self.a.wrapping_sub(other.a),
            self.b.wrapping_sub(other.b),
            self.bits,
        ))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        // Arithmetic modulo 2^64 is exact modulo 2^bits for bits <= 64.
        let d = self.field.radicand() as u64;
        let re = self
            .a
            .wrapping_mul(other.a)
            .wrapping_add(d.wrapping_mul(self.b.wrapping_mul(other.b)));
        let im = self
            .a
            .wrapping_mul(other.b)
            .wrapping_add(self.b.wrapping_mul(other.a));
        Self::raw(self.field, re, im, self.bits)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::raw(self.field, 1, 0, self.bits);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// `x^d` for a valid form degree `d = 2m`, `m` odd, `m >= 3`.
    pub fn pow_d(&self, d: u32) -> Result<Self, RingError> {
        super::check_degree(d)?;
        Ok(self.pow(d as u64))
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_infinite()
    }

    pub fn is_unit(&self) -> bool {
        is_unit_coords(self.field, self.a as u128, self.b as u128)
    }

    /// pi-adic valuation, `Infinite` once it reaches `guaranteed_digits()`.
    pub fn valuation(&self) -> Valuation {
        let cap = self.bits;
        let raw = match self.field.family() {
            // val(w) = 1, val(2) = 2.
            Family::RamifiedJ0 => {
                let va = 2 * trailing_zeros_capped(self.a, cap);
                let vb = 2 * trailing_zeros_capped(self.b, cap) + 1;
                va.min(vb)
            }
            // a + b w = (a - b) + b pi, and pi is the uniformizer.
            Family::RamifiedJ1 => {
                let diff = self.a.wrapping_sub(self.b) & mask(self.bits);
                let va = 2 * trailing_zeros_capped(diff, cap);
                let vb = 2 * trailing_zeros_capped(self.b, cap) + 1;
                va.min(vb)
            }
        };
        if raw >= self.guaranteed_digits() {
            Valuation::Infinite
        } else {
            Valuation::Finite(raw)
        }
    }

    /// Exact division by pi. The quotient is exact to one pi-digit fewer than
    /// the input.
    pub fn div_pi(&self) -> Result<Self, RingError> {
        self.div_pi_pow(1)
    }

    pub fn div_pi_pow(&self, k: u32) -> Result<Self, RingError> {
        if !self.valuation().at_least(k) {
            return Err(RingError::NotDivisible(k));
        }
        let (mut a, mut b) = (self.a as u128, self.b as u128);
        for _ in 0..k {
            (a, b) = div_pi_wide(self.field, a, b);
        }
        Ok(Self::raw(self.field, a as u64, b as u64, self.bits))
    }

    /// Inverse of a unit via `conj(x) / N(x)`, the norm being an odd integer.
    pub fn unit_inverse(&self) -> Result<Self, RingError> {
        if !self.is_unit() {
            return Err(RingError::NotUnit);
        }
        let d = self.field.radicand() as u64;
        let norm = self
            .a
            .wrapping_mul(self.a)
            .wrapping_sub(d.wrapping_mul(self.b.wrapping_mul(self.b)));
        let inv = inverse_odd_u64(norm);
        Ok(Self::raw(
            self.field,
            self.a.wrapping_mul(inv),
            self.b.wrapping_neg().wrapping_mul(inv),
            self.bits,
        ))
    }

    /// `self / other` when `val(self) >= val(other)` and `other` is nonzero.
    pub fn exact_div(&self, other: &Self) -> Result<Self, RingError> {
        self.compatible(other)?;
        let v = other.valuation().finite().ok_or(RingError::NotDivisible(u32::MAX))?;
        let unit = other.div_pi_pow(v)?;
        Ok(self.div_pi_pow(v)?.mul_unchecked(&unit.unit_inverse()?))
    }

    /// Canonical digits `c_0 .. c_{n-1}` in `{0, 1}`.
    pub fn digit_expand(&self, n: u32) -> Result<DigitExpansion, RingError> {
        if n > self.guaranteed_digits() {
            return Err(RingError::Precision {
                requested: n,
                available: self.guaranteed_digits(),
            });
        }
        let (mut a, mut b) = (self.a as u128, self.b as u128);
        let mut digits = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let c = is_unit_coords(self.field, a, b);
            digits.push(c as u8);
            if c {
                a = a.wrapping_sub(1);
            }
            (a, b) = div_pi_wide(self.field, a, b);
        }
        Ok(DigitExpansion::new(digits))
    }

    /// The unit part's `pi`-coefficient: digit `v + 1` where `v` is the valuation.
    pub fn pi_coefficient(&self) -> Option<u8> {
        let v = self.valuation().finite()?;
        let pv = Self::pi(self.field, self.bits).ok()?.pow(v as u64);
        let rest = *self - pv;
        Some(match rest.valuation() {
            Valuation::Finite(w) if w == v + 1 => 1,
            _ => 0,
        })
    }

    /// The `d:` digit syntax for the first `n` digits.
    pub fn to_digit_string(&self, n: u32) -> Result<String, RingError> {
        let exp = self.digit_expand(n)?;
        Ok(format!(
            "d:{}",
            exp.digits().iter().map(|d| char::from(b'0' + d)).collect::<String>()
        ))
    }

    /// Parse `a+b*w`, `a-b*w`, a bare integer, or `d:<digits>`.
    pub fn parse(field: FieldId, text: &str, bits: u32) -> Result<Self, RingError> {
        Self::check_bits(bits)?;
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(digits) = compact.strip_prefix("d:") {
            if digits.is_empty() {
                return Err(RingError::Syntax("empty digit string".into()));
            }
            let parsed = digits
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(RingError::Syntax(format!("bad digit `{other}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if parsed.len() as u32 > 2 * bits - 2 {
                return Err(RingError::Precision {
                    requested: parsed.len() as u32,
                    available: 2 * bits - 2,
                });
            }
            return Self::from_digits(field, &parsed, bits);
        }
        let (re, im) = match compact.strip_suffix("*w") {
            Some(head) => {
                // split at the last sign that is not the leading one
                let split = head
                    .char_indices()
                    .skip(1)
                    .filter(|&(_, c)| c == '+' || c == '-')
                    .map(|(i, _)| i)
                    .last()
                    .ok_or_else(|| RingError::Syntax(format!("cannot parse `{text}`")))?;
                let (re, im) = head.split_at(split);
                let im = im.strip_prefix('+').unwrap_or(im);
                (re, im)
            }
            None => (compact.as_str(), "0"),
        };
        let parse_int = |s: &str| -> Result<i128, RingError> {
            let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
                return Err(RingError::Syntax(format!("cannot parse integer `{s}` in `{text}`")));
            }
            s.parse::<i128>()
                .map_err(|_| RingError::Syntax(format!("integer `{s}` out of range")))
        };
        Self::new(field, parse_int(re)?, parse_int(im)?, bits)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*w", self.a, self.b)
    }
}

// Operator forms panic on mixed fields or precisions; use `checked_*` to
// get an error instead.
impl Add for RingElement {
    type Output = RingElement;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("ring elements must share field and precision")
    }
}

impl Sub for RingElement {
    type Output = RingElement;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("ring elements must share field and precision")
    }
}

impl Mul for RingElement {
    type Output = RingElement;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("ring elements must share field and precision")
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> Self {
        Self::raw(self.field, self.a.wrapping_neg(), self.b.wrapping_neg(), self.bits)
    }
}

/// All unit residues `1 + sum_{i>=1} c_i pi^i` modulo `pi^k`, `1 <= k <= 8`.
pub fn enumerate_units_mod(field: FieldId, k: u32, bits: u32) -> Result<Vec<RingElement>, RingError> {
    if !(1..=8).contains(&k) {
        return Err(RingError::Precision {
            requested: k,
            available: 8,
        });
    }
    (0..1u32 << (k - 1))
        .map(|tail| {
            let mut digits = vec![1u8];
            digits.extend((0..k - 1).map(|i| ((tail >> i) & 1) as u8));
            RingElement::from_digits(field, &digits, bits)
        })
        .collect()
}
