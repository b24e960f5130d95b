//! Reference arithmetic written directly on coordinates `a + b w`, `w^2 = D`,
//! sharing nothing with the library's ring code.

#![allow(dead_code)]

use ramiform::field_ring::{Family, FieldId, RingElement};

/// Wrapping arithmetic modulo 2^128 on `(a, b)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair(pub u128, pub u128);

impl Pair {
    pub fn from_i128(a: i128, b: i128) -> Self {
        Pair(a as u128, b as u128)
    }

    pub fn add(self, o: Pair) -> Pair {
        Pair(self.0.wrapping_add(o.0), self.1.wrapping_add(o.1))
    }

    pub fn sub(self, o: Pair) -> Pair {
        Pair(self.0.wrapping_sub(o.0), self.1.wrapping_sub(o.1))
    }

    pub fn mul(self, o: Pair, d: i64) -> Pair {
        let dd = d as i128 as u128;
        Pair(
            self.0.wrapping_mul(o.0).wrapping_add(dd.wrapping_mul(self.1.wrapping_mul(o.1))),
            self.0.wrapping_mul(o.1).wrapping_add(self.1.wrapping_mul(o.0)),
        )
    }

    pub fn pow(self, e: u32, d: i64) -> Pair {
        (0..e).fold(Pair(1, 0), |acc, _| acc.mul(self, d))
    }

    pub fn mask(self, bits: u32) -> Pair {
        let m = if bits >= 128 { u128::MAX } else { (1u128 << bits) - 1 };
        Pair(self.0 & m, self.1 & m)
    }
}

fn inverse_odd(u: u128) -> u128 {
    // Newton: each step doubles the correct low bits
    let mut x = u;
    for _ in 0..7 {
        x = x.wrapping_mul(2u128.wrapping_sub(u.wrapping_mul(x)));
    }
    x
}

/// Is `a + b w` a unit: its norm `a^2 - D b^2` is odd.
pub fn is_unit(field: FieldId, p: Pair) -> bool {
    match field.family() {
        Family::RamifiedJ0 => p.0 & 1 == 1,
        Family::RamifiedJ1 => (p.0 ^ p.1) & 1 == 1,
    }
}

/// `(x - c) / pi` computed as `(x - c) conj(pi) / N(pi)`, the division by the
/// norm done as a halving followed by multiplication with an odd inverse.
fn shift(field: FieldId, p: Pair) -> Pair {
    let d = field.radicand();
    let (conj, norm) = match field.family() {
        Family::RamifiedJ0 => (Pair::from_i128(0, -1), -(d as i128)),
        Family::RamifiedJ1 => (Pair::from_i128(1, -1), 1 - d as i128),
    };
    let q = p.mul(conj, d);
    assert!(q.0 & 1 == 0 && q.1 & 1 == 0, "not divisible by pi");
    let odd = (norm / 2) as u128;
    let inv = inverse_odd(odd);
    // arithmetic shift keeps the sign of small negative representatives
    let half = |v: u128| ((v as i128) >> 1) as u128;
    Pair(half(q.0).wrapping_mul(inv), half(q.1).wrapping_mul(inv))
}

/// First `n` canonical digits of `a + b w`; exact while `n` stays well
/// below the bits carried (one bit is consumed per digit).
pub fn digits(field: FieldId, p: Pair, n: usize) -> Vec<u8> {
    let mut x = p;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let c = u8::from(is_unit(field, x));
        out.push(c);
        x = shift(field, x.sub(Pair(c as u128, 0)));
    }
    out
}

/// Valuation as `v_2` of the norm. Coordinates known modulo `2^bits` fix
/// the norm modulo `2^bits`, so the answer is exact below `bits` and capped there.
pub fn valuation(field: FieldId, p: Pair, bits: u32) -> u32 {
    let d = field.radicand() as i128 as u128;
    let norm = p.0.wrapping_mul(p.0).wrapping_sub(d.wrapping_mul(p.1.wrapping_mul(p.1)));
    let norm = Pair(norm, 0).mask(bits).0;
    if norm == 0 {
        bits
    } else {
        norm.trailing_zeros().min(bits)
    }
}

pub fn pair_of(x: &RingElement) -> Pair {
    let (a, b) = x.coords();
    // sign-extend from the element's bit width
    let bits = x.bits();
    let ext = |v: u64| -> u128 {
        let shift = 128 - bits;
        (((v as u128) << shift) as i128 >> shift) as u128
    };
    Pair(ext(a), ext(b))
}

/// `sum a_i x_i^d` on raw coordinates.
pub fn evaluate(field: FieldId, coeffs: &[RingElement], x: &[RingElement], d: u32) -> Pair {
    let dd = field.radicand();
    coeffs.iter().zip(x).fold(Pair(0, 0), |acc, (a, xi)| {
        acc.add(pair_of(a).mul(pair_of(xi).pow(d, dd), dd))
    })
}

/// Valuation of the form's value at `x`, exact below `bits`.
pub fn value_valuation(field: FieldId, coeffs: &[RingElement], x: &[RingElement], d: u32, bits: u32) -> u32 {
    valuation(field, evaluate(field, coeffs, x, d), bits)
}
