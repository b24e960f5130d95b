use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::field_ring::{check_degree, FieldId, RingElement, DEFAULT_BITS};

use super::CertifierError;

/// A residue modulo `pi^k` as its canonical digits `c_0 .. c_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Residue(pub Vec<u8>);

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(i, _)| match i {
                0 => "1".to_string(),
                1 => "pi".to_string(),
                _ => format!("pi^{i}"),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join("+"))
        }
    }
}

impl Residue {
    pub fn parse(text: &str, k: usize) -> Option<Residue> {
        let mut digits = vec![0u8; k];
        let text = text.trim();
        if text == "0" {
            return Some(Residue(digits));
        }
        for term in text.split('+') {
            let i = match term.trim() {
                "1" => 0,
                "pi" => 1,
                t => t.strip_prefix("pi^")?.parse::<usize>().ok()?,
            };
            if i >= k || digits[i] == 1 {
                return None;
            }
            digits[i] = 1;
        }
        Some(Residue(digits))
    }
}

/// The set `{x^d mod pi^k}` over every residue `x` modulo `pi^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerResidues {
    pub field: FieldId,
    pub degree: u32,
    pub k: u32,
    pub residues: BTreeSet<Residue>,
}

impl PowerResidues {
    pub fn display_set(&self) -> Vec<String> {
        self.residues.iter().map(Residue::to_string).collect()
    }
}

impl fmt::Display for PowerResidues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} d={} mod pi^{}: {{{}}}",
            self.field,
            self.degree,
            self.k,
            self.display_set().join(", ")
        )
    }
}

/// Enumerate all `2^k` residues modulo `pi^k` and collect their `d`-th powers.
pub fn classify_power_residues(field: FieldId, d: u32, k: u32) -> Result<PowerResidues, CertifierError> {
    check_degree(d)?;
    if !(1..=8).contains(&k) {
        return Err(CertifierError::InvalidArgument(format!("k = {k} outside 1..=8")));
    }
    let mut residues = BTreeSet::new();
    for bits in 0..1u32 << k {
        let digits: Vec<u8> = (0..k).map(|i| ((bits >> i) & 1) as u8).collect();
        let x = RingElement::from_digits(field, &digits, DEFAULT_BITS)?;
        let power = x.pow(d as u64).digit_expand(k)?;
        residues.insert(Residue(power.digits().to_vec()));
    }
    Ok(PowerResidues {
        field,
        degree: d,
        k,
        residues,
    })
}
