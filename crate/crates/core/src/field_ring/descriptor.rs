use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RingError;

/// The six ramified quadratic extensions of Q2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldId {
    Sqrt2,
    Sqrt10,
    SqrtMinus2,
    SqrtMinus10,
    SqrtMinus1,
    SqrtMinus5,
}

/// How the uniformizer is built from `w = sqrt(D)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UniformizerKind {
    /// `pi = w`
    SqrtD,
    /// `pi = 1 + w`
    OnePlusSqrtD,
}

/// Fields split by the representation of 2 modulo `pi^4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `2 = pi^2 (mod pi^4)`
    RamifiedJ0,
    /// `2 = pi^2 + pi^3 (mod pi^4)`
    RamifiedJ1,
}

impl Family {
    /// The digit `j` in `2 = pi^2 + j pi^3 (mod pi^4)`.
    pub fn j(self) -> u8 {
        match self {
            Family::RamifiedJ0 => 0,
            Family::RamifiedJ1 => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::RamifiedJ0 => "J0",
            Family::RamifiedJ1 => "J1",
        })
    }
}

/// One row of the field table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub id: FieldId,
    pub radicand: i64,
    pub uniformizer: UniformizerKind,
    pub two_mod_pi4: [u8; 4],
    pub family: Family,
}

impl FieldId {
    pub const ALL: [FieldId; 6] = [
        FieldId::Sqrt2,
        FieldId::Sqrt10,
        FieldId::SqrtMinus2,
        FieldId::SqrtMinus10,
        FieldId::SqrtMinus1,
        FieldId::SqrtMinus5,
    ];

    pub fn radicand(self) -> i64 {
        match self {
            FieldId::Sqrt2 => 2,
            FieldId::Sqrt10 => 10,
            FieldId::SqrtMinus2 => -2,
            FieldId::SqrtMinus10 => -10,
            FieldId::SqrtMinus1 => -1,
            FieldId::SqrtMinus5 => -5,
        }
    }

    pub fn family(self) -> Family {
        match self {
            FieldId::SqrtMinus1 | FieldId::SqrtMinus5 => Family::RamifiedJ1,
            _ => Family::RamifiedJ0,
        }
    }

    pub fn descriptor(self) -> FieldDescriptor {
        let family = self.family();
        let (uniformizer, two_mod_pi4) = match family {
            Family::RamifiedJ0 => (UniformizerKind::SqrtD, [0, 0, 1, 0]),
            Family::RamifiedJ1 => (UniformizerKind::OnePlusSqrtD, [0, 0, 1, 1]),
        };
        FieldDescriptor {
            id: self,
            radicand: self.radicand(),
            uniformizer,
            two_mod_pi4,
            family,
        }
    }

    /// Canonical textual identifier, e.g. `Q2(sqrt(-1))`.
    pub fn name(self) -> &'static str {
        match self {
            FieldId::Sqrt2 => "Q2(sqrt(2))",
            FieldId::Sqrt10 => "Q2(sqrt(10))",
            FieldId::SqrtMinus2 => "Q2(sqrt(-2))",
            FieldId::SqrtMinus10 => "Q2(sqrt(-10))",
            FieldId::SqrtMinus1 => "Q2(sqrt(-1))",
            FieldId::SqrtMinus5 => "Q2(sqrt(-5))",
        }
    }

    /// Minimal number of variables guaranteeing a nontrivial zero in degree `d`.
    pub fn gamma_star(self, d: u32) -> u32 {
        match self.family() {
            Family::RamifiedJ0 => 3 * d / 2,
            Family::RamifiedJ1 => d + 1,
        }
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FieldId {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '\u{2212}' { '-' } else { c })
            .collect::<String>()
            .replace('\u{221a}', "sqrt")
            .replace("\u{211a}", "Q")
            .replace("Q\u{2082}", "Q2");
        // Accept `Q2(sqrt(2))`, `Q2(sqrt2)` and bare `sqrt(2)`.
        let radicand = compact
            .strip_prefix("Q2(")
            .and_then(|rest| rest.strip_suffix(')'))
            .unwrap_or(&compact);
        let radicand = radicand.strip_prefix("sqrt").unwrap_or("");
        let radicand = radicand
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(radicand);
        let value: i64 = radicand
            .parse()
            .map_err(|_| RingError::UnknownField(s.to_string()))?;
        FieldId::ALL
            .into_iter()
            .find(|f| f.radicand() == value)
            .ok_or_else(|| RingError::UnknownField(s.to_string()))
    }
}

/// Look up a field by its textual identifier.
pub fn make_field(field_id: &str) -> Result<FieldDescriptor, RingError> {
    field_id.parse::<FieldId>().map(FieldId::descriptor)
}
