//! Anisotropy certificates for the extremal forms, the power-residue
//! classifier and exhaustive audits of the modular identities behind the
//! contractions.

mod audit;
mod exhaustive;
mod residues;

pub use audit::{audit_all, lemma_audit, AuditId, AuditReport};
pub use exhaustive::{exhaustive_no_primitive_zero, is_primitive_zero, projected_nodes, ExhaustiveOptions, ExhaustiveOutcome, SearchStats};
pub use residues::{classify_power_residues, PowerResidues, Residue};

use std::fmt;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::field_ring::{Family, FieldId, RingElement, RingError};
use crate::forms::{AdditiveForm, FormError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifierError {
    #[error("unknown audit `{0}`")]
    UnknownAudit(String),
    #[error("audit {audit} applies to {required} fields only, not {field}")]
    WrongFamily {
        audit: &'static str,
        field: FieldId,
        required: Family,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertMethod {
    /// Levels pairwise distinct mod `d`: the least term valuation is unique.
    DistinctLevels,
    /// Complete search found no primitive zero modulo `pi^N`.
    ExhaustiveMod(u32),
}

impl fmt::Display for CertMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertMethod::DistinctLevels => f.write_str("DISTINCT_LEVELS"),
            CertMethod::ExhaustiveMod(n) => write!(f, "EXHAUSTIVE_MOD({n})"),
        }
    }
}

/// Proof that a form has no nontrivial zero over the field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnisotropyCertificate {
    pub method: CertMethod,
    pub field: FieldId,
    pub degree: u32,
    pub variables: usize,
    pub form_hash: String,
    /// Present for the exhaustive method only.
    pub stats: Option<SearchStats>,
}

impl AnisotropyCertificate {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("ANISOTROPIC\n");
        out.push_str(&format!("method {}\n", self.method));
        if let CertMethod::ExhaustiveMod(n) = self.method {
            out.push_str(&format!("modulus pi^{n}\n"));
        }
        out.push_str(&format!("field {}\n", self.field));
        out.push_str(&format!("degree {}\n", self.degree));
        out.push_str(&format!("variables {}\n", self.variables));
        out.push_str(&format!("form {}\n", self.form_hash));
        if let Some(s) = &self.stats {
            out.push_str(&format!("nodes {}\npruned {}\nsubtrees {}\n", s.nodes, s.pruned, s.subtrees));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (method, modulus) = match self.method {
            CertMethod::DistinctLevels => ("DISTINCT_LEVELS", None),
            CertMethod::ExhaustiveMod(n) => ("EXHAUSTIVE_MOD", Some(n)),
        };
        json!({
            "verdict": "ANISOTROPIC",
            "method": method,
            "modulus": modulus,
            "field": self.field.name(),
            "degree": self.degree,
            "variables": self.variables,
            "form_hash": self.form_hash,
            "stats": self.stats,
        })
    }
}

/// Certificate when every level `val(a_i) mod d` occurs at most once.
///
/// For a nonzero assignment the term valuations `val(a_i) + d val(x_i)` of
/// the nonzero terms are then pairwise distinct, so the least is attained
/// once and the sum is nonzero. `None` when two levels coincide.
pub fn distinct_level_certificate(form: &AdditiveForm) -> Option<AnisotropyCertificate> {
    let d = form.d();
    let mut seen = vec![false; d as usize];
    for c in form.coeffs() {
        let level = c.valuation().finite()? % d;
        if std::mem::replace(&mut seen[level as usize], true) {
            return None;
        }
    }
    Some(AnisotropyCertificate {
        method: CertMethod::DistinctLevels,
        field: form.field(),
        degree: d,
        variables: form.len(),
        form_hash: form.fingerprint(),
        stats: None,
    })
}

pub fn counterexample_text(form: &AdditiveForm, n: u32, x: &[RingElement]) -> String {
    let mut out = format!("COUNTEREXAMPLE primitive zero modulo pi^{n}\nform {}\n", form.fingerprint());
    for (i, xi) in x.iter().enumerate() {
        let digits = xi.to_digit_string(n).unwrap_or_else(|_| xi.to_string());
        out.push_str(&format!("x{} = {}\n", i + 1, digits));
    }
    out
}

pub fn counterexample_json(form: &AdditiveForm, n: u32, x: &[RingElement]) -> serde_json::Value {
    json!({
        "verdict": "COUNTEREXAMPLE",
        "modulus": n,
        "field": form.field().name(),
        "degree": form.d(),
        "form_hash": form.fingerprint(),
        "assignment": x
            .iter()
            .map(|xi| xi.to_digit_string(n).unwrap_or_else(|_| xi.to_string()))
            .collect::<Vec<_>>(),
    })
}

pub fn indeterminate_text(stats: &SearchStats, budget: u64) -> String {
    format!(
        "INDETERMINATE budget of {budget} nodes exhausted\nnodes {}\npruned {}\n",
        stats.nodes, stats.pruned
    )
}

pub fn indeterminate_json(stats: &SearchStats, budget: u64) -> serde_json::Value {
    json!({ "verdict": "INDETERMINATE", "budget": budget, "stats": stats })
}
