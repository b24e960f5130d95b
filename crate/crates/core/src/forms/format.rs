//! Text and JSON form files.
//!
//! ```text
//! # comment
//! field Q2(sqrt(-1))
//! degree 6
//! precision 48
//! coeff 1+0*w
//! coeff d:01
//! ```
//!
//! Statements may also be separated by `;`, and `coeffs a, b, ...` lists
//! several coefficients at once. Input starting with `{` is read as JSON with
//! the keys `field`, `degree`, `precision` (optional) and `coeffs`.

use serde::{Deserialize, Serialize};

use crate::field_ring::{FieldId, RingElement, DEFAULT_BITS};

use super::model::{AdditiveForm, Degree};
use super::FormError;

#[derive(Debug, Serialize, Deserialize)]
struct FormFile {
    field: String,
    degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision: Option<u32>,
    coeffs: Vec<String>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormError {
    FormError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_form(text: &str) -> Result<AdditiveForm, FormError> {
    parse_form_with_bits(text, None)
}

/// Parse, reading coefficients at `bits` if given, else at the declared
/// `precision`, else at the default.
pub fn parse_form_with_bits(text: &str, bits: Option<u32>) -> Result<AdditiveForm, FormError> {
    if text.trim_start().starts_with('{') {
        return parse_json(text, bits);
    }
    let mut field: Option<FieldId> = None;
    let mut degree: Option<Degree> = None;
    let mut declared_bits: Option<u32> = None;
    let mut raw_coeffs: Vec<(String, usize, usize)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = line.split('#').next().unwrap_or("");
        let mut offset = 0;
        for stmt in content.split(';') {
            let col = offset + stmt.len() - stmt.trim_start().len() + 1;
            offset += stmt.len() + 1;
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            let (keyword, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
            let rest = rest.trim();
            let arg_col = col + stmt.len() - rest.len();
            match keyword {
                "field" => {
                    let id = rest
                        .parse::<FieldId>()
                        .map_err(|e| syntax(line_no, arg_col, e.to_string()))?;
                    field = Some(id);
                }
                "degree" => {
                    let d: u32 = rest
                        .parse()
                        .map_err(|_| syntax(line_no, arg_col, format!("bad degree `{rest}`")))?;
                    degree = Some(Degree::new(d).map_err(|_| {
                        syntax(line_no, arg_col, format!("degree {d} is not 2m with m odd and m >= 3"))
                    })?);
                }
                "precision" => {
                    let b: u32 = rest
                        .parse()
                        .map_err(|_| syntax(line_no, arg_col, format!("bad precision `{rest}`")))?;
                    declared_bits = Some(b);
                }
                "coeff" => raw_coeffs.push((rest.to_string(), line_no, arg_col)),
                "coeffs" => {
                    let mut sub = 0;
                    for piece in rest.split(',') {
                        let c = arg_col + sub + piece.len() - piece.trim_start().len();
                        sub += piece.len() + 1;
                        raw_coeffs.push((piece.trim().to_string(), line_no, c));
                    }
                }
                other => return Err(syntax(line_no, col, format!("unknown statement `{other}`"))),
            }
        }
    }
    let field = field.ok_or_else(|| syntax(1, 1, "missing `field` statement"))?;
    let degree = degree.ok_or_else(|| syntax(1, 1, "missing `degree` statement"))?;
    let bits = bits.or(declared_bits).unwrap_or(DEFAULT_BITS);
    let mut coeffs = Vec::with_capacity(raw_coeffs.len());
    for (index, (text, line, column)) in raw_coeffs.into_iter().enumerate() {
        let c = RingElement::parse(field, &text, bits).map_err(|e| syntax(line, column, e.to_string()))?;
        if c.is_zero() {
            return Err(syntax(line, column, format!("coefficient {} is zero", index + 1)));
        }
        coeffs.push(c);
    }
    AdditiveForm::new(field, degree, bits, coeffs)
}

fn parse_json(text: &str, bits: Option<u32>) -> Result<AdditiveForm, FormError> {
    let file: FormFile = serde_json::from_str(text).map_err(|e| syntax(e.line(), e.column(), e.to_string()))?;
    let field = file
        .field
        .parse::<FieldId>()
        .map_err(|e| syntax(1, 1, e.to_string()))?;
    let degree = Degree::new(file.degree)?;
    let bits = bits.or(file.precision).unwrap_or(DEFAULT_BITS);
    let coeffs = file
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let x = RingElement::parse(field, c, bits)?;
            if x.is_zero() {
                Err(FormError::ZeroCoefficient { index: i })
            } else {
                Ok(x)
            }
        })
        .collect::<Result<Vec<_>, FormError>>()?;
    AdditiveForm::new(field, degree, bits, coeffs)
}

/// Canonical text form; coefficients are written exactly as `a+b*w`.
pub fn serialize_form(form: &AdditiveForm) -> String {
    let mut out = format!(
        "field {}\ndegree {}\nprecision {}\n",
        form.field(),
        form.d(),
        form.bits()
    );
    for c in form.coeffs() {
        out.push_str(&format!("coeff {c}\n"));
    }
    out
}

pub fn serialize_form_json(form: &AdditiveForm) -> String {
    let file = FormFile {
        field: form.field().name().to_string(),
        degree: form.d(),
        precision: Some(form.bits()),
        coeffs: form.coeffs().iter().map(ToString::to_string).collect(),
    };
    serde_json::to_string_pretty(&file).expect("form files always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::catalog::extremal_g;

    #[test]
    fn one_line_form() {
        let f = parse_form("field Q2(sqrt(-1)); degree 6; coeffs 1+0*w, d:01").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.field(), FieldId::SqrtMinus1);
        assert_eq!(f.level_and_class(1), (1, 0));
    }

    #[test]
    fn bad_degree_reports_position() {
        let err = parse_form("field Q2(sqrt(2))\ndegree 4\n").unwrap_err();
        match err {
            FormError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 8)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_coefficient_rejected() {
        let err = parse_form("field Q2(sqrt(2))\ndegree 6\ncoeff 1+0*w\ncoeff 0+0*w\n").unwrap_err();
        assert!(matches!(err, FormError::Syntax { line: 4, column: 7, .. }), "{err:?}");
    }

    #[test]
    fn malformed_statements() {
        assert!(parse_form("fjeld Q2(sqrt(2))").is_err());
        assert!(parse_form("field Q2(sqrt(3))\ndegree 6").is_err());
        assert!(parse_form("degree 6\ncoeff 1").is_err());
        assert!(parse_form("field Q2(sqrt(2))\ndegree 6\ncoeff 1+x*w").is_err());
    }

    #[test]
    fn round_trips() {
        let g = extremal_g(FieldId::SqrtMinus5, Degree::new(6).unwrap(), 40).unwrap();
        let text = serialize_form(&g);
        assert_eq!(parse_form(&text).unwrap(), g);
        assert_eq!(serialize_form(&parse_form(&text).unwrap()), text);
        let json = serialize_form_json(&g);
        assert_eq!(parse_form(&json).unwrap(), g);
    }

    #[test]
    fn comments_and_overrides() {
        let text = "# header\nfield Q2(sqrt(10)) # trailing\ndegree 10\ncoeff 3\n";
        let f = parse_form_with_bits(text, Some(20)).unwrap();
        assert_eq!(f.bits(), 20);
        assert_eq!(f.d(), 10);
    }
}
