//! Degeneration-data files.
//!
//! ```text
//! # Tate curve with v(q) = 5
//! p = 5
//! t = 1
//! mu = [[5]]
//! units = [["u"]]   # optional
//! ```
//!
//! The syntax is TOML. `mu` is a `t x t` integer matrix and may span lines;
//! `units` is a matrix of symbol names.

use std::fmt;
use std::ops::Range;

use crystor::abelian::Matrix;
use crystor::degeneration::{Degeneration, DegenerationError};
use crystor::kummer::UnitSymbol;
use crystor::BigInt;
use serde::Deserialize;
use toml::Spanned;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    p: Spanned<i64>,
    t: Spanned<i64>,
    mu: Spanned<Vec<Spanned<Vec<i64>>>>,
    units: Option<Spanned<Vec<Vec<String>>>>,
}

/// 1-based position in the input text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    fn at(text: &str, offset: usize) -> Self {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Self { line, column }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub position: Option<Position>,
    /// The offending key, when known.
    pub field: Option<String>,
    pub message: String,
    /// Stable identifier used in reports.
    pub id: &'static str,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.position {
            write!(f, "{}:{}: ", p.line, p.column)?;
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for InputError {}

fn located(
    text: &str,
    span: Range<usize>,
    field: &str,
    id: &'static str,
    message: String,
) -> InputError {
    InputError {
        position: Some(Position::at(text, span.start)),
        field: Some(field.into()),
        message,
        id,
    }
}

fn error_id(e: &DegenerationError) -> &'static str {
    match e {
        DegenerationError::NotSymmetric { .. } => "not-symmetric",
        DegenerationError::NotPositiveDefinite { .. } => "not-positive-definite",
        DegenerationError::NotPrime(_) => "not-prime",
        DegenerationError::BadLevel(_) => "bad-level",
        DegenerationError::Shape { .. } => "shape",
        DegenerationError::Kummer(_) | DegenerationError::Abelian(_) => "invalid-data",
    }
}

pub fn parse_input(text: &str) -> Result<Degeneration<BigInt>, InputError> {
    let raw: RawInput = toml::from_str(text).map_err(|e| InputError {
        position: e.span().map(|s| Position::at(text, s.start)),
        field: None,
        message: e.message().trim().to_string(),
        id: "parse-error",
    })?;

    let t_span = raw.t.span();
    let t = *raw.t.get_ref();
    if t < 1 {
        return Err(located(
            text,
            t_span,
            "t",
            "shape",
            format!("toric rank must be at least 1, got {t}"),
        ));
    }
    let t = t as usize;
    let mu_span = raw.mu.span();
    let rows = raw.mu.into_inner();
    if rows.len() != t {
        return Err(located(
            text,
            mu_span,
            "mu",
            "parse-error",
            format!("expected {t} rows, found {}", rows.len()),
        ));
    }
    let mut entries = Vec::with_capacity(t * t);
    for (i, row) in rows.into_iter().enumerate() {
        let span = row.span();
        let row = row.into_inner();
        if row.len() != t {
            return Err(located(
                text,
                span,
                "mu",
                "parse-error",
                format!("row {} has {} entries, expected {t}", i + 1, row.len()),
            ));
        }
        entries.extend(row.into_iter().map(BigInt::from));
    }
    let mu = Matrix::new(t, t, entries).expect("shape checked");

    let (units, units_span) = match raw.units {
        Some(u) => {
            let span = u.span();
            let rows = u.into_inner();
            let symbols = rows
                .into_iter()
                .map(|r| r.into_iter().map(UnitSymbol::new).collect())
                .collect();
            (Some(symbols), Some(span))
        }
        None => (None, None),
    };

    let p_span = raw.p.span();
    Degeneration::new(BigInt::from(*raw.p.get_ref()), mu, units).map_err(|e| {
        let field = match &e {
            DegenerationError::NotPrime(_) => "p",
            DegenerationError::NotSymmetric { field } | DegenerationError::Shape { field, .. } => {
                field
            }
            _ => "mu",
        };
        let span = match field {
            "p" => p_span.clone(),
            "units" => units_span.clone().unwrap_or(mu_span.clone()),
            _ => mu_span.clone(),
        };
        let message = e.to_string();
        let message = message
            .strip_prefix(&format!("{field}: "))
            .unwrap_or(&message)
            .to_string();
        located(text, span, field, error_id(&e), message)
    })
}
