//! Line-oriented tab-separated reading shared by every text format.
//!
//! Tab is the only delimiter and there is no quoting. Lines starting with
//! `#` are comments; blank lines are skipped. Fields are trimmed of
//! surrounding spaces and a trailing `\r` is tolerated.

use std::collections::HashSet;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("document has no header line")]
    Empty,
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("line {line}: empty label")]
    EmptyLabel { line: usize },
    #[error("line {line}: duplicate label '{label}'")]
    DuplicateLabel { line: usize, label: String },
    #[error("line {line}: invalid cell (row '{row}', column '{col}'): '{value}'")]
    InvalidCell { line: usize, row: String, col: String, value: String },
    #[error("line {line}: invalid number '{value}'")]
    Number { line: usize, value: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

#[derive(Debug)]
pub(crate) struct Record<'a> {
    /// 1-based line number in the source document.
    pub line: usize,
    pub fields: Vec<&'a str>,
}

pub(crate) fn records(text: &str) -> impl Iterator<Item = Record<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.starts_with('#') || raw.trim().is_empty() {
            return None;
        }
        Some(Record { line: i + 1, fields: raw.split('\t').map(str::trim).collect() })
    })
}

impl Record<'_> {
    pub fn expect_len(&self, expected: usize) -> Result<(), ParseError> {
        if self.fields.len() != expected {
            return Err(ParseError::Ragged { line: self.line, expected, found: self.fields.len() });
        }
        Ok(())
    }

    pub fn number(&self, idx: usize) -> Result<f64, ParseError> {
        let raw = self.fields[idx];
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(ParseError::Number { line: self.line, value: raw.to_string() }),
        }
    }
}

/// Checks a list of labels for emptiness and duplicates.
pub(crate) fn unique_labels(line: usize, labels: &[&str]) -> Result<Vec<String>, ParseError> {
    let mut seen = HashSet::new();
    for &l in labels {
        if l.is_empty() {
            return Err(ParseError::EmptyLabel { line });
        }
        if !seen.insert(l) {
            return Err(ParseError::DuplicateLabel { line, label: l.to_string() });
        }
    }
    Ok(labels.iter().map(|s| s.to_string()).collect())
}

/// True when `s` survives a write/read cycle unchanged as a single field.
pub(crate) fn is_clean_field(s: &str) -> bool {
    !s.is_empty() && s.trim() == s && !s.contains(['\t', '\n', '\r'])
}

/// Labels additionally must not start a comment when placed first on a line.
pub(crate) fn is_clean_label(s: &str) -> bool {
    is_clean_field(s) && !s.starts_with('#')
}
