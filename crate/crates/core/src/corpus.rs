//! Input tables: binary item × feature matrices, aligned translation
//! corpora, and synthetic point clouds.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tsv::{self, ParseError};

/// Column-name suffix marking a feature annotation column, e.g. `en:feature`.
pub const FEATURE_SUFFIX: &str = ":feature";

/// Minimum number of points for [`swiss_roll`].
pub const SWISS_ROLL_MIN_POINTS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("duplicate {axis} label '{label}'")]
    DuplicateLabel { axis: &'static str, label: String },
    #[error("invalid {axis} label '{label}'")]
    InvalidLabel { axis: &'static str, label: String },
    #[error("invalid text in cell ({row}, {col}): {text:?}")]
    InvalidText { row: String, col: String, text: String },
    #[error("expected {expected} cells, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("feature mode needs a feature label on every present form; unannotated: {}", list_pairs(.0))]
    Unannotated(Vec<(String, String)>),
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point {index} has dimension {found}, expected {expected}")]
    Dimension { index: usize, expected: usize, found: usize },
    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("swiss roll needs at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },
    #[error("noise standard deviation must be finite and non-negative, got {0}")]
    InvalidNoise(f64),
}

fn list_pairs(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(c, l)| format!("({c}, {l})")).collect::<Vec<_>>().join(", ")
}

fn check_labels(axis: &'static str, labels: &[String]) -> Result<(), CorpusError> {
    let mut seen = HashMap::new();
    for l in labels {
        if !tsv::is_clean_label(l) || l.ends_with(FEATURE_SUFFIX) {
            return Err(CorpusError::InvalidLabel { axis, label: l.clone() });
        }
        if seen.insert(l.as_str(), ()).is_some() {
            return Err(CorpusError::DuplicateLabel { axis, label: l.clone() });
        }
    }
    Ok(())
}

/// Items × features presence matrix (forms × functions, constructions ×
/// contexts).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTable {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    cells: Vec<bool>,
}

impl BinaryTable {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, cells: Vec<Vec<bool>>) -> Result<Self, CorpusError> {
        check_labels("row", &row_labels)?;
        check_labels("column", &col_labels)?;
        if cells.len() != row_labels.len() {
            return Err(CorpusError::Shape { expected: row_labels.len(), found: cells.len() });
        }
        for r in &cells {
            if r.len() != col_labels.len() {
                return Err(CorpusError::Shape { expected: col_labels.len(), found: r.len() });
            }
        }
        Ok(Self { row_labels, col_labels, cells: cells.into_iter().flatten().collect() })
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn n_rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.n_cols() + col]
    }

    pub fn empty_rows(&self) -> Vec<usize> {
        (0..self.n_rows()).filter(|&r| (0..self.n_cols()).all(|c| !self.get(r, c))).collect()
    }

    pub fn empty_cols(&self) -> Vec<usize> {
        (0..self.n_cols()).filter(|&c| (0..self.n_rows()).all(|r| !self.get(r, c))).collect()
    }

    /// Removes all-N rows and columns. Removing one never empties the other
    /// axis, so a single pass suffices.
    pub fn drop_empty(&self) -> BinaryTable {
        let (er, ec) = (self.empty_rows(), self.empty_cols());
        let rows: Vec<usize> = (0..self.n_rows()).filter(|r| !er.contains(r)).collect();
        let cols: Vec<usize> = (0..self.n_cols()).filter(|c| !ec.contains(c)).collect();
        BinaryTable {
            row_labels: rows.iter().map(|&r| self.row_labels[r].clone()).collect(),
            col_labels: cols.iter().map(|&c| self.col_labels[c].clone()).collect(),
            cells: rows.iter().flat_map(|&r| cols.iter().map(move |&c| (r, c))).map(|(r, c)| self.get(r, c)).collect(),
        }
    }

    /// Swaps the axes, e.g. contexts × constructions into constructions × contexts.
    pub fn transpose(&self) -> BinaryTable {
        BinaryTable {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            cells: (0..self.n_cols()).flat_map(|c| (0..self.n_rows()).map(move |r| (r, c))).map(|(r, c)| self.get(r, c)).collect(),
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("item");
        for c in &self.col_labels {
            out.push('\t');
            out.push_str(c);
        }
        out.push('\n');
        for (r, label) in self.row_labels.iter().enumerate() {
            out.push_str(label);
            for c in 0..self.n_cols() {
                out.push_str(if self.get(r, c) { "\tY" } else { "\tN" });
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a Y/N table: header row of column labels (first field is a
/// corner cell and ignored), then one row per item. Cells accept `Y`, `N`,
/// `1`, `0` in any case.
pub fn parse_binary_table(text: &str) -> Result<BinaryTable, ParseError> {
    let mut recs = tsv::records(text);
    let header = recs.next().ok_or(ParseError::Empty)?;
    let col_labels = tsv::unique_labels(header.line, &header.fields[1..])?;
    let width = header.fields.len();

    let mut row_labels: Vec<String> = Vec::new();
    let mut cells = Vec::new();
    for rec in recs {
        rec.expect_len(width)?;
        let label = rec.fields[0];
        if label.is_empty() {
            return Err(ParseError::EmptyLabel { line: rec.line });
        }
        if row_labels.iter().any(|l| l == label) {
            return Err(ParseError::DuplicateLabel { line: rec.line, label: label.to_string() });
        }
        let mut row = Vec::with_capacity(width - 1);
        for (c, raw) in rec.fields[1..].iter().enumerate() {
            let v = match raw.to_ascii_uppercase().as_str() {
                "Y" | "1" => true,
                "N" | "0" => false,
                _ => return Err(ParseError::InvalidCell { line: rec.line, row: label.to_string(), col: col_labels[c].clone(), value: raw.to_string() }),
            };
            row.push(v);
        }
        row_labels.push(label.to_string());
        cells.push(row);
    }
    let table = BinaryTable::new(row_labels, col_labels, cells).map_err(|e| ParseError::Invalid { line: header.line, message: e.to_string() })?;
    for r in table.empty_rows() {
        log::warn!("row '{}' has no Y cells", table.row_labels[r]);
    }
    for c in table.empty_cols() {
        log::warn!("column '{}' has no Y cells", table.col_labels[c]);
    }
    Ok(table)
}

/// One translation: the form used (absent when the corpus lacks one) and an
/// optional grammatical annotation such as a tense label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cell {
    pub form: Option<String>,
    pub feature: Option<String>,
}

impl Cell {
    pub fn form(form: &str) -> Self {
        Self { form: Some(form.to_string()), feature: None }
    }

    pub fn annotated(form: &str, feature: &str) -> Self {
        Self { form: Some(form.to_string()), feature: Some(feature.to_string()) }
    }

    pub fn missing() -> Self {
        Self::default()
    }
}

/// Contexts × languages translation table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusTable {
    context_ids: Vec<String>,
    languages: Vec<String>,
    cells: Vec<Cell>,
}

impl CorpusTable {
    pub fn new(context_ids: Vec<String>, languages: Vec<String>, cells: Vec<Vec<Cell>>) -> Result<Self, CorpusError> {
        check_labels("context", &context_ids)?;
        check_labels("language", &languages)?;
        if cells.len() != context_ids.len() {
            return Err(CorpusError::Shape { expected: context_ids.len(), found: cells.len() });
        }
        for (ctx, row) in context_ids.iter().zip(&cells) {
            if row.len() != languages.len() {
                return Err(CorpusError::Shape { expected: languages.len(), found: row.len() });
            }
            for (lang, cell) in languages.iter().zip(row) {
                for text in cell.form.iter().chain(&cell.feature) {
                    if !tsv::is_clean_field(text) {
                        return Err(CorpusError::InvalidText { row: ctx.clone(), col: lang.clone(), text: text.clone() });
                    }
                }
            }
        }
        Ok(Self { context_ids, languages, cells: cells.into_iter().flatten().collect() })
    }

    pub fn context_ids(&self) -> &[String] {
        &self.context_ids
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn n_contexts(&self) -> usize {
        self.context_ids.len()
    }

    pub fn n_languages(&self) -> usize {
        self.languages.len()
    }

    pub fn cell(&self, context: usize, language: usize) -> &Cell {
        &self.cells[context * self.n_languages() + language]
    }

    pub fn language_index(&self, language: &str) -> Option<usize> {
        self.languages.iter().position(|l| l == language)
    }

    fn has_features(&self, language: usize) -> bool {
        (0..self.n_contexts()).any(|c| self.cell(c, language).feature.is_some())
    }

    /// Writes the table in the format read by [`parse_corpus`]. A feature
    /// column follows its language column only when some cell carries a
    /// feature.
    pub fn to_tsv(&self) -> String {
        let annotated: Vec<bool> = (0..self.n_languages()).map(|l| self.has_features(l)).collect();
        let mut out = String::from("context");
        for (l, lang) in self.languages.iter().enumerate() {
            out.push('\t');
            out.push_str(lang);
            if annotated[l] {
                out.push('\t');
                out.push_str(lang);
                out.push_str(FEATURE_SUFFIX);
            }
        }
        out.push('\n');
        for (c, ctx) in self.context_ids.iter().enumerate() {
            out.push_str(ctx);
            for l in 0..self.n_languages() {
                let cell = self.cell(c, l);
                out.push('\t');
                out.push_str(cell.form.as_deref().unwrap_or(""));
                if annotated[l] {
                    out.push('\t');
                    out.push_str(cell.feature.as_deref().unwrap_or(""));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a corpus table: header `context`, then language names, with
/// optional `<lang>:feature` columns anywhere after the language they
/// annotate. Empty cells are missing forms (or absent features).
pub fn parse_corpus(text: &str) -> Result<CorpusTable, ParseError> {
    let mut recs = tsv::records(text);
    let header = recs.next().ok_or(ParseError::Empty)?;
    let hl = header.line;
    if header.fields[0] != "context" {
        return Err(ParseError::Invalid { line: hl, message: format!("first header field must be 'context', found '{}'", header.fields[0]) });
    }

    enum Column {
        Form(usize),
        Feature(usize),
    }
    let mut languages: Vec<String> = Vec::new();
    let mut columns = Vec::new();
    let mut annotated = Vec::new();
    for &name in &header.fields[1..] {
        if let Some(lang) = name.strip_suffix(FEATURE_SUFFIX) {
            let Some(idx) = languages.iter().position(|l| l == lang) else {
                return Err(ParseError::Invalid { line: hl, message: format!("feature column '{name}' has no matching language column before it") });
            };
            if annotated.contains(&idx) {
                return Err(ParseError::DuplicateLabel { line: hl, label: name.to_string() });
            }
            annotated.push(idx);
            columns.push(Column::Feature(idx));
        } else {
            if name.is_empty() {
                return Err(ParseError::EmptyLabel { line: hl });
            }
            if languages.iter().any(|l| l == name) {
                return Err(ParseError::DuplicateLabel { line: hl, label: name.to_string() });
            }
            columns.push(Column::Form(languages.len()));
            languages.push(name.to_string());
        }
    }

    let mut context_ids: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for rec in recs {
        rec.expect_len(header.fields.len())?;
        let ctx = rec.fields[0];
        if ctx.is_empty() {
            return Err(ParseError::EmptyLabel { line: rec.line });
        }
        if context_ids.iter().any(|c| c == ctx) {
            return Err(ParseError::DuplicateLabel { line: rec.line, label: ctx.to_string() });
        }
        let mut row = vec![Cell::missing(); languages.len()];
        for (col, &raw) in columns.iter().zip(&rec.fields[1..]) {
            let value = (!raw.is_empty()).then(|| raw.to_string());
            match *col {
                Column::Form(l) => row[l].form = value,
                Column::Feature(l) => row[l].feature = value,
            }
        }
        context_ids.push(ctx.to_string());
        rows.push(row);
    }
    CorpusTable::new(context_ids, languages, rows).map_err(|e| ParseError::Invalid { line: hl, message: e.to_string() })
}

/// Per-cell comparison token. Missing translations stay distinguishable from
/// any text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Missing,
    Value(String),
}

impl Token {
    pub fn is_missing(&self) -> bool {
        matches!(self, Token::Missing)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Missing => f.write_str("(missing)"),
            Token::Value(v) => f.write_str(v),
        }
    }
}

/// What counts as "the same" translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareMode {
    /// Same (case-folded, trimmed) form.
    #[default]
    Lexeme,
    /// Same annotated feature label, regardless of form.
    Feature,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenTable {
    context_ids: Vec<String>,
    languages: Vec<String>,
    tokens: Vec<Token>,
}

impl TokenTable {
    pub fn context_ids(&self) -> &[String] {
        &self.context_ids
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn token(&self, context: usize, language: usize) -> &Token {
        &self.tokens[context * self.languages.len() + language]
    }

    /// The tokens of one context across all languages.
    pub fn context_tuple(&self, context: usize) -> &[Token] {
        let n = self.languages.len();
        &self.tokens[context * n..(context + 1) * n]
    }

    /// The tokens of one language across all contexts.
    pub fn language_column(&self, language: usize) -> Vec<&Token> {
        (0..self.context_ids.len()).map(|c| self.token(c, language)).collect()
    }
}

pub fn comparison_key(table: &CorpusTable, mode: CompareMode) -> Result<TokenTable, CorpusError> {
    let mut tokens = Vec::with_capacity(table.cells.len());
    let mut unannotated = Vec::new();
    for c in 0..table.n_contexts() {
        for l in 0..table.n_languages() {
            let cell = table.cell(c, l);
            let token = match (mode, &cell.form) {
                (_, None) => Token::Missing,
                (CompareMode::Lexeme, Some(form)) => Token::Value(form.trim().to_lowercase()),
                (CompareMode::Feature, Some(_)) => match &cell.feature {
                    Some(f) => Token::Value(f.trim().to_string()),
                    None => {
                        unannotated.push((table.context_ids[c].clone(), table.languages[l].clone()));
                        Token::Missing
                    }
                },
            };
            tokens.push(token);
        }
    }
    if !unannotated.is_empty() {
        return Err(CorpusError::Unannotated(unannotated));
    }
    Ok(TokenTable { context_ids: table.context_ids.clone(), languages: table.languages.clone(), tokens })
}

/// Points of equal dimensionality with optional ground-truth parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    intrinsic: Option<Vec<Vec<f64>>>,
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize, CorpusError> {
    let dim = rows.first().ok_or(CorpusError::EmptyCloud)?.len();
    for (index, p) in rows.iter().enumerate() {
        if p.len() != dim {
            return Err(CorpusError::Dimension { index, expected: dim, found: p.len() });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(CorpusError::NonFinite { index });
        }
    }
    Ok(dim)
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, intrinsic: Option<Vec<Vec<f64>>>) -> Result<Self, CorpusError> {
        let dim = check_rows(&points)?;
        if dim == 0 {
            return Err(CorpusError::Dimension { index: 0, expected: 1, found: 0 });
        }
        if let Some(params) = &intrinsic {
            if params.len() != points.len() {
                return Err(CorpusError::Shape { expected: points.len(), found: params.len() });
            }
            check_rows(params)?;
        }
        Ok(Self { points, intrinsic })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn intrinsic(&self) -> Option<&[Vec<f64>]> {
        self.intrinsic.as_deref()
    }

    /// Point labels used when a cloud becomes a dissimilarity matrix.
    pub fn labels(&self) -> Vec<String> {
        (1..=self.len()).map(|i| format!("p{i}")).collect()
    }

    /// Header `x1..xd` then `u1..uk`; one point per row.
    pub fn to_tsv(&self) -> String {
        let k = self.intrinsic.as_ref().map_or(0, |p| p[0].len());
        let header: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).chain((1..=k).map(|i| format!("u{i}"))).collect();
        let mut out = header.join("\t");
        out.push('\n');
        for (i, p) in self.points.iter().enumerate() {
            let extra = self.intrinsic.as_ref().map_or(&[][..], |ps| &ps[i][..]);
            let row: Vec<String> = p.iter().chain(extra).map(|v| v.to_string()).collect();
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }
}

pub fn parse_point_cloud(text: &str) -> Result<PointCloud, ParseError> {
    let mut recs = tsv::records(text);
    let header = recs.next().ok_or(ParseError::Empty)?;
    let dim = header.fields.iter().take_while(|f| f.starts_with('x')).count();
    let k = header.fields.len() - dim;
    for (i, f) in header.fields.iter().enumerate() {
        let expected = if i < dim { format!("x{}", i + 1) } else { format!("u{}", i - dim + 1) };
        if *f != expected {
            return Err(ParseError::Invalid { line: header.line, message: format!("expected column '{expected}', found '{f}'") });
        }
    }
    if dim == 0 {
        return Err(ParseError::Invalid { line: header.line, message: "no coordinate columns".into() });
    }
    let mut points = Vec::new();
    let mut params = Vec::new();
    for rec in recs {
        rec.expect_len(dim + k)?;
        let row = (0..dim + k).map(|i| rec.number(i)).collect::<Result<Vec<_>, _>>()?;
        points.push(row[..dim].to_vec());
        params.push(row[dim..].to_vec());
    }
    if points.is_empty() {
        return Err(ParseError::Invalid { line: header.line, message: "no points".into() });
    }
    PointCloud::new(points, (k > 0).then_some(params)).map_err(|e| ParseError::Invalid { line: header.line, message: e.to_string() })
}

/// Samples the Swiss roll: `(t cos t, y, t sin t)` with `t ~ U[1.5π, 4.5π]`
/// and `y ~ U[0, 21]`, plus isotropic Gaussian noise. The intrinsic
/// parameters `(t, y)` are kept.
pub fn swiss_roll(n: usize, noise_sd: f64, seed: u64) -> Result<PointCloud, CorpusError> {
    if n < SWISS_ROLL_MIN_POINTS {
        return Err(CorpusError::TooFewPoints { n, min: SWISS_ROLL_MIN_POINTS });
    }
    if !noise_sd.is_finite() || noise_sd < 0.0 {
        return Err(CorpusError::InvalidNoise(noise_sd));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sd).map_err(|_| CorpusError::InvalidNoise(noise_sd))?;
    let mut points = Vec::with_capacity(n);
    let mut intrinsic = Vec::with_capacity(n);
    for _ in 0..n {
        let t = 1.5 * PI * (1.0 + 2.0 * rng.random::<f64>());
        let y = 21.0 * rng.random::<f64>();
        let mut p = vec![t * t.cos(), y, t * t.sin()];
        if noise_sd > 0.0 {
            for x in &mut p {
                *x += noise.sample(&mut rng);
            }
        }
        points.push(p);
        intrinsic.push(vec![t, y]);
    }
    PointCloud::new(points, Some(intrinsic))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_binary_table() {
        let t = parse_binary_table("form\tf1\tf2\na\tY\tN\nb\tn\t1\n").unwrap();
        assert_eq!(t.row_labels(), ["a", "b"]);
        assert!(t.get(0, 0) && t.get(1, 1));
        assert!(!t.get(0, 1) && !t.get(1, 0));
    }

    #[test]
    fn illegal_cell_is_located() {
        let err = parse_binary_table("form\tf1\tf2\na\tY\tmaybe\n").unwrap_err();
        assert_eq!(err, ParseError::InvalidCell { line: 2, row: "a".into(), col: "f2".into(), value: "maybe".into() });
    }

    #[test]
    fn ragged_and_duplicate_rows() {
        assert!(matches!(parse_binary_table("x\ta\tb\nr\tY\n"), Err(ParseError::Ragged { line: 2, expected: 3, found: 2 })));
        assert!(matches!(parse_binary_table("x\ta\ta\n"), Err(ParseError::DuplicateLabel { line: 1, .. })));
        assert!(matches!(parse_binary_table("x\ta\nr\tY\nr\tN\n"), Err(ParseError::DuplicateLabel { line: 3, .. })));
        assert_eq!(parse_binary_table("# only a comment\n"), Err(ParseError::Empty));
    }

    #[test]
    fn haspelmath_functions() {
        let functions = [
            "specific known",
            "specific unknown",
            "irrealis non-specific",
            "question",
            "conditional",
            "indirect negation",
            "comparative",
            "direct negation",
            "free choice",
        ];
        let mut doc = format!("form\t{}\n", functions.join("\t"));
        doc.push_str("some-\tY\tY\tY\tY\tY\tN\tN\tN\tN\n");
        doc.push_str("any-\tN\tN\tN\tY\tY\tY\tY\tN\tY\n");
        doc.push_str("no-\tN\tN\tN\tN\tN\tN\tN\tY\tN\n");
        let t = parse_binary_table(&doc).unwrap();
        assert_eq!(t.col_labels(), functions);
        assert_eq!(t.n_rows(), 3);
    }

    #[test]
    fn empty_rows_and_columns() {
        let t = parse_binary_table("x\ta\tb\tc\nr1\tY\tN\tN\nr2\tN\tN\tN\nr3\tY\tN\tY\n").unwrap();
        assert_eq!(t.empty_rows(), vec![1]);
        assert_eq!(t.empty_cols(), vec![1]);
        let d = t.drop_empty();
        assert_eq!(d.row_labels(), ["r1", "r3"]);
        assert_eq!(d.col_labels(), ["a", "c"]);
        assert!(d.get(1, 1) && !d.get(0, 1));
        let tt = t.transpose();
        assert_eq!(tt.row_labels(), t.col_labels());
        assert!(tt.get(2, 2));
    }

    #[test]
    fn toy_corpus() {
        let t = parse_corpus("context\ten\tfr\tde\nc1\tbook\tlibre\tBuch\n").unwrap();
        assert_eq!(t.n_contexts(), 1);
        assert_eq!(t.languages(), ["en", "fr", "de"]);
        assert_eq!(t.cell(0, 2).form.as_deref(), Some("Buch"));
    }

    #[test]
    fn empty_cell_is_missing() {
        let t = parse_corpus("context\ten\tfr\nc1\tbook\t\n").unwrap();
        assert_eq!(t.cell(0, 1), &Cell::missing());
    }

    #[test]
    fn feature_columns() {
        let doc = "context\ten\ten:feature\tnl\nc1\thave seen\tPresPerf\theb gezien\nc2\tsaw\tPast\tzag\n";
        let t = parse_corpus(doc).unwrap();
        assert_eq!(t.cell(0, 0).feature.as_deref(), Some("PresPerf"));
        assert_eq!(t.cell(0, 1).feature, None);
        assert_eq!(t.to_tsv(), doc);
        assert_eq!(parse_corpus(&t.to_tsv()).unwrap(), t);
    }

    #[test]
    fn orphan_feature_column() {
        let err = parse_corpus("context\ten\tfr:feature\nc1\ta\tb\n").unwrap_err();
        assert!(matches!(err, ParseError::Invalid { line: 1, .. }), "{err}");
        assert!(parse_corpus("ctx\ten\n").is_err());
    }

    fn klis_table() -> CorpusTable {
        CorpusTable::new(
            vec!["c1".into(), "c2".into()],
            vec!["en".into()],
            vec![vec![Cell::annotated("went", "PAST")], vec![Cell::annotated("gone", "PERFECT")]],
        )
        .unwrap()
    }

    #[test]
    fn feature_mode_ignores_shared_stems() {
        let k = comparison_key(&klis_table(), CompareMode::Feature).unwrap();
        assert_ne!(k.token(0, 0), k.token(1, 0));
    }

    #[test]
    fn lexeme_mode_normalises() {
        let t = CorpusTable::new(vec!["c1".into(), "c2".into()], vec!["en".into()], vec![vec![Cell::form("let")], vec![Cell::form("Let")]]).unwrap();
        let k = comparison_key(&t, CompareMode::Lexeme).unwrap();
        assert_eq!(k.token(0, 0), &Token::Value("let".into()));
        assert_eq!(k.token(0, 0), k.token(1, 0));
    }

    #[test]
    fn different_words_same_tense() {
        let t = CorpusTable::new(
            vec!["c1".into(), "c2".into()],
            vec!["en".into()],
            vec![vec![Cell::annotated("walked", "PAST")], vec![Cell::annotated("ran", "PAST")]],
        )
        .unwrap();
        let f = comparison_key(&t, CompareMode::Feature).unwrap();
        let l = comparison_key(&t, CompareMode::Lexeme).unwrap();
        assert_eq!(f.token(0, 0), f.token(1, 0));
        assert_ne!(l.token(0, 0), l.token(1, 0));
    }

    #[test]
    fn feature_mode_lists_unannotated() {
        let t = CorpusTable::new(
            vec!["c1".into(), "c2".into()],
            vec!["en".into(), "fr".into()],
            vec![vec![Cell::annotated("a", "X"), Cell::form("b")], vec![Cell::missing(), Cell::annotated("c", "Y")]],
        )
        .unwrap();
        assert_eq!(comparison_key(&t, CompareMode::Feature).unwrap_err(), CorpusError::Unannotated(vec![("c1".into(), "fr".into())]));
        let ok = comparison_key(&t, CompareMode::Lexeme).unwrap();
        assert!(ok.token(1, 0).is_missing());
    }

    #[test]
    fn constructor_rejects_bad_text() {
        let bad = CorpusTable::new(vec!["c".into()], vec!["en".into()], vec![vec![Cell::form("a\tb")]]);
        assert!(matches!(bad, Err(CorpusError::InvalidText { .. })));
        let dup = CorpusTable::new(vec!["c".into(), "c".into()], vec!["en".into()], vec![vec![Cell::missing()]; 2]);
        assert!(matches!(dup, Err(CorpusError::DuplicateLabel { axis: "context", .. })));
        let hash = BinaryTable::new(vec!["#r".into()], vec!["a".into()], vec![vec![true]]);
        assert!(matches!(hash, Err(CorpusError::InvalidLabel { .. })));
    }

    #[test]
    fn swiss_roll_parametrisation() {
        let cloud = swiss_roll(200, 0.0, 5).unwrap();
        for (p, u) in cloud.points().iter().zip(cloud.intrinsic().unwrap()) {
            let t = u[0];
            assert!((p[0] * p[0] + p[2] * p[2] - t * t).abs() <= 1e-12 * t * t);
            assert!((1.5 * PI..=4.5 * PI).contains(&t));
            assert!((0.0..=21.0).contains(&u[1]));
            assert_eq!(p[1], u[1]);
        }
    }

    #[test]
    fn swiss_roll_is_seeded() {
        assert_eq!(swiss_roll(50, 0.3, 9).unwrap(), swiss_roll(50, 0.3, 9).unwrap());
        assert_ne!(swiss_roll(50, 0.3, 9).unwrap(), swiss_roll(50, 0.3, 10).unwrap());
        assert_eq!(swiss_roll(9, 0.0, 1), Err(CorpusError::TooFewPoints { n: 9, min: 10 }));
        assert!(swiss_roll(20, -1.0, 1).is_err());
    }

    #[test]
    fn point_cloud_tsv() {
        let cloud = swiss_roll(12, 0.5, 2).unwrap();
        let text = cloud.to_tsv();
        assert!(text.starts_with("x1\tx2\tx3\tu1\tu2\n"));
        assert_eq!(parse_point_cloud(&text).unwrap(), cloud);
        assert!(parse_point_cloud("x1\tx3\n1\t2\n").is_err());
        assert!(parse_point_cloud("x1\n").is_err());
    }
}
