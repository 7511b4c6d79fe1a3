//! Readings of a fitted map: per-language colorings, regression of point
//! annotations on dimensions, and subset relations between languages.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::corpus::{comparison_key, CompareMode, CorpusError, CorpusTable, Token};
use crate::mds::MdsSolution;
use crate::tsv::{self, ParseError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpretError {
    #[error("labels differ: only in solution {only_solution:?}, only in other input {only_other:?}")]
    LabelMismatch { only_solution: Vec<String>, only_other: Vec<String> },
    #[error("annotation '{0}' is constant")]
    ConstantAnnotation(String),
    #[error("category '{0}' does not occur in any language")]
    CategoryAbsent(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

fn label_mismatch(solution: &[String], other: &[String]) -> InterpretError {
    let a: BTreeSet<&String> = solution.iter().collect();
    let b: BTreeSet<&String> = other.iter().collect();
    InterpretError::LabelMismatch {
        only_solution: a.difference(&b).map(|s| s.to_string()).collect(),
        only_other: b.difference(&a).map(|s| s.to_string()).collect(),
    }
}

pub const PALETTE: [&str; 12] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000", "#f0c000"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Circle,
    Square,
    Triangle,
    Diamond,
}

const MARKERS: [Marker; 4] = [Marker::Circle, Marker::Square, Marker::Triangle, Marker::Diamond];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Style {
    pub color: &'static str,
    pub marker: Marker,
}

impl Style {
    /// Colors cycle every 12 labels; the marker changes with each cycle.
    pub fn nth(i: usize) -> Style {
        Style { color: PALETTE[i % PALETTE.len()], marker: MARKERS[(i / PALETTE.len()) % MARKERS.len()] }
    }
}

/// One language's categorical reading of every point.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoringLayer {
    pub language: String,
    /// Token of each point, in solution order.
    pub labels: Vec<Token>,
    /// Shared across the whole layer set, in sorted label order.
    pub palette: Vec<(Token, Style)>,
}

impl ColoringLayer {
    pub fn style(&self, token: &Token) -> Style {
        let i = self.palette.iter().position(|(t, _)| t == token).expect("palette covers every label");
        self.palette[i].1
    }

    /// Palette entries actually used by this layer.
    pub fn legend(&self) -> Vec<(Token, Style)> {
        self.palette.iter().filter(|(t, _)| self.labels.contains(t)).cloned().collect()
    }
}

/// One layer per language. Points are matched to contexts by label.
pub fn color_layers(solution: &MdsSolution, table: &CorpusTable, mode: CompareMode) -> Result<Vec<ColoringLayer>, InterpretError> {
    let mut sorted_solution = solution.labels.clone();
    sorted_solution.sort();
    let mut sorted_table = table.context_ids().to_vec();
    sorted_table.sort();
    if sorted_solution != sorted_table {
        return Err(label_mismatch(&solution.labels, table.context_ids()));
    }
    let tokens = comparison_key(table, mode)?;
    let row: HashMap<&str, usize> = table.context_ids().iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let order: Vec<usize> = solution.labels.iter().map(|l| row[l.as_str()]).collect();

    let all: BTreeSet<&Token> = (0..table.n_contexts()).flat_map(|c| tokens.context_tuple(c)).collect();
    let palette: Vec<(Token, Style)> = all.into_iter().enumerate().map(|(i, t)| (t.clone(), Style::nth(i))).collect();

    Ok(table
        .languages()
        .iter()
        .enumerate()
        .map(|(l, language)| ColoringLayer {
            language: language.clone(),
            labels: order.iter().map(|&c| tokens.token(c, l).clone()).collect(),
            palette: palette.clone(),
        })
        .collect())
}

/// Binary per-point variables, one column per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotations {
    pub labels: Vec<String>,
    pub names: Vec<String>,
    /// `values[v][i]` is variable `v` at point `i`.
    pub values: Vec<Vec<bool>>,
}

/// Header `label<TAB>var…`, then one row per point with 0/1 cells.
pub fn parse_annotations(text: &str) -> Result<Annotations, ParseError> {
    let mut recs = tsv::records(text);
    let header = recs.next().ok_or(ParseError::Empty)?;
    if header.fields.len() < 2 || header.fields[0] != "label" {
        return Err(ParseError::Invalid { line: header.line, message: "header must be 'label' followed by variable names".into() });
    }
    let names = tsv::unique_labels(header.line, &header.fields[1..])?;
    let mut labels = Vec::new();
    let mut values = vec![Vec::new(); names.len()];
    for rec in recs {
        rec.expect_len(names.len() + 1)?;
        if !tsv::is_clean_label(rec.fields[0]) {
            return Err(ParseError::EmptyLabel { line: rec.line });
        }
        if labels.iter().any(|l: &String| l == rec.fields[0]) {
            return Err(ParseError::DuplicateLabel { line: rec.line, label: rec.fields[0].to_string() });
        }
        for (v, &cell) in rec.fields[1..].iter().enumerate() {
            let b = match cell {
                "0" => false,
                "1" => true,
                _ => return Err(ParseError::InvalidCell { line: rec.line, row: rec.fields[0].to_string(), col: names[v].clone(), value: cell.to_string() }),
            };
            values[v].push(b);
        }
        labels.push(rec.fields[0].to_string());
    }
    if labels.is_empty() {
        return Err(ParseError::Invalid { line: header.line, message: "no annotated points".into() });
    }
    Ok(Annotations { labels, names, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    /// 1-based.
    pub dimension: usize,
    pub variable: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Undefined with fewer than three points or a perfect fit.
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub n: usize,
    /// Sorted by R² descending.
    pub rows: Vec<RegressionRow>,
}

impl DimensionReport {
    pub fn get(&self, dimension: usize, variable: &str) -> Option<&RegressionRow> {
        self.rows.iter().find(|r| r.dimension == dimension && r.variable == variable)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# n = {}\ndimension\tvariable\tslope\tintercept\tr2\tt\n", self.n);
        for r in &self.rows {
            let t = r.t.map_or_else(|| "NA".to_string(), |t| t.to_string());
            out.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{t}\n", r.dimension, r.variable, r.slope, r.intercept, r.r_squared));
        }
        out
    }
}

/// Simple least squares of the coordinate on the 0/1 variable.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64, Option<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 0.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    let sse = (syy - slope * sxy).max(0.0);
    let t = (x.len() > 2 && sse > 0.0).then(|| slope / (sse / (n - 2.0) / sxx).sqrt());
    (slope, intercept, r2, t)
}

/// Every (dimension, variable) pair, matched to points by label.
pub fn dimension_regression(solution: &MdsSolution, annotations: &Annotations) -> Result<DimensionReport, InterpretError> {
    let index: HashMap<&str, usize> = annotations.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    if annotations.labels.len() != solution.labels.len() || solution.labels.iter().any(|l| !index.contains_key(l.as_str())) {
        return Err(label_mismatch(&solution.labels, &annotations.labels));
    }
    let order: Vec<usize> = solution.labels.iter().map(|l| index[l.as_str()]).collect();
    let mut rows = Vec::new();
    for (name, column) in annotations.names.iter().zip(&annotations.values) {
        let x: Vec<f64> = order.iter().map(|&i| if column[i] { 1.0 } else { 0.0 }).collect();
        if x.iter().all(|&v| v == x[0]) {
            return Err(InterpretError::ConstantAnnotation(name.clone()));
        }
        for dim in 0..solution.dims() {
            let (slope, intercept, r_squared, t) = ols(&x, &solution.coords.col(dim));
            rows.push(RegressionRow { dimension: dim + 1, variable: name.clone(), slope, intercept, r_squared, t });
        }
    }
    rows.sort_by(|a, b| b.r_squared.total_cmp(&a.r_squared));
    Ok(DimensionReport { n: solution.n_points(), rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub from: String,
    pub to: String,
    pub size_from: usize,
    pub size_to: usize,
    /// |S_from ∖ S_to|
    pub outside: usize,
    /// |S_from ∩ S_to| / |S_from|
    pub containment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainLink {
    pub language: String,
    pub size: usize,
    /// |S ∖ S_next|; `None` on the last language.
    pub violations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetReport {
    pub category: String,
    pub pairs: Vec<PairRow>,
    /// Languages using the category, by increasing |S|.
    pub chain: Vec<ChainLink>,
}

impl SubsetReport {
    pub fn total_violations(&self) -> usize {
        self.chain.iter().filter_map(|l| l.violations).sum()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# category = {}\nfrom\tto\tsize_from\tsize_to\tfrom_minus_to\tcontainment\n", self.category);
        for p in &self.pairs {
            out.push_str(&format!("{}\t{}\t{}\t{}\t{}\t{}\n", p.from, p.to, p.size_from, p.size_to, p.outside, p.containment));
        }
        out.push_str("\n# chain\nposition\tlanguage\tsize\tviolations\n");
        for (i, l) in self.chain.iter().enumerate() {
            let v = l.violations.map_or_else(|| "NA".to_string(), |v| v.to_string());
            out.push_str(&format!("{}\t{}\t{}\t{v}\n", i + 1, l.language, l.size));
        }
        out
    }
}

/// Compares the sets of contexts in which each language uses `category`.
pub fn subset_report(table: &CorpusTable, category: &str, mode: CompareMode) -> Result<SubsetReport, InterpretError> {
    let tokens = comparison_key(table, mode)?;
    let wanted = Token::Value(category.to_string());
    let sets: Vec<(usize, BTreeSet<usize>)> = (0..table.n_languages())
        .map(|l| (l, (0..table.n_contexts()).filter(|&c| *tokens.token(c, l) == wanted).collect::<BTreeSet<_>>()))
        .filter(|(_, s)| !s.is_empty())
        .collect();
    if sets.is_empty() {
        return Err(InterpretError::CategoryAbsent(category.to_string()));
    }
    let name = |l: usize| table.languages()[l].clone();

    let mut pairs = Vec::new();
    for (a, sa) in &sets {
        for (b, sb) in sets.iter().filter(|(b, _)| b != a) {
            let outside = sa.difference(sb).count();
            pairs.push(PairRow {
                from: name(*a),
                to: name(*b),
                size_from: sa.len(),
                size_to: sb.len(),
                outside,
                containment: (sa.len() - outside) as f64 / sa.len() as f64,
            });
        }
    }

    let mut order: Vec<&(usize, BTreeSet<usize>)> = sets.iter().collect();
    order.sort_by_key(|(_, s)| s.len());
    let chain = order
        .iter()
        .enumerate()
        .map(|(i, (l, s))| ChainLink { language: name(*l), size: s.len(), violations: order.get(i + 1).map(|(_, next)| s.difference(next).count()) })
        .collect();
    Ok(SubsetReport { category: category.to_string(), pairs, chain })
}
