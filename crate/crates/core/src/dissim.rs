//! Dissimilarity matrices and the measures that build them.

use std::collections::HashSet;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{comparison_key, BinaryTable, CompareMode, CorpusError, CorpusTable, PointCloud, Token};
use crate::linalg::Matrix;
use crate::tsv::{self, ParseError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DissimError {
    #[error("matrix must be square with one label per row: {rows}x{cols} with {labels} labels")]
    Shape { rows: usize, cols: usize, labels: usize },
    #[error("invalid label '{0}'")]
    InvalidLabel(String),
    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),
    #[error("not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("non-zero diagonal at {0}")]
    Diagonal(usize),
    #[error("negative dissimilarity at ({0}, {1})")]
    Negative(usize, usize),
    #[error("non-finite dissimilarity at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("tuples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("expected {expected} weights, found {found}")]
    WeightsLength { expected: usize, found: usize },
    #[error("weight {index} must be positive and finite, got {value}")]
    InvalidWeight { index: usize, value: f64 },
    #[error("weight given for unknown language '{0}'")]
    UnknownLanguage(String),
    #[error("distance undefined: no position is present in both tuples")]
    NoComparablePositions,
    #[error("distance between '{0}' and '{1}' is undefined: no jointly present data")]
    UndefinedPair(String, String),
    #[error("need at least {min} items, found {found}")]
    TooFew { min: usize, found: usize },
    #[error("neighbour count k = {k} invalid for {n} points")]
    InvalidK { k: usize, n: usize },
    #[error("neighbourhood graph is disconnected; component sizes {0:?} (try a larger k)")]
    Disconnected(Vec<usize>),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Square, symmetric, zero-diagonal, non-negative labelled matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    labels: Vec<String>,
    d: Matrix,
}

impl DissimilarityMatrix {
    pub fn new(labels: Vec<String>, d: Matrix) -> Result<Self, DissimError> {
        let n = labels.len();
        if d.rows() != n || d.cols() != n {
            return Err(DissimError::Shape { rows: d.rows(), cols: d.cols(), labels: n });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !tsv::is_clean_label(l) {
                return Err(DissimError::InvalidLabel(l.clone()));
            }
            if !seen.insert(l.as_str()) {
                return Err(DissimError::DuplicateLabel(l.clone()));
            }
        }
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return Err(DissimError::Diagonal(i));
            }
            for j in i + 1..n {
                if d[(i, j)] != d[(j, i)] {
                    return Err(DissimError::Asymmetric(i, j));
                }
                if d[(i, j)] < 0.0 {
                    return Err(DissimError::Negative(i, j));
                }
            }
        }
        Ok(Self { labels, d })
    }

    /// Evaluates `f` once per unordered pair and mirrors the result.
    pub fn from_fn<E>(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> Result<f64, E>) -> Result<Self, E>
    where
        E: From<DissimError>,
    {
        let n = labels.len();
        let mut d = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j)?;
                if !v.is_finite() {
                    return Err(DissimError::NonFinite(i, j).into());
                }
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        Ok(Self::new(labels, d)?)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &Matrix {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    pub fn is_zero(&self) -> bool {
        self.d.as_slice().iter().all(|&x| x == 0.0)
    }

    /// Reorders points so that new point `k` is old point `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> DissimilarityMatrix {
        let n = order.len();
        let mut d = Matrix::zeros(n, n);
        for (a, &i) in order.iter().enumerate() {
            for (b, &j) in order.iter().enumerate() {
                d[(a, b)] = self.d[(i, j)];
            }
        }
        DissimilarityMatrix { labels: order.iter().map(|&i| self.labels[i].clone()).collect(), d }
    }

    /// Header of labels, then the square body.
    pub fn to_tsv(&self) -> String {
        let mut out = self.labels.join("\t");
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self.d.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }
}

pub fn parse_dissimilarity(text: &str) -> Result<DissimilarityMatrix, ParseError> {
    let mut recs = tsv::records(text);
    let header = recs.next().ok_or(ParseError::Empty)?;
    let labels = tsv::unique_labels(header.line, &header.fields)?;
    let n = labels.len();
    let mut data = Vec::with_capacity(n * n);
    let mut last_line = header.line;
    for (row, rec) in recs.enumerate() {
        if row == n {
            return Err(ParseError::Invalid { line: rec.line, message: format!("more than {n} rows") });
        }
        rec.expect_len(n)?;
        for c in 0..n {
            data.push(rec.number(c)?);
        }
        last_line = rec.line;
    }
    if data.len() != n * n {
        return Err(ParseError::Invalid { line: last_line, message: format!("expected {n} rows, found {}", data.len() / n) });
    }
    let d = Matrix::new(n, n, data).map_err(|e| ParseError::Invalid { line: header.line, message: e.to_string() })?;
    DissimilarityMatrix::new(labels, d).map_err(|e| ParseError::Invalid { line: header.line, message: e.to_string() })
}

/// Positive per-position weights for [`hamming`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights(Vec<f64>);

impl FeatureWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self, DissimError> {
        for (index, &value) in weights.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(DissimError::InvalidWeight { index, value });
            }
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    /// Weights keyed by language name; languages not listed get weight 1.
    pub fn for_languages(named: &[(String, f64)], languages: &[String]) -> Result<Self, DissimError> {
        let mut w = vec![1.0; languages.len()];
        for (name, value) in named {
            let idx = languages.iter().position(|l| l == name).ok_or_else(|| DissimError::UnknownLanguage(name.clone()))?;
            w[idx] = *value;
        }
        Self::new(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Reads a `language<TAB>weight` table (with that header).
pub fn parse_weights(text: &str) -> Result<Vec<(String, f64)>, ParseError> {
    let mut recs = tsv::records(text);
    let header = recs.next().ok_or(ParseError::Empty)?;
    if header.fields != ["language", "weight"] {
        return Err(ParseError::Invalid { line: header.line, message: "header must be 'language<TAB>weight'".into() });
    }
    let mut out: Vec<(String, f64)> = Vec::new();
    for rec in recs {
        rec.expect_len(2)?;
        let name = rec.fields[0];
        if name.is_empty() {
            return Err(ParseError::EmptyLabel { line: rec.line });
        }
        if out.iter().any(|(n, _)| n == name) {
            return Err(ParseError::DuplicateLabel { line: rec.line, label: name.to_string() });
        }
        let w = rec.number(1)?;
        if w <= 0.0 {
            return Err(ParseError::Number { line: rec.line, value: rec.fields[1].to_string() });
        }
        out.push((name.to_string(), w));
    }
    Ok(out)
}

/// How [`hamming`] treats missing tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Skip positions where either side is missing and renormalise.
    #[default]
    PairwiseDelete,
    /// A missing token differs from everything, including another missing one.
    CountAsDiffer,
}

/// Relative (optionally weighted) Hamming distance: the weighted share of
/// compared positions whose tokens differ.
pub fn hamming(u: &[Token], v: &[Token], weights: Option<&FeatureWeights>, missing: MissingPolicy) -> Result<f64, DissimError> {
    if u.len() != v.len() {
        return Err(DissimError::LengthMismatch(u.len(), v.len()));
    }
    if let Some(w) = weights {
        if w.len() != u.len() {
            return Err(DissimError::WeightsLength { expected: u.len(), found: w.len() });
        }
    }
    let mut differ = 0.0;
    let mut total = 0.0;
    for (i, (a, b)) in u.iter().zip(v).enumerate() {
        let w = weights.map_or(1.0, |w| w.0[i]);
        let unequal = match (a, b, missing) {
            (Token::Missing, _, MissingPolicy::PairwiseDelete) | (_, Token::Missing, MissingPolicy::PairwiseDelete) => continue,
            (Token::Missing, _, _) | (_, Token::Missing, _) => true,
            (a, b, _) => a != b,
        };
        total += w;
        if unequal {
            differ += w;
        }
    }
    if total == 0.0 {
        return Err(DissimError::NoComparablePositions);
    }
    Ok(differ / total)
}

/// Hamming distances between contexts, each context being its tuple of
/// tokens across languages.
pub fn context_distances(
    table: &CorpusTable,
    mode: CompareMode,
    weights: Option<&FeatureWeights>,
    missing: MissingPolicy,
) -> Result<DissimilarityMatrix, DissimError> {
    let tokens = comparison_key(table, mode)?;
    let ids = tokens.context_ids();
    DissimilarityMatrix::from_fn(ids.to_vec(), |i, j| {
        hamming(tokens.context_tuple(i), tokens.context_tuple(j), weights, missing).map_err(|e| match e {
            DissimError::NoComparablePositions => DissimError::UndefinedPair(ids[i].clone(), ids[j].clone()),
            other => other,
        })
    })
}

/// Distances between the columns (functions) of a form × function table:
/// one minus the share of forms expressing both functions.
pub fn coexpression_distances(table: &BinaryTable) -> Result<DissimilarityMatrix, DissimError> {
    let k = table.n_rows();
    if k == 0 {
        return Err(DissimError::TooFew { min: 1, found: 0 });
    }
    DissimilarityMatrix::from_fn(table.col_labels().to_vec(), |i, j| {
        let common = (0..k).filter(|&r| table.get(r, i) && table.get(r, j)).count();
        Ok::<_, DissimError>(1.0 - common as f64 / k as f64)
    })
}

/// Distances between languages: the share of context pairs, defined in both
/// languages, that one language expresses alike and the other differently.
pub fn language_distances(table: &CorpusTable, mode: CompareMode) -> Result<DissimilarityMatrix, DissimError> {
    let tokens = comparison_key(table, mode)?;
    let nc = table.n_contexts();
    if nc < 2 {
        return Err(DissimError::TooFew { min: 2, found: nc });
    }
    // Per language, per context pair: None if undefined, else "same token".
    let classes: Vec<Vec<Option<bool>>> = (0..table.n_languages())
        .map(|l| {
            let col = tokens.language_column(l);
            let mut out = Vec::with_capacity(nc * (nc - 1) / 2);
            for a in 0..nc {
                for b in a + 1..nc {
                    out.push(match (col[a], col[b]) {
                        (Token::Missing, _) | (_, Token::Missing) => None,
                        (x, y) => Some(x == y),
                    });
                }
            }
            out
        })
        .collect();
    let langs = table.languages();
    DissimilarityMatrix::from_fn(langs.to_vec(), |i, j| {
        let (mut defined, mut disagree) = (0usize, 0usize);
        for (x, y) in classes[i].iter().zip(&classes[j]) {
            if let (Some(x), Some(y)) = (x, y) {
                defined += 1;
                if x != y {
                    disagree += 1;
                }
            }
        }
        if defined == 0 {
            return Err(DissimError::UndefinedPair(langs[i].clone(), langs[j].clone()));
        }
        Ok(disagree as f64 / defined as f64)
    })
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn euclidean_distances(cloud: &PointCloud) -> DissimilarityMatrix {
    let pts = cloud.points();
    DissimilarityMatrix::from_fn(cloud.labels(), |i, j| Ok::<_, DissimError>(euclid(&pts[i], &pts[j]))).expect("finite points give valid distances")
}

/// Shortest-path distances through the symmetrised k-nearest-neighbour
/// graph (an edge whenever either endpoint lists the other), with Euclidean
/// edge lengths.
pub fn geodesic_distances(cloud: &PointCloud, k: usize) -> Result<DissimilarityMatrix, DissimError> {
    let n = cloud.len();
    if k == 0 || n < k + 1 {
        return Err(DissimError::InvalidK { k, n });
    }
    let pts = cloud.points();
    let mut graph = UnGraph::<(), f64>::with_capacity(n, n * k);
    let nodes: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();
    let mut edges = HashSet::new();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (euclid(&pts[i], &pts[j]), j)).collect();
        // Equal distances resolve to the lower index.
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(w, j) in others.iter().take(k) {
            if edges.insert((i.min(j), i.max(j))) {
                graph.add_edge(nodes[i], nodes[j], w);
                uf.union(i, j);
            }
        }
    }
    let mut sizes = vec![0usize; n];
    for i in 0..n {
        sizes[uf.find(i)] += 1;
    }
    let mut sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
    if sizes.len() > 1 {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        return Err(DissimError::Disconnected(sizes));
    }
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        let dist = dijkstra(&graph, nodes[i], None, |e| *e.weight());
        for j in i + 1..n {
            let v = dist[&nodes[j]];
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    DissimilarityMatrix::new(cloud.labels(), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_binary_table, Cell};

    fn toks(s: &str) -> Vec<Token> {
        s.chars().map(|c| if c == '_' { Token::Missing } else { Token::Value(c.to_string()) }).collect()
    }

    #[test]
    fn hamming_two_fifths() {
        let d = hamming(&toks("ABCDE"), &toks("ABXDZ"), None, MissingPolicy::PairwiseDelete).unwrap();
        assert_eq!(d, 0.4);
    }

    #[test]
    fn hamming_identity_and_weights() {
        assert_eq!(hamming(&toks("ABC"), &toks("ABC"), None, MissingPolicy::CountAsDiffer).unwrap(), 0.0);
        let w = FeatureWeights::new(vec![1.0, 2.0, 2.0]).unwrap();
        assert_eq!(hamming(&toks("ABC"), &toks("AXY"), Some(&w), MissingPolicy::PairwiseDelete).unwrap(), 4.0 / 5.0);
    }

    #[test]
    fn hamming_missing_policies() {
        let (u, v) = (toks("A_C"), toks("ABD"));
        assert_eq!(hamming(&u, &v, None, MissingPolicy::PairwiseDelete).unwrap(), 0.5);
        assert_eq!(hamming(&u, &v, None, MissingPolicy::CountAsDiffer).unwrap(), 2.0 / 3.0);
        assert_eq!(hamming(&toks("__"), &toks("__"), None, MissingPolicy::CountAsDiffer).unwrap(), 1.0);
        assert_eq!(hamming(&toks("A_"), &toks("_B"), None, MissingPolicy::PairwiseDelete), Err(DissimError::NoComparablePositions));
        assert_eq!(hamming(&toks("AB"), &toks("ABC"), None, MissingPolicy::PairwiseDelete), Err(DissimError::LengthMismatch(2, 3)));
        let w = FeatureWeights::uniform(3);
        assert!(matches!(hamming(&toks("AB"), &toks("AB"), Some(&w), MissingPolicy::PairwiseDelete), Err(DissimError::WeightsLength { .. })));
        assert!(FeatureWeights::new(vec![1.0, 0.0]).is_err());
    }

    fn corpus(rows: &[&[&str]]) -> CorpusTable {
        let nl = rows[0].len();
        CorpusTable::new(
            (0..rows.len()).map(|i| format!("c{i}")).collect(),
            (0..nl).map(|i| format!("l{i}")).collect(),
            rows.iter().map(|r| r.iter().map(|f| if f.is_empty() { Cell::missing() } else { Cell::form(f) }).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_contexts() {
        let t = corpus(&[&["a", "b"], &["a", "b"]]);
        let d = context_distances(&t, CompareMode::Lexeme, None, MissingPolicy::PairwiseDelete).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn context_distances_brute_force() {
        let rows: [&[&str]; 3] = [&["a", "b", "c", "d", "e"], &["a", "x", "c", "", "e"], &["y", "x", "c", "d", "z"]];
        let t = corpus(&rows);
        let d = context_distances(&t, CompareMode::Lexeme, None, MissingPolicy::PairwiseDelete).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let (mut diff, mut tot) = (0, 0);
                for l in 0..5 {
                    if rows[i][l].is_empty() || rows[j][l].is_empty() {
                        continue;
                    }
                    tot += 1;
                    diff += (rows[i][l] != rows[j][l]) as usize;
                }
                assert_eq!(d.get(i, j), diff as f64 / tot as f64);
            }
        }
    }

    #[test]
    fn feature_versus_lexeme_context_distance() {
        let t = CorpusTable::new(
            vec!["c1".into(), "c2".into()],
            vec!["en".into(), "nl".into()],
            vec![
                vec![Cell::annotated("walked", "PAST"), Cell::annotated("liep", "PAST")],
                vec![Cell::annotated("ran", "PAST"), Cell::annotated("rende", "PAST")],
            ],
        )
        .unwrap();
        let f = context_distances(&t, CompareMode::Feature, None, MissingPolicy::PairwiseDelete).unwrap();
        let l = context_distances(&t, CompareMode::Lexeme, None, MissingPolicy::PairwiseDelete).unwrap();
        assert_eq!(f.get(0, 1), 0.0);
        assert_eq!(l.get(0, 1), 1.0);
    }

    #[test]
    fn undefined_context_pair_is_named() {
        let t = corpus(&[&["a", ""], &["", "b"]]);
        assert_eq!(context_distances(&t, CompareMode::Lexeme, None, MissingPolicy::PairwiseDelete), Err(DissimError::UndefinedPair("c0".into(), "c1".into())));
    }

    #[test]
    fn coexpression() {
        let t = parse_binary_table("x\tf1\tf2\tf3\tf4\na\tY\tY\tY\tN\nb\tY\tY\tN\tY\nc\tY\tY\tN\tN\nd\tY\tY\tN\tN\n").unwrap();
        let d = coexpression_distances(&t).unwrap();
        assert_eq!(d.get(0, 1), 0.0);
        assert_eq!(d.get(2, 3), 1.0);
        assert_eq!(d.get(0, 2), 0.75);
        assert_eq!(d.labels(), ["f1", "f2", "f3", "f4"]);
    }

    #[test]
    fn language_partition_disagreement() {
        let t = corpus(&[&["p", "a", "p"], &["p", "b", "p"], &["q", "c", "q"], &["q", "d", "q"]]);
        let d = language_distances(&t, CompareMode::Lexeme).unwrap();
        assert_eq!(d.get(0, 2), 0.0);
        assert_eq!(d.get(0, 1), 1.0 / 3.0);
    }

    #[test]
    fn language_distance_ignores_token_names() {
        let t = corpus(&[&["p", "a", "x"], &["p", "b", "x"], &["q", "a", "y"], &["r", "c", "x"]]);
        let renamed = corpus(&[&["p", "zz", "x"], &["p", "yy", "x"], &["q", "zz", "y"], &["r", "ww", "x"]]);
        assert_eq!(language_distances(&t, CompareMode::Lexeme).unwrap(), language_distances(&renamed, CompareMode::Lexeme).unwrap());
        assert!(language_distances(&corpus(&[&["a", "b"]]), CompareMode::Lexeme).is_err());
    }

    #[test]
    fn geodesic_chain() {
        let cloud = PointCloud::new(vec![vec![0.0], vec![1.5], vec![3.0]], None).unwrap();
        let d = geodesic_distances(&cloud, 1).unwrap();
        assert_eq!(d.get(0, 2), 3.0);
    }

    #[test]
    fn geodesic_square() {
        let cloud = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], None).unwrap();
        let g = geodesic_distances(&cloud, 1).unwrap();
        let e = euclidean_distances(&cloud);
        assert_eq!(g.get(0, 2), 2.0);
        assert!((e.get(0, 2) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn geodesic_disconnected() {
        let cloud = PointCloud::new(vec![vec![0.0], vec![1.0], vec![2.0], vec![100.0], vec![101.0]], None).unwrap();
        assert_eq!(geodesic_distances(&cloud, 1), Err(DissimError::Disconnected(vec![3, 2])));
        assert!(geodesic_distances(&cloud, 0).is_err());
        assert!(geodesic_distances(&cloud, 5).is_err());
    }

    #[test]
    fn matrix_validation() {
        let l = vec!["a".to_string(), "b".to_string()];
        let asym = Matrix::from_rows(&[[0.0, 1.0], [2.0, 0.0]]).unwrap();
        assert_eq!(DissimilarityMatrix::new(l.clone(), asym), Err(DissimError::Asymmetric(0, 1)));
        let diag = Matrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(DissimilarityMatrix::new(l.clone(), diag), Err(DissimError::Diagonal(0)));
        let neg = Matrix::from_rows(&[[0.0, -1.0], [-1.0, 0.0]]).unwrap();
        assert_eq!(DissimilarityMatrix::new(l, neg), Err(DissimError::Negative(0, 1)));
    }

    #[test]
    fn dissimilarity_tsv() {
        let text = "a\tb\tc\n0\t0.5\t1\n0.5\t0\t0.25\n1\t0.25\t0\n";
        let d = parse_dissimilarity(text).unwrap();
        assert_eq!(d.to_tsv(), text);
        assert!(parse_dissimilarity("a\tb\n0\t1\n").is_err());
        assert!(parse_dissimilarity("a\tb\n0\t1\n2\t0\n").is_err());
        assert!(parse_dissimilarity("a\tb\n0\t1\n1\t0\n0\t0\n").is_err());
    }

    #[test]
    fn weights_file() {
        let w = parse_weights("language\tweight\nen\t2\nfr\t0.5\n").unwrap();
        let langs: Vec<String> = ["de", "en", "fr"].iter().map(|s| s.to_string()).collect();
        let fw = FeatureWeights::for_languages(&w, &langs).unwrap();
        assert_eq!(fw.as_slice(), &[1.0, 2.0, 0.5]);
        assert!(parse_weights("language\tweight\nen\t-1\n").is_err());
        assert!(FeatureWeights::for_languages(&[("xx".into(), 1.0)], &langs).is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn tuple(n: usize) -> impl Strategy<Value = Vec<Token>> {
        prop::collection::vec(prop_oneof![Just(Token::Missing), "[abc]".prop_map(Token::Value)], n)
    }

    proptest! {
        #[test]
        fn hamming_pseudometric((u, v, w) in (1usize..8).prop_flat_map(|n| (tuple(n), tuple(n), tuple(n)))) {
            let d = |a: &[Token], b: &[Token]| hamming(a, b, None, MissingPolicy::CountAsDiffer).unwrap();
            if u.iter().all(|t| !t.is_missing()) {
                prop_assert_eq!(d(&u, &u), 0.0);
            }
            prop_assert_eq!(d(&u, &v), d(&v, &u));
            prop_assert!(d(&u, &w) <= d(&u, &v) + d(&v, &w) + 1e-12);
        }

        #[test]
        fn coexpression_ignores_row_order(cells in prop::collection::vec(prop::collection::vec(any::<bool>(), 4), 1..7), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let rows = cells.len();
            let labels: Vec<String> = (0..rows).map(|i| format!("r{i}")).collect();
            let cols: Vec<String> = (0..4).map(|i| format!("c{i}")).collect();
            let mut order: Vec<usize> = (0..rows).collect();
            order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = BinaryTable::new(labels.clone(), cols.clone(), cells.clone()).unwrap();
            let b = BinaryTable::new(order.iter().map(|&i| labels[i].clone()).collect(), cols, order.iter().map(|&i| cells[i].clone()).collect()).unwrap();
            prop_assert_eq!(coexpression_distances(&a).unwrap(), coexpression_distances(&b).unwrap());
        }

        #[test]
        fn geodesic_dominates_euclid(pts in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 2), 4..25), k in 2usize..4) {
            let cloud = PointCloud::new(pts, None).unwrap();
            if let Ok(g) = geodesic_distances(&cloud, k) {
                let e = euclidean_distances(&cloud);
                for i in 0..cloud.len() {
                    for j in 0..cloud.len() {
                        prop_assert!(g.get(i, j) >= e.get(i, j) - 1e-12);
                    }
                }
            }
        }
    }
}
