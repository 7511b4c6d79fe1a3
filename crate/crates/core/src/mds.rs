//! Multidimensional scaling: classic (Torgerson) scaling, SMACOF stress
//! majorization, Kruskal Stress-1 and dimensionality scans.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dissim::DissimilarityMatrix;
use crate::linalg::{double_center, sym_eigen, LinalgError, Matrix};
use crate::tsv::{self, ParseError};

/// Eigenvalues within this fraction of the largest magnitude count as zero.
pub const EIGEN_ZERO_TOL: f64 = 1e-10;
/// Relative stress drop below which adding a dimension is not worth it.
pub const ELBOW_THRESHOLD: f64 = 0.05;
/// Stress at or below this is treated as an exact fit by the elbow rule.
pub const STRESS_FLOOR: f64 = 1e-10;
pub const SMACOF_MAX_ITER: usize = 300;
pub const SMACOF_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdsError {
    #[error("dimensionality {dims} out of range for {n} points (need 1 <= dims <= n - 1)")]
    Dims { dims: usize, n: usize },
    #[error("need at least 2 points, found {0}")]
    TooFewPoints(usize),
    #[error("degenerate input: none of the {dims} largest eigenvalues of B is positive")]
    Degenerate { dims: usize },
    #[error("stress undefined: all dissimilarities{} are zero but the configuration is not", .point.map(|p| format!(" of point {p}")).unwrap_or_default())]
    UndefinedStress { point: Option<usize> },
    #[error("configuration has shape {rows}x{cols}, expected {expected_rows} rows{}", .expected_cols.map(|c| format!(" and {c} columns")).unwrap_or_default())]
    Shape { rows: usize, cols: usize, expected_rows: usize, expected_cols: Option<usize> },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Classic,
    Smacof,
}

/// A fitted configuration, serialised as JSON for the rest of the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsSolution {
    pub labels: Vec<String>,
    /// One row per point.
    #[serde(with = "matrix_rows")]
    pub coords: Matrix,
    /// Full descending spectrum of B (classic engine only).
    pub eigenvalues: Option<Vec<f64>>,
    /// Σ|λ<0| / Σ|λ| (classic engine only).
    pub negative_eigenvalue_mass: Option<f64>,
    pub stress: f64,
    /// Stress-1 before the first and after every SMACOF iteration.
    #[serde(default)]
    pub stress_history: Vec<f64>,
    pub engine: Engine,
    pub iterations: usize,
    pub converged: bool,
    /// Some selected dimension had a non-positive eigenvalue.
    #[serde(default)]
    pub degenerate: bool,
}

mod matrix_rows {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::Matrix;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        m.to_rows().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

impl MdsSolution {
    pub fn n_points(&self) -> usize {
        self.coords.rows()
    }

    pub fn dims(&self) -> usize {
        self.coords.cols()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serialises");
        s.push('\n');
        s
    }

    /// Decodes and validates a solution document.
    pub fn from_json(text: &str) -> Result<MdsSolution, ParseError> {
        let invalid = |message: String| ParseError::Invalid { line: 1, message };
        let sol: MdsSolution = serde_json::from_str(text).map_err(|e| ParseError::Invalid { line: e.line(), message: e.to_string() })?;
        if sol.labels.is_empty() {
            return Err(invalid("solution has no points".into()));
        }
        if sol.coords.rows() != sol.labels.len() {
            return Err(invalid(format!("{} labels but {} coordinate rows", sol.labels.len(), sol.coords.rows())));
        }
        if sol.coords.cols() == 0 {
            return Err(invalid("coordinates have no dimensions".into()));
        }
        let labels: Vec<&str> = sol.labels.iter().map(String::as_str).collect();
        tsv::unique_labels(1, &labels)?;
        if let Some(bad) = sol.labels.iter().find(|l| !tsv::is_clean_label(l)) {
            return Err(invalid(format!("invalid label {bad:?}")));
        }
        if !(sol.stress.is_finite() && sol.stress >= 0.0) {
            return Err(invalid("stress must be finite and non-negative".into()));
        }
        if let Some(ev) = &sol.eigenvalues {
            if ev.iter().any(|x| !x.is_finite()) {
                return Err(invalid("non-finite eigenvalue".into()));
            }
        }
        if let Some(m) = sol.negative_eigenvalue_mass {
            if !(0.0..=1.0).contains(&m) {
                return Err(invalid("negative eigenvalue mass outside [0, 1]".into()));
            }
        }
        Ok(sol)
    }

    /// Share of the positive spectrum carried by dimension `dim` (0-based).
    pub fn eigenvalue_share(&self, dim: usize) -> Option<f64> {
        let ev = self.eigenvalues.as_ref()?;
        let total: f64 = ev.iter().filter(|&&x| x > 0.0).sum();
        let v = *ev.get(dim)?;
        (total > 0.0).then(|| v.max(0.0) / total)
    }
}

/// Euclidean distances between the rows of a configuration.
pub fn configuration_distances(coords: &Matrix) -> Matrix {
    let n = coords.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = coords.row(i).iter().zip(coords.row(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    d
}

fn check_rows(delta: &DissimilarityMatrix, coords: &Matrix) -> Result<(), MdsError> {
    if coords.rows() != delta.len() {
        return Err(MdsError::Shape { rows: coords.rows(), cols: coords.cols(), expected_rows: delta.len(), expected_cols: None });
    }
    Ok(())
}

/// Kruskal Stress-1: √(Σᵢ<ⱼ (dᵢⱼ − δᵢⱼ)² / Σᵢ<ⱼ δᵢⱼ²).
///
/// An all-zero Δ gives 0 for a configuration of coincident points and an
/// error otherwise.
pub fn kruskal_stress(delta: &DissimilarityMatrix, coords: &Matrix) -> Result<f64, MdsError> {
    check_rows(delta, coords)?;
    let d = configuration_distances(coords);
    let n = delta.len();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let dl = delta.get(i, j);
            num += (d[(i, j)] - dl).powi(2);
            den += dl * dl;
        }
    }
    stress_ratio(num, den, None)
}

fn stress_ratio(num: f64, den: f64, point: Option<usize>) -> Result<f64, MdsError> {
    if den == 0.0 {
        return if num == 0.0 { Ok(0.0) } else { Err(MdsError::UndefinedStress { point }) };
    }
    Ok((num / den).sqrt())
}

/// Stress-1 restricted to the pairs involving each point.
pub fn per_point_stress(delta: &DissimilarityMatrix, coords: &Matrix) -> Result<Vec<f64>, MdsError> {
    check_rows(delta, coords)?;
    let d = configuration_distances(coords);
    let n = delta.len();
    (0..n)
        .map(|i| {
            let (mut num, mut den) = (0.0, 0.0);
            for j in (0..n).filter(|&j| j != i) {
                let dl = delta.get(i, j);
                num += (d[(i, j)] - dl).powi(2);
                den += dl * dl;
            }
            stress_ratio(num, den, Some(i))
        })
        .collect()
}

/// Point indices with their stress, worst first (ties by index).
pub fn rank_point_stress(scores: &[f64]) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked
}

fn check_dims(delta: &DissimilarityMatrix, dims: usize) -> Result<(), MdsError> {
    let n = delta.len();
    if n < 2 {
        return Err(MdsError::TooFewPoints(n));
    }
    if dims == 0 || dims > n - 1 {
        return Err(MdsError::Dims { dims, n });
    }
    Ok(())
}

fn center_columns(x: &mut Matrix) {
    let n = x.rows();
    for c in 0..x.cols() {
        let mean = (0..n).map(|r| x[(r, c)]).sum::<f64>() / n as f64;
        for r in 0..n {
            x[(r, c)] -= mean;
        }
    }
}

/// Classic scaling: double-centre Δ⁽²⁾, eigendecompose, and scale the
/// leading `dims` eigenvectors by √λ.
///
/// Selected eigenvalues that are not positive give an all-zero column and set
/// `degenerate`; negative eigenvalues are reported, never clamped away.
pub fn classic_scale(delta: &DissimilarityMatrix, dims: usize) -> Result<MdsSolution, MdsError> {
    check_dims(delta, dims)?;
    let n = delta.len();
    let eig = sym_eigen(&double_center(delta))?;
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let zero_tol = EIGEN_ZERO_TOL * scale;

    let selected = &eig.eigenvalues[..dims];
    let positive = selected.iter().filter(|&&l| l > zero_tol).count();
    if positive == 0 && !delta.is_zero() {
        return Err(MdsError::Degenerate { dims });
    }
    let mut coords = Matrix::zeros(n, dims);
    for (c, &lambda) in selected.iter().enumerate() {
        if lambda > zero_tol {
            let s = lambda.sqrt();
            for r in 0..n {
                coords[(r, c)] = eig.eigenvectors[(r, c)] * s;
            }
        }
    }
    center_columns(&mut coords);

    let abs_total: f64 = eig.eigenvalues.iter().map(|x| x.abs()).sum();
    let neg: f64 = eig.eigenvalues.iter().filter(|&&x| x < -zero_tol).map(|x| x.abs()).sum();
    let negative_eigenvalue_mass = if abs_total > 0.0 { neg / abs_total } else { 0.0 };
    let stress = kruskal_stress(delta, &coords)?;
    Ok(MdsSolution {
        labels: delta.labels().to_vec(),
        coords,
        eigenvalues: Some(eig.eigenvalues),
        negative_eigenvalue_mass: Some(negative_eigenvalue_mass),
        stress,
        stress_history: Vec::new(),
        engine: Engine::Classic,
        iterations: 0,
        converged: true,
        degenerate: positive < dims,
    })
}

/// Starting configuration for [`smacof`].
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Uniform random coordinates, scaled to the dissimilarities.
    Random(u64),
    /// The classic-scaling solution of the same dimensionality.
    Classic,
    Given(Matrix),
}

fn raw_stress(delta: &DissimilarityMatrix, d: &Matrix) -> f64 {
    let n = delta.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += (d[(i, j)] - delta.get(i, j)).powi(2);
        }
    }
    s
}

/// One Guttman transform X ← (1/n)·B(X)·X. Pairs at distance zero
/// contribute nothing to B(X).
fn guttman(delta: &DissimilarityMatrix, x: &Matrix, d: &Matrix) -> Matrix {
    let (n, m) = (x.rows(), x.cols());
    let mut out = Matrix::zeros(n, m);
    for i in 0..n {
        for j in 0..n {
            if i == j || d[(i, j)] == 0.0 {
                continue;
            }
            let ratio = delta.get(i, j) / d[(i, j)];
            for c in 0..m {
                out[(i, c)] += ratio * (x[(i, c)] - x[(j, c)]);
            }
        }
        for c in 0..m {
            out[(i, c)] /= n as f64;
        }
    }
    out
}

/// SMACOF: iterate Guttman transforms until the relative decrease of raw
/// stress falls below `eps` or `max_iter` is reached.
pub fn smacof(delta: &DissimilarityMatrix, dims: usize, init: &Init, max_iter: usize, eps: f64) -> Result<MdsSolution, MdsError> {
    check_dims(delta, dims)?;
    if max_iter == 0 {
        return Err(MdsError::InvalidOption("max_iter must be at least 1".into()));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(MdsError::InvalidOption(format!("eps must be positive, got {eps}")));
    }
    let n = delta.len();
    let mut x = match init {
        Init::Given(m) => {
            if m.rows() != n || m.cols() != dims {
                return Err(MdsError::Shape { rows: m.rows(), cols: m.cols(), expected_rows: n, expected_cols: Some(dims) });
            }
            m.clone()
        }
        Init::Classic => classic_scale(delta, dims)?.coords,
        Init::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mean = delta.matrix().as_slice().iter().sum::<f64>() / (n * (n - 1)) as f64;
            let half = if mean > 0.0 { mean } else { 1.0 };
            let data = (0..n * dims).map(|_| rng.random_range(-half..half)).collect();
            Matrix::new(n, dims, data)?
        }
    };
    center_columns(&mut x);

    let total: f64 = {
        let s: f64 = delta.matrix().as_slice().iter().map(|v| v * v).sum();
        s / 2.0
    };
    let to_stress1 = |raw: f64| if total > 0.0 { (raw / total).sqrt() } else { 0.0 };

    let mut d = configuration_distances(&x);
    let mut raw = raw_stress(delta, &d);
    let mut history = vec![to_stress1(raw)];
    let mut iterations = 0;
    let mut converged = raw == 0.0;
    while !converged && iterations < max_iter {
        let next = guttman(delta, &x, &d);
        let next_d = configuration_distances(&next);
        let next_raw = raw_stress(delta, &next_d);
        iterations += 1;
        x = next;
        d = next_d;
        history.push(to_stress1(next_raw));
        let decrease = raw - next_raw;
        raw = next_raw;
        if raw == 0.0 || decrease < eps * (raw + decrease) {
            converged = true;
        }
    }
    center_columns(&mut x);
    let stress = kruskal_stress(delta, &x)?;
    Ok(MdsSolution {
        labels: delta.labels().to_vec(),
        coords: x,
        eigenvalues: None,
        negative_eigenvalue_mass: None,
        stress,
        stress_history: history,
        engine: Engine::Smacof,
        iterations,
        converged,
        degenerate: false,
    })
}

/// Engine and knobs used by [`elbow_scan`].
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Classic,
    Smacof { init: SmacofStart, max_iter: usize, eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmacofStart {
    Random(u64),
    Classic,
}

impl Method {
    pub fn smacof_default() -> Self {
        Method::Smacof { init: SmacofStart::Classic, max_iter: SMACOF_MAX_ITER, eps: SMACOF_EPS }
    }

    pub fn solve(&self, delta: &DissimilarityMatrix, dims: usize) -> Result<MdsSolution, MdsError> {
        match *self {
            Method::Classic => classic_scale(delta, dims),
            Method::Smacof { init, max_iter, eps } => {
                let init = match init {
                    SmacofStart::Random(seed) => Init::Random(seed),
                    SmacofStart::Classic => Init::Classic,
                };
                smacof(delta, dims, &init, max_iter, eps)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElbowRow {
    pub dims: usize,
    pub stress: f64,
}

/// Stress by dimensionality, with the flagged elbow.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowScan {
    pub rows: Vec<ElbowRow>,
    pub elbow: usize,
}

/// Smallest k whose stress drop to k + 1 is below [`ELBOW_THRESHOLD`] of
/// stress(k); the last dimensionality when no such k exists.
pub fn find_elbow(stresses: &[f64]) -> usize {
    for (k, w) in stresses.windows(2).enumerate() {
        if w[0] <= STRESS_FLOOR || w[0] - w[1] < ELBOW_THRESHOLD * w[0] {
            return k + 1;
        }
    }
    stresses.len()
}

pub fn elbow_scan(delta: &DissimilarityMatrix, max_dims: usize, method: &Method) -> Result<ElbowScan, MdsError> {
    check_dims(delta, max_dims)?;
    let rows = (1..=max_dims).map(|dims| method.solve(delta, dims).map(|s| ElbowRow { dims, stress: s.stress })).collect::<Result<Vec<_>, _>>()?;
    let stresses: Vec<f64> = rows.iter().map(|r| r.stress).collect();
    Ok(ElbowScan { elbow: find_elbow(&stresses), rows })
}

impl ElbowScan {
    /// `dims<TAB>stress<TAB>elbow` with the elbow row marked `1`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("dims\tstress\telbow\n");
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{}\n", r.dims, r.stress, u8::from(r.dims == self.elbow)));
        }
        out
    }
}

pub fn parse_elbow_table(text: &str) -> Result<ElbowScan, ParseError> {
    let mut recs = tsv::records(text);
    let header = recs.next().ok_or(ParseError::Empty)?;
    if header.fields != ["dims", "stress", "elbow"] {
        return Err(ParseError::Invalid { line: header.line, message: "header must be 'dims<TAB>stress<TAB>elbow'".into() });
    }
    let mut rows = Vec::new();
    let mut elbow = None;
    for rec in recs {
        rec.expect_len(3)?;
        let dims: usize = rec.fields[0].parse().map_err(|_| ParseError::Number { line: rec.line, value: rec.fields[0].into() })?;
        if dims != rows.len() + 1 {
            return Err(ParseError::Invalid { line: rec.line, message: format!("expected dims {}, found {dims}", rows.len() + 1) });
        }
        let stress = rec.number(1)?;
        if stress < 0.0 {
            return Err(ParseError::Number { line: rec.line, value: rec.fields[1].into() });
        }
        match rec.fields[2] {
            "0" => {}
            "1" if elbow.is_none() => elbow = Some(dims),
            other => return Err(ParseError::Invalid { line: rec.line, message: format!("bad elbow flag '{other}'") }),
        }
        rows.push(ElbowRow { dims, stress });
    }
    let elbow = elbow.ok_or(ParseError::Invalid { line: header.line, message: "no row flagged as elbow".into() })?;
    Ok(ElbowScan { rows, elbow })
}
