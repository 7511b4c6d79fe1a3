//! Clustering directly on dissimilarities: PAM k-medoids, silhouette widths
//! and agglomerative hierarchical clustering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dissim::DissimilarityMatrix;
use crate::tsv::{self, ParseError};

/// Swaps must lower the cost by more than this fraction of the current cost
/// (floored at 1) to be accepted, so rounding noise cannot cycle.
const SWAP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("k = {k} out of range for {n} points")]
    InvalidK { k: usize, n: usize },
    #[error("need at least {min} points, found {found}")]
    TooFewPoints { min: usize, found: usize },
    #[error("assignment has {found} entries for {n} points")]
    AssignmentLength { found: usize, n: usize },
    #[error("silhouette needs at least two clusters")]
    SingleCluster,
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
}

/// A flat partition. PAM fills in the medoids and their cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub assignment: Vec<usize>,
    pub medoids: Option<Vec<usize>>,
    pub cost: Option<f64>,
}

impl ClusterResult {
    pub fn k(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    /// `label<TAB>cluster<TAB>is_medoid`, one row per point.
    pub fn to_tsv(&self, labels: &[String]) -> String {
        let mut out = String::from("label\tcluster\tis_medoid\n");
        for (i, (label, c)) in labels.iter().zip(&self.assignment).enumerate() {
            let medoid = self.medoids.as_ref().is_some_and(|m| m.contains(&i));
            out.push_str(&format!("{label}\t{c}\t{}\n", u8::from(medoid)));
        }
        out
    }
}

/// Relabels clusters in order of first appearance.
fn canonical(assignment: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

fn check_assignment(n: usize, assignment: &[usize]) -> Result<usize, ClusterError> {
    if assignment.len() != n {
        return Err(ClusterError::AssignmentLength { found: assignment.len(), n });
    }
    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; k];
    for &c in assignment {
        counts[c] += 1;
    }
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(ClusterError::EmptyCluster(empty));
    }
    Ok(k)
}

/// Nearest medoid of every point (ties to the lower cluster index), with
/// its distance and the distance to the second-nearest medoid.
fn nearest(delta: &DissimilarityMatrix, medoids: &[usize]) -> Vec<(usize, f64, f64)> {
    (0..delta.len())
        .map(|j| {
            let mut best = (usize::MAX, f64::INFINITY, f64::INFINITY);
            for (c, &m) in medoids.iter().enumerate() {
                let d = if j == m { 0.0 } else { delta.get(j, m) };
                if d < best.1 {
                    best = (c, d, best.1);
                } else if d < best.2 {
                    best.2 = d;
                }
            }
            // A medoid always belongs to its own cluster.
            if let Some(c) = medoids.iter().position(|&m| m == j) {
                best.0 = c;
            }
            best
        })
        .collect()
}

/// Partitioning Around Medoids: greedy BUILD, then SWAP with the best
/// improving medoid/non-medoid exchange until none lowers the cost.
///
/// Both phases are deterministic; ties go to the lowest index.
pub fn pam(delta: &DissimilarityMatrix, k: usize) -> Result<ClusterResult, ClusterError> {
    pam_traced(delta, k).map(|(r, _)| r)
}

/// [`pam`] plus the total cost after BUILD and after every accepted swap.
pub fn pam_traced(delta: &DissimilarityMatrix, k: usize) -> Result<(ClusterResult, Vec<f64>), ClusterError> {
    let n = delta.len();
    if k == 0 || k > n {
        return Err(ClusterError::InvalidK { k, n });
    }

    // BUILD
    let mut medoids = Vec::with_capacity(k);
    let mut best_dist = vec![f64::INFINITY; n];
    while medoids.len() < k {
        let mut pick = (usize::MAX, f64::NEG_INFINITY);
        for c in (0..n).filter(|c| !medoids.contains(c)) {
            let score = if medoids.is_empty() {
                -(0..n).map(|j| delta.get(j, c)).sum::<f64>()
            } else {
                (0..n).map(|j| (best_dist[j] - delta.get(j, c)).max(0.0)).sum::<f64>()
            };
            if score > pick.1 {
                pick = (c, score);
            }
        }
        medoids.push(pick.0);
        for (j, b) in best_dist.iter_mut().enumerate() {
            *b = b.min(delta.get(j, pick.0));
        }
    }

    // SWAP
    let total = |near: &[(usize, f64, f64)]| near.iter().map(|x| x.1).sum::<f64>();
    let mut near = nearest(delta, &medoids);
    let mut cost = total(&near);
    let mut trace = vec![cost];
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (slot, _) in medoids.iter().enumerate() {
            for h in (0..n).filter(|h| !medoids.contains(h)) {
                let change: f64 = (0..n)
                    .map(|j| {
                        let (c, d1, d2) = near[j];
                        let dh = delta.get(j, h);
                        let new = if c == slot { d2.min(dh) } else { d1.min(dh) };
                        new - d1
                    })
                    .sum();
                if best.is_none_or(|b| change < b.2) {
                    best = Some((slot, h, change));
                }
            }
        }
        match best {
            Some((slot, h, change)) if change < -SWAP_TOL * cost.max(1.0) => {
                medoids[slot] = h;
                near = nearest(delta, &medoids);
                let next = total(&near);
                debug_assert!(next <= cost);
                cost = next;
                trace.push(cost);
            }
            _ => break,
        }
    }

    // Report clusters ordered by medoid index.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&s| medoids[s]);
    medoids = order.iter().map(|&s| medoids[s]).collect();
    let near = nearest(delta, &medoids);
    let result = ClusterResult { assignment: near.iter().map(|x| x.0).collect(), medoids: Some(medoids), cost: Some(near.iter().map(|x| x.1).sum()) };
    Ok((result, trace))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Silhouette {
    pub widths: Vec<f64>,
    pub mean: f64,
}

/// Silhouette widths s(i) = (b − a) / max(a, b); members of singleton
/// clusters get 0.
pub fn silhouette(delta: &DissimilarityMatrix, assignment: &[usize]) -> Result<Silhouette, ClusterError> {
    let n = delta.len();
    let k = check_assignment(n, assignment)?;
    if k < 2 {
        return Err(ClusterError::SingleCluster);
    }
    let mut sizes = vec![0usize; k];
    for &c in assignment {
        sizes[c] += 1;
    }
    let widths: Vec<f64> = (0..n)
        .map(|i| {
            let own = assignment[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for j in (0..n).filter(|&j| j != i) {
                sums[assignment[j]] += delta.get(i, j);
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k).filter(|&c| c != own).map(|c| sums[c] / sizes[c] as f64).fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m == 0.0 {
                0.0
            } else {
                (b - a) / m
            }
        })
        .collect();
    let mean = widths.iter().sum::<f64>() / n as f64;
    Ok(Silhouette { widths, mean })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

impl Linkage {
    /// Lance–Williams update: distance from k to the union of i and j.
    fn update(self, d_ki: f64, d_kj: f64, n_i: usize, n_j: usize) -> f64 {
        match self {
            Linkage::Single => d_ki.min(d_kj),
            Linkage::Complete => d_ki.max(d_kj),
            Linkage::Average => (n_i as f64 * d_ki + n_j as f64 * d_kj) / (n_i + n_j) as f64,
        }
    }
}

/// One agglomeration step. Nodes `0..n` are leaves; merge `s` creates node
/// `n + s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub labels: Vec<String>,
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
}

/// Merges the closest pair of clusters until one remains. Ties go to the
/// lexicographically smallest pair of slots, where a merged cluster keeps
/// the lower slot of its two parts.
pub fn agglomerative(delta: &DissimilarityMatrix, linkage: Linkage) -> Result<Dendrogram, ClusterError> {
    let n = delta.len();
    if n < 2 {
        return Err(ClusterError::TooFewPoints { min: 2, found: n });
    }
    let mut d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| delta.get(i, j)).collect()).collect();
    let mut active = vec![true; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
        for i in (0..n).filter(|&i| active[i]) {
            for j in (i + 1..n).filter(|&j| active[j]) {
                if d[i][j] < best.2 {
                    best = (i, j, d[i][j]);
                }
            }
        }
        let (i, j, height) = best;
        for k in (0..n).filter(|&k| active[k] && k != i && k != j) {
            let v = linkage.update(d[k][i], d[k][j], size[i], size[j]);
            d[k][i] = v;
            d[i][k] = v;
        }
        merges.push(Merge { left: node[i], right: node[j], height, size: size[i] + size[j] });
        active[j] = false;
        node[i] = n + step;
        size[i] += size[j];
    }
    Ok(Dendrogram { labels: delta.labels().to_vec(), linkage, merges })
}

impl Dendrogram {
    pub fn leaves(&self) -> usize {
        self.labels.len()
    }

    /// Leaves in left-to-right drawing order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.leaves();
        if self.merges.is_empty() {
            return (0..n).collect();
        }
        let mut out = Vec::with_capacity(n);
        let mut stack = vec![n + self.merges.len() - 1];
        while let Some(node) = stack.pop() {
            if node < n {
                out.push(node);
            } else {
                let m = &self.merges[node - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dendrogram serialises");
        s.push('\n');
        s
    }

    /// Decodes a merge list and checks it forms a single binary tree.
    pub fn from_json(text: &str) -> Result<Dendrogram, ParseError> {
        let invalid = |message: String| ParseError::Invalid { line: 1, message };
        let dg: Dendrogram = serde_json::from_str(text).map_err(|e| ParseError::Invalid { line: e.line(), message: e.to_string() })?;
        let n = dg.leaves();
        if n == 0 {
            return Err(invalid("dendrogram has no leaves".into()));
        }
        let labels: Vec<&str> = dg.labels.iter().map(String::as_str).collect();
        tsv::unique_labels(1, &labels)?;
        if dg.merges.len() != n - 1 {
            return Err(invalid(format!("{} merges for {n} leaves", dg.merges.len())));
        }
        let mut sizes = vec![1usize; n];
        let mut used = vec![false; 2 * n - 1];
        for (s, m) in dg.merges.iter().enumerate() {
            let limit = n + s;
            if m.left >= limit || m.right >= limit || m.left == m.right {
                return Err(invalid(format!("merge {s} refers to unavailable nodes")));
            }
            if used[m.left] || used[m.right] {
                return Err(invalid(format!("merge {s} reuses a node")));
            }
            used[m.left] = true;
            used[m.right] = true;
            if !(m.height.is_finite() && m.height >= 0.0) {
                return Err(invalid(format!("merge {s} has an invalid height")));
            }
            let size = sizes[m.left] + sizes[m.right];
            if size != m.size {
                return Err(invalid(format!("merge {s} has size {} but joins {size} leaves", m.size)));
            }
            sizes.push(size);
        }
        Ok(dg)
    }
}

/// Undoes the last `k − 1` merges. Clusters are numbered by first
/// appearance among the points.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<ClusterResult, ClusterError> {
    let n = dendrogram.leaves();
    if k == 0 || k > n {
        return Err(ClusterError::InvalidK { k, n });
    }
    let mut parent: Vec<usize> = (0..2 * n - 1).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (s, m) in dendrogram.merges.iter().take(n - k).enumerate() {
        let (a, b) = (find(&mut parent, m.left), find(&mut parent, m.right));
        parent[a] = n + s;
        parent[b] = n + s;
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Ok(ClusterResult { assignment: canonical(&roots), medoids: None, cost: None })
}
