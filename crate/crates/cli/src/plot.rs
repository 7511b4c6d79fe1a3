//! Deterministic SVG renderings: maps, dendrograms and elbow plots.
//!
//! Every number is written with two decimals, so identical inputs give
//! byte-identical documents.

use std::fmt::Write;

use semmap::cluster::Dendrogram;
use semmap::interpret::{ColoringLayer, Marker, Style};
use semmap::mds::{ElbowScan, MdsSolution};
use thiserror::Error;

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 600;
const MARGIN: f64 = 0.05;
const RADIUS: f64 = 4.0;
const FONT: &str = "font-family=\"sans-serif\" font-size=\"12\"";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error("dimension {dim} out of range: solution has {available} dimensions")]
    Dimension { dim: usize, available: usize },
    #[error("canvas must be at least 50x50, got {0}x{1}")]
    Canvas(u32, u32),
    #[error("layer has {found} labels for {expected} points")]
    LayerLength { found: usize, expected: usize },
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(width: u32, height: u32) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n<rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
    )
}

fn check_canvas(width: u32, height: u32) -> Result<(f64, f64), PlotError> {
    if width < 50 || height < 50 {
        return Err(PlotError::Canvas(width, height));
    }
    Ok((width as f64, height as f64))
}

/// Drawing area inside the margins: (left, top, right, bottom).
fn frame(w: f64, h: f64) -> (f64, f64, f64, f64) {
    (MARGIN * w, MARGIN * h, (1.0 - MARGIN) * w, (1.0 - MARGIN) * h)
}

fn marker(out: &mut String, x: f64, y: f64, style: Style, title: &str) {
    let title = escape(title);
    let paint = format!("fill=\"{}\" stroke=\"#000000\" stroke-width=\"0.50\"", style.color);
    match style.marker {
        Marker::Circle => writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {paint}><title>{title}</title></circle>", num(x), num(y), num(RADIUS)),
        m => writeln!(out, "<path d=\"{}\" {paint}><title>{title}</title></path>", shape_path(x, y, m)),
    }
    .unwrap();
}

fn shape_path(x: f64, y: f64, m: Marker) -> String {
    let r = RADIUS;
    let pts = match m {
        Marker::Circle => {
            return format!("M {} {} a {r} {r} 0 1 0 {d} 0 a {r} {r} 0 1 0 -{d} 0", num(x - r), num(y), r = num(r), d = num(2.0 * r));
        }
        Marker::Square => vec![(x - r, y - r), (x + r, y - r), (x + r, y + r), (x - r, y + r)],
        Marker::Triangle => vec![(x, y - r), (x + r, y + r), (x - r, y + r)],
        Marker::Diamond => vec![(x, y - r), (x + r, y), (x, y + r), (x - r, y)],
    };
    let mut d = String::new();
    for (i, (px, py)) in pts.iter().enumerate() {
        let _ = write!(d, "{} {} {} ", if i == 0 { "M" } else { "L" }, num(*px), num(*py));
    }
    d.push('Z');
    d
}

/// Legend swatches are paths, never circles, so circles count points.
fn swatch(x: f64, y: f64, style: Style) -> String {
    format!("<path d=\"{}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"0.50\"/>\n", shape_path(x, y, style.marker), style.color)
}

fn axis_label(solution: &MdsSolution, dim: usize) -> String {
    match solution.eigenvalue_share(dim) {
        Some(share) => format!("dim {} ({:.1}%)", dim + 1, 100.0 * share),
        None => format!("dim {}", dim + 1),
    }
}

/// Scatter of two dimensions (0-based), colored by `layer` when given.
///
/// Both axes share one scale so distances on the canvas are faithful.
pub fn plot_map(solution: &MdsSolution, layer: Option<&ColoringLayer>, dims: (usize, usize), width: u32, height: u32) -> Result<String, PlotError> {
    let (w, h) = check_canvas(width, height)?;
    let available = solution.dims();
    for dim in [dims.0, dims.1] {
        if dim >= available {
            return Err(PlotError::Dimension { dim: dim + 1, available });
        }
    }
    let n = solution.n_points();
    if let Some(layer) = layer {
        if layer.labels.len() != n {
            return Err(PlotError::LayerLength { found: layer.labels.len(), expected: n });
        }
    }
    let xs = solution.coords.col(dims.0);
    let ys = solution.coords.col(dims.1);
    let range = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let (left, top, right, bottom) = frame(w, h);
    let sx = if x1 > x0 { (right - left) / (x1 - x0) } else { f64::INFINITY };
    let sy = if y1 > y0 { (bottom - top) / (y1 - y0) } else { f64::INFINITY };
    let s = match sx.min(sy) {
        s if s.is_finite() => s,
        _ => 1.0,
    };
    let (cx, cy) = ((left + right) / 2.0, (top + bottom) / 2.0);
    let (mx, my) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);

    let mut out = header(width, height);
    let _ = writeln!(
        out,
        "<path d=\"M {} {} H {} M {} {} V {}\" stroke=\"#999999\" stroke-width=\"0.50\" fill=\"none\"/>",
        num(left),
        num(cy),
        num(right),
        num(cx),
        num(top),
        num(bottom)
    );
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" {FONT}>{}</text>", num(right), num(bottom + 0.6 * top), axis_label(solution, dims.0));
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" {FONT}>{}</text>", num(left), num(0.7 * top), axis_label(solution, dims.1));

    out.push_str("<g>\n");
    let plain = Style::nth(0);
    for i in 0..n {
        let style = layer.map_or(plain, |l| l.style(&l.labels[i]));
        let x = cx + (xs[i] - mx) * s;
        let y = cy - (ys[i] - my) * s;
        marker(&mut out, x, y, style, &solution.labels[i]);
    }
    out.push_str("</g>\n");

    if let Some(layer) = layer {
        out.push_str("<g>\n");
        let lx = right - 120.0_f64.min(0.3 * w);
        for (row, (token, style)) in layer.palette.iter().enumerate() {
            let y = top + 10.0 + 16.0 * row as f64;
            out.push_str(&swatch(lx, y, *style));
            let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" {FONT}>{}</text>", num(lx + 10.0), num(y + 4.0), escape(&token.to_string()));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Leaves along the x axis in tree order, merge heights on the y axis.
pub fn plot_dendrogram(dendrogram: &Dendrogram, width: u32, height: u32) -> Result<String, PlotError> {
    let (w, h) = check_canvas(width, height)?;
    let n = dendrogram.leaves();
    let (left, top, right, bottom) = frame(w, h);
    // Room for leaf labels under the baseline.
    let base = bottom - 0.1 * h;
    let max_h = dendrogram.merges.last().map_or(0.0, |m| m.height);
    let scale_y = if max_h > 0.0 { (base - top) / max_h } else { 0.0 };
    let step = if n > 1 { (right - left) / (n - 1) as f64 } else { 0.0 };

    let mut x = vec![0.0; 2 * n - 1];
    let mut y = vec![base; 2 * n - 1];
    for (pos, &leaf) in dendrogram.leaf_order().iter().enumerate() {
        x[leaf] = if n > 1 { left + step * pos as f64 } else { (left + right) / 2.0 };
    }

    let mut out = header(width, height);
    let _ = writeln!(out, "<path d=\"M {} {} V {}\" stroke=\"#999999\" stroke-width=\"0.50\" fill=\"none\"/>", num(left - 0.5 * left), num(top), num(base));
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" {FONT}>height (max {})</text>", num(left), num(0.7 * top), num(max_h));
    out.push_str("<g fill=\"none\" stroke=\"#000000\" stroke-width=\"1.00\">\n");
    for (s, m) in dendrogram.merges.iter().enumerate() {
        let node = n + s;
        x[node] = (x[m.left] + x[m.right]) / 2.0;
        y[node] = base - m.height * scale_y;
        let _ = writeln!(out, "<path d=\"M {} {} V {} H {} V {}\"/>", num(x[m.left]), num(y[m.left]), num(y[node]), num(x[m.right]), num(y[m.right]));
    }
    out.push_str("</g>\n<g>\n");
    for (leaf, label) in dendrogram.labels.iter().enumerate() {
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{}</text>", num(x[leaf]), num(base + 16.0), escape(label));
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Stress against dimensionality, with the elbow marked.
pub fn plot_elbow(scan: &ElbowScan, width: u32, height: u32) -> Result<String, PlotError> {
    let (w, h) = check_canvas(width, height)?;
    let (left, top, right, bottom) = frame(w, h);
    let base = bottom - 0.05 * h;
    let max_s = scan.rows.iter().fold(0.0f64, |m, r| m.max(r.stress));
    let scale_y = if max_s > 0.0 { (base - top) / max_s } else { 0.0 };
    let k = scan.rows.len();
    let px = |i: usize| if k > 1 { left + (right - left) * i as f64 / (k - 1) as f64 } else { (left + right) / 2.0 };
    let py = |s: f64| base - s * scale_y;

    let mut out = header(width, height);
    let _ = writeln!(out, "<path d=\"M {} {} V {} H {}\" stroke=\"#999999\" stroke-width=\"0.50\" fill=\"none\"/>", num(left), num(top), num(base), num(right));
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" {FONT}>stress (max {})</text>", num(left), num(0.7 * top), num(max_s));
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" {FONT}>dimensions</text>", num(right), num(bottom + 0.6 * top));
    let points: Vec<String> = scan.rows.iter().enumerate().map(|(i, r)| format!("{},{}", num(px(i)), num(py(r.stress)))).collect();
    let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.50\"/>", points.join(" "));
    for (i, r) in scan.rows.iter().enumerate() {
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{}</text>", num(px(i)), num(base + 16.0), r.dims);
        if r.dims == scan.elbow {
            let _ =
                writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"5.00\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.50\"/>", num(px(i)), num(py(r.stress)));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use semmap::cluster::Merge;
    use semmap::linalg::Matrix;
    use semmap::mds::{ElbowRow, Engine};

    fn solution(coords: Vec<Vec<f64>>) -> MdsSolution {
        MdsSolution {
            labels: (0..coords.len()).map(|i| format!("p{i}")).collect(),
            coords: Matrix::from_rows(&coords).unwrap(),
            eigenvalues: None,
            negative_eigenvalue_mass: None,
            stress: 0.0,
            stress_history: vec![],
            engine: Engine::Classic,
            iterations: 0,
            converged: true,
            degenerate: false,
        }
    }

    #[test]
    fn single_point_is_centered() {
        let svg = plot_map(&solution(vec![vec![3.0, -1.0]]), None, (0, 1), 800, 600).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("cx=\"400.00\" cy=\"300.00\""));
    }

    #[test]
    fn extreme_points_touch_margins() {
        let svg = plot_map(&solution(vec![vec![0.0, 0.0], vec![10.0, 0.0]]), None, (0, 1), 200, 100).unwrap();
        assert!(svg.contains("cx=\"10.00\" cy=\"50.00\""));
        assert!(svg.contains("cx=\"190.00\" cy=\"50.00\""));
    }

    #[test]
    fn dims_out_of_range() {
        let sol = solution(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(plot_map(&sol, None, (0, 9), 800, 600), Err(PlotError::Dimension { dim: 10, available: 2 }));
        assert!(plot_map(&sol, None, (0, 1), 10, 600).is_err());
    }

    #[test]
    fn two_leaf_dendrogram() {
        let dg = Dendrogram {
            labels: vec!["a".into(), "b".into()],
            linkage: semmap::cluster::Linkage::Average,
            merges: vec![Merge { left: 0, right: 1, height: 2.0, size: 2 }],
        };
        let svg = plot_dendrogram(&dg, 200, 100).unwrap();
        assert_eq!(svg.matches("<path d=\"M 10.00 85.00 V 5.00 H 190.00 V 85.00\"/>").count(), 1);
    }

    #[test]
    fn elbow_vertices() {
        let scan = ElbowScan { rows: (1..=4).map(|d| ElbowRow { dims: d, stress: 1.0 / d as f64 }).collect(), elbow: 2 };
        let svg = plot_elbow(&scan, 800, 600).unwrap();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let points = line.split('"').nth(1).unwrap();
        assert_eq!(points.split(' ').count(), 4);
    }

    #[test]
    fn escapes_labels() {
        let mut sol = solution(vec![vec![0.0, 0.0]]);
        sol.labels[0] = "a<b&c".into();
        let svg = plot_map(&sol, None, (0, 1), 800, 600).unwrap();
        assert!(svg.contains("<title>a&lt;b&amp;c</title>"));
    }
}
