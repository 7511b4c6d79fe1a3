use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semmap::corpus::{Cell, CorpusTable};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn semmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semmap")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = semmap(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn toy_corpus_to_map() {
    let dir = tempfile::tempdir().unwrap();
    let delta = dir.path().join("delta.tsv");
    let sol = dir.path().join("sol.json");
    let svg = dir.path().join("map.svg");
    let corpus = fixture("toy_corpus.tsv");
    assert_eq!(ok(&["dist", "hamming", p(&corpus), "-o", p(&delta)]), "items=6\n");
    assert!(ok(&["mds", "classic", "--dims", "2", p(&delta), "-o", p(&sol)]).starts_with("stress="));
    ok(&["plot", "map", p(&sol), "--corpus", p(&corpus), "--color-by", "en", "-o", p(&svg)]);
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 6);
    assert!(text.contains("dim 1 ("));
}

#[test]
fn weights_and_policies() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain.tsv");
    let weighted = dir.path().join("weighted.tsv");
    let corpus = fixture("toy_corpus.tsv");
    ok(&["dist", "hamming", p(&corpus), "--missing", "differ", "-o", p(&plain)]);
    ok(&["dist", "hamming", p(&corpus), "--missing", "differ", "--weights", p(&fixture("toy_weights.tsv")), "-o", p(&weighted)]);
    assert_ne!(fs::read(&plain).unwrap(), fs::read(&weighted).unwrap());
    let out = semmap(&["dist", "hamming", p(&corpus), "--mode", "feature", "-o", p(&plain)]);
    assert_eq!(out.status.code(), Some(1), "unannotated forms are a validation error");
}

#[test]
fn coexpression_and_languages() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.tsv");
    assert_eq!(ok(&["dist", "coexpr", p(&fixture("toy_forms.tsv")), "-o", p(&out)]), "items=4\n");
    assert!(fs::read_to_string(&out).unwrap().starts_with("past\tperfect\tpresent\tfuture\n"));
    assert_eq!(ok(&["dist", "language", p(&fixture("toy_corpus.tsv")), "-o", p(&out)]), "items=3\n");
}

#[test]
fn golden_dendrogram() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("tree.json");
    let svg = dir.path().join("tree.svg");
    ok(&["cluster", "hier", p(&fixture("four_point.tsv")), "--linkage", "average", "-o", p(&json)]);
    ok(&["plot", "dendrogram", p(&json), "-o", p(&svg)]);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/four_point_average.svg");
    assert_eq!(fs::read_to_string(&svg).unwrap(), fs::read_to_string(golden).unwrap());
}

#[test]
fn hier_cut_and_pam() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("tree.json");
    let cut = dir.path().join("cut.tsv");
    let pam = dir.path().join("pam.tsv");
    let input = fixture("four_point.tsv");
    assert_eq!(ok(&["cluster", "hier", p(&input), "--cut-k", "2", "--cut-out", p(&cut), "-o", p(&json)]), "merges=3 clusters=2\n");
    assert_eq!(fs::read_to_string(&cut).unwrap(), "label\tcluster\tis_medoid\np0\t0\t0\np1\t0\t0\np2\t1\t0\np3\t1\t0\n");
    assert!(ok(&["cluster", "pam", p(&input), "--k", "2", "-o", p(&pam)]).contains("silhouette="));
    assert_eq!(fs::read_to_string(&pam).unwrap(), "label\tcluster\tis_medoid\np0\t0\t1\np1\t0\t0\np2\t1\t1\np3\t1\t0\n");
    let out = semmap(&["cluster", "hier", p(&input), "--cut-k", "2", "-o", p(&json)]);
    assert_eq!(out.status.code(), Some(1));
}

/// Four tight groups at the corners of a tetrahedron, written as points.
fn blob_cloud() -> String {
    let centers = [[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [0.0, 10.0, 0.0], [0.0, 0.0, 10.0]];
    let mut text = String::from("x1\tx2\tx3\n");
    for (b, c) in centers.iter().enumerate() {
        for i in 0..15 {
            let j = (b * 15 + i) as f64;
            let off = [(j * 0.37).sin(), (j * 0.53).cos(), (j * 0.71).sin()];
            text.push_str(&format!("{}\t{}\t{}\n", c[0] + off[0], c[1] + off[1], c[2] + off[2]));
        }
    }
    text
}

#[test]
fn elbow_on_three_dimensional_blobs() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("cloud.tsv");
    let delta = dir.path().join("delta.tsv");
    let scan = dir.path().join("elbow.tsv");
    let svg = dir.path().join("elbow.svg");
    fs::write(&cloud, blob_cloud()).unwrap();
    // Every point within reach makes geodesic distances Euclidean.
    ok(&["dist", "geodesic", "--k", "59", p(&cloud), "-o", p(&delta)]);
    assert_eq!(ok(&["elbow", "--max-dims", "6", p(&delta), "-o", p(&scan)]), "elbow=3\n");
    ok(&["plot", "elbow", p(&scan), "-o", p(&svg)]);
    let text = fs::read_to_string(&svg).unwrap();
    let line = text.lines().find(|l| l.starts_with("<polyline")).unwrap();
    assert_eq!(line.split('"').nth(1).unwrap().split(' ').count(), 6);
}

#[test]
fn smacof_flags() {
    let dir = tempfile::tempdir().unwrap();
    let delta = dir.path().join("delta.tsv");
    let sol = dir.path().join("sol.json");
    ok(&["dist", "hamming", p(&fixture("toy_corpus.tsv")), "-o", p(&delta)]);
    let summary = ok(&["mds", "smacof", p(&delta), "--dims", "2", "--init", "random", "--seed", "7", "--max-iter", "5", "--eps", "1e-12", "-o", p(&sol)]);
    assert!(summary.contains("iterations=5"), "{summary}");
    let json = fs::read_to_string(&sol).unwrap();
    assert!(json.contains("\"engine\": \"smacof\""));
}

#[test]
fn seven_layers_differ_only_in_fill() {
    let dir = tempfile::tempdir().unwrap();
    let n_contexts = 40;
    let languages: Vec<String> = (0..7).map(|l| format!("L{l}")).collect();
    let cells = (0..n_contexts)
        .map(|c| (0..7).map(|l| if c < 10 + 4 * l { Cell::annotated("has done", "PERFECT") } else { Cell::annotated("did", "PAST") }).collect())
        .collect();
    let table = CorpusTable::new((0..n_contexts).map(|c| format!("c{c}")).collect(), languages.clone(), cells).unwrap();
    let corpus = dir.path().join("tense.tsv");
    fs::write(&corpus, table.to_tsv()).unwrap();
    let delta = dir.path().join("delta.tsv");
    let sol = dir.path().join("sol.json");
    ok(&["dist", "hamming", p(&corpus), "--mode", "feature", "-o", p(&delta)]);
    ok(&["mds", "classic", p(&delta), "-o", p(&sol)]);

    let strip = |s: &str| {
        let mut out = String::new();
        let mut rest = s;
        while let Some(i) = rest.find("fill=\"") {
            out.push_str(&rest[..i]);
            let after = &rest[i + 6..];
            rest = &after[after.find('"').unwrap() + 1..];
        }
        out.push_str(rest);
        out
    };
    let mut svgs = Vec::new();
    for lang in &languages {
        let svg = dir.path().join(format!("{lang}.svg"));
        ok(&["plot", "map", p(&sol), "--corpus", p(&corpus), "--color-by", lang, "--mode", "feature", "-o", p(&svg)]);
        svgs.push(fs::read_to_string(&svg).unwrap());
    }
    for svg in &svgs[1..] {
        assert_ne!(svg, &svgs[0]);
        assert_eq!(strip(svg), strip(&svgs[0]));
    }

    let report = dir.path().join("subset.tsv");
    assert_eq!(ok(&["interpret", "subset", p(&corpus), "--category", "PERFECT", "-o", p(&report)]), "chain=L0<L1<L2<L3<L4<L5<L6 violations=0\n");
}

#[test]
fn regression_command() {
    let dir = tempfile::tempdir().unwrap();
    let delta = dir.path().join("delta.tsv");
    let sol = dir.path().join("sol.json");
    let ann = dir.path().join("ann.tsv");
    let report = dir.path().join("report.tsv");
    ok(&["dist", "hamming", p(&fixture("toy_corpus.tsv")), "-o", p(&delta)]);
    ok(&["mds", "classic", p(&delta), "-o", p(&sol)]);
    fs::write(&ann, "label\tpast\tfuture\nc1\t1\t0\nc2\t0\t0\nc3\t1\t0\nc4\t0\t0\nc5\t0\t1\nc6\t0\t0\n").unwrap();
    assert!(ok(&["interpret", "regress", p(&sol), "--annotations", p(&ann), "-o", p(&report)]).starts_with("top=dim"));
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(text.lines().count(), 2 + 4);
}

#[test]
fn dims_pair_selects_columns() {
    let dir = tempfile::tempdir().unwrap();
    let delta = dir.path().join("delta.tsv");
    let sol = dir.path().join("sol.json");
    let svg = dir.path().join("map.svg");
    ok(&["dist", "hamming", p(&fixture("toy_corpus.tsv")), "-o", p(&delta)]);
    ok(&["mds", "classic", "--dims", "3", p(&delta), "-o", p(&sol)]);
    ok(&["plot", "map", p(&sol), "--dims", "1,3", "-o", p(&svg)]);
    assert!(fs::read_to_string(&svg).unwrap().contains(">dim 3 ("));
    assert_eq!(semmap(&["plot", "map", p(&sol), "--dims", "1,4", "-o", p(&svg)]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    assert_eq!(semmap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(semmap(&["--version"]).status.code(), Some(0));
    assert_eq!(semmap(&["mds", "classic", "/nonexistent.tsv", "-o", p(&out)]).status.code(), Some(1));

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "a\tb\n0\t1\n2\t0\n").unwrap();
    let res = semmap(&["mds", "classic", p(&bad), "-o", p(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("bad.tsv"));

    let cloud = dir.path().join("cloud.tsv");
    fs::write(&cloud, "x1\n0\n1\n10\n11\n").unwrap();
    let res = semmap(&["dist", "geodesic", "--k", "1", p(&cloud), "-o", p(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("[2, 2]"));
    assert!(!out.exists(), "failed commands write nothing");
}
