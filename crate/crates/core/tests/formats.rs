//! Every reader accepts what the matching writer produces, starting from the
//! fuzz seed corpora and from random edits of them.

use std::fs;
use std::path::Path;

use proptest::prelude::*;
use semmap::cluster::Dendrogram;
use semmap::corpus::{parse_binary_table, parse_corpus, parse_point_cloud};
use semmap::dissim::parse_dissimilarity;
use semmap::mds::{parse_elbow_table, MdsSolution};

type Cycle = fn(&str) -> Option<String>;

const CYCLES: [(&str, Cycle); 7] = [
    ("parse_binary_table", |t| parse_binary_table(t).ok().map(|x| x.to_tsv())),
    ("parse_corpus", |t| parse_corpus(t).ok().map(|x| x.to_tsv())),
    ("parse_point_cloud", |t| parse_point_cloud(t).ok().map(|x| x.to_tsv())),
    ("parse_dissimilarity", |t| parse_dissimilarity(t).ok().map(|x| x.to_tsv())),
    ("parse_elbow_table", |t| parse_elbow_table(t).ok().map(|x| x.to_tsv())),
    ("decode_solution_json", |t| MdsSolution::from_json(t).ok().map(|x| x.to_json())),
    ("decode_dendrogram_json", |t| Dendrogram::from_json(t).ok().map(|x| x.to_json())),
];

fn seeds(target: &str) -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut paths: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths.iter().map(|p| fs::read_to_string(p).unwrap()).collect()
}

/// Written output parses again and is a fixed point of the cycle.
fn check(cycle: Cycle, text: &str) -> Result<(), String> {
    let Some(first) = cycle(text) else { return Ok(()) };
    let second = cycle(&first).ok_or_else(|| format!("written form rejected:\n{first}"))?;
    if first != second {
        return Err(format!("not a fixed point:\n{first}\n---\n{second}"));
    }
    Ok(())
}

#[test]
fn seeds_are_accepted_and_stable() {
    for (target, cycle) in CYCLES {
        let texts = seeds(target);
        assert!(!texts.is_empty(), "{target} has no seeds");
        for text in texts {
            assert!(cycle(&text).is_some(), "{target} rejects its seed:\n{text}");
            check(cycle, &text).unwrap();
        }
    }
}

#[derive(Debug, Clone)]
enum Edit {
    Delete(usize),
    Insert(usize, char),
}

fn edits() -> impl Strategy<Value = Vec<Edit>> {
    let ch = prop::sample::select(vec!['\t', '\n', '0', '1', '-', '.', 'e', 'a', ' ', '"', '{', ',']);
    prop::collection::vec(prop_oneof![any::<usize>().prop_map(Edit::Delete), (any::<usize>(), ch).prop_map(|(i, c)| Edit::Insert(i, c))], 1..4)
}

fn apply(text: &str, edits: &[Edit]) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for e in edits {
        match *e {
            Edit::Delete(i) if !chars.is_empty() => {
                let i = i % chars.len();
                chars.remove(i);
            }
            Edit::Insert(i, c) => {
                let i = i % (chars.len() + 1);
                chars.insert(i, c);
            }
            Edit::Delete(_) => {}
        }
    }
    chars.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn edited_seeds_round_trip(which in 0..CYCLES.len(), pick in any::<usize>(), edits in edits()) {
        let (target, cycle) = CYCLES[which];
        let texts = seeds(target);
        let text = apply(&texts[pick % texts.len()], &edits);
        prop_assert!(check(cycle, &text).is_ok(), "{target}: {}", check(cycle, &text).unwrap_err());
    }
}
