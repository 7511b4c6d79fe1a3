#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::dissim::parse_dissimilarity;

fuzz_target!(|text: &str| {
    if let Ok(delta) = parse_dissimilarity(text) {
        parse_dissimilarity(&delta.to_tsv()).expect("written matrix parses");
    }
});
