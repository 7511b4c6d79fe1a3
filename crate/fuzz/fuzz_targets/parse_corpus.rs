#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::corpus::parse_corpus;

fuzz_target!(|text: &str| {
    if let Ok(table) = parse_corpus(text) {
        parse_corpus(&table.to_tsv()).expect("written corpus parses");
    }
});
