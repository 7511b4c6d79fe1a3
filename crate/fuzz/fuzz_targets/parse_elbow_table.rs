#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::mds::parse_elbow_table;

fuzz_target!(|text: &str| {
    if let Ok(scan) = parse_elbow_table(text) {
        parse_elbow_table(&scan.to_tsv()).expect("written scan parses");
    }
});
