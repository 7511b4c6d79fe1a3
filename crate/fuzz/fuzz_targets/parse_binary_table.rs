#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::corpus::parse_binary_table;

fuzz_target!(|text: &str| {
    if let Ok(table) = parse_binary_table(text) {
        parse_binary_table(&table.to_tsv()).expect("written table parses");
    }
});
