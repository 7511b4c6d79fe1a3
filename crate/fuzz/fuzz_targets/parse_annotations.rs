#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::interpret::parse_annotations;

fuzz_target!(|text: &str| {
    let _ = parse_annotations(text);
});
