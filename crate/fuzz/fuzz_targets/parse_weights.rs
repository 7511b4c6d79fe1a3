#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::dissim::parse_weights;

fuzz_target!(|text: &str| {
    let _ = parse_weights(text);
});
