#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::mds::MdsSolution;

fuzz_target!(|text: &str| {
    if let Ok(solution) = MdsSolution::from_json(text) {
        MdsSolution::from_json(&solution.to_json()).expect("written solution decodes");
    }
});
