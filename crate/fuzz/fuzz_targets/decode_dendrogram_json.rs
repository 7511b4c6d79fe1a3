#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::cluster::Dendrogram;

fuzz_target!(|text: &str| {
    if let Ok(dendrogram) = Dendrogram::from_json(text) {
        Dendrogram::from_json(&dendrogram.to_json()).expect("written dendrogram decodes");
    }
});
