#![no_main]

use libfuzzer_sys::fuzz_target;
use semmap::corpus::parse_point_cloud;

fuzz_target!(|text: &str| {
    if let Ok(cloud) = parse_point_cloud(text) {
        parse_point_cloud(&cloud.to_tsv()).expect("written cloud parses");
    }
});
