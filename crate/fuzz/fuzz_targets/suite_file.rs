#![no_main]

use eha_core::experiment::parse_suite;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(suite) = parse_suite(text) {
        assert!(!suite.variants.is_empty());
        for v in &suite.variants {
            v.validate().expect("suite variants are validated");
        }
    }
});
