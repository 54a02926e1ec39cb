#![no_main]

use eha_core::experiment::{check_row, Summary};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(summary) = serde_json::from_slice::<Summary>(data) {
        let _ = check_row(&summary);
    }
});
