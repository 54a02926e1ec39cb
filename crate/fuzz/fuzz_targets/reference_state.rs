#![no_main]

use eha_core::statevec::{parse_basis_string, prepare_reference};
use eha_core::ReferenceState;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(index) = parse_basis_string(text) {
        assert!(index >> text.len().min(63) == 0);
    }
    if let Ok(kind) = text.parse::<ReferenceState>() {
        for n in 1..=8 {
            if let Ok(state) = prepare_reference(&kind, n) {
                assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
            }
        }
    }
});
