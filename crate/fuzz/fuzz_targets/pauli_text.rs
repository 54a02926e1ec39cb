#![no_main]

use eha_core::pauli::{parse_pauli_str, serialize_pauli_file};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(sum) = parse_pauli_str(text) {
        let again = parse_pauli_str(&serialize_pauli_file(&sum)).expect("serialized sum reparses");
        assert_eq!(again, sum);
    }
});
