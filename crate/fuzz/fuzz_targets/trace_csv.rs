#![no_main]

use eha_core::optimize::read_trace_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_trace_csv(data) {
        for r in &records {
            assert_eq!(r.cost.to_bits(), r.energy.to_bits());
        }
    }
});
