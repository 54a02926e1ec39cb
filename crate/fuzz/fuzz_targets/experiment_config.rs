#![no_main]

use eha_core::experiment::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(cfg) = ExperimentConfig::from_toml_str(text) {
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().expect("valid config serializes"))
            .expect("serialized config reparses");
        assert_eq!(back, cfg);
    }
});
