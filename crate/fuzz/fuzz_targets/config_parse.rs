#![no_main]

use libfuzzer_sys::fuzz_target;
use seqlepski_cli::{ExperimentConfig, Overrides};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = ExperimentConfig::parse(text, "fuzz", Overrides::default());
    }
});
