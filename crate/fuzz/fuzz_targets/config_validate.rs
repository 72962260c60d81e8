#![no_main]

use libfuzzer_sys::fuzz_target;
use seqlepski_cli::{ExperimentConfig, Overrides};

// Accepted configs must yield scenarios that the library can build grids for.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let overrides = [
        Overrides::default(),
        Overrides {
            replications: Some(1),
            seed: Some(0),
        },
    ];
    for o in overrides {
        if let Ok(cfg) = ExperimentConfig::parse(text, "fuzz", o) {
            for s in &cfg.scenarios {
                assert!(s.replications >= 1);
                for &n in &s.n_list {
                    s.grid.build(n).expect("validated grid");
                }
                let _ = s.lambda();
            }
        }
    }
});
