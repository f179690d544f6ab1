#![no_main]

use libfuzzer_sys::fuzz_target;
use mosaic_core::config::{parse_config_bytes, RunConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(cfg) = parse_config_bytes(data) {
        let back = RunConfig::from_json(&cfg.to_json()).expect("serialised config parses");
        assert_eq!(back, cfg);
    }
});
