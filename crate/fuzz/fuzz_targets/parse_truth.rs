#![no_main]

use libfuzzer_sys::fuzz_target;
use mosaic_core::io::{parse_truth, parse_truth_bytes, truth_to_string};

fuzz_target!(|data: &[u8]| {
    if let Ok(p) = parse_truth_bytes(data) {
        assert!(p.validate().is_ok());
        let back = parse_truth(&truth_to_string(&p)).expect("serialised truth parses");
        assert_eq!(back, p);
        // lookups must not panic anywhere in the domain
        let d = p.domain();
        for node in 0..p.num_nodes().min(8) {
            let _ = p.membership(node, d.start());
            let _ = p.membership(node, 0.5 * (d.start() + d.end()));
        }
    }
});
