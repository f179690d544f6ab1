#![no_main]

use libfuzzer_sys::fuzz_target;
use mosaic_core::io::{labels_to_string, parse_labels, parse_labels_bytes};

fuzz_target!(|data: &[u8]| {
    // first byte picks the node count so short inputs can still be complete
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    let n = usize::from(n % 16);
    if let Ok(d) = parse_labels_bytes(rest, n) {
        let text = labels_to_string(&d);
        assert_eq!(parse_labels(&text, n).expect("serialised labels parse"), d);
    }
});
