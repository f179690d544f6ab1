#![no_main]

use libfuzzer_sys::fuzz_target;
use mosaic_core::io::{edges_to_string, parse_edges_bytes};

fuzz_target!(|data: &[u8]| {
    let Ok(edges) = parse_edges_bytes(data) else {
        return;
    };
    // whatever parses must survive a write/read cycle unchanged
    let text = edges_to_string(&edges);
    let again = parse_edges_bytes(text.as_bytes()).expect("serialised edges parse");
    assert_eq!(edges.len(), again.len());
    for (a, b) in edges.iter().zip(&again) {
        assert_eq!((a.u, a.v, a.t.to_bits()), (b.u, b.v, b.t.to_bits()));
    }
});
