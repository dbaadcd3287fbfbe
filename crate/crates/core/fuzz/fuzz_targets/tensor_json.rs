#![no_main]

use algcurv::tensor_core::io::{load_tensor, parse_tensor, tensor_to_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = parse_tensor(text) {
        // Whatever parses must survive a write/parse round trip.
        let again = parse_tensor(&tensor_to_string(doc.kind, &doc.tensor)).expect("round trip");
        assert_eq!(again.kind, doc.kind);
    }
    let _ = load_tensor(text);
});
