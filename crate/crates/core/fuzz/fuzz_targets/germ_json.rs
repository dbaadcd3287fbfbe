#![no_main]

use algcurv::realization::parse_germ;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(germ) = parse_germ(text) {
        let again = parse_germ(&germ.to_json().to_string()).expect("round trip");
        assert_eq!(again.m(), germ.m());
    }
});
