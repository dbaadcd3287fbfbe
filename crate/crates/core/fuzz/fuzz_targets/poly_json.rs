#![no_main]

use algcurv::realization::{parse_polynomial, parse_polynomial_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = parse_polynomial(text) {
        let _ = p.derivative(0);
    }
    let _ = parse_polynomial_list(text);
});
