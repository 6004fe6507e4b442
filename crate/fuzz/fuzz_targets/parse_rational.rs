#![no_main]
use libfuzzer_sys::fuzz_target;
use opcrit_core::qalg::{fmt_rat, parse_rational};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rational(text) {
        assert_eq!(parse_rational(&fmt_rat(&r)).unwrap(), r);
    }
});
