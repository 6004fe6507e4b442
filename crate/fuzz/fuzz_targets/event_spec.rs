#![no_main]
use libfuzzer_sys::fuzz_target;
use opcrit_core::oracle::parse_event;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(e) = parse_event(text) {
        assert_eq!(parse_event(&e.to_string()).unwrap(), e);
    }
});
