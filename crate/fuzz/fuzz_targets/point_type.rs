#![no_main]
use libfuzzer_sys::fuzz_target;
use opcrit_core::walks::PointType;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = PointType::parse(text) {
        assert_eq!(PointType::parse(&t.to_string()).unwrap(), t);
    }
});
