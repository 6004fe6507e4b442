#![no_main]
use libfuzzer_sys::fuzz_target;
use opcrit_core::walks::LatticePoint;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(x) = LatticePoint::parse(text) {
        assert_eq!(LatticePoint::parse(&x.to_string()).unwrap(), x);
    }
});
