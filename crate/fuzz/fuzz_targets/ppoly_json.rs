#![no_main]
use libfuzzer_sys::fuzz_target;
use opcrit_core::qalg::PPoly;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = PPoly::from_json(text) {
        assert_eq!(PPoly::from_json(&p.to_json()).unwrap(), p);
    }
});
