#![no_main]
use libfuzzer_sys::fuzz_target;
use opcrit_core::qalg::SeriesS;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = SeriesS::from_json(text) {
        assert_eq!(SeriesS::from_json(&s.to_json()).unwrap(), s);
    }
});
