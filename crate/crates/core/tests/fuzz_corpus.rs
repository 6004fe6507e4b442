//! Replays the checked-in fuzz corpus through the same round-trip properties
//! the fuzz targets assert.

use std::fs;
use std::path::PathBuf;

use opcrit_core::oracle::parse_event;
use opcrit_core::qalg::{fmt_rat, parse_rational, PPoly, SeriesS};
use opcrit_core::walks::{LatticePoint, PointType};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files
        .iter()
        .map(|f| String::from_utf8_lossy(&fs::read(f).unwrap()).into_owned())
        .collect()
}

#[test]
fn rational_seeds_round_trip() {
    let mut parsed = 0;
    for text in seeds("parse_rational") {
        if let Ok(r) = parse_rational(&text) {
            assert_eq!(parse_rational(&fmt_rat(&r)).unwrap(), r);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn point_type_seeds_round_trip() {
    let mut parsed = 0;
    for text in seeds("point_type") {
        if let Ok(t) = PointType::parse(&text) {
            assert_eq!(PointType::parse(&t.to_string()).unwrap(), t);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn event_seeds_round_trip() {
    let mut parsed = 0;
    for text in seeds("event_spec") {
        if let Ok(e) = parse_event(&text) {
            assert_eq!(parse_event(&e.to_string()).unwrap(), e);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn series_seeds_round_trip() {
    let mut parsed = 0;
    for text in seeds("series_json") {
        if let Ok(s) = SeriesS::from_json(&text) {
            assert_eq!(SeriesS::from_json(&s.to_json()).unwrap(), s);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn ppoly_seeds_round_trip() {
    let mut parsed = 0;
    for text in seeds("ppoly_json") {
        if let Ok(p) = PPoly::from_json(&text) {
            assert_eq!(PPoly::from_json(&p.to_json()).unwrap(), p);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn lattice_point_seeds_round_trip() {
    let mut parsed = 0;
    for text in seeds("lattice_point") {
        if let Ok(x) = LatticePoint::parse(&text) {
            assert_eq!(LatticePoint::parse(&x.to_string()).unwrap(), x);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}
