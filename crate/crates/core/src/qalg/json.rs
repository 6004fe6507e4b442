//! `{"var":"s","K":int,"coeffs":[["num","den"],…]}` encoding.

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{parse_decimal, PPoly, QalgError, Rational, SeriesS};

/// Refuse absurd truncation orders from untrusted input.
const MAX_DECODED_K: usize = 4096;

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    var: String,
    #[serde(rename = "K")]
    k: usize,
    coeffs: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
struct PPolyWire {
    var: String,
    #[serde(rename = "K")]
    k: usize,
    /// Coefficient series of `P^0, P^1, …`.
    pcoeffs: Vec<Vec<[String; 2]>>,
}

fn encode(c: &Rational) -> [String; 2] {
    [c.numer().to_string(), c.denom().to_string()]
}

fn decode(pair: &[String; 2]) -> Result<Rational, QalgError> {
    let num = parse_decimal(&pair[0])
        .ok_or_else(|| QalgError::Decode(format!("bad numerator {:?}", pair[0])))?;
    let den = parse_decimal(&pair[1])
        .ok_or_else(|| QalgError::Decode(format!("bad denominator {:?}", pair[1])))?;
    if den.is_zero() {
        return Err(QalgError::Decode("zero denominator".into()));
    }
    Ok(Rational::new(num, den))
}

fn decode_coeffs(var: &str, k: usize, coeffs: &[[String; 2]]) -> Result<SeriesS, QalgError> {
    if var != "s" {
        return Err(QalgError::Decode(format!("unsupported variable {var:?}")));
    }
    if k > MAX_DECODED_K {
        return Err(QalgError::Decode(format!("truncation order {k} too large")));
    }
    if coeffs.len() > k + 1 {
        return Err(QalgError::Decode(format!(
            "{} coefficients exceed order {k}",
            coeffs.len()
        )));
    }
    let values = coeffs.iter().map(decode).collect::<Result<Vec<_>, _>>()?;
    Ok(SeriesS::from_coeffs(values, k))
}

impl SeriesS {
    pub fn from_json(text: &str) -> Result<SeriesS, QalgError> {
        serde_json::from_str(text).map_err(|e| QalgError::Decode(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series encoding is infallible")
    }
}

impl PPoly {
    pub fn from_json(text: &str) -> Result<PPoly, QalgError> {
        serde_json::from_str(text).map_err(|e| QalgError::Decode(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("PPoly encoding is infallible")
    }
}

impl Serialize for SeriesS {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SeriesWire {
            var: "s".into(),
            k: self.order(),
            coeffs: self.coeffs().iter().map(encode).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SeriesS {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = SeriesWire::deserialize(de)?;
        decode_coeffs(&wire.var, wire.k, &wire.coeffs).map_err(D::Error::custom)
    }
}

impl Serialize for PPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PPolyWire {
            var: "s".into(),
            k: self.order(),
            pcoeffs: self
                .coeffs()
                .iter()
                .map(|c| c.coeffs().iter().map(encode).collect())
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = PPolyWire::deserialize(de)?;
        if wire.pcoeffs.len() > super::P_DEGREE_CAP + 1 {
            return Err(D::Error::custom(QalgError::PDegree(wire.pcoeffs.len() - 1)));
        }
        let mut terms = Vec::new();
        for (j, c) in wire.pcoeffs.iter().enumerate() {
            terms.push((
                j,
                decode_coeffs(&wire.var, wire.k, c).map_err(D::Error::custom)?,
            ));
        }
        PPoly::from_terms(terms, wire.k).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::rat;

    #[test]
    fn round_trips() {
        let a = SeriesS::from_coeffs(vec![rat(1, 1), rat(0, 1), rat(-7, 2)], 4);
        let text = a.to_json();
        assert_eq!(
            text,
            r#"{"var":"s","K":4,"coeffs":[["1","1"],["0","1"],["-7","2"],["0","1"],["0","1"]]}"#
        );
        assert_eq!(SeriesS::from_json(&text).unwrap(), a);

        let p = PPoly::term(3, a.clone())
            .unwrap()
            .add(&PPoly::from_series(a));
        assert_eq!(PPoly::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            r#"{"var":"q","K":1,"coeffs":[]}"#,
            r#"{"var":"s","K":0,"coeffs":[["1","1"],["1","1"]]}"#,
            r#"{"var":"s","K":1,"coeffs":[["1","0"]]}"#,
            r#"{"var":"s","K":1,"coeffs":[["1.5","1"]]}"#,
            r#"{"var":"s","K":99999999,"coeffs":[]}"#,
        ] {
            assert!(SeriesS::from_json(bad).is_err(), "{bad}");
        }
    }
}
