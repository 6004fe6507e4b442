//! Exact arithmetic: rationals, dense polynomials, truncated power series in
//! `s = 1/(2d)`, polynomials in the occupation symbol `P`, and interpolation.

mod interp;
mod json;
mod poly;
mod ppoly;
mod series;

pub use interp::lagrange_interpolate;
pub use poly::{PolyVar, Var};
pub use ppoly::{PPoly, UnityMismatch, P_DEGREE_CAP};
pub use series::SeriesS;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always stored in lowest terms.
pub type Rational = num_rational::BigRational;

/// Default truncation order for series.
pub const DEFAULT_K: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QalgError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("duplicate interpolation node {0}")]
    DuplicateNode(String),
    #[error("point ({x}, {y}) is off the interpolating polynomial of degree {degree}")]
    OffCurve { x: String, y: String, degree: usize },
    #[error("P-degree {0} exceeds the cap {P_DEGREE_CAP}")]
    PDegree(usize),
    #[error("malformed series encoding: {0}")]
    Decode(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Binomial coefficient as a rational.
pub fn binom(n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * int((n - i) as i64) / int((i + 1) as i64);
    }
    acc
}

/// `num/den` or a bare integer, as used on the command line.
pub fn parse_rational(text: &str) -> Result<Rational, QalgError> {
    let text = text.trim();
    let bad = || QalgError::Decode(format!("not a rational: {text:?}"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = parse_decimal(n).ok_or_else(bad)?;
    let den: BigInt = parse_decimal(d).ok_or_else(bad)?;
    if den.is_zero() {
        return Err(QalgError::Decode(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Decimal integer with optional sign; rejects anything else, including empty input.
pub(crate) fn parse_decimal(text: &str) -> Option<BigInt> {
    let digits = text
        .strip_prefix('-')
        .or_else(|| text.strip_prefix('+'))
        .unwrap_or(text);
    if digits.is_empty() || digits.len() > 4096 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            // Scale both parts down to avoid overflow for huge operands.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Compact text form: `3`, `-7/2`.
pub fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn fmt_terms(coeffs: &[Rational], var: &str) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if mono.is_empty() {
            out.push_str(&fmt_rat(&mag));
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}*{mono}", fmt_rat(&mag)));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
