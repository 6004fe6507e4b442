use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{fmt_terms, int, PolyVar, QalgError, Rational, Var};

/// Power series in `s` known exactly through order `K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeriesS {
    coeffs: Vec<Rational>,
    k: usize,
}

impl SeriesS {
    pub fn zero(k: usize) -> Self {
        SeriesS {
            coeffs: vec![Rational::zero(); k + 1],
            k,
        }
    }

    pub fn one(k: usize) -> Self {
        Self::constant(Rational::one(), k)
    }

    pub fn constant(c: Rational, k: usize) -> Self {
        let mut out = Self::zero(k);
        out.coeffs[0] = c;
        out
    }

    /// `c · s^exp`, vanishing if `exp > k`.
    pub fn monomial(c: Rational, exp: usize, k: usize) -> Self {
        let mut out = Self::zero(k);
        if exp <= k {
            out.coeffs[exp] = c;
        }
        out
    }

    /// Coefficients beyond `k` are dropped, missing ones read as zero.
    pub fn from_coeffs(coeffs: Vec<Rational>, k: usize) -> Self {
        let mut out = Self::zero(k);
        for (i, c) in coeffs.into_iter().enumerate().take(k + 1) {
            out.coeffs[i] = c;
        }
        out
    }

    pub fn from_ints(coeffs: &[i64], k: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect(), k)
    }

    pub fn from_poly(p: &PolyVar, k: usize) -> Self {
        Self::from_coeffs(p.coeffs().to_vec(), k)
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn to_poly(&self) -> PolyVar {
        PolyVar::new(self.coeffs.clone(), Var::S)
    }

    pub fn truncate(&self, k: usize) -> SeriesS {
        let k = k.min(self.k);
        SeriesS {
            coeffs: self.coeffs[..=k].to_vec(),
            k,
        }
    }

    pub fn scale(&self, c: &Rational) -> SeriesS {
        SeriesS {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            k: self.k,
        }
    }

    /// Multiply by `s^j`; the known range grows with it.
    pub fn shift_up(&self, j: usize) -> SeriesS {
        let mut coeffs = vec![Rational::zero(); j];
        coeffs.extend(self.coeffs.iter().cloned());
        SeriesS {
            coeffs,
            k: self.k + j,
        }
    }

    /// Divide by `s^j`; requires valuation ≥ j and loses `j` orders of precision.
    pub fn shift_down(&self, j: usize) -> Result<SeriesS, QalgError> {
        if j > self.k {
            return Err(QalgError::Precondition(format!(
                "cannot divide a series known to order {} by s^{j}",
                self.k
            )));
        }
        if self.coeffs[..j].iter().any(|c| !c.is_zero()) {
            return Err(QalgError::Precondition(format!(
                "division by s^{j} of a series with valuation < {j}"
            )));
        }
        Ok(SeriesS {
            coeffs: self.coeffs[j..].to_vec(),
            k: self.k - j,
        })
    }

    pub fn eval(&self, s: &Rational) -> Rational {
        self.to_poly().eval(s)
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * s + super::rat_to_f64(c))
    }

    /// `log(1 + a)`.
    pub fn log1p(&self) -> Result<SeriesS, QalgError> {
        if !self.coeffs[0].is_zero() {
            return Err(QalgError::Precondition(
                "log1p needs a zero constant term".into(),
            ));
        }
        let mut out = SeriesS::zero(self.k);
        let mut power = self.clone();
        for n in 1..=self.k {
            let sign = if n % 2 == 1 { int(1) } else { int(-1) };
            out = &out + &power.scale(&(sign / int(n as i64)));
            power = &power * self;
        }
        Ok(out)
    }

    /// `exp(a)`.
    pub fn exp(&self) -> Result<SeriesS, QalgError> {
        if !self.coeffs[0].is_zero() {
            return Err(QalgError::Precondition(
                "exp needs a zero constant term".into(),
            ));
        }
        let mut out = SeriesS::one(self.k);
        let mut term = SeriesS::one(self.k);
        for n in 1..=self.k {
            term = (&term * self).scale(&(int(1) / int(n as i64)));
            out = &out + &term;
        }
        Ok(out)
    }

    /// `(1 + a)^(1/s)`, i.e. `(1 + a)^(2d)`, as `exp(log(1 + a) / s)`.
    ///
    /// The stored coefficients of `a` are taken as an exact polynomial, so the
    /// logarithm is formed one order deeper before the division by `s`.
    pub fn pow_inv_s(&self) -> Result<SeriesS, QalgError> {
        if self.coeffs.iter().take(2).any(|c| !c.is_zero()) {
            return Err(QalgError::Precondition(
                "pow_inv_s needs valuation >= 2".into(),
            ));
        }
        let wide = SeriesS::from_coeffs(self.coeffs.clone(), self.k + 1);
        let log = wide.log1p()?.shift_down(1)?;
        log.exp()
    }
}

impl Add for &SeriesS {
    type Output = SeriesS;
    fn add(self, rhs: &SeriesS) -> SeriesS {
        let k = self.k.min(rhs.k);
        SeriesS {
            coeffs: (0..=k).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect(),
            k,
        }
    }
}

impl Sub for &SeriesS {
    type Output = SeriesS;
    fn sub(self, rhs: &SeriesS) -> SeriesS {
        let k = self.k.min(rhs.k);
        SeriesS {
            coeffs: (0..=k).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect(),
            k,
        }
    }
}

impl Neg for &SeriesS {
    type Output = SeriesS;
    fn neg(self) -> SeriesS {
        self.scale(&int(-1))
    }
}

impl Mul for &SeriesS {
    type Output = SeriesS;
    fn mul(self, rhs: &SeriesS) -> SeriesS {
        let k = self.k.min(rhs.k);
        let mut coeffs = vec![Rational::zero(); k + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(k + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(k + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        SeriesS { coeffs, k }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for SeriesS {
            type Output = SeriesS;
            fn $m(self, rhs: SeriesS) -> SeriesS {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for SeriesS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(s^{})", fmt_terms(&self.coeffs, "s"), self.k + 1)
    }
}
