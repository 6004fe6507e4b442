use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{fmt_terms, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    S,
    D,
    Q,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::S => "s",
            Var::D => "d",
            Var::Q => "q",
        }
    }
}

/// Dense univariate polynomial with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyVar {
    coeffs: Vec<Rational>,
    var: Var,
}

impl PolyVar {
    pub fn new(mut coeffs: Vec<Rational>, var: Var) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyVar { coeffs, var }
    }

    pub fn from_ints(coeffs: &[i64], var: Var) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect(), var)
    }

    pub fn zero(var: Var) -> Self {
        PolyVar {
            coeffs: Vec::new(),
            var,
        }
    }

    pub fn monomial(c: Rational, exp: usize, var: Var) -> Self {
        let mut coeffs = vec![Rational::zero(); exp + 1];
        coeffs[exp] = c;
        Self::new(coeffs, var)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, other: &PolyVar) -> PolyVar {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        PolyVar::new(coeffs, self.var)
    }

    pub fn sub(&self, other: &PolyVar) -> PolyVar {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> PolyVar {
        PolyVar::new(self.coeffs.iter().map(|x| x * c).collect(), self.var)
    }

    pub fn mul(&self, other: &PolyVar) -> PolyVar {
        if self.is_zero() || other.is_zero() {
            return PolyVar::zero(self.var);
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyVar::new(out, self.var)
    }

    /// Same coefficients, below `order` only.
    pub fn truncated(&self, order: usize) -> PolyVar {
        PolyVar::new(
            self.coeffs.iter().take(order + 1).cloned().collect(),
            self.var,
        )
    }
}

impl fmt::Display for PolyVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_terms(&self.coeffs, self.var.name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::rat;

    #[test]
    fn trims_and_evaluates() {
        let p = PolyVar::from_ints(&[0, 0, 3, -3, 0, 0], Var::S);
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.eval(&rat(1, 4)), rat(9, 64));
        assert_eq!(p.to_string(), "3*s^2 - 3*s^3");
    }

    #[test]
    fn multiplies() {
        let a = PolyVar::from_ints(&[1, 1], Var::S);
        let b = PolyVar::from_ints(&[1, -1], Var::S);
        assert_eq!(a.mul(&b), PolyVar::from_ints(&[1, 0, -1], Var::S));
        assert!(a.sub(&a).is_zero());
    }
}
