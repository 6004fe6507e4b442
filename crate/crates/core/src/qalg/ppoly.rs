use std::fmt;

use num_traits::Zero;

use super::{binom, fmt_terms, QalgError, Rational, SeriesS};

/// Largest power of `P` any formula in scope may carry.
pub const P_DEGREE_CAP: usize = 10;

/// Polynomial in the formal symbol `P` with `SeriesS` coefficients of a common order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PPoly {
    coeffs: Vec<SeriesS>,
    k: usize,
}

/// First coefficient where two `PPoly` values differ once `P = 1 + O(s²)` is used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnityMismatch {
    pub s_order: usize,
    pub delta_degree: usize,
    pub delta: Rational,
}

impl PPoly {
    pub fn zero(k: usize) -> Self {
        PPoly {
            coeffs: Vec::new(),
            k,
        }
    }

    pub fn from_series(c: SeriesS) -> Self {
        let k = c.order();
        PPoly { coeffs: vec![c], k }.trimmed()
    }

    /// `P^j · c`.
    pub fn term(j: usize, c: SeriesS) -> Result<Self, QalgError> {
        if j > P_DEGREE_CAP {
            return Err(QalgError::PDegree(j));
        }
        let k = c.order();
        let mut coeffs = vec![SeriesS::zero(k); j];
        coeffs.push(c);
        Ok(PPoly { coeffs, k }.trimmed())
    }

    /// Sum of `P^j · c_j` terms; all series are cut to the smallest order present.
    pub fn from_terms(terms: Vec<(usize, SeriesS)>, k: usize) -> Result<Self, QalgError> {
        let mut out = PPoly::zero(k);
        for (j, c) in terms {
            out = out.add(&PPoly::term(j, c)?);
        }
        Ok(out)
    }

    fn trimmed(mut self) -> Self {
        for c in &mut self.coeffs {
            *c = c.truncate(self.k);
        }
        while self.coeffs.last().is_some_and(SeriesS::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn p_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, j: usize) -> SeriesS {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| SeriesS::zero(self.k))
    }

    pub fn coeffs(&self) -> &[SeriesS] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, k: usize) -> PPoly {
        PPoly {
            coeffs: self.coeffs.clone(),
            k: k.min(self.k),
        }
        .trimmed()
    }

    pub fn add(&self, other: &PPoly) -> PPoly {
        let k = self.k.min(other.k);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|j| &self.coeff(j).truncate(k) + &other.coeff(j).truncate(k))
            .collect();
        PPoly { coeffs, k }.trimmed()
    }

    pub fn sub(&self, other: &PPoly) -> PPoly {
        self.add(&other.scale(&super::int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> PPoly {
        PPoly {
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
            k: self.k,
        }
        .trimmed()
    }

    pub fn mul_series(&self, c: &SeriesS) -> PPoly {
        let k = self.k.min(c.order());
        PPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            k,
        }
        .trimmed()
    }

    pub fn mul(&self, other: &PPoly) -> Result<PPoly, QalgError> {
        let k = self.k.min(other.k);
        if self.is_zero() || other.is_zero() {
            return Ok(PPoly::zero(k));
        }
        let deg = self.coeffs.len() + other.coeffs.len() - 2;
        if deg > P_DEGREE_CAP {
            return Err(QalgError::PDegree(deg));
        }
        let mut coeffs = vec![SeriesS::zero(k); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        Ok(PPoly { coeffs, k }.trimmed())
    }

    /// Multiply by `P^j`.
    pub fn mul_p(&self, j: usize) -> Result<PPoly, QalgError> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let deg = self.coeffs.len() - 1 + j;
        if deg > P_DEGREE_CAP {
            return Err(QalgError::PDegree(deg));
        }
        let mut coeffs = vec![SeriesS::zero(self.k); j];
        coeffs.extend(self.coeffs.iter().cloned());
        Ok(PPoly { coeffs, k: self.k })
    }

    /// Divide every coefficient by `s^j`.
    pub fn shift_down(&self, j: usize) -> Result<PPoly, QalgError> {
        if j > self.k {
            return Err(QalgError::Precondition(format!(
                "cannot divide a PPoly known to order {} by s^{j}",
                self.k
            )));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.shift_down(j))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PPoly {
            coeffs,
            k: self.k - j,
        }
        .trimmed())
    }

    /// Replace `P` by the series `g` (Horner), truncated at `min(K_f, K_g)`.
    pub fn subst(&self, g: &SeriesS) -> SeriesS {
        let k = self.k.min(g.order());
        let mut acc = SeriesS::zero(k);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + c;
        }
        acc.truncate(k)
    }

    pub fn eval_p(&self, p: &Rational) -> SeriesS {
        self.subst(&SeriesS::constant(p.clone(), self.k))
    }

    /// Coefficients of `s^j δ^m` after writing `P = 1 + δ`, for `2m + j ≤ order`.
    ///
    /// Since `p_c = 1 + O(s²)`, two expressions with equal reduced coefficients
    /// agree through `s^order` once `P` is set to `p_c`.
    pub fn unity_reduced(&self, order: usize) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for j in 0..=order.min(self.k) {
            for m in 0..=(order - j) / 2 {
                let mut acc = Rational::zero();
                for (i, c) in self.coeffs.iter().enumerate() {
                    if i >= m {
                        acc += binom(i, m) * c.coeff(j);
                    }
                }
                out.push((j, m, acc));
            }
        }
        out
    }

    /// `None` when `self` and `other` agree through `s^order` under `P = 1 + O(s²)`.
    pub fn unity_mismatch(&self, other: &PPoly, order: usize) -> Option<UnityMismatch> {
        let order = order.min(self.k).min(other.k);
        self.sub(other)
            .unity_reduced(order)
            .into_iter()
            .find(|(_, _, c)| !c.is_zero())
            .map(|(s_order, delta_degree, delta)| UnityMismatch {
                s_order,
                delta_degree,
                delta,
            })
    }

    /// Coefficient of `s^j` as a polynomial in `P`.
    pub fn s_coeff(&self, j: usize) -> Vec<Rational> {
        self.coeffs.iter().map(|c| c.coeff(j)).collect()
    }
}

impl fmt::Display for PPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for j in 0..=self.k {
            let pc = self.s_coeff(j);
            if pc.iter().all(Zero::is_zero) {
                continue;
            }
            let mono = match j {
                0 => String::new(),
                1 => "*s".into(),
                _ => format!("*s^{j}"),
            };
            parts.push(format!("({}){mono}", fmt_terms(&pc, "P")));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{} + O(s^{})", parts.join(" + "), self.k + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::{int, rat};

    fn ser(c: &[(i64, i64)], k: usize) -> SeriesS {
        SeriesS::from_coeffs(c.iter().map(|&(n, d)| rat(n, d)).collect(), k)
    }

    #[test]
    fn substitution_examples() {
        let p2 = PPoly::term(2, SeriesS::one(4)).unwrap();
        let g = SeriesS::from_ints(&[1, 0, 1], 4);
        assert_eq!(p2.subst(&g), SeriesS::from_ints(&[1, 0, 2, 0, 1], 4));

        let f = PPoly::term(5, SeriesS::from_ints(&[0, 0, 1], 4)).unwrap();
        let g = ser(&[(1, 1), (0, 1), (1, 1), (7, 2)], 4);
        assert_eq!(f.subst(&g), SeriesS::from_ints(&[0, 0, 1, 0, 5], 4));

        let c = ser(&[(1, 1), (2, 3)], 4);
        assert_eq!(PPoly::from_series(c.clone()).subst(&g), c);
    }

    #[test]
    fn degree_cap() {
        let a = PPoly::term(6, SeriesS::one(2)).unwrap();
        assert!(a.mul(&a).is_err());
        assert!(PPoly::term(11, SeriesS::one(2)).is_err());
    }

    #[test]
    fn unity_equivalence() {
        // -16 - 9 P^6 at s^4 agrees with -25 at s^4 through order 4.
        let a = PPoly::from_terms(
            vec![
                (0, SeriesS::monomial(int(-16), 4, 4)),
                (6, SeriesS::monomial(int(-9), 4, 4)),
            ],
            4,
        )
        .unwrap();
        let b = PPoly::from_series(SeriesS::monomial(int(-25), 4, 4));
        assert_eq!(a.unity_mismatch(&b, 4), None);
        // P^4 s^2 is not 1·s^2 through order 4.
        let c = PPoly::term(4, SeriesS::monomial(int(1), 2, 4)).unwrap();
        let e = PPoly::from_series(SeriesS::monomial(int(1), 2, 4));
        let m = c.unity_mismatch(&e, 4).unwrap();
        assert_eq!((m.s_order, m.delta_degree, m.delta), (2, 1, int(4)));
        assert_eq!(c.unity_mismatch(&e, 3), None);
    }
}
