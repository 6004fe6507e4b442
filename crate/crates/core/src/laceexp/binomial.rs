//! Closed forms for the time-2 origin coefficients from the binomial count
//! of open two-step paths.

use super::LaceError;
use crate::qalg::{int, PPoly, Rational, SeriesS};
use num_traits::{One, Zero};

/// `Σ_{k≥2} (−1)^k w(k) C(N,k) r^k` with `N = 1/s`, `r = P²s²`, as a `PPoly`.
fn alternating_sum(k_order: usize, weight: impl Fn(i64) -> i64) -> Result<PPoly, LaceError> {
    let mut out = PPoly::zero(k_order);
    for k in 2..=k_order {
        // C(N,k) r^k = P^{2k} s^k Π_{i<k}(1 − i s) / k!
        let mut prod = SeriesS::one(k_order);
        for i in 1..k {
            prod = &prod * &SeriesS::from_coeffs(vec![int(1), int(-(i as i64))], k_order);
        }
        let fact: i64 = (1..=k as i64).product();
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let c = Rational::new((sign * weight(k as i64)).into(), fact.into());
        out = out.add(&PPoly::term(
            2 * k,
            prod.shift_up(k).truncate(k_order).scale(&c),
        )?);
    }
    Ok(out)
}

/// `P(Bin(2d, p²s²) ≥ 2)` for generic `d`, in the formal symbol `P`.
pub fn binomial_pi0_origin(k: usize) -> Result<PPoly, LaceError> {
    alternating_sum(k, |k| k - 1)
}

/// `E[K·1{K ≥ 2}]` for `K ~ Bin(2d, p²s²)`: the marked-bond sum at the origin.
pub fn binomial_pi1_origin(k: usize) -> Result<PPoly, LaceError> {
    alternating_sum(k, |k| k)
}

/// The same probability at a rational `p` through `series_pow_inv_s`:
/// `1 − (1−r)^{1/s} − (p²s)(1−r)^{1/s}/(1−r)`.
pub fn binomial_pi0_series(p: &Rational, k: usize) -> Result<SeriesS, LaceError> {
    let p2 = p * p;
    let r = SeriesS::monomial(p2.clone(), 2, k);
    let all_closed = (-&r).pow_inv_s()?;
    let mut inv = SeriesS::one(k);
    let mut pow = SeriesS::one(k);
    for _ in 0..k {
        pow = &pow * &r;
        inv = &inv + &pow;
    }
    let one_open = &(&all_closed * &inv) * &SeriesS::monomial(p2, 1, k);
    Ok(&(&SeriesS::one(k) - &all_closed) - &one_open)
}

/// `1 − (1−q)^{2d} − 2dq(1−q)^{2d−1}` with `q = p²/(2d)²`.
pub fn binomial_pi0_concrete(p: &Rational, d: usize) -> Rational {
    let n = 2 * d as i64;
    let q = p * p / int(n * n);
    let closed = Rational::one() - &q;
    let mut pow = Rational::one();
    for _ in 0..n - 1 {
        pow *= &closed;
    }
    let none = &pow * &closed;
    let one = int(n) * &q * &pow;
    let out = Rational::one() - none - one;
    if out.is_zero() {
        Rational::zero()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::rat;

    #[test]
    fn concrete_values() {
        assert_eq!(binomial_pi0_concrete(&int(1), 1), rat(1, 16));
        assert_eq!(binomial_pi0_concrete(&int(0), 4), int(0));
    }

    #[test]
    fn generic_third_order() {
        let g = binomial_pi0_origin(4).unwrap();
        assert_eq!(g.coeff(4).coeff(2), rat(1, 2));
        assert_eq!(g.coeff(4).coeff(3), rat(-1, 2));
        assert_eq!(g.coeff(6).coeff(3), rat(-1, 3));
        assert_eq!(g.coeff(6).coeff(4), int(1));
        assert_eq!(g.coeff(8).coeff(4), rat(1, 8));
    }

    #[test]
    fn two_routes_agree() {
        for p in [rat(1, 2), int(1), rat(101, 100)] {
            let a = binomial_pi0_origin(5).unwrap().eval_p(&p);
            let b = binomial_pi0_series(&p, 5).unwrap();
            assert_eq!(a, b, "p = {p}");
        }
    }
}
