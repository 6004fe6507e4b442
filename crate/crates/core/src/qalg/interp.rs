use num_traits::Zero;

use super::{fmt_rat, PolyVar, QalgError, Rational, Var};

/// Unique polynomial of degree ≤ `degree_bound` through the first
/// `degree_bound + 1` points; every further point must lie on it.
pub fn lagrange_interpolate(
    points: &[(Rational, Rational)],
    degree_bound: usize,
    var: Var,
) -> Result<PolyVar, QalgError> {
    let n = degree_bound + 1;
    if points.len() < n {
        return Err(QalgError::Precondition(format!(
            "{} points cannot fix a degree-{degree_bound} polynomial",
            points.len()
        )));
    }
    for (i, (xi, _)) in points.iter().enumerate() {
        if points[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(QalgError::DuplicateNode(fmt_rat(xi)));
        }
    }

    // Newton divided differences, then expansion into the monomial basis.
    let xs: Vec<&Rational> = points[..n].iter().map(|(x, _)| x).collect();
    let mut table: Vec<Rational> = points[..n].iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            table[i] = (&table[i] - &table[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut coeffs = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        // coeffs <- coeffs * (x - xs[i]) + table[i]
        let mut next = vec![Rational::zero(); n];
        for j in 0..n {
            if coeffs[j].is_zero() {
                continue;
            }
            if j + 1 < n {
                next[j + 1] += &coeffs[j];
            }
            next[j] -= &coeffs[j] * xs[i];
        }
        next[0] += &table[i];
        coeffs = next;
    }
    let poly = PolyVar::new(coeffs, var);

    for (x, y) in &points[n..] {
        if &poly.eval(x) != y {
            return Err(QalgError::OffCurve {
                x: fmt_rat(x),
                y: fmt_rat(y),
                degree: degree_bound,
            });
        }
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::{int, rat};

    #[test]
    fn fits_examples() {
        let line = lagrange_interpolate(&[(int(0), int(1)), (int(1), int(3))], 1, Var::S).unwrap();
        assert_eq!(line, PolyVar::from_ints(&[1, 2], Var::S));
        let sq: Vec<_> = (0..3).map(|x| (int(x), int(x * x))).collect();
        assert_eq!(
            lagrange_interpolate(&sq, 2, Var::S).unwrap(),
            PolyVar::from_ints(&[0, 0, 1], Var::S)
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            lagrange_interpolate(&[(int(1), int(1)), (int(1), int(2))], 1, Var::S),
            Err(QalgError::DuplicateNode(_))
        ));
        let pts = vec![(int(0), int(0)), (int(1), int(1)), (int(2), int(4))];
        assert!(matches!(
            lagrange_interpolate(&pts, 1, Var::S),
            Err(QalgError::OffCurve { .. })
        ));
        assert!(lagrange_interpolate(&pts[..1], 1, Var::S).is_err());
    }

    #[test]
    fn walk_count_fit() {
        // 3-step walks to e1: (6d - 3) / (2d)^3.
        let pts: Vec<_> = (1..=5)
            .map(|d: i64| (rat(1, 2 * d), rat(6 * d - 3, 8 * d * d * d)))
            .collect();
        let p = lagrange_interpolate(&pts, 3, Var::S).unwrap();
        assert_eq!(p, PolyVar::from_ints(&[0, 0, 3, -3], Var::S));
    }
}
