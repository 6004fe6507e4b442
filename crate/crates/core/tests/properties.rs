//! Algebraic and combinatorial invariants on random inputs.

use std::collections::HashMap;

use num_traits::Zero;
use proptest::prelude::*;

use opcrit_core::diagrams::two_paths_t2;
use opcrit_core::laceexp::{pc_fixed_point, pi_total, pi_totals, Mode};
use opcrit_core::qalg::{
    int, lagrange_interpolate, parse_rational, rat, PPoly, PolyVar, Rational, SeriesS, Var,
};
use opcrit_core::walks::{
    dconv_concrete, dconv_generic, orbit_count, slice_points, PointType, Site, WalkTable,
};

fn coeff() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn series(k: usize) -> impl Strategy<Value = SeriesS> {
    prop::collection::vec(coeff(), 0..=k + 1).prop_map(move |c| SeriesS::from_coeffs(c, k))
}

fn triple() -> impl Strategy<Value = (SeriesS, SeriesS, SeriesS)> {
    (0usize..6).prop_flat_map(|k| (series(k), series(k), series(k)))
}

fn no_constant(a: &SeriesS) -> SeriesS {
    let mut c = a.coeffs().to_vec();
    if let Some(first) = c.first_mut() {
        *first = int(0);
    }
    SeriesS::from_coeffs(c, a.order())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn exp_and_log_invert((a, _, _) in triple()) {
        let a = no_constant(&a);
        let one = SeriesS::one(a.order());
        prop_assert_eq!(a.log1p().unwrap().exp().unwrap(), &one + &a);
        prop_assert_eq!((&a.exp().unwrap() - &one).log1p().unwrap(), a);
    }

    #[test]
    fn interpolation_reproduces_inputs(
        xs in prop::collection::btree_set(-20i64..20, 1..7),
        ys in prop::collection::vec(coeff(), 7),
    ) {
        let points: Vec<(Rational, Rational)> =
            xs.iter().zip(&ys).map(|(&x, y)| (rat(x, 3), y.clone())).collect();
        let poly = lagrange_interpolate(&points, points.len() - 1, Var::S).unwrap();
        for (x, y) in &points {
            prop_assert_eq!(&poly.eval(x), y);
        }
    }

    #[test]
    fn parsed_rationals_are_reduced(n in -1000i64..1000, d in 1i64..1000, k in 1i64..50) {
        let r = parse_rational(&format!("{}/{}", n * k, d * k)).unwrap();
        prop_assert_eq!(&r, &rat(n, d));
        prop_assert!(r.denom() > &num_bigint::BigInt::zero());
        let renormalized = Rational::new(r.numer().clone(), r.denom().clone());
        prop_assert_eq!(renormalized.numer(), r.numer());
    }

    #[test]
    fn polynomials_stay_trimmed(c in prop::collection::vec(-3i64..=3, 0..8), zeros in 0usize..4) {
        let mut padded = c.clone();
        padded.extend(std::iter::repeat(0).take(zeros));
        let p = PolyVar::from_ints(&padded, Var::S);
        prop_assert_eq!(&p, &PolyVar::from_ints(&c, Var::S));
        if let Some(last) = p.coeffs().last() {
            prop_assert!(!last.is_zero());
            prop_assert_eq!(p.degree(), Some(p.coeffs().len() - 1));
        }
    }

    #[test]
    fn walk_weights_are_symmetric(
        coords in prop::collection::vec(-2i32..=2, 3),
        perm in Just([0usize, 1, 2]).prop_shuffle(),
        flips in prop::collection::vec(any::<bool>(), 3),
        n in 0usize..6,
    ) {
        let x = Site::from_dense(&coords);
        let moved: Vec<i32> = (0..3).map(|i| if flips[i] { -coords[perm[i]] } else { coords[perm[i]] }).collect();
        prop_assert_eq!(dconv_concrete(n, &x, 3), dconv_concrete(n, &Site::from_dense(&moved), 3));
    }
}

fn types_up_to(n: u32) -> Vec<PointType> {
    fn go(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<PointType>) {
        out.push(if cur.is_empty() {
            PointType::origin()
        } else {
            PointType::new(cur.clone()).unwrap()
        });
        for v in (1..=left.min(max)).rev() {
            cur.push(v);
            go(left - v, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

#[test]
fn walk_weights_are_normalized() {
    for d in 1..=6 {
        let table = WalkTable::new(d, 6);
        for n in 0..=6 {
            let total: Rational = table.support(n).keys().map(|x| table.dconv(n, x)).sum();
            assert_eq!(total, int(1), "n={n} d={d}");
        }
    }
    for n in 0..=6usize {
        for d in [3i64, 7] {
            let s = rat(1, 2 * d);
            let total: Rational = types_up_to(n as u32)
                .iter()
                .filter(|t| t.l1() % 2 == n as u32 % 2)
                .map(|t| orbit_count(t).eval(&int(d)) * dconv_generic(n, t).unwrap().eval(&s))
                .sum();
            assert_eq!(total, int(1), "generic n={n} d={d}");
        }
    }
}

#[test]
fn walk_weights_compose() {
    let d = 3;
    for (m, n) in [(1, 1), (2, 2), (2, 1)] {
        let mut direct: HashMap<Site, Rational> = HashMap::new();
        for y in slice_points(d, m as u32) {
            for z in slice_points(d, n as u32) {
                let w = dconv_concrete(m, &y, d) * dconv_concrete(n, &z, d);
                *direct.entry(y.add(&z)).or_insert_with(|| int(0)) += w;
            }
        }
        for (x, w) in &direct {
            assert_eq!(dconv_concrete(m + n, x, d), *w, "m={m} n={n} x={x}");
        }
    }
}

#[test]
fn generic_walk_values_match_an_unused_dimension() {
    let d = 11;
    let s = rat(1, 2 * d as i64);
    for n in 0..=6usize {
        for t in types_up_to(n as u32)
            .iter()
            .filter(|t| t.l1() % 2 == n as u32 % 2)
        {
            let x = t.representative();
            assert_eq!(
                dconv_generic(n, t).unwrap().eval(&s),
                dconv_concrete(n, &x, d),
                "n={n} t={t}"
            );
        }
    }
}

#[test]
fn dropping_distinctness_never_decreases() {
    let constrained = two_paths_t2();
    let mut free = constrained.clone();
    free.distinct.clear();
    for d in 1..=3 {
        for x in slice_points(d, 2) {
            let a = constrained.eval_concrete(&x, d).unwrap();
            let b = free.eval_concrete(&x, d).unwrap();
            assert!(a <= b, "d={d} x={x}: {a} > {b}");
        }
    }
}

fn fixed_point_residual(total: &PPoly, p: &SeriesS) -> SeriesS {
    let one = SeriesS::one(p.order());
    &(p - &one) + &(p * &total.subst(p))
}

#[test]
fn fixed_point_solves_the_identity() {
    for mode in [Mode::PaperFaithful, Mode::Recomputed] {
        let total = pi_total(&pi_totals(mode).unwrap());
        let pc = pc_fixed_point(&total, 4).unwrap();
        assert!(
            fixed_point_residual(&total.truncate(4), &pc.series).is_zero(),
            "{mode:?}"
        );
    }
}

#[test]
fn fourth_order_perturbation_stays_at_fourth_order() {
    let total = pi_total(&pi_totals(Mode::PaperFaithful).unwrap()).truncate(4);
    let base = pc_fixed_point(&total, 4).unwrap().series;
    for j in 0..3 {
        let bump = PPoly::term(j, SeriesS::monomial(int(1), 4, 4)).unwrap();
        let moved = pc_fixed_point(&total.add(&bump), 4).unwrap().series;
        let delta = &moved - &base;
        assert_eq!(delta.valuation(), Some(4), "P^{j}");
        assert_eq!(delta.coeff(4), int(-1), "P^{j}");
    }
}
