//! Nearest-neighbour step distribution `D`, its convolutions, point types and
//! orbit counts.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::qalg::{int, lagrange_interpolate, PolyVar, QalgError, Rational, Var};

/// Largest step count accepted by [`dconv_generic`].
pub const MAX_GENERIC_STEPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WalkError {
    #[error("not polynomial in s: {0}")]
    NotPolynomial(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("malformed point type {0:?}")]
    BadType(String),
    #[error("malformed lattice point {0:?}")]
    BadPoint(String),
}

impl From<QalgError> for WalkError {
    fn from(e: QalgError) -> Self {
        WalkError::NotPolynomial(e.to_string())
    }
}

/// Spatial point of `Z^d`, nonzero coordinates only, sorted by index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(SmallVec<[(u32, i32); 6]>);

impl Site {
    pub fn origin() -> Site {
        Site::default()
    }

    pub fn unit(axis: u32, sign: i32) -> Site {
        let mut s = Site::default();
        s.0.push((axis, sign.signum()));
        s
    }

    pub fn from_dense(coords: &[i32]) -> Site {
        Site(
            coords
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i as u32, c))
                .collect(),
        )
    }

    pub fn from_pairs(pairs: &[(u32, i32)]) -> Site {
        let mut out = Site::origin();
        for &(i, c) in pairs {
            out = out.add_at(i, c);
        }
        out
    }

    pub fn to_dense(&self, d: usize) -> Vec<i32> {
        let mut v = vec![0; d];
        for &(i, c) in &self.0 {
            v[i as usize] = c;
        }
        v
    }

    pub fn entries(&self) -> &[(u32, i32)] {
        &self.0
    }

    pub fn get(&self, axis: u32) -> i32 {
        self.0
            .iter()
            .find(|(i, _)| *i == axis)
            .map_or(0, |(_, c)| *c)
    }

    pub fn is_origin(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest axis index used, plus one.
    pub fn min_dimension(&self) -> usize {
        self.0.last().map_or(0, |(i, _)| *i as usize + 1)
    }

    pub fn l1(&self) -> u32 {
        self.0.iter().map(|(_, c)| c.unsigned_abs()).sum()
    }

    /// Add `delta` to one coordinate.
    pub fn add_at(&self, axis: u32, delta: i32) -> Site {
        let mut v = self.0.clone();
        match v.binary_search_by_key(&axis, |(i, _)| *i) {
            Ok(pos) => {
                v[pos].1 += delta;
                if v[pos].1 == 0 {
                    v.remove(pos);
                }
            }
            Err(pos) if delta != 0 => v.insert(pos, (axis, delta)),
            Err(_) => {}
        }
        Site(v)
    }

    fn combine(&self, other: &Site, sign: i32) -> Site {
        let mut out = SmallVec::new();
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x.0 == y.0 => {
                    i += 1;
                    j += 1;
                    (x.0, x.1 + sign * y.1)
                }
                (Some(x), Some(y)) if x.0 < y.0 => {
                    i += 1;
                    *x
                }
                (Some(x), None) => {
                    i += 1;
                    *x
                }
                (_, Some(y)) => {
                    j += 1;
                    (y.0, sign * y.1)
                }
                (None, None) => unreachable!(),
            };
            if take.1 != 0 {
                out.push(take);
            }
        }
        Site(out)
    }

    pub fn add(&self, other: &Site) -> Site {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Site) -> Site {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> Site {
        Site(self.0.iter().map(|&(i, c)| (i, -c)).collect())
    }

    /// The `2d` nearest neighbours, in direction order `+e_0, -e_0, +e_1, …`.
    pub fn neighbors(&self, d: usize) -> impl Iterator<Item = Site> + '_ {
        (0..2 * d).map(move |dir| self.step(dir))
    }

    /// Neighbour in direction `dir` (`2i` is `+e_i`, `2i+1` is `-e_i`).
    pub fn step(&self, dir: usize) -> Site {
        let sign = if dir % 2 == 0 { 1 } else { -1 };
        self.add_at((dir / 2) as u32, sign)
    }

    pub fn canonical_type(&self) -> PointType {
        let mut shape: Vec<u32> = self.0.iter().map(|(_, c)| c.unsigned_abs()).collect();
        shape.sort_unstable_by(|a, b| b.cmp(a));
        PointType { shape }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("o");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(i, c)| match c {
                1 => format!("e{}", i + 1),
                -1 => format!("-e{}", i + 1),
                _ => format!("{c}e{}", i + 1),
            })
            .collect();
        f.write_str(&parts.join("+").replace("+-", "-"))
    }
}

/// Space-time point `(site, time)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub site: Site,
    pub time: u32,
}

impl LatticePoint {
    pub fn new(site: Site, time: u32) -> Self {
        LatticePoint { site, time }
    }

    pub fn origin() -> Self {
        LatticePoint {
            site: Site::origin(),
            time: 0,
        }
    }

    /// Reachable from `(o,0)`: `|x|₁ ≤ t` with matching parity.
    pub fn is_reachable(&self) -> bool {
        let n = self.site.l1();
        n <= self.time && (self.time - n) % 2 == 0
    }

    pub fn canonical_type(&self) -> PointType {
        self.site.canonical_type()
    }
}

/// Largest axis index and coefficient accepted by the point parsers.
const MAX_PARSED_AXIS: u32 = 1024;
const MAX_PARSED_COEFF: i32 = 64;

impl Site {
    /// Parse `o`, `e1`, `-2e3+e7` and similar sums of signed unit vectors.
    pub fn parse(text: &str) -> Result<Site, WalkError> {
        let bad = || WalkError::BadPoint(text.chars().take(64).collect());
        let t = text.trim();
        if t == "o" {
            return Ok(Site::origin());
        }
        if t.is_empty() || t.len() > 256 {
            return Err(bad());
        }
        let mut out = Site::origin();
        let bytes = t.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let sign = match bytes[i] {
                b'+' if i > 0 => {
                    i += 1;
                    1
                }
                b'-' => {
                    i += 1;
                    -1
                }
                _ if i == 0 => 1,
                _ => return Err(bad()),
            };
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let coeff: i32 = if i == start {
                1
            } else {
                t[start..i].parse().map_err(|_| bad())?
            };
            if i >= bytes.len() || bytes[i] != b'e' {
                return Err(bad());
            }
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let axis: u32 = t[start..i].parse().map_err(|_| bad())?;
            if axis == 0 || axis > MAX_PARSED_AXIS || coeff == 0 || coeff > MAX_PARSED_COEFF {
                return Err(bad());
            }
            if out.get(axis - 1) != 0 {
                return Err(bad());
            }
            out = out.add_at(axis - 1, sign * coeff);
        }
        Ok(out)
    }
}

impl LatticePoint {
    /// Parse `(site,time)`, e.g. `(e1+e2,2)`.
    pub fn parse(text: &str) -> Result<LatticePoint, WalkError> {
        let bad = || WalkError::BadPoint(text.chars().take(64).collect());
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (site, time) = inner.rsplit_once(',').ok_or_else(bad)?;
        let time: u32 = time.trim().parse().map_err(|_| bad())?;
        if time > 1_000_000 {
            return Err(bad());
        }
        Ok(LatticePoint::new(Site::parse(site)?, time))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.site, self.time)
    }
}

/// Orbit of a displacement under coordinate permutations and sign flips.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointType {
    shape: Vec<u32>,
}

impl PointType {
    pub fn new(mut shape: Vec<u32>) -> Result<Self, WalkError> {
        if shape.contains(&0) {
            return Err(WalkError::BadType(format!("{shape:?}")));
        }
        shape.sort_unstable_by(|a, b| b.cmp(a));
        Ok(PointType { shape })
    }

    pub fn origin() -> Self {
        PointType::default()
    }

    /// Accepts `o`, `[]`, `2,1` or `[1,1]`.
    pub fn parse(text: &str) -> Result<Self, WalkError> {
        let bad = || WalkError::BadType(text.to_string());
        let t = text.trim();
        let t = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .unwrap_or(t)
            .trim();
        if t.is_empty() || t == "o" {
            return Ok(PointType::origin());
        }
        if t.len() > 256 {
            return Err(bad());
        }
        let shape = t
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .ok()
                    .filter(|&v| (1..=64).contains(&v))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(bad)?;
        PointType::new(shape)
    }

    pub fn shape(&self) -> &[u32] {
        &self.shape
    }

    pub fn entries(&self) -> usize {
        self.shape.len()
    }

    pub fn l1(&self) -> u32 {
        self.shape.iter().sum()
    }

    /// `shape[i] · e_{i+1}`.
    pub fn representative(&self) -> Site {
        Site(
            self.shape
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as u32, c as i32))
                .collect(),
        )
    }

    /// Smallest dimension in which the type is realised (at least 1).
    pub fn min_dimension(&self) -> usize {
        self.shape.len().max(1)
    }
}

impl fmt::Display for PointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.shape.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn canonical_type(x: &LatticePoint) -> PointType {
    x.canonical_type()
}

/// Number of points of type `t` in `Z^d` as a polynomial in `d`.
pub fn orbit_count(t: &PointType) -> PolyVar {
    let k = t.entries();
    let mut poly = PolyVar::from_ints(&[1], Var::D);
    for i in 0..k {
        poly = poly.mul(&PolyVar::from_ints(&[-(i as i64), 1], Var::D));
    }
    let mut denom = 1i64;
    let mut run = 1i64;
    for w in t.shape.windows(2) {
        if w[0] == w[1] {
            run += 1;
            denom *= run;
        } else {
            run = 1;
        }
    }
    poly.scale(&(int(1i64 << k) / int(denom)))
}

/// Walk counts `W_n(x)` for `n ≤ max_steps` in dimension `d`.
#[derive(Debug, Clone)]
pub struct WalkTable {
    d: usize,
    layers: Vec<HashMap<Site, u64>>,
}

impl WalkTable {
    pub fn new(d: usize, max_steps: usize) -> Self {
        let mut layers = vec![HashMap::from([(Site::origin(), 1u64)])];
        for _ in 0..max_steps {
            let prev = layers.last().unwrap();
            let mut next: HashMap<Site, u64> = HashMap::with_capacity(prev.len() * 2 * d);
            for (x, &w) in prev {
                for y in x.neighbors(d) {
                    *next.entry(y).or_insert(0) += w;
                }
            }
            layers.push(next);
        }
        WalkTable { d, layers }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn max_steps(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn count(&self, n: usize, x: &Site) -> u64 {
        self.layers[n].get(x).copied().unwrap_or(0)
    }

    pub fn support(&self, n: usize) -> &HashMap<Site, u64> {
        &self.layers[n]
    }

    /// `D^{*n}(x)` as an exact rational.
    pub fn dconv(&self, n: usize, x: &Site) -> Rational {
        Rational::new(
            self.count(n, x).into(),
            num_bigint::BigInt::from(2 * self.d as u64).pow(n as u32),
        )
    }
}

/// `D^{*n}(x)` in dimension `d`; the walk is split in two halves so the
/// tables stay small.
pub fn dconv_concrete(n: usize, x: &Site, d: usize) -> Rational {
    if x.min_dimension() > d {
        return Rational::zero();
    }
    let a = n / 2;
    let table = WalkTable::new(d, n - a);
    let count: u128 = table
        .support(a)
        .iter()
        .map(|(y, &w)| w as u128 * table.count(n - a, &x.sub(y)) as u128)
        .sum();
    Rational::new(
        count.into(),
        num_bigint::BigInt::from(2 * d as u64).pow(n as u32),
    )
}

/// Interpolate `f(d)` as a polynomial of degree ≤ `degree` in `s = 1/(2d)`,
/// using nodes `d0..` and `held_out` further validation nodes.
pub fn fit_in_s<F>(d0: usize, degree: usize, held_out: usize, f: F) -> Result<PolyVar, WalkError>
where
    F: Fn(usize) -> Result<Rational, WalkError> + Sync,
{
    let dims: Vec<usize> = (d0.max(1)..).take(degree + 1 + held_out).collect();
    let values = dims
        .par_iter()
        .map(|&d| f(d))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(Rational, Rational)> = dims
        .iter()
        .zip(values)
        .map(|(&d, v)| (Rational::new(1.into(), (2 * d).into()), v))
        .collect();
    lagrange_interpolate(&points, degree, Var::S)
        .map_err(|e| WalkError::NotPolynomial(e.to_string()))
}

/// `D^{*n}` at any point of type `t`, as an exact polynomial in `s`.
pub fn dconv_generic(n: usize, t: &PointType) -> Result<PolyVar, WalkError> {
    if n > MAX_GENERIC_STEPS {
        return Err(WalkError::Guard(format!(
            "{n} steps exceeds {MAX_GENERIC_STEPS}"
        )));
    }
    let x = t.representative();
    fit_in_s(t.min_dimension(), n, 1, |d| Ok(dconv_concrete(n, &x, d)))
}

/// `Σ_u D(x−u)^m D(u)^n` over the time-1 slice, `x` of type `t` at time 2.
pub fn power_sum_generic(m: u32, n: u32, t: &PointType) -> Result<PolyVar, WalkError> {
    if m == 0 || n == 0 {
        return Err(WalkError::Guard("powers must be at least 1".into()));
    }
    let x = t.representative();
    fit_in_s(t.min_dimension(), (m + n) as usize, 1, |d| {
        let hits = Site::origin()
            .neighbors(d)
            .filter(|u| x.sub(u).l1() == 1)
            .count() as i64;
        Ok(int(hits) / Rational::from_integer(num_bigint::BigInt::from(2 * d as u64).pow(m + n)))
    })
}

/// All spatial points reachable in exactly `t` steps (`|x|₁ ≤ t`, same parity).
pub fn slice_points(d: usize, t: u32) -> Vec<Site> {
    let mut out: Vec<Site> = WalkTable::new(d, t as usize)
        .support(t as usize)
        .keys()
        .cloned()
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::rat;

    fn ty(s: &[u32]) -> PointType {
        PointType::new(s.to_vec()).unwrap()
    }

    #[test]
    fn canonical_types() {
        let x = LatticePoint::new(Site::from_pairs(&[(0, 1), (1, 1)]), 2);
        assert_eq!(canonical_type(&x), ty(&[1, 1]));
        let y = LatticePoint::new(Site::from_pairs(&[(2, -2), (6, 1)]), 3);
        assert_eq!(canonical_type(&y), ty(&[2, 1]));
        assert_eq!(
            canonical_type(&LatticePoint::new(Site::origin(), 4)),
            PointType::origin()
        );
    }

    #[test]
    fn parses_types() {
        assert_eq!(PointType::parse("o").unwrap(), PointType::origin());
        assert_eq!(PointType::parse("[1,2]").unwrap(), ty(&[2, 1]));
        assert!(PointType::parse("1,0").is_err());
        assert!(PointType::parse("a").is_err());
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(
            orbit_count(&PointType::origin()),
            PolyVar::from_ints(&[1], Var::D)
        );
        assert_eq!(
            orbit_count(&ty(&[1, 1])),
            PolyVar::from_ints(&[0, -2, 2], Var::D)
        );
        let three = orbit_count(&ty(&[1, 1, 1]));
        assert_eq!(three.eval(&int(3)), int(8));
        assert_eq!(three.coeff(3), rat(4, 3));
        assert_eq!(
            orbit_count(&ty(&[2, 1])),
            PolyVar::from_ints(&[0, -4, 4], Var::D)
        );
    }

    #[test]
    fn orbit_count_two_one_by_enumeration() {
        for d in 2..=3usize {
            let n = slice_points(d, 3)
                .iter()
                .filter(|x| x.canonical_type() == ty(&[2, 1]))
                .count();
            assert_eq!(
                int(n as i64),
                orbit_count(&ty(&[2, 1])).eval(&int(d as i64))
            );
        }
    }

    #[test]
    fn concrete_examples() {
        assert_eq!(dconv_concrete(2, &Site::origin(), 1), rat(1, 2));
        assert_eq!(dconv_concrete(3, &Site::unit(0, 1), 2), rat(9, 64));
        assert_eq!(dconv_concrete(0, &Site::origin(), 5), int(1));
        assert_eq!(dconv_concrete(3, &Site::origin(), 4), int(0));
    }

    #[test]
    fn generic_examples() {
        assert_eq!(
            dconv_generic(2, &PointType::origin()).unwrap(),
            PolyVar::from_ints(&[0, 1], Var::S)
        );
        assert_eq!(
            dconv_generic(3, &ty(&[1])).unwrap(),
            PolyVar::from_ints(&[0, 0, 3, -3], Var::S)
        );
        assert_eq!(
            dconv_generic(4, &PointType::origin()).unwrap(),
            PolyVar::from_ints(&[0, 0, 3, -3], Var::S)
        );
        assert_eq!(
            dconv_generic(4, &ty(&[1, 1])).unwrap(),
            PolyVar::from_ints(&[0, 0, 0, 12, -24], Var::S)
        );
        assert_eq!(
            dconv_generic(4, &ty(&[1, 1, 1, 1])).unwrap(),
            PolyVar::from_ints(&[0, 0, 0, 0, 24], Var::S)
        );
        assert!(dconv_generic(9, &PointType::origin()).is_err());
    }

    #[test]
    fn power_sums() {
        assert_eq!(
            power_sum_generic(1, 1, &PointType::origin()).unwrap(),
            PolyVar::from_ints(&[0, 1], Var::S)
        );
        assert_eq!(
            power_sum_generic(2, 2, &PointType::origin()).unwrap(),
            PolyVar::from_ints(&[0, 0, 0, 1], Var::S)
        );
        assert_eq!(
            power_sum_generic(1, 1, &ty(&[2])).unwrap(),
            PolyVar::from_ints(&[0, 0, 1], Var::S)
        );
        assert_eq!(
            power_sum_generic(2, 1, &ty(&[1, 1])).unwrap(),
            PolyVar::from_ints(&[0, 0, 0, 2], Var::S)
        );
    }

    #[test]
    fn site_arithmetic() {
        let a = Site::from_pairs(&[(0, 1), (3, -2)]);
        let b = Site::from_pairs(&[(0, 1), (1, 1)]);
        assert_eq!(a.sub(&b), Site::from_pairs(&[(1, -1), (3, -2)]));
        assert_eq!(a.add(&a.neg()), Site::origin());
        assert_eq!(a.to_string(), "e1-2e4");
        assert_eq!(Site::from_dense(&a.to_dense(4)), a);
    }

    #[test]
    fn point_parse_round_trip() {
        for text in ["(o,0)", "(e1+e2,2)", "(-2e3+e7,3)", "(-e1,1)"] {
            let p = LatticePoint::parse(text).unwrap();
            assert_eq!(p.to_string(), text);
        }
        for bad in [
            "(e0,1)",
            "(e1e2,1)",
            "(,1)",
            "e1,1",
            "(e1+e1,2)",
            "(2,x)",
            "(+e1,1)",
        ] {
            assert!(LatticePoint::parse(bad).is_err(), "{bad}");
        }
    }
}
