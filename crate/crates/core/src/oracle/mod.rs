//! Exact event probabilities by enumerating bond configurations on the
//! space-time cone, plus a slice-factorized route for time-2 events.

mod event;
mod factor;
mod local;
mod parse;

pub use event::EventSpec;
pub use factor::t2_factorized_prob;
pub use parse::parse_event;

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::flow::edge_disjoint_paths;
use crate::qalg::{binom, int, PolyVar, Rational, Var};
use crate::walks::{slice_points, LatticePoint, WalkError};
use local::{LocalGraph, Prepared};

/// Largest number of bonds a full enumeration will visit.
pub const ENUM_BOND_CAP: usize = 24;
/// Largest cone `cone_build` will materialize.
pub const CONE_BOND_CAP: usize = 200_000;
/// Largest dimension for the time-2 factorized route.
pub const FACTOR_MAX_D: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot parse event: {0}")]
    Parse(String),
    #[error("{a} is not connected to {x}")]
    NotConnected { a: String, x: String },
    #[error(transparent)]
    Walk(#[from] WalkError),
}

/// Oriented bond `[from, to⟩` between consecutive slices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bond {
    pub from: LatticePoint,
    pub to: LatticePoint,
}

impl Bond {
    pub fn new(from: LatticePoint, to: LatticePoint) -> Self {
        Bond { from, to }
    }
}

impl std::fmt::Display for Bond {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

/// Reachable space-time cone of `(o,0)` up to a horizon.
#[derive(Debug, Clone)]
pub struct Cone {
    pub d: usize,
    pub horizon: u32,
    pub slices: Vec<Vec<LatticePoint>>,
    /// Sorted by `(time, from coordinates, to coordinates)`.
    pub bonds: Vec<Bond>,
}

impl Cone {
    pub fn contains(&self, x: &LatticePoint) -> bool {
        x.time <= self.horizon && x.is_reachable() && x.site.min_dimension() <= self.d
    }
}

pub fn cone_build(d: usize, horizon: u32) -> Result<Cone, OracleError> {
    if d == 0 {
        return Err(OracleError::Precondition(
            "dimension must be at least 1".into(),
        ));
    }
    let mut slices = Vec::new();
    let mut bond_count = 0usize;
    for t in 0..=horizon {
        if t < horizon {
            // Cheap upper bound before materializing the slice.
            let est = slice_size_bound(d, t).saturating_mul(2 * d);
            if bond_count.saturating_add(est) > CONE_BOND_CAP {
                return Err(OracleError::Guard(format!(
                    "cone d={d}, T={horizon} exceeds {CONE_BOND_CAP} bonds"
                )));
            }
        }
        let pts: Vec<LatticePoint> = slice_points(d, t)
            .into_iter()
            .map(|s| LatticePoint::new(s, t))
            .collect();
        if t < horizon {
            bond_count += pts.len() * 2 * d;
        }
        slices.push(pts);
    }
    let mut keyed: Vec<((u32, Vec<i32>, Vec<i32>), Bond)> = Vec::with_capacity(bond_count);
    for t in 0..horizon as usize {
        for x in &slices[t] {
            for y in x.site.neighbors(d) {
                let to = LatticePoint::new(y, x.time + 1);
                keyed.push((
                    (x.time, x.site.to_dense(d), to.site.to_dense(d)),
                    Bond::new(x.clone(), to),
                ));
            }
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Cone {
        d,
        horizon,
        slices,
        bonds: keyed.into_iter().map(|(_, b)| b).collect(),
    })
}

fn slice_size_bound(d: usize, t: u32) -> usize {
    // Points with |x|₁ ≤ t: Σ_k C(d,k) 2^k C(t,k).
    let mut total = 0usize;
    for k in 0..=(t as usize).min(d) {
        let c = binom_usize(d, k)
            .saturating_mul(1usize << k.min(60))
            .saturating_mul(binom_usize(t as usize, k));
        total = total.saturating_add(c);
    }
    total
}

fn binom_usize(n: usize, k: usize) -> usize {
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// `b` reachable from `a` by an oriented path.
pub(crate) fn reaches(a: &LatticePoint, b: &LatticePoint) -> bool {
    if b.time < a.time {
        return false;
    }
    let dt = b.time - a.time;
    let l1 = b.site.sub(&a.site).l1();
    l1 <= dt && (dt - l1) % 2 == 0
}

fn check_points(cone: &Cone, e: &EventSpec) -> Result<(), OracleError> {
    for x in e.points() {
        if !cone.contains(&x) {
            return Err(OracleError::Precondition(format!(
                "{x} lies outside the cone d={}, T={}",
                cone.d, cone.horizon
            )));
        }
    }
    Ok(())
}

/// Bonds of the cone lying on some path between the endpoints an event refers to.
pub fn relevant_bonds(cone: &Cone, e: &EventSpec) -> Vec<Bond> {
    let pairs = e.endpoint_pairs();
    cone.bonds
        .iter()
        .filter(|b| {
            pairs
                .iter()
                .any(|(a, x)| reaches(a, &b.from) && reaches(&b.to, x))
        })
        .cloned()
        .collect()
}

/// The event probability as a polynomial in the per-bond probability `q`.
pub fn event_poly(cone: &Cone, e: &EventSpec) -> Result<PolyVar, OracleError> {
    check_points(cone, e)?;
    let bonds = relevant_bonds(cone, e);
    let n = bonds.len();
    if n > ENUM_BOND_CAP {
        return Err(OracleError::Guard(format!(
            "{n} relevant bonds exceed the enumeration cap {ENUM_BOND_CAP}"
        )));
    }
    let graph = LocalGraph::from_bonds(&bonds);
    let prepared = Prepared::new(e, &graph)?;
    let counts = count_by_open(&prepared, n);
    Ok(counts_to_poly(&counts, n))
}

fn count_by_open(prepared: &Prepared, n: usize) -> Vec<u64> {
    let high = n.min(6);
    let low = n - high;
    (0u64..1 << high)
        .into_par_iter()
        .map(|top| {
            let mut counts = vec![0u64; n + 1];
            for bottom in 0u64..1 << low {
                let open = (top << low) | bottom;
                if prepared.holds(open) {
                    counts[open.count_ones() as usize] += 1;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// `Σ_k c_k q^k (1 − q)^{n−k}` expanded in powers of `q`.
fn counts_to_poly(counts: &[u64], n: usize) -> PolyVar {
    let mut coeffs = vec![Rational::zero(); n + 1];
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for j in 0..=n - k {
            let sign = if j % 2 == 0 { int(1) } else { int(-1) };
            coeffs[k + j] += int(c as i64) * binom(n - k, j) * sign;
        }
    }
    PolyVar::new(coeffs, Var::Q)
}

/// Per-bond probability `q = p/(2d)`, checked to lie in `[0, 1]`.
pub fn bond_probability(p: &Rational, d: usize) -> Result<Rational, OracleError> {
    let q = p / int(2 * d as i64);
    if q < Rational::zero() || q > Rational::one() {
        return Err(OracleError::Precondition(format!(
            "p = {p} gives a bond probability outside [0,1] at d = {d}"
        )));
    }
    Ok(q)
}

/// Exact probability of `e` at occupation parameter `p`.
pub fn event_prob_exact(cone: &Cone, e: &EventSpec, p: &Rational) -> Result<Rational, OracleError> {
    let q = bond_probability(p, cone.d)?;
    Ok(event_poly(cone, e)?.eval(&q))
}

fn connected(open: &[Bond], a: &LatticePoint, x: &LatticePoint, skip: Option<usize>) -> bool {
    if a == x {
        return true;
    }
    let mut out: HashMap<&LatticePoint, Vec<(usize, &LatticePoint)>> = HashMap::new();
    for (i, b) in open.iter().enumerate() {
        out.entry(&b.from).or_default().push((i, &b.to));
    }
    let mut stack = vec![a];
    let mut seen = std::collections::HashSet::from([a]);
    while let Some(u) = stack.pop() {
        for &(i, v) in out.get(u).map(Vec::as_slice).unwrap_or(&[]) {
            if Some(i) == skip || !seen.insert(v) {
                continue;
            }
            if v == x {
                return true;
            }
            stack.push(v);
        }
    }
    false
}

/// Open bonds whose removal disconnects `a` from `x`, in input order.
pub fn pivotal_bonds(
    open: &[Bond],
    a: &LatticePoint,
    x: &LatticePoint,
) -> Result<Vec<Bond>, OracleError> {
    if !connected(open, a, x, None) {
        return Err(OracleError::NotConnected {
            a: a.to_string(),
            x: x.to_string(),
        });
    }
    Ok((0..open.len())
        .filter(|&i| !connected(open, a, x, Some(i)))
        .map(|i| open[i].clone())
        .collect())
}

/// Two bond-disjoint open paths `a → x`, decided by max-flow.
pub fn doubly_connected_flow(open: &[Bond], a: &LatticePoint, x: &LatticePoint) -> bool {
    let graph = LocalGraph::from_bonds(open);
    let (Some(s), Some(t)) = (graph.node(a), graph.node(x)) else {
        return a == x;
    };
    edge_disjoint_paths(graph.node_count(), graph.edges(), s, t, 2) >= 2
}

/// The same predicate by exhaustive search over pairs of open paths.
pub fn doubly_connected_search(open: &[Bond], a: &LatticePoint, x: &LatticePoint) -> bool {
    if a == x {
        return true;
    }
    let graph = LocalGraph::from_bonds(open);
    let (Some(s), Some(t)) = (graph.node(a), graph.node(x)) else {
        return false;
    };
    let Ok(paths) = graph.paths(s, t, None) else {
        return false;
    };
    paths
        .iter()
        .enumerate()
        .any(|(i, p)| paths[i + 1..].iter().any(|r| p & r == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::rat;
    use crate::walks::Site;

    fn pt(text: &str) -> LatticePoint {
        LatticePoint::parse(text).unwrap()
    }

    #[test]
    fn cone_sizes() {
        assert_eq!(cone_build(1, 4).unwrap().bonds.len(), 20);
        assert_eq!(cone_build(2, 2).unwrap().bonds.len(), 20);
        assert_eq!(cone_build(1, 1).unwrap().bonds.len(), 2);
        let c = cone_build(1, 3).unwrap();
        let sizes: Vec<usize> = c.slices.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
    }

    #[test]
    fn bond_order_is_lexicographic() {
        let c = cone_build(2, 2).unwrap();
        let keys: Vec<_> = c
            .bonds
            .iter()
            .map(|b| (b.from.time, b.from.site.to_dense(2), b.to.site.to_dense(2)))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn basic_probabilities() {
        let c = cone_build(1, 2).unwrap();
        let one = int(1);
        let conn = EventSpec::Connect(LatticePoint::origin(), pt("(o,2)"));
        assert_eq!(event_prob_exact(&c, &conn, &one).unwrap(), rat(7, 16));
        let dbl = EventSpec::DoubleConn(pt("(o,2)"));
        assert_eq!(event_prob_exact(&c, &dbl, &one).unwrap(), rat(1, 16));
        let pair = EventSpec::DisjointPair {
            a: LatticePoint::origin(),
            x: pt("(e1,1)"),
            b: LatticePoint::origin(),
            y: pt("(-e1,1)"),
        };
        assert_eq!(event_prob_exact(&c, &pair, &one).unwrap(), rat(1, 4));
        assert_eq!(event_prob_exact(&c, &dbl, &int(0)).unwrap(), int(0));
    }

    #[test]
    fn outside_cone_rejected() {
        let c = cone_build(1, 2).unwrap();
        let e = EventSpec::DoubleConn(pt("(o,4)"));
        assert!(matches!(
            event_prob_exact(&c, &e, &int(1)),
            Err(OracleError::Precondition(_))
        ));
        assert!(bond_probability(&int(3), 1).is_err());
    }

    #[test]
    fn pivotal_examples() {
        let o = LatticePoint::origin();
        let e1 = LatticePoint::new(Site::unit(0, 1), 1);
        let m1 = LatticePoint::new(Site::unit(0, -1), 1);
        let x = pt("(o,2)");
        let y = pt("(e1,3)");
        let path = vec![
            Bond::new(o.clone(), e1.clone()),
            Bond::new(e1.clone(), x.clone()),
        ];
        assert_eq!(pivotal_bonds(&path, &o, &x).unwrap(), path);
        let mut both = path.clone();
        both.push(Bond::new(o.clone(), m1.clone()));
        both.push(Bond::new(m1, x.clone()));
        assert!(pivotal_bonds(&both, &o, &x).unwrap().is_empty());
        both.push(Bond::new(x, y.clone()));
        assert_eq!(pivotal_bonds(&both, &o, &y).unwrap(), vec![both[4].clone()]);
        assert!(pivotal_bonds(&path, &o, &y).is_err());
    }

    #[test]
    fn flow_and_search_agree_on_every_configuration() {
        let c = cone_build(1, 4).unwrap();
        let n = c.bonds.len();
        for x in [pt("(o,2)"), pt("(o,4)"), pt("(e1,3)")] {
            for mask in (0u32..1 << n).step_by(7) {
                let open: Vec<Bond> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| c.bonds[i].clone())
                    .collect();
                let o = LatticePoint::origin();
                assert_eq!(
                    doubly_connected_flow(&open, &o, &x),
                    doubly_connected_search(&open, &o, &x)
                );
            }
        }
    }
}
