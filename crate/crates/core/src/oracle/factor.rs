//! Exact probabilities of events confined to times `0..=2` for any `d ≤ FACTOR_MAX_D`.
//!
//! First-slice sites that the event never names are interchangeable once
//! grouped by which named time-2 points they touch, so only a capped count
//! of each open route shape is tracked.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::local::{LocalGraph, Prepared};
use super::{bond_probability, Bond, EventSpec, OracleError, FACTOR_MAX_D};
use crate::qalg::Rational;
use crate::walks::{LatticePoint, Site};

/// Copies of one route shape beyond this never change a path predicate
/// built from at most two disjoint paths per atom.
const ROUTE_CAP: u8 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    /// Open-bond mask per special site: bit 0 is `o → y`, bit `1+i` is `y → targets[i]`.
    special: Vec<u32>,
    routes: Vec<u8>,
}

fn adjacent(a: &Site, b: &Site) -> bool {
    b.sub(a).l1() == 1
}

fn weight(q: &Rational, open: usize, closed: usize) -> Rational {
    let mut w = Rational::one();
    let nq = Rational::one() - q;
    for _ in 0..open {
        w *= q;
    }
    for _ in 0..closed {
        w *= &nq;
    }
    w
}

/// `P_p(e)` for an event whose points all lie at times `≤ 2`.
pub fn t2_factorized_prob(d: usize, e: &EventSpec, p: &Rational) -> Result<Rational, OracleError> {
    if d == 0 {
        return Err(OracleError::Precondition(
            "dimension must be at least 1".into(),
        ));
    }
    if d > FACTOR_MAX_D {
        return Err(OracleError::Guard(format!(
            "d = {d} exceeds {FACTOR_MAX_D}"
        )));
    }
    let q = bond_probability(p, d)?;
    let points = e.points();
    for x in &points {
        if x.time > 2 || !x.is_reachable() || x.site.min_dimension() > d {
            return Err(OracleError::Precondition(format!(
                "{x} is not a point of times 0..=2 in d = {d}"
            )));
        }
    }
    let targets: Vec<Site> = points
        .iter()
        .filter(|x| x.time == 2)
        .map(|x| x.site.clone())
        .collect();
    let special: Vec<Site> = points
        .iter()
        .filter(|x| x.time == 1)
        .map(|x| x.site.clone())
        .collect();
    let near = |y: &Site| -> Vec<usize> {
        (0..targets.len())
            .filter(|&i| adjacent(y, &targets[i]))
            .collect()
    };

    // Route shapes: (signature, nonempty open subset of it).
    let mut shapes: Vec<(Vec<usize>, u32)> = Vec::new();
    let mut shape_index: HashMap<(Vec<usize>, u32), usize> = HashMap::new();
    let mut plain: Vec<Vec<usize>> = Vec::new();
    for y in Site::origin().neighbors(d) {
        if special.contains(&y) {
            continue;
        }
        let sig = near(&y);
        if sig.is_empty() {
            continue;
        }
        for sub in 1u32..1 << sig.len() {
            let key = (sig.clone(), sub);
            if !shape_index.contains_key(&key) {
                shape_index.insert(key.clone(), shapes.len());
                shapes.push(key);
            }
        }
        plain.push(sig);
    }
    let special_sigs: Vec<Vec<usize>> = special.iter().map(|y| near(y)).collect();

    let mut states: HashMap<State, Rational> = HashMap::new();
    states.insert(
        State {
            special: vec![0; special.len()],
            routes: vec![0; shapes.len()],
        },
        Rational::one(),
    );
    for (k, sig) in special_sigs.iter().enumerate() {
        let bits = 1 + sig.len();
        let mut next: HashMap<State, Rational> = HashMap::new();
        for (st, w) in &states {
            for mask in 0u32..1 << bits {
                let open = mask.count_ones() as usize;
                let mut s2 = st.clone();
                s2.special[k] = mask;
                *next.entry(s2).or_insert_with(Rational::zero) += w * weight(&q, open, bits - open);
            }
        }
        states = next;
    }
    for sig in &plain {
        let n = sig.len();
        let mut next: HashMap<State, Rational> = HashMap::new();
        let nothing = Rational::one() - &q * (Rational::one() - weight(&q, 0, n));
        for (st, w) in &states {
            *next.entry(st.clone()).or_insert_with(Rational::zero) += w * &nothing;
            for sub in 1u32..1 << n {
                let open = sub.count_ones() as usize;
                let idx = shape_index[&(sig.clone(), sub)];
                let mut s2 = st.clone();
                s2.routes[idx] = (s2.routes[idx] + 1).min(ROUTE_CAP);
                *next.entry(s2).or_insert_with(Rational::zero) +=
                    w * &q * weight(&q, open, n - open);
            }
        }
        states = next;
    }

    let o = LatticePoint::origin();
    let mut total = Rational::zero();
    for (st, w) in &states {
        let mut bonds: Vec<Bond> = Vec::new();
        for (k, y) in special.iter().enumerate() {
            let ly = LatticePoint::new(y.clone(), 1);
            let m = st.special[k];
            if m & 1 == 1 {
                bonds.push(Bond::new(o.clone(), ly.clone()));
            }
            for (i, &t) in special_sigs[k].iter().enumerate() {
                if m >> (1 + i) & 1 == 1 {
                    bonds.push(Bond::new(
                        ly.clone(),
                        LatticePoint::new(targets[t].clone(), 2),
                    ));
                }
            }
        }
        let mut g = LocalGraph::from_bonds(&bonds);
        let root = g.intern(&o);
        let tnodes: Vec<usize> = targets
            .iter()
            .map(|z| g.intern(&LatticePoint::new(z.clone(), 2)))
            .collect();
        for (idx, &c) in st.routes.iter().enumerate() {
            let (sig, sub) = &shapes[idx];
            for _ in 0..c {
                let mid = g.fresh();
                g.add_edge(root, mid);
                for (i, &t) in sig.iter().enumerate() {
                    if sub >> i & 1 == 1 {
                        g.add_edge(mid, tnodes[t]);
                    }
                }
            }
        }
        if Prepared::new(e, &g)?.holds(u64::MAX) {
            total += w;
        }
    }
    Ok(total)
}
