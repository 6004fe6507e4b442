//! Per-type coefficient values: the printed table and its reassembly from
//! catalogued diagrams and correction terms.

use serde::Serialize;

use super::{LaceError, Mode};
use crate::diagrams::{named_diagram, DiagramSpec, ORIGIN, TARGET};
use crate::qalg::{int, rat, PPoly, PolyVar, Rational, SeriesS, Var};
use crate::walks::{dconv_generic, orbit_count, PointType};

/// One labelled contribution to a recomputed entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub label: String,
    pub prefactor: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiEntry {
    pub n: u8,
    pub time: u32,
    pub ty: PointType,
    pub value: PPoly,
    pub mode: Mode,
    pub provenance: Vec<Term>,
}

impl PiEntry {
    /// Highest order of `s` the value is claimed through.
    pub fn known_order(&self) -> usize {
        self.value.order()
    }
}

/// `Σ c·P^j·s^e` from `(j, num, den, e)` tuples, truncated at `k`.
pub(crate) fn pp(k: usize, terms: &[(usize, i64, i64, usize)]) -> PPoly {
    let mut out = PPoly::zero(k);
    for &(j, n, d, e) in terms {
        let t =
            PPoly::term(j, SeriesS::monomial(rat(n, d), e, k)).expect("table P-degrees are small");
        out = out.add(&t);
    }
    out
}

fn ty(shape: &[u32]) -> PointType {
    if shape.is_empty() {
        PointType::origin()
    } else {
        PointType::new(shape.to_vec()).expect("valid shape")
    }
}

/// Point types carrying a table entry for coefficient `n` at `time`.
pub fn covered_types(n: u8, time: u32) -> Result<Vec<PointType>, LaceError> {
    let shapes: &[&[u32]] = match (n, time) {
        (0 | 1, 2) => &[&[], &[1, 1]],
        (0..=2, 3) => &[&[1], &[2, 1], &[1, 1, 1]],
        (0..=2, 4) => &[&[], &[1, 1], &[1, 1, 1, 1]],
        _ => {
            return Err(LaceError::Uncovered {
                n,
                time,
                ty: "*".into(),
            })
        }
    };
    Ok(shapes.iter().map(|s| ty(s)).collect())
}

/// Multiplicities as printed alongside the per-time sums.
pub fn printed_multiplicity(time: u32, t: &PointType) -> PolyVar {
    if time == 3 && t.shape() == [2, 1] {
        // Printed as 2d(d−1).
        PolyVar::from_ints(&[0, -2, 2], Var::D)
    } else {
        orbit_count(t)
    }
}

/// The printed value and the order through which it is stated.
fn printed(n: u8, time: u32, t: &PointType) -> Option<PPoly> {
    let sh = t.shape();
    let v = match (n, time, sh) {
        (0, 2, []) => pp(
            4,
            &[(4, 1, 2, 2), (4, -1, 2, 3), (6, -1, 2, 3), (0, 15, 8, 4)],
        ),
        (0, 2, [1, 1]) => pp(6, &[(4, 1, 1, 4)]),
        (0, 3, [1]) => pp(5, &[(6, 7, 2, 4), (0, -16, 1, 5)]),
        (0, 3, [2, 1]) => pp(6, &[(0, 1, 1, 6)]),
        (0, 3, [1, 1, 1]) => pp(7, &[(6, 9, 1, 6), (0, -3, 1, 7)]),
        (0, 4, []) => pp(4, &[(0, 4, 1, 4)]),
        (0, 4, [1, 1]) => pp(6, &[(0, 53, 1, 6)]),
        (0, 4, [1, 1, 1, 1]) => pp(8, &[(0, 156, 1, 8)]),
        (1, 2, []) => pp(
            4,
            &[(4, 1, 1, 2), (4, -1, 1, 3), (6, -1, 2, 3), (0, 2, 1, 4)],
        ),
        (1, 2, [1, 1]) => pp(7, &[(4, 2, 1, 4)]),
        (1, 3, [1]) => pp(5, &[(6, 7, 1, 4), (0, -31, 1, 5)]),
        (1, 3, [2, 1]) => pp(6, &[(0, 2, 1, 6)]),
        (1, 3, [1, 1, 1]) => pp(7, &[(6, 18, 1, 6), (0, -6, 1, 7)]),
        (1, 4, []) => pp(4, &[(0, 17, 2, 4)]),
        (1, 4, [1, 1]) => pp(6, &[(0, 108, 1, 6)]),
        (1, 4, [1, 1, 1, 1]) => pp(8, &[(0, 324, 1, 8)]),
        (2, 3, [1]) => pp(5, &[(0, 3, 1, 5)]),
        (2, 3, [2, 1]) => PPoly::zero(6),
        (2, 3, [1, 1, 1]) => pp(8, &[(0, 6, 1, 7)]),
        (2, 4, []) => PPoly::zero(4),
        (2, 4, [1, 1]) => PPoly::zero(6),
        (2, 4, [1, 1, 1, 1]) => PPoly::zero(8),
        _ => return None,
    };
    Some(v)
}

/// Accumulates labelled `PPoly` contributions.
struct Builder {
    k: usize,
    value: PPoly,
    terms: Vec<Term>,
}

impl Builder {
    fn new(k: usize) -> Self {
        Builder {
            k,
            value: PPoly::zero(k),
            terms: Vec::new(),
        }
    }

    fn add(&mut self, label: &str, c: Rational, v: &PPoly) {
        self.value = self.value.add(&v.truncate(self.k).scale(&c));
        self.terms.push(Term {
            label: label.to_string(),
            prefactor: crate::qalg::fmt_rat(&c),
        });
    }

    fn note(&mut self, label: &str) {
        self.terms.push(Term {
            label: label.to_string(),
            prefactor: "0".into(),
        });
    }

    fn finish(self) -> (PPoly, Vec<Term>) {
        (self.value.truncate(self.k), self.terms)
    }
}

/// `P^j · poly(s)` at order `k`.
fn with_p(j: u32, poly: &PolyVar, k: usize) -> PPoly {
    PPoly::term(j as usize, SeriesS::from_poly(poly, k)).expect("diagram P-degree within cap")
}

fn diagram(name: &str, params: &[u32], t: &PointType, k: usize) -> Result<PPoly, LaceError> {
    let d = named_diagram(name, params, t)?;
    Ok(with_p(d.p_exponent, &d.computed, k))
}

/// `D^{*2}(x)⁴` at type `t`, as a series.
fn d2_fourth(t: &PointType, k: usize) -> Result<SeriesS, LaceError> {
    let d2 = SeriesS::from_poly(&dconv_generic(2, t)?, k);
    let sq = &d2 * &d2;
    Ok(&sq * &sq)
}

/// Correction term at time 2: `¼F₂ − ⅛F₄ − ⅛F₉` with `F₄ = 2P⁸D^{*2}⁴`, `F₉ = P⁸D^{*2}⁴`.
fn h_time2(t: &PointType, k: usize) -> Result<(PPoly, PPoly), LaceError> {
    let f2 = match t.shape() {
        [] | [1, 1] | [2] => diagram("f2_t2", &[], t, k)?,
        _ => PPoly::zero(k),
    };
    let f9 = PPoly::term(8, d2_fourth(t, k)?)?;
    let f4 = f9.scale(&int(2));
    let h = f2
        .scale(&rat(1, 4))
        .sub(&f4.scale(&rat(1, 8)))
        .sub(&f9.scale(&rat(1, 8)));
    Ok((h, f9))
}

/// Two 2-step square diagrams chained through a time-2 vertex `u`:
/// `Σ_u Sq(u)·Sq(x − u)` at time 4.
pub fn square_chain_spec() -> DiagramSpec {
    let mut g = DiagramSpec::new("square_chain", 4);
    let (a, b) = (g.vertex(1), g.vertex(1));
    let u = g.vertex(2);
    let (c, e) = (g.vertex(3), g.vertex(3));
    g.edge(ORIGIN, a, 1)
        .edge(ORIGIN, b, 1)
        .edge(a, u, 1)
        .edge(b, u, 1);
    g.edge(u, c, 1)
        .edge(u, e, 1)
        .edge(c, TARGET, 1)
        .edge(e, TARGET, 1);
    g.distinct(&[a, b]).distinct(&[c, e]);
    g
}

fn recomputed_pi0(time: u32, t: &PointType, k: usize) -> Result<(PPoly, Vec<Term>), LaceError> {
    let mut b = Builder::new(k);
    match time {
        2 => {
            b.add(
                "two_square main term",
                rat(1, 2),
                &diagram("two_square", &[], t, k)?,
            );
            let (h, _) = h_time2(t, k)?;
            b.add("H correction (F2/4 - F4/8 - F9/8)", int(-1), &h);
        }
        3 => {
            let m23 = diagram("m23", &[], t, k)?;
            b.add("m1", rat(1, 2), &diagram("m1", &[], t, k)?);
            b.add("m2", rat(-1, 2), &diagram("m2", &[], t, k)?);
            b.add("m23", rat(-1, 2), &m23);
            b.add("H correction (F2/4 = m23)", int(-1), &m23);
        }
        4 => {
            let d4 = SeriesS::from_poly(&dconv_generic(4, t)?, k);
            let sq = PPoly::term(8, &d4 * &d4)?;
            b.add("D4^2", rat(1, 2), &sq);
            b.add("xi1", int(-1), &diagram("xi", &[1], t, k)?);
            b.add("xi2", int(1), &diagram("xi", &[2], t, k)?);
            b.add("xi3", rat(-1, 2), &diagram("xi", &[3], t, k)?);
            b.add("xi_mirror", rat(1, 2), &diagram("xi_mirror", &[], t, k)?);
            b.add("xi4", rat(-1, 2), &diagram("xi", &[4], t, k)?);
        }
        _ => unreachable!("covered_types guards the time"),
    }
    Ok(b.finish())
}

fn recomputed(n: u8, time: u32, t: &PointType, k: usize) -> Result<(PPoly, Vec<Term>), LaceError> {
    if n == 0 {
        return recomputed_pi0(time, t, k);
    }
    let mut b = Builder::new(k);
    match (n, time) {
        (1, _) => {
            let (pi0, _) = recomputed_pi0(time, t, k)?;
            b.add("pi0 (both marked-bond choices)", int(2), &pi0);
            match time {
                2 => {
                    let (h, f9) = h_time2(t, k)?;
                    b.add("H correction", int(1), &h);
                    b.add("F9", rat(1, 8), &f9);
                }
                3 => {
                    let m2 = diagram("m2", &[], t, k)?;
                    let m23 = diagram("m23", &[], t, k)?;
                    b.add("H correction (m23)", int(1), &m23);
                    b.add("marked main term: m2", int(1), &m2);
                    b.add("marked main term: m23", rat(1, 2), &m23);
                    b.add("disjoint-pair correction: m23", int(-1), &m23);
                    b.add("disjoint-pair correction: m2", int(-1), &m2);
                }
                _ => {
                    let chain = square_chain_spec().eval_generic(t)?;
                    b.add(
                        "square chain through time 2",
                        rat(1, 2),
                        &with_p(8, &chain, k),
                    );
                }
            }
        }
        (2, 3) => b.add(
            "m2 (single second-bond configuration)",
            int(1),
            &diagram("m2", &[], t, k)?,
        ),
        (2, 4) => b.note("no contribution through the stated order"),
        _ => unreachable!("covered_types guards the pair"),
    }
    Ok(b.finish())
}

/// Per-type value of `Π⁽ⁿ⁾` at the given time and point type.
pub fn pi_type_table(n: u8, time: u32, t: &PointType, mode: Mode) -> Result<PiEntry, LaceError> {
    let uncovered = || LaceError::Uncovered {
        n,
        time,
        ty: t.to_string(),
    };
    if !covered_types(n, time).map_err(|_| uncovered())?.contains(t) {
        return Err(uncovered());
    }
    let printed_entry = printed(n, time, t).ok_or_else(uncovered)?;
    let (value, provenance) = match mode {
        Mode::PaperFaithful => (
            printed_entry,
            vec![Term {
                label: "printed value".into(),
                prefactor: "1".into(),
            }],
        ),
        Mode::Recomputed => recomputed(n, time, t, printed_entry.order())?,
    };
    Ok(PiEntry {
        n,
        time,
        ty: t.clone(),
        value,
        mode,
        provenance,
    })
}
