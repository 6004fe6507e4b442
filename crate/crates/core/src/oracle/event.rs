use std::fmt;

use super::Bond;
use crate::walks::{LatticePoint, Site};

/// Connection events built from open oriented paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EventSpec {
    /// `a → b`.
    Connect(LatticePoint, LatticePoint),
    /// `{a → x} ∘ {b → y}`.
    DisjointPair {
        a: LatticePoint,
        x: LatticePoint,
        b: LatticePoint,
        y: LatticePoint,
    },
    /// `o ⇒ x`.
    DoubleConn(LatticePoint),
    /// `{[o,s⟩ → x} ∘ {o → y}` with `s` on the first slice.
    MarkedFirstBond {
        s: Site,
        x: LatticePoint,
        y: LatticePoint,
    },
    /// `base ∩ ⋂_w {o → w}`.
    WithExtras(Box<EventSpec>, Vec<LatticePoint>),
    /// `bond` is pivotal for `a → x`.
    Pivotal {
        bond: Bond,
        a: LatticePoint,
        x: LatticePoint,
    },
    And(Vec<EventSpec>),
    Or(Vec<EventSpec>),
    Not(Box<EventSpec>),
}

/// Primitive predicate after lowering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Atom {
    Connect {
        a: LatticePoint,
        b: LatticePoint,
    },
    Pair {
        a: LatticePoint,
        x: LatticePoint,
        b: LatticePoint,
        y: LatticePoint,
        first: Option<Bond>,
    },
    Pivotal {
        bond: Bond,
        a: LatticePoint,
        x: LatticePoint,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Expr {
    Atom(usize),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub(crate) fn eval(&self, atom: &mut impl FnMut(usize) -> bool) -> bool {
        match self {
            Expr::Atom(i) => atom(*i),
            Expr::And(v) => v.iter().all(|e| e.eval(atom)),
            Expr::Or(v) => v.iter().any(|e| e.eval(atom)),
            Expr::Not(e) => !e.eval(atom),
        }
    }
}

impl EventSpec {
    pub(crate) fn lower(&self, atoms: &mut Vec<Atom>) -> Expr {
        let mut push = |a: Atom| {
            atoms.push(a);
            Expr::Atom(atoms.len() - 1)
        };
        let o = LatticePoint::origin;
        match self {
            EventSpec::Connect(a, b) => push(Atom::Connect {
                a: a.clone(),
                b: b.clone(),
            }),
            EventSpec::DisjointPair { a, x, b, y } => push(Atom::Pair {
                a: a.clone(),
                x: x.clone(),
                b: b.clone(),
                y: y.clone(),
                first: None,
            }),
            EventSpec::DoubleConn(x) => push(Atom::Pair {
                a: o(),
                x: x.clone(),
                b: o(),
                y: x.clone(),
                first: None,
            }),
            EventSpec::MarkedFirstBond { s, x, y } => push(Atom::Pair {
                a: o(),
                x: x.clone(),
                b: o(),
                y: y.clone(),
                first: Some(Bond::new(o(), LatticePoint::new(s.clone(), 1))),
            }),
            EventSpec::WithExtras(base, extras) => {
                let mut parts = vec![base.lower(atoms)];
                for w in extras {
                    atoms.push(Atom::Connect {
                        a: o(),
                        b: w.clone(),
                    });
                    parts.push(Expr::Atom(atoms.len() - 1));
                }
                Expr::And(parts)
            }
            EventSpec::Pivotal { bond, a, x } => push(Atom::Pivotal {
                bond: bond.clone(),
                a: a.clone(),
                x: x.clone(),
            }),
            EventSpec::And(v) => Expr::And(v.iter().map(|e| e.lower(atoms)).collect()),
            EventSpec::Or(v) => Expr::Or(v.iter().map(|e| e.lower(atoms)).collect()),
            EventSpec::Not(e) => Expr::Not(Box::new(e.lower(atoms))),
        }
    }

    pub(crate) fn atoms(&self) -> (Expr, Vec<Atom>) {
        let mut atoms = Vec::new();
        let expr = self.lower(&mut atoms);
        (expr, atoms)
    }

    /// Every space-time point the event mentions.
    pub fn points(&self) -> Vec<LatticePoint> {
        let mut out = vec![LatticePoint::origin()];
        for a in self.atoms().1 {
            match a {
                Atom::Connect { a, b } => out.extend([a, b]),
                Atom::Pair { a, x, b, y, first } => {
                    out.extend([a, x, b, y]);
                    if let Some(f) = first {
                        out.push(f.to);
                    }
                }
                Atom::Pivotal { bond, a, x } => out.extend([bond.from, bond.to, a, x]),
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Source/target pairs whose connecting paths can influence the event.
    pub fn endpoint_pairs(&self) -> Vec<(LatticePoint, LatticePoint)> {
        let mut out = Vec::new();
        for a in self.atoms().1 {
            match a {
                Atom::Connect { a, b } => out.push((a, b)),
                Atom::Pair { a, x, b, y, .. } => out.extend([(a, x), (b, y)]),
                Atom::Pivotal { a, x, .. } => out.push((a, x)),
            }
        }
        out
    }
}

fn list(f: &mut fmt::Formatter<'_>, name: &str, items: &[EventSpec]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{e}")?;
    }
    f.write_str(")")
}

impl fmt::Display for EventSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventSpec::Connect(a, b) => write!(f, "connect({a},{b})"),
            EventSpec::DisjointPair { a, x, b, y } => write!(f, "pair({a}->{x},{b}->{y})"),
            EventSpec::DoubleConn(x) => write!(f, "double({x})"),
            EventSpec::MarkedFirstBond { s, x, y } => write!(f, "marked({s};{x},{y})"),
            EventSpec::WithExtras(base, extras) => {
                write!(f, "with({base}")?;
                for (i, w) in extras.iter().enumerate() {
                    f.write_str(if i == 0 { ";" } else { "," })?;
                    write!(f, "{w}")?;
                }
                f.write_str(")")
            }
            EventSpec::Pivotal { bond, a, x } => {
                write!(f, "pivotal({}->{};{a},{x})", bond.from, bond.to)
            }
            EventSpec::And(v) => list(f, "and", v),
            EventSpec::Or(v) => list(f, "or", v),
            EventSpec::Not(e) => write!(f, "not({e})"),
        }
    }
}
