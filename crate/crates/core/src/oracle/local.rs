//! Compact graph over the bonds an event depends on, with path bitmasks.

use std::collections::HashMap;

use super::event::{Atom, Expr};
use super::{Bond, EventSpec, OracleError};
use crate::walks::LatticePoint;

/// Cap on enumerated simple paths per endpoint pair.
const PATH_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Default)]
pub(crate) struct LocalGraph {
    index: HashMap<LatticePoint, usize>,
    nodes: usize,
    edges: Vec<(usize, usize)>,
    out: Vec<Vec<(usize, usize)>>,
    bond_index: HashMap<(usize, usize), usize>,
}

impl LocalGraph {
    pub(crate) fn from_bonds(bonds: &[Bond]) -> Self {
        let mut g = LocalGraph::default();
        for b in bonds {
            let u = g.intern(&b.from);
            let v = g.intern(&b.to);
            g.add_edge(u, v);
        }
        g
    }

    pub(crate) fn intern(&mut self, x: &LatticePoint) -> usize {
        if let Some(&i) = self.index.get(x) {
            return i;
        }
        let i = self.fresh();
        self.index.insert(x.clone(), i);
        i
    }

    /// A node with no lattice label.
    pub(crate) fn fresh(&mut self) -> usize {
        self.nodes += 1;
        self.out.push(Vec::new());
        self.nodes - 1
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        let id = self.edges.len();
        self.edges.push((u, v));
        self.out[u].push((id, v));
        self.bond_index.insert((u, v), id);
    }

    pub(crate) fn node(&self, x: &LatticePoint) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub(crate) fn node_count(&self) -> usize {
        self.nodes
    }

    pub(crate) fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// All simple `s → t` paths as bond bitmasks, optionally forced to start with `first`.
    pub(crate) fn paths(
        &self,
        s: usize,
        t: usize,
        first: Option<usize>,
    ) -> Result<Vec<u64>, OracleError> {
        if self.edges.len() > 64 {
            return Err(OracleError::Guard(format!(
                "{} bonds exceed the 64-bit path encoding",
                self.edges.len()
            )));
        }
        let mut out = Vec::new();
        if s == t && first.is_none() {
            out.push(0);
            return Ok(out);
        }
        let mut stack: Vec<(usize, u64)> = match first {
            Some(e) if self.edges[e].0 == s => vec![(self.edges[e].1, 1u64 << e)],
            Some(_) => return Ok(out),
            None => vec![(s, 0)],
        };
        while let Some((u, mask)) = stack.pop() {
            if u == t {
                out.push(mask);
                if out.len() > PATH_CAP {
                    return Err(OracleError::Guard("too many paths".into()));
                }
                continue;
            }
            for &(e, v) in &self.out[u] {
                stack.push((v, mask | 1 << e));
            }
        }
        Ok(out)
    }
}

/// Keep only masks with no proper subset in the list.
fn minimal(mut masks: Vec<u64>) -> Vec<u64> {
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks.dedup();
    let mut out: Vec<u64> = Vec::new();
    for m in masks {
        if !out.iter().any(|&k| k & m == k) {
            out.push(m);
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Ready {
    /// Holds when some listed mask is fully open.
    Any(Vec<u64>),
    Pivotal {
        bit: u64,
        paths: Vec<u64>,
    },
}

/// An event compiled against a `LocalGraph`.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    expr: Expr,
    atoms: Vec<Ready>,
}

impl Prepared {
    pub(crate) fn new(e: &EventSpec, g: &LocalGraph) -> Result<Self, OracleError> {
        let (expr, atoms) = e.atoms();
        let atoms = atoms
            .iter()
            .map(|a| ready(a, g))
            .collect::<Result<_, _>>()?;
        Ok(Prepared { expr, atoms })
    }

    pub(crate) fn holds(&self, open: u64) -> bool {
        self.expr.eval(&mut |i| match &self.atoms[i] {
            Ready::Any(masks) => masks.iter().any(|m| m & !open == 0),
            Ready::Pivotal { bit, paths } => {
                open & bit != 0
                    && paths.iter().any(|m| m & !open == 0)
                    && !paths.iter().any(|m| m & !(open & !bit) == 0)
            }
        })
    }
}

fn paths_between(
    g: &LocalGraph,
    a: &LatticePoint,
    b: &LatticePoint,
    first: Option<&Bond>,
) -> Result<Vec<u64>, OracleError> {
    if a == b && first.is_none() {
        return Ok(vec![0]);
    }
    let (Some(s), Some(t)) = (g.node(a), g.node(b)) else {
        return Ok(Vec::new());
    };
    let first = match first {
        None => None,
        Some(f) => match (g.node(&f.from), g.node(&f.to)) {
            (Some(u), Some(v)) => match g.bond_index.get(&(u, v)) {
                Some(&e) => Some(e),
                None => return Ok(Vec::new()),
            },
            _ => return Ok(Vec::new()),
        },
    };
    g.paths(s, t, first)
}

fn ready(a: &Atom, g: &LocalGraph) -> Result<Ready, OracleError> {
    Ok(match a {
        Atom::Connect { a, b } => Ready::Any(minimal(paths_between(g, a, b, None)?)),
        Atom::Pair { a, x, b, y, first } => {
            let p1 = paths_between(g, a, x, first.as_ref())?;
            let p2 = paths_between(g, b, y, None)?;
            let mut unions = Vec::new();
            for &m in &p1 {
                for &r in &p2 {
                    if m & r == 0 {
                        unions.push(m | r);
                    }
                }
            }
            Ready::Any(minimal(unions))
        }
        Atom::Pivotal { bond, a, x } => {
            let bit = match (g.node(&bond.from), g.node(&bond.to)) {
                (Some(u), Some(v)) => g.bond_index.get(&(u, v)).map_or(0, |&e| 1u64 << e),
                _ => 0,
            };
            Ready::Pivotal {
                bit,
                paths: paths_between(g, a, x, None)?,
            }
        }
    })
}
