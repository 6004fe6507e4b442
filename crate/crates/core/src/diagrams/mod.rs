//! Lattice diagrams: products of `D^{*k}` factors summed over internal
//! vertices on time slices, with distinctness constraints.

mod catalogue;

pub use catalogue::{catalogue_names, named_diagram, NamedDiagram, Printed};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::qalg::{int, PolyVar, Rational};
use crate::walks::{fit_in_s, PointType, Site, WalkError, WalkTable};

/// Default cap on candidate points enumerated for a single vertex.
pub const SLICE_CAP: usize = 1_000_000;

/// Largest total D-factor count accepted by [`diagram_eval_generic`].
pub const MAX_GENERIC_DEGREE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("malformed diagram {name}: {why}")]
    Malformed { name: String, why: String },
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("{0}")]
    Walk(#[from] WalkError),
    #[error("unknown diagram {0:?}")]
    Unknown(String),
    #[error("target type {ty} is not covered for {name}")]
    Uncovered { name: String, ty: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Origin,
    Target,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub time: u32,
    pub kind: VertexKind,
}

/// Factor `(D^{*k}(v_to − v_from))^m` with `k` the time gap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub k: u32,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramSpec {
    pub name: String,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub distinct: Vec<Vec<usize>>,
    pub p_exponent: u32,
    pub prefactor: Rational,
}

/// Origin is vertex 0, target is vertex 1.
pub const ORIGIN: usize = 0;
pub const TARGET: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagramValue {
    Generic { p_exponent: u32, value: PolyVar },
    Concrete { p_exponent: u32, value: Rational },
}

impl DiagramSpec {
    pub fn new(name: &str, target_time: u32) -> Self {
        DiagramSpec {
            name: name.to_string(),
            vertices: vec![
                Vertex {
                    time: 0,
                    kind: VertexKind::Origin,
                },
                Vertex {
                    time: target_time,
                    kind: VertexKind::Target,
                },
            ],
            edges: Vec::new(),
            distinct: Vec::new(),
            p_exponent: 0,
            prefactor: int(1),
        }
    }

    pub fn target_time(&self) -> u32 {
        self.vertices[TARGET].time
    }

    pub fn vertex(&mut self, time: u32) -> usize {
        self.vertices.push(Vertex {
            time,
            kind: VertexKind::Internal,
        });
        self.vertices.len() - 1
    }

    /// Adds `D^{*k}(to − from)^m`; `k` is the time gap. Each D factor counts one power of `p`.
    pub fn edge(&mut self, from: usize, to: usize, m: u32) -> &mut Self {
        let k = self.vertices[to]
            .time
            .saturating_sub(self.vertices[from].time);
        self.edges.push(Edge { from, to, k, m });
        self.p_exponent += k * m;
        self
    }

    pub fn distinct(&mut self, ids: &[usize]) -> &mut Self {
        self.distinct.push(ids.to_vec());
        self
    }

    pub fn with_prefactor(mut self, c: Rational) -> Self {
        self.prefactor = c;
        self
    }

    /// Total number of D factors, which bounds the degree in `s`.
    pub fn factor_count(&self) -> usize {
        self.edges.iter().map(|e| (e.k * e.m) as usize).sum()
    }

    fn malformed(&self, why: impl Into<String>) -> DiagramError {
        DiagramError::Malformed {
            name: self.name.clone(),
            why: why.into(),
        }
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        let t = self.target_time();
        for e in &self.edges {
            let (a, b) = (self.vertices.get(e.from), self.vertices.get(e.to));
            let (Some(a), Some(b)) = (a, b) else {
                return Err(self.malformed("edge endpoint out of range"));
            };
            if b.time <= a.time || e.k != b.time - a.time || e.m == 0 {
                return Err(
                    self.malformed(format!("edge {}->{} is not forward in time", e.from, e.to))
                );
            }
        }
        for (i, v) in self.vertices.iter().enumerate().skip(2) {
            if v.kind != VertexKind::Internal || v.time == 0 || v.time >= t {
                return Err(self.malformed(format!("vertex {i} lies outside (0, {t})")));
            }
        }
        for set in &self.distinct {
            if set.iter().any(|&i| i >= self.vertices.len()) {
                return Err(self.malformed("distinctness set names an unknown vertex"));
            }
        }
        // Cone confinement is exact only if every vertex is linked to both ends.
        let n = self.vertices.len();
        let reach = |start: usize, forward: bool| {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for e in &self.edges {
                    let (a, b) = if forward {
                        (e.from, e.to)
                    } else {
                        (e.to, e.from)
                    };
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen
        };
        let (fwd, back) = (reach(ORIGIN, true), reach(TARGET, false));
        if (2..n).any(|i| !fwd[i] || !back[i]) {
            return Err(self.malformed("an internal vertex is not on a path from origin to target"));
        }
        Ok(())
    }

    /// Exact value at the target site `x` in dimension `d`.
    pub fn eval_concrete(&self, x: &Site, d: usize) -> Result<Rational, DiagramError> {
        self.validate()?;
        if x.min_dimension() > d {
            return Err(self.malformed(format!("target {x} not realisable in d={d}")));
        }
        let kmax = self.edges.iter().map(|e| e.k as usize).max().unwrap_or(0);
        let table = WalkTable::new(d, kmax);
        let plan = Plan::build(self)?;
        let mut sites: Vec<Option<Site>> = vec![None; self.vertices.len()];
        sites[ORIGIN] = Some(Site::origin());
        sites[TARGET] = Some(x.clone());

        // Edges between the two fixed ends.
        let mut base: u128 = 1;
        for e in &self.edges {
            if e.from < 2 && e.to < 2 {
                let w = table.count(e.k as usize, &x.clone()) as u128;
                base = checked_pow_mul(base, w, e.m)
                    .ok_or_else(|| DiagramError::Resource("overflow".into()))?;
            }
        }
        let total = if base == 0 {
            0
        } else {
            let mut ctx = Ctx {
                spec: self,
                plan: &plan,
                table: &table,
                x,
                t_target: self.target_time(),
            };
            base.checked_mul(ctx.recurse(0, &mut sites)?)
                .ok_or_else(|| DiagramError::Resource("overflow".into()))?
        };
        let denom = BigInt::from(2 * d as u64).pow(self.factor_count() as u32);
        Ok(&self.prefactor * Rational::new(BigInt::from(total), denom))
    }

    pub fn eval_concrete_type(
        &self,
        t: &PointType,
        d: usize,
    ) -> Result<DiagramValue, DiagramError> {
        let value = self.eval_concrete(&t.representative(), d)?;
        Ok(DiagramValue::Concrete {
            p_exponent: self.p_exponent,
            value,
        })
    }

    /// Generic-d value as a polynomial in `s`, interpolated from concrete
    /// dimensions with one held-out node.
    pub fn eval_generic(&self, t: &PointType) -> Result<PolyVar, DiagramError> {
        let degree = self.factor_count();
        if degree > MAX_GENERIC_DEGREE {
            return Err(DiagramError::Resource(format!(
                "degree bound {degree} exceeds {MAX_GENERIC_DEGREE}"
            )));
        }
        self.validate()?;
        let x = t.representative();
        let poly = fit_in_s(t.min_dimension(), degree, 1, |d| {
            self.eval_concrete(&x, d)
                .map_err(|e| WalkError::Guard(e.to_string()))
        })?;
        Ok(poly)
    }
}

pub fn diagram_eval_concrete(
    spec: &DiagramSpec,
    target: &Site,
    d: usize,
) -> Result<DiagramValue, DiagramError> {
    Ok(DiagramValue::Concrete {
        p_exponent: spec.p_exponent,
        value: spec.eval_concrete(target, d)?,
    })
}

pub fn diagram_eval_generic(
    spec: &DiagramSpec,
    t: &PointType,
) -> Result<DiagramValue, DiagramError> {
    Ok(DiagramValue::Generic {
        p_exponent: spec.p_exponent,
        value: spec.eval_generic(t)?,
    })
}

fn checked_pow_mul(acc: u128, w: u128, m: u32) -> Option<u128> {
    (0..m).try_fold(acc, |a, _| a.checked_mul(w))
}

/// Assignment order for internal vertices.
struct Step {
    vertex: usize,
    /// Already placed vertex whose edge generates candidates, and whether it lies earlier in time.
    anchor: usize,
    anchor_k: usize,
    anchor_before: bool,
    /// Edges to already placed vertices (including the anchor edge).
    edges: Vec<usize>,
    /// Already placed vertices that must differ from this one.
    differ: Vec<usize>,
}

struct Plan {
    steps: Vec<Step>,
}

impl Plan {
    fn build(spec: &DiagramSpec) -> Result<Plan, DiagramError> {
        let n = spec.vertices.len();
        let mut placed = vec![false; n];
        placed[ORIGIN] = true;
        placed[TARGET] = true;
        let mut steps = Vec::new();
        for _ in 2..n {
            // Pick the unplaced vertex with the shortest edge to a placed one.
            let mut best: Option<(usize, usize, usize, bool)> = None;
            for e in &spec.edges {
                let cand = if placed[e.from] && !placed[e.to] {
                    Some((e.to, e.from, e.k as usize, true))
                } else if placed[e.to] && !placed[e.from] {
                    Some((e.from, e.to, e.k as usize, false))
                } else {
                    None
                };
                if let Some(c) = cand {
                    if best.map_or(true, |b| c.2 < b.2) {
                        best = Some(c);
                    }
                }
            }
            let (vertex, anchor, anchor_k, anchor_before) =
                best.ok_or_else(|| spec.malformed("disconnected internal vertex"))?;
            placed[vertex] = true;
            let edges = spec
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| {
                    (e.from == vertex && placed[e.to]) || (e.to == vertex && placed[e.from])
                })
                .map(|(i, _)| i)
                .collect();
            let mut differ = Vec::new();
            for set in &spec.distinct {
                if set.contains(&vertex) {
                    for &o in set {
                        if o != vertex
                            && placed[o]
                            && spec.vertices[o].time == spec.vertices[vertex].time
                            && !differ.contains(&o)
                        {
                            differ.push(o);
                        }
                    }
                }
            }
            steps.push(Step {
                vertex,
                anchor,
                anchor_k,
                anchor_before,
                edges,
                differ,
            });
        }
        Ok(Plan { steps })
    }
}

struct Ctx<'a> {
    spec: &'a DiagramSpec,
    plan: &'a Plan,
    table: &'a WalkTable,
    x: &'a Site,
    t_target: u32,
}

impl Ctx<'_> {
    fn recurse(
        &mut self,
        depth: usize,
        sites: &mut Vec<Option<Site>>,
    ) -> Result<u128, DiagramError> {
        let Some(step) = self.plan.steps.get(depth) else {
            return Ok(1);
        };
        let t_v = self.spec.vertices[step.vertex].time;
        let anchor_site = sites[step.anchor].clone().expect("anchor placed");
        let support = self.table.support(step.anchor_k);
        if support.len() > SLICE_CAP {
            return Err(DiagramError::Resource(format!(
                "{} candidate points exceed the cap",
                support.len()
            )));
        }
        let mut total: u128 = 0;
        for delta in support.keys() {
            let cand = if step.anchor_before {
                anchor_site.add(delta)
            } else {
                anchor_site.sub(delta)
            };
            let (n0, n1) = (cand.l1(), self.x.sub(&cand).l1());
            if n0 > t_v || (t_v - n0) % 2 != 0 || n1 > self.t_target - t_v {
                continue;
            }
            if step
                .differ
                .iter()
                .any(|&o| sites[o].as_ref() == Some(&cand))
            {
                continue;
            }
            let mut weight: u128 = 1;
            for &ei in &step.edges {
                let e = &self.spec.edges[ei];
                let (a, b) = if e.from == step.vertex {
                    (&cand, sites[e.to].as_ref().unwrap())
                } else {
                    (sites[e.from].as_ref().unwrap(), &cand)
                };
                let w = self.table.count(e.k as usize, &b.sub(a)) as u128;
                weight = checked_pow_mul(weight, w, e.m)
                    .ok_or_else(|| DiagramError::Resource("overflow".into()))?;
                if weight == 0 {
                    break;
                }
            }
            if weight == 0 {
                continue;
            }
            sites[step.vertex] = Some(cand);
            let inner = self.recurse(depth + 1, sites)?;
            sites[step.vertex] = None;
            total = weight
                .checked_mul(inner)
                .and_then(|v| total.checked_add(v))
                .ok_or_else(|| DiagramError::Resource("overflow".into()))?;
        }
        Ok(total)
    }
}

/// `Σ_{u≠v} D(x−u)D(x−v)D(u)D(v)` over the time-1 slice, `x` at time 2.
pub fn two_paths_t2() -> DiagramSpec {
    let mut g = DiagramSpec::new("two_paths_t2", 2);
    let u = g.vertex(1);
    let v = g.vertex(1);
    g.edge(ORIGIN, u, 1)
        .edge(u, TARGET, 1)
        .edge(ORIGIN, v, 1)
        .edge(v, TARGET, 1)
        .distinct(&[u, v]);
    g
}

impl DiagramValue {
    pub fn p_exponent(&self) -> u32 {
        match self {
            DiagramValue::Generic { p_exponent, .. }
            | DiagramValue::Concrete { p_exponent, .. } => *p_exponent,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DiagramValue::Generic { value, .. } => value.is_zero(),
            DiagramValue::Concrete { value, .. } => value.is_zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::rat;
    use crate::walks::dconv_concrete;

    #[test]
    fn single_edge_reduces_to_dconv() {
        let mut g = DiagramSpec::new("d2", 2);
        g.edge(ORIGIN, TARGET, 1);
        assert_eq!(g.eval_concrete(&Site::origin(), 2).unwrap(), rat(1, 4));
        let mut g = DiagramSpec::new("d3_split", 3);
        let u = g.vertex(1);
        g.edge(ORIGIN, u, 1).edge(u, TARGET, 1);
        let x = Site::unit(0, 1);
        assert_eq!(g.eval_concrete(&x, 3).unwrap(), dconv_concrete(3, &x, 3));
    }

    #[test]
    fn two_paths_at_d1() {
        assert_eq!(
            two_paths_t2().eval_concrete(&Site::origin(), 1).unwrap(),
            rat(1, 8)
        );
    }

    #[test]
    fn unsatisfiable_constraint_vanishes() {
        // Both vertices must be +e1 or -e1 and differ, but three are required.
        let mut g = DiagramSpec::new("three", 2);
        let (a, b, c) = (g.vertex(1), g.vertex(1), g.vertex(1));
        for v in [a, b, c] {
            g.edge(ORIGIN, v, 1).edge(v, TARGET, 1);
        }
        g.distinct(&[a, b, c]);
        assert_eq!(g.eval_concrete(&Site::origin(), 1).unwrap(), rat(0, 1));
    }

    #[test]
    fn inclusion_exclusion_on_two_paths() {
        for d in 1..=3 {
            let x = Site::origin();
            let constrained = two_paths_t2().eval_concrete(&x, d).unwrap();
            let mut free = two_paths_t2();
            free.distinct.clear();
            let mut coinc = DiagramSpec::new("coincident", 2);
            let u = coinc.vertex(1);
            coinc.edge(ORIGIN, u, 2).edge(u, TARGET, 2);
            let (f, c) = (
                free.eval_concrete(&x, d).unwrap(),
                coinc.eval_concrete(&x, d).unwrap(),
            );
            assert_eq!(constrained, &f - &c);
            assert!(f >= constrained);
        }
    }

    #[test]
    fn rejects_dangling_vertex() {
        let mut g = DiagramSpec::new("dangling", 3);
        let u = g.vertex(1);
        g.edge(ORIGIN, u, 1);
        assert!(g.validate().is_err());
    }
}
