//! Hand-built catalogue of the named diagram families with their printed
//! closed forms.

use serde::Serialize;

use super::{DiagramError, DiagramSpec, ORIGIN, TARGET};
use crate::qalg::{int, PolyVar, Rational, Var};
use crate::walks::PointType;

/// Closed form as printed, compared through `exact_through` (all orders if `None`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Printed {
    pub poly: PolyVar,
    pub exact_through: Option<usize>,
    pub source: &'static str,
}

impl Printed {
    pub fn agrees_with(&self, computed: &PolyVar) -> bool {
        let diff = computed.sub(&self.poly);
        match self.exact_through {
            None => diff.is_zero(),
            Some(k) => diff.truncated(k).is_zero(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedDiagram {
    pub name: String,
    pub params: Vec<u32>,
    pub target_type: PointType,
    pub p_exponent: u32,
    pub computed: PolyVar,
    pub printed: Option<Printed>,
    /// Entries rebuilt from figures rather than from a printed formula.
    pub reconstructed: bool,
}

impl NamedDiagram {
    pub fn matches(&self) -> Option<bool> {
        self.printed.as_ref().map(|p| p.agrees_with(&self.computed))
    }
}

#[derive(Serialize)]
struct NamedJson<'a> {
    name: &'a str,
    params: &'a [u32],
    target_type: String,
    p_exponent: u32,
    poly_s: String,
    printed_form: Option<String>,
    printed_exact_through: Option<usize>,
    printed_source: Option<&'a str>,
    #[serde(rename = "match")]
    matches: Option<bool>,
    reconstructed: bool,
}

impl NamedDiagram {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(NamedJson {
            name: &self.name,
            params: &self.params,
            target_type: self.target_type.to_string(),
            p_exponent: self.p_exponent,
            poly_s: self.computed.to_string(),
            printed_form: self.printed.as_ref().map(|p| p.poly.to_string()),
            printed_exact_through: self.printed.as_ref().and_then(|p| p.exact_through),
            printed_source: self.printed.as_ref().map(|p| p.source),
            matches: self.matches(),
            reconstructed: self.reconstructed,
        })
        .expect("plain data")
    }
}

pub fn catalogue_names() -> &'static [&'static str] {
    &[
        "eta1",
        "eta2",
        "eta3",
        "xi",
        "xi_mirror",
        "f2_t2",
        "m1",
        "m2",
        "m23",
        "two_square",
    ]
}

/// `c · s^e`.
fn mono(c: Rational, e: u32) -> PolyVar {
    PolyVar::monomial(c, e as usize, Var::S)
}

fn ints(c: &[i64]) -> PolyVar {
    PolyVar::from_ints(c, Var::S)
}

fn pow2(e: u32) -> Rational {
    int(1i64 << e)
}

fn ty(shape: &[u32]) -> PointType {
    PointType::new(shape.to_vec()).expect("catalogue types are valid")
}

pub fn eta1_spec(l: u32, m: u32, n: u32, r: u32) -> DiagramSpec {
    let mut g = DiagramSpec::new(&format!("eta1[{l},{m},{n},{r}]"), 3);
    let s = g.vertex(1);
    let u = g.vertex(2);
    g.edge(ORIGIN, u, l)
        .edge(u, TARGET, m)
        .edge(ORIGIN, s, n)
        .edge(s, u, r);
    g
}

pub fn eta2_spec(l: u32) -> DiagramSpec {
    let mut g = DiagramSpec::new(&format!("eta2[{l}]"), 3);
    let s = g.vertex(1);
    let u = g.vertex(2);
    g.edge(ORIGIN, u, 1)
        .edge(u, TARGET, 1)
        .edge(ORIGIN, s, l)
        .edge(s, u, 1)
        .edge(s, TARGET, 1);
    g
}

pub fn eta3_spec(l: u32) -> DiagramSpec {
    let mut g = DiagramSpec::new(&format!("eta3[{l}]"), 3);
    let s = g.vertex(1);
    let u = g.vertex(2);
    g.edge(ORIGIN, s, 2).edge(s, u, l).edge(u, TARGET, 2);
    g
}

/// Coincidence diagrams of two 4-step paths: `ξ₁` (meeting at time 1),
/// `ξ₂` (times 1 and 2), `ξ₃` (time 2), `ξ₄` (times 1, 2 and 3), and the
/// times-1-and-3 diagram returned for index 5.
pub fn xi_spec(k: u32) -> Option<DiagramSpec> {
    let mut g = DiagramSpec::new(&format!("xi{k}"), 4);
    match k {
        1 => {
            let c = g.vertex(1);
            g.edge(ORIGIN, c, 2).edge(c, TARGET, 2);
        }
        2 => {
            let c = g.vertex(1);
            let a = g.vertex(2);
            g.edge(ORIGIN, c, 2).edge(c, a, 2).edge(a, TARGET, 2);
        }
        3 => {
            let a = g.vertex(2);
            g.edge(ORIGIN, a, 2).edge(a, TARGET, 2);
        }
        4 => {
            let c = g.vertex(1);
            let a = g.vertex(2);
            let u = g.vertex(3);
            g.edge(ORIGIN, c, 2)
                .edge(c, a, 2)
                .edge(a, u, 2)
                .edge(u, TARGET, 2);
        }
        5 => {
            let c = g.vertex(1);
            let u = g.vertex(3);
            g.edge(ORIGIN, c, 2).edge(c, u, 2).edge(u, TARGET, 2);
        }
        _ => return None,
    }
    Some(g)
}

/// `2 Σ_{u,v,w distinct} D(x−u)D(x−v)D(x−w)D(u)D(v)D(w)`, `x` at time 2.
pub fn f2_t2_spec() -> DiagramSpec {
    let mut g = DiagramSpec::new("f2_t2", 2);
    let ids: Vec<usize> = (0..3).map(|_| g.vertex(1)).collect();
    for &v in &ids {
        g.edge(ORIGIN, v, 1).edge(v, TARGET, 1);
    }
    g.distinct(&ids);
    g.with_prefactor(int(2))
}

/// Two 3-step paths with distinct vertices at times 1 and 2.
pub fn m1_spec() -> DiagramSpec {
    let mut g = DiagramSpec::new("m1", 3);
    let (a, b) = (g.vertex(1), g.vertex(1));
    let (u, v) = (g.vertex(2), g.vertex(2));
    g.edge(ORIGIN, a, 1).edge(a, u, 1).edge(u, TARGET, 1);
    g.edge(ORIGIN, b, 1).edge(b, v, 1).edge(v, TARGET, 1);
    g.distinct(&[a, b]).distinct(&[u, v]);
    g
}

/// Paths `o→s→u→x`, `o→t→u` and `s→v→x` with `s≠t`, `u≠v`.
pub fn m2_spec() -> DiagramSpec {
    let mut g = DiagramSpec::new("m2", 3);
    let (s, t) = (g.vertex(1), g.vertex(1));
    let (u, v) = (g.vertex(2), g.vertex(2));
    g.edge(ORIGIN, s, 1)
        .edge(s, u, 1)
        .edge(ORIGIN, t, 1)
        .edge(t, u, 1);
    g.edge(s, v, 1).edge(u, TARGET, 1).edge(v, TARGET, 1);
    g.distinct(&[s, t]).distinct(&[u, v]);
    g
}

/// `Σ_{w≠u} D^{*2}(w)D(x−w)·D^{*2}(u)²D(x−u)`.
pub fn m23_spec() -> DiagramSpec {
    let mut g = DiagramSpec::new("m23", 3);
    let (w, u) = (g.vertex(2), g.vertex(2));
    g.edge(ORIGIN, w, 1)
        .edge(w, TARGET, 1)
        .edge(ORIGIN, u, 2)
        .edge(u, TARGET, 1);
    g.distinct(&[w, u]);
    g
}

/// Two distinct 2-step paths: `D^{*2}(y)² − Σ_w D(y−w)²D(w)²`.
pub fn two_square_spec() -> DiagramSpec {
    let mut g = super::two_paths_t2();
    g.name = "two_square".into();
    g
}

fn eta1_printed(l: u32, m: u32, n: u32, r: u32, t: &PointType) -> Option<PolyVar> {
    let a = l + m + n + r;
    if *t == ty(&[1]) {
        let inner = PolyVar::from_ints(&[1], Var::S)
            .add(&mono(pow2(l + 1), l))
            .sub(&mono(pow2(l + 2) - int(1), l + 1));
        Some(mono(int(1), a - 1).mul(&inner))
    } else if *t == ty(&[2, 1]) {
        Some(mono(int(1) + pow2(l + 1), l + a))
    } else if *t == ty(&[1, 1, 1]) {
        Some(mono(int(3) * pow2(l + 1), l + a))
    } else {
        None
    }
}

fn eta2_printed(l: u32, t: &PointType) -> Option<PolyVar> {
    if *t == ty(&[1]) {
        Some(mono(int(1), l + 4).mul(&ints(&[5, -2, -8])))
    } else if *t == ty(&[2, 1]) {
        Some(mono(int(8), l + 6))
    } else if *t == ty(&[1, 1, 1]) {
        Some(mono(int(24), l + 6))
    } else {
        None
    }
}

fn eta3_printed(l: u32, t: &PointType) -> Option<PolyVar> {
    if *t == ty(&[1]) {
        Some(mono(int(3), l + 3).mul(&ints(&[1, -1])))
    } else if *t == ty(&[2, 1]) {
        Some(mono(int(3), l + 4))
    } else if *t == ty(&[1, 1, 1]) {
        Some(mono(int(6), l + 4))
    } else {
        None
    }
}

/// Printed `D^{*3}` table.
fn d3_printed(t: &PointType) -> Option<PolyVar> {
    if *t == ty(&[1]) {
        Some(ints(&[0, 0, 3, -3]))
    } else if *t == ty(&[2, 1]) {
        Some(mono(int(3), 3))
    } else if *t == ty(&[1, 1, 1]) {
        Some(mono(int(6), 3))
    } else {
        None
    }
}

/// Printed `ξ` values with their stated error orders.
fn xi_printed(k: u32, t: &PointType) -> Option<(PolyVar, Option<usize>)> {
    let zero = PolyVar::zero(Var::S);
    let row = if t.entries() == 0 {
        0
    } else if *t == ty(&[1, 1]) {
        1
    } else if *t == ty(&[1, 1, 1, 1]) {
        2
    } else {
        return None;
    };
    let v = match (k, row) {
        (1, 0) | (2, 0) => (zero, Some(4)),
        (1, 1) => (mono(int(18), 6), Some(6)),
        (1, 2) => (mono(int(144), 8), None),
        (2, 1) => (mono(int(2), 6), Some(6)),
        (2, 2) => (mono(int(48), 8), None),
        (3, 0) => (mono(int(1), 4), Some(5)),
        (3, 1) => (mono(int(8), 6), Some(6)),
        (3, 2) => (mono(int(96), 8), None),
        (4, 0) => (zero, Some(5)),
        (4, 1) => (zero, Some(6)),
        (4, 2) => (mono(int(24), 8), None),
        _ => return None,
    };
    Some(v)
}

fn params_exact(name: &str, params: &[u32], n: usize) -> Result<(), DiagramError> {
    if params.len() != n || params.iter().any(|&p| p == 0 || p > 8) {
        return Err(DiagramError::Unknown(format!(
            "{name} with params {params:?}"
        )));
    }
    Ok(())
}

/// Evaluate a catalogued diagram generically and pair it with its printed form.
pub fn named_diagram(
    name: &str,
    params: &[u32],
    t: &PointType,
) -> Result<NamedDiagram, DiagramError> {
    let uncovered = || DiagramError::Uncovered {
        name: name.to_string(),
        ty: t.to_string(),
    };
    let mut reconstructed = false;
    let (spec, printed) = match name {
        "eta1" => {
            params_exact(name, params, 4)?;
            let (l, m, n, r) = (params[0], params[1], params[2], params[3]);
            let p = eta1_printed(l, m, n, r, t).ok_or_else(uncovered)?;
            (
                eta1_spec(l, m, n, r),
                Printed {
                    poly: p,
                    exact_through: None,
                    source: "eta1 closed form",
                },
            )
        }
        "eta2" => {
            params_exact(name, params, 1)?;
            let p = eta2_printed(params[0], t).ok_or_else(uncovered)?;
            (
                eta2_spec(params[0]),
                Printed {
                    poly: p,
                    exact_through: None,
                    source: "eta2 closed form",
                },
            )
        }
        "eta3" => {
            params_exact(name, params, 1)?;
            let p = eta3_printed(params[0], t).ok_or_else(uncovered)?;
            (
                eta3_spec(params[0]),
                Printed {
                    poly: p,
                    exact_through: None,
                    source: "eta3 closed form",
                },
            )
        }
        "xi" => {
            params_exact(name, params, 1)?;
            reconstructed = true;
            let spec = xi_spec(params[0])
                .filter(|_| params[0] <= 4)
                .ok_or_else(|| DiagramError::Unknown(format!("xi{params:?}")))?;
            let (p, k) = xi_printed(params[0], t).ok_or_else(uncovered)?;
            (
                spec,
                Printed {
                    poly: p,
                    exact_through: k,
                    source: "xi values at time 4",
                },
            )
        }
        "xi_mirror" => {
            params_exact(name, params, 0).or_else(|_| params_exact(name, params, 0))?;
            reconstructed = true;
            let spec = xi_spec(5).expect("index 5 exists");
            // Equal to ξ₂ at the leading order the time-4 assembly uses.
            let (p, k) = xi_printed(2, t).ok_or_else(uncovered)?;
            (
                spec,
                Printed {
                    poly: p,
                    exact_through: k,
                    source: "xi2 values (mirror coincidence)",
                },
            )
        }
        "f2_t2" => {
            params_exact(name, params, 0)?;
            let p = if t.entries() == 0 {
                ints(&[0, 0, 0, 2, -6, 4])
            } else if *t == ty(&[1, 1]) || *t == ty(&[2]) {
                PolyVar::zero(Var::S)
            } else {
                return Err(uncovered());
            };
            (
                f2_t2_spec(),
                Printed {
                    poly: p,
                    exact_through: None,
                    source: "F2 at time 2 with the walk table substituted",
                },
            )
        }
        "m1" => {
            params_exact(name, params, 0)?;
            let d3 = d3_printed(t).ok_or_else(uncovered)?;
            let p = d3
                .mul(&d3)
                .sub(&eta1_printed(1, 2, 1, 1, t).unwrap().scale(&int(2)))
                .add(&eta3_printed(2, t).unwrap());
            (
                m1_spec(),
                Printed {
                    poly: p,
                    exact_through: None,
                    source: "D3^2 - 2 eta1[1,2,1,1] + eta3[2]",
                },
            )
        }
        "m2" => {
            params_exact(name, params, 0)?;
            let p = eta2_printed(1, t)
                .ok_or_else(uncovered)?
                .sub(&eta1_printed(1, 2, 1, 2, t).unwrap().scale(&int(2)))
                .add(&eta3_printed(3, t).unwrap());
            (
                m2_spec(),
                Printed {
                    poly: p,
                    exact_through: None,
                    source: "eta2[1] - 2 eta1[1,2,1,2] + eta3[3]",
                },
            )
        }
        "m23" => {
            params_exact(name, params, 0)?;
            let d3 = d3_printed(t).ok_or_else(uncovered)?;
            let p = d3
                .mul(&eta1_printed(1, 1, 1, 1, t).unwrap())
                .sub(&eta1_printed(2, 2, 1, 1, t).unwrap());
            (
                m23_spec(),
                Printed {
                    poly: p,
                    exact_through: None,
                    source: "D3 eta1[1,1,1,1] - eta1[2,2,1,1]",
                },
            )
        }
        "two_square" => {
            params_exact(name, params, 0)?;
            let p = if t.entries() == 0 {
                ints(&[0, 0, 1, -1])
            } else if *t == ty(&[1, 1]) {
                mono(int(2), 4)
            } else if *t == ty(&[2]) {
                PolyVar::zero(Var::S)
            } else {
                return Err(uncovered());
            };
            (
                two_square_spec(),
                Printed {
                    poly: p,
                    exact_through: None,
                    source: "square diagram via the power-sum table",
                },
            )
        }
        _ => return Err(DiagramError::Unknown(name.to_string())),
    };
    let computed = spec.eval_generic(t)?;
    Ok(NamedDiagram {
        name: name.to_string(),
        params: params.to_vec(),
        target_type: t.clone(),
        p_exponent: spec.p_exponent,
        computed,
        printed: Some(printed),
        reconstructed,
    })
}


#[cfg(test)]
mod sweep {
    use super::*;

    #[test]
    fn every_entry_matches_printed_form() {
        let t3 = [ty(&[1]), ty(&[2, 1]), ty(&[1, 1, 1])];
        let t4 = [PointType::origin(), ty(&[1, 1]), ty(&[1, 1, 1, 1])];
        let mut rows: Vec<(&str, Vec<u32>, PointType)> = Vec::new();
        for t in &t3 {
            for n in ["m1", "m2", "m23"] {
                rows.push((n, vec![], t.clone()));
            }
            rows.push(("eta1", vec![1, 2, 1, 1], t.clone()));
            rows.push(("eta1", vec![2, 2, 1, 1], t.clone()));
            rows.push(("eta1", vec![1, 2, 1, 2], t.clone()));
            rows.push(("eta2", vec![1], t.clone()));
            rows.push(("eta3", vec![3], t.clone()));
        }
        for t in &t4 {
            for k in 1..=4 {
                rows.push(("xi", vec![k], t.clone()));
            }
            rows.push(("xi_mirror", vec![], t.clone()));
        }
        for t in [PointType::origin(), ty(&[1, 1]), ty(&[2])] {
            rows.push(("two_square", vec![], t.clone()));
            rows.push(("f2_t2", vec![], t));
        }
        for (n, p, t) in rows {
            let d = named_diagram(n, &p, &t).unwrap();
            assert_eq!(d.matches(), Some(true), "{n}{p:?} at {t}: {}", d.computed);
        }
    }
}
