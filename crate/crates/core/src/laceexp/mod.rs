//! Lace-expansion coefficient tables, per-time sums, the three totals that
//! feed the critical-point identity, and the fixed-point series for `p_c`.
//!
//! Values are polynomials in the formal symbol `P` (standing for `p_c`)
//! with coefficients truncated power series in `s`.

mod binomial;
mod report;
mod tables;

pub use binomial::{
    binomial_pi0_concrete, binomial_pi0_origin, binomial_pi0_series, binomial_pi1_origin,
};
pub use report::{
    consistency_report, Check, CheckStatus, ConsistencyReport, Flagged, ReportOptions, Summary,
    FLAG_PI0_INPUTS, FLAG_TOTAL_SIGN,
};
pub use tables::{covered_types, pi_type_table, printed_multiplicity, PiEntry, Term};

use serde::Serialize;

use crate::diagrams::DiagramError;
use crate::qalg::{rat, PPoly, QalgError, Rational, SeriesS};
use crate::walks::{orbit_count, WalkError};

/// Order in `s` through which every per-time sum is known.
pub const SUM_ORDER: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum LaceError {
    #[error("no table entry for coefficient {n} at time {time}, type {ty}")]
    Uncovered { n: u8, time: u32, ty: String },
    #[error("fixed point not reached after {0} rounds")]
    NoConvergence(usize),
    #[error("coefficient total must vanish at s = 0")]
    NonzeroConstant,
    #[error("requested order {order} exceeds the known order {known}")]
    Order { order: usize, known: usize },
    #[error(transparent)]
    Qalg(#[from] QalgError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    PaperFaithful,
    Recomputed,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::PaperFaithful => "paper_faithful",
            Mode::Recomputed => "recomputed",
        }
    }

    pub fn parse(text: &str) -> Option<Mode> {
        match text {
            "paper_faithful" | "paper" => Some(Mode::PaperFaithful),
            "recomputed" => Some(Mode::Recomputed),
            _ => None,
        }
    }
}

/// Multiply a per-type value by a multiplicity polynomial in `d`, with `d = 1/(2s)`.
pub fn weight_by_multiplicity(
    value: &PPoly,
    mult: &crate::qalg::PolyVar,
) -> Result<PPoly, LaceError> {
    let mut out: Option<PPoly> = None;
    for (j, c) in mult.coeffs().iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let factor = c / Rational::from_integer(num_bigint::BigInt::from(1u64 << j));
        let term = value.shift_down(j)?.scale(&factor);
        out = Some(match out {
            None => term,
            Some(acc) => acc.add(&term),
        });
    }
    Ok(out.unwrap_or_else(|| PPoly::zero(value.order())))
}

/// Σ over covered types of multiplicity × per-type value, through `s⁴`.
///
/// Paper-faithful mode uses the printed multiplicities; recomputed mode uses
/// [`orbit_count`].
pub fn pi_time_sum(n: u8, time: u32, mode: Mode) -> Result<PPoly, LaceError> {
    let mut acc = PPoly::zero(SUM_ORDER);
    for ty in covered_types(n, time)? {
        let entry = pi_type_table(n, time, &ty, mode)?;
        let mult = match mode {
            Mode::PaperFaithful => printed_multiplicity(time, &ty),
            Mode::Recomputed => orbit_count(&ty),
        };
        acc = acc.add(&weight_by_multiplicity(&entry.value, &mult)?);
    }
    Ok(acc.truncate(SUM_ORDER))
}

/// The three totals `ΣΠ⁽⁰⁾`, `ΣΠ⁽¹⁾` (times 2–4) and `ΣΠ⁽²⁾` (times 3–4).
pub fn pi_totals(mode: Mode) -> Result<(PPoly, PPoly, PPoly), LaceError> {
    let mut out = [
        PPoly::zero(SUM_ORDER),
        PPoly::zero(SUM_ORDER),
        PPoly::zero(SUM_ORDER),
    ];
    for n in 0..3u8 {
        let first = if n == 2 { 3 } else { 2 };
        for time in first..=4 {
            out[n as usize] = out[n as usize].add(&pi_time_sum(n, time, mode)?);
        }
    }
    let [a, b, c] = out;
    Ok((a, b, c))
}

/// `Π⁽⁰⁾ − Π⁽¹⁾ + Π⁽²⁾`.
pub fn pi_total(parts: &(PPoly, PPoly, PPoly)) -> PPoly {
    parts.0.sub(&parts.1).add(&parts.2)
}

/// Printed form of the first total, with its `s⁴` coefficient as displayed (`−111/8`).
pub fn printed_total_pi0() -> PPoly {
    tables::pp(
        SUM_ORDER,
        &[(4, 1, 1, 2), (6, 9, 2, 3), (4, -3, 2, 3), (0, -111, 8, 4)],
    )
}

pub fn printed_total_pi1() -> PPoly {
    tables::pp(
        SUM_ORDER,
        &[(4, 2, 1, 2), (6, 19, 2, 3), (4, -3, 1, 3), (0, 29, 1, 4)],
    )
}

pub fn printed_total_pi2() -> PPoly {
    tables::pp(SUM_ORDER, &[(0, 4, 1, 4)])
}

/// Printed one-round form `1 + P⁵s² + (P⁵/2)(10P² − 3)s³ + (89/8)s⁴`.
pub fn printed_one_round() -> PPoly {
    tables::pp(
        SUM_ORDER,
        &[
            (0, 1, 1, 0),
            (5, 1, 1, 2),
            (7, 5, 1, 3),
            (5, -3, 2, 3),
            (0, 89, 8, 4),
        ],
    )
}

/// `1 + s² + (7/2)s³ + (129/8)s⁴`.
pub fn printed_pc() -> SeriesS {
    SeriesS::from_coeffs(
        vec![rat(1, 1), rat(0, 1), rat(1, 1), rat(7, 2), rat(129, 8)],
        SUM_ORDER,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PcStage {
    KkForm,
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcSeries {
    pub series: SeriesS,
    pub stage: PcStage,
    pub rounds: usize,
}

/// One round of the identity: `1 − P·Σ(P)` as a polynomial in `P`.
pub fn one_round_form(pi_total: &PPoly) -> Result<PPoly, LaceError> {
    let one = PPoly::from_series(SeriesS::one(pi_total.order()));
    Ok(one.sub(&pi_total.mul_p(1)?))
}

/// Iterate `p ← 1 − p·Σ(p)` from `p = 1` until stationary through `order`.
pub fn pc_fixed_point(pi_total: &PPoly, order: usize) -> Result<PcSeries, LaceError> {
    if order > pi_total.order() {
        return Err(LaceError::Order {
            order,
            known: pi_total.order(),
        });
    }
    if pi_total
        .coeffs()
        .iter()
        .any(|c| !num_traits::Zero::is_zero(&c.coeff(0)))
    {
        return Err(LaceError::NonzeroConstant);
    }
    let total = pi_total.truncate(order);
    let mut p = SeriesS::one(order);
    for round in 1..=order + 1 {
        let next = &SeriesS::one(order) - &(&p * &total.subst(&p));
        if next == p {
            return Ok(PcSeries {
                series: p,
                stage: PcStage::Final,
                rounds: round,
            });
        }
        p = next;
    }
    Err(LaceError::NoConvergence(order + 1))
}

/// Full pipeline in the given mode: totals, one-round form, fixed point.
pub fn reproduce_pc(mode: Mode, order: usize) -> Result<(PPoly, PcSeries), LaceError> {
    let parts = pi_totals(mode)?;
    let total = pi_total(&parts);
    let one_round = one_round_form(&total)?;
    let pc = pc_fixed_point(&total, order)?;
    Ok((one_round, pc))
}
