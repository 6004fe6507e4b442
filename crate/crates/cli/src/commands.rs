//! Subcommand implementations.

use serde::Serialize;
use serde_json::{json, Value};

use opcrit_core::diagrams::named_diagram;
use opcrit_core::laceexp::{
    binomial_pi0_concrete, consistency_report, covered_types, pi_type_table, printed_multiplicity,
    printed_pc, reproduce_pc, ConsistencyReport, Mode, ReportOptions,
};
use opcrit_core::mc::{
    bisect_pc, estimate_marked_sum, estimate_pi0_slices, estimate_pi0_sum, estimate_survival,
    estimate_tail, estimate_tau, BisectConfig, Estimate, SimConfig, SurvivalCriterion,
};
use opcrit_core::oracle::{
    cone_build, event_poly, event_prob_exact, parse_event, t2_factorized_prob, EventSpec,
    OracleError,
};
use opcrit_core::qalg::{fmt_rat, int, parse_rational, rat, rat_to_f64, Rational};
use opcrit_core::walks::{orbit_count, LatticePoint, PointType, Site};

use crate::output::{RunManifest, Sink};
use crate::{CliError, SeriesOpts, SimOpts};

pub struct Ctx {
    pub args: Vec<String>,
    pub sink: Sink,
    pub threads: usize,
    pub fault: bool,
}

fn parse_mode(text: &str) -> Result<Mode, CliError> {
    Mode::parse(text)
        .ok_or_else(|| CliError::Args(format!("unknown mode {text:?}; use paper or recomputed")))
}

fn parse_p(text: &str) -> Result<Rational, CliError> {
    parse_rational(text).map_err(|e| CliError::Args(e.to_string()))
}

fn coeff_strings(c: &[Rational]) -> Vec<String> {
    c.iter().map(fmt_rat).collect()
}

fn build_report(ctx: &Ctx) -> Result<ConsistencyReport, CliError> {
    Ok(consistency_report(&ReportOptions {
        corrupt_walk_table: ctx.fault,
    })?)
}

pub fn reproduce(ctx: &Ctx, o: &SeriesOpts) -> Result<u8, CliError> {
    let mode = parse_mode(&o.mode)?;
    if o.order == 0 {
        return Err(CliError::Args("order must be at least 1".into()));
    }
    let (one_round, pc) = reproduce_pc(mode, o.order)?;
    let got = coeff_strings(&pc.series.coeffs()[..=o.order]);
    let expected = coeff_strings(&printed_pc().coeffs()[..=o.order]);
    let reproduced = got == expected;
    let report = build_report(ctx)?;
    let first = report.first_unflagged_failure().map(|c| c.name.clone());
    let deviations: Vec<Value> = got
        .iter()
        .zip(&expected)
        .enumerate()
        .filter(|(_, (g, e))| g != e)
        .map(|(j, (g, e))| json!({ "s_power": j, "derived": g, "printed": e, "flag": opcrit_core::laceexp::FLAG_PI0_INPUTS }))
        .collect();
    let mut m = RunManifest::new("reproduce", &ctx.args);
    m.order = Some(o.order);
    m.mode = Some(mode.name().into());
    let result = json!({
        "mode": mode.name(),
        "order": o.order,
        "one_round_form": one_round.to_string(),
        "pc_series": got,
        "expected": expected,
        "reproduced": reproduced,
        "rounds": pc.rounds,
        "deviations": deviations,
        "summary": report.summary,
        "flagged": report.flagged,
        "first_unflagged_failure": first,
    });
    ctx.sink.json(&m, &result)?;
    if let Some(name) = first {
        return Err(CliError::Mismatch(name));
    }
    if !reproduced && mode == Mode::PaperFaithful {
        return Err(CliError::Mismatch(format!(
            "p_c series {got:?} differs from {expected:?}"
        )));
    }
    Ok(0)
}

pub fn pc(ctx: &Ctx, o: &SeriesOpts) -> Result<u8, CliError> {
    let mode = parse_mode(&o.mode)?;
    if o.order == 0 {
        return Err(CliError::Args("order must be at least 1".into()));
    }
    let (one_round, pc) = reproduce_pc(mode, o.order)?;
    let mut m = RunManifest::new("pc", &ctx.args);
    m.order = Some(o.order);
    m.mode = Some(mode.name().into());
    let series = coeff_strings(&pc.series.coeffs()[..=o.order]);
    ctx.sink.json(&m, &json!({ "one_round_form": one_round.to_string(), "pc_series": series, "series_text": pc.series.to_string() }))?;
    Ok(0)
}

pub fn report(ctx: &Ctx) -> Result<u8, CliError> {
    let report = build_report(ctx)?;
    ctx.sink
        .json(&RunManifest::new("report", &ctx.args), &report)?;
    match report.first_unflagged_failure() {
        Some(c) => Err(CliError::Mismatch(c.name.clone())),
        None => Ok(0),
    }
}

pub fn diagram(ctx: &Ctx, name: &str, params: &str, target: &str) -> Result<u8, CliError> {
    let params: Vec<u32> = if params.trim().is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| CliError::Args(format!("bad diagram parameter {p:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    let t = PointType::parse(target).map_err(|e| CliError::Args(e.to_string()))?;
    let nd = named_diagram(name, &params, &t)?;
    ctx.sink
        .json(&RunManifest::new("diagram", &ctx.args), &nd.to_json_value())?;
    match nd.matches() {
        Some(false) => Err(CliError::Mismatch(format!(
            "{name}{params:?} at {t} differs from its printed form"
        ))),
        _ => Ok(0),
    }
}

pub fn table(ctx: &Ctx, n: u8, time: u32, mode: &str) -> Result<u8, CliError> {
    let mode = parse_mode(mode)?;
    let mut rows = Vec::new();
    for t in covered_types(n, time)? {
        let e = pi_type_table(n, time, &t, mode)?;
        let mult = match mode {
            Mode::PaperFaithful => printed_multiplicity(time, &t),
            Mode::Recomputed => orbit_count(&t),
        };
        rows.push(json!({
            "type": t.to_string(),
            "value": e.value.to_string(),
            "known_order": e.known_order(),
            "multiplicity": mult.to_string(),
            "provenance": e.provenance,
        }));
    }
    let mut m = RunManifest::new("table", &ctx.args);
    m.mode = Some(mode.name().into());
    ctx.sink
        .json(&m, &json!({ "n": n, "time": time, "entries": rows }))?;
    Ok(0)
}

pub fn oracle(
    ctx: &Ctx,
    d: usize,
    horizon: u32,
    event: &str,
    p: &str,
    poly: bool,
) -> Result<u8, CliError> {
    let p = parse_p(p)?;
    let e = parse_event(event)?;
    let (value, method, q_poly) = match cone_build(d, horizon).and_then(|c| {
        let v = event_prob_exact(&c, &e, &p)?;
        let qp = if poly {
            Some(event_poly(&c, &e)?)
        } else {
            None
        };
        Ok((v, qp))
    }) {
        Ok((v, qp)) => (v, "enumeration", qp),
        Err(OracleError::Guard(why)) => {
            if horizon > 2 || poly {
                return Err(CliError::Guard(why));
            }
            (t2_factorized_prob(d, &e, &p)?, "slice_factorized", None)
        }
        Err(err) => return Err(err.into()),
    };
    let mut result = json!({
        "event": e.to_string(),
        "d": d,
        "T": horizon,
        "p": fmt_rat(&p),
        "probability": fmt_rat(&value),
        "approx": rat_to_f64(&value),
        "method": method,
    });
    if let Some(qp) = q_poly {
        result["poly_q"] = json!(coeff_strings(qp.coeffs()));
    }
    ctx.sink
        .json(&RunManifest::new("oracle", &ctx.args), &result)?;
    Ok(0)
}

fn sim_config(ctx: &Ctx, o: &SimOpts) -> Result<SimConfig, CliError> {
    Ok(
        SimConfig::new(o.d, &parse_p(&o.p)?, o.horizon, o.replicas, o.seed)?
            .with_threads(ctx.threads),
    )
}

fn row(stat: &str, slice: &str, e: &Estimate) -> String {
    let raw = e.raw_count.map(|c| c.to_string()).unwrap_or_default();
    format!("{stat},{slice},{},{},{},{raw}", e.mean, e.stderr, e.n)
}

pub fn simulate(ctx: &Ctx, o: &SimOpts, stat: &str, t_min: u32) -> Result<u8, CliError> {
    let cfg = sim_config(ctx, o)?;
    let rows = match stat {
        "pi0" => estimate_pi0_slices(&cfg)?
            .iter()
            .enumerate()
            .map(|(i, e)| row(stat, &(i + 1).to_string(), e))
            .collect(),
        "marked" => vec![row(
            stat,
            &o.horizon.to_string(),
            &estimate_marked_sum(&cfg, o.horizon)?,
        )],
        "tail" => vec![row(
            stat,
            &format!("{t_min}-{}", o.horizon),
            &estimate_tail(&cfg, t_min, o.horizon)?,
        )],
        "survival" => vec![row(stat, &o.horizon.to_string(), &estimate_survival(&cfg)?)],
        other => return Err(CliError::Args(format!("unknown statistic {other:?}"))),
    };
    let mut m = RunManifest::new("simulate", &ctx.args);
    m.seed = Some(o.seed);
    ctx.sink
        .csv(&m, "stat,slice,mean,stderr,n,raw_count", &rows)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
pub fn bisect(
    ctx: &Ctx,
    d: usize,
    horizon: u32,
    replicas: u64,
    seed: u64,
    criterion: &str,
    tol: f64,
    low: &str,
    high: &str,
) -> Result<u8, CliError> {
    let criterion = SurvivalCriterion::parse(criterion).ok_or_else(|| {
        CliError::Args(format!(
            "criterion {criterion:?} is neither `halving` nor a probability in (0,1)"
        ))
    })?;
    let cfg = BisectConfig {
        d,
        horizon,
        replicas,
        seed,
        threads: ctx.threads,
        criterion,
        tol,
        low: parse_p(low)?,
        high: parse_p(high)?,
    };
    let b = bisect_pc(&cfg)?;
    let mut m = RunManifest::new("bisect", &ctx.args);
    m.seed = Some(seed);
    ctx.sink.json(&m, &b)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct SuiteCheck {
    name: String,
    passed: bool,
    detail: String,
}

fn oracle_suite(checks: &mut Vec<SuiteCheck>) -> Result<(), CliError> {
    let x = LatticePoint::new(Site::origin(), 2);
    for d in 1..=3 {
        let cone = cone_build(d, 2)?;
        for p in [rat(1, 2), int(1)] {
            let exact = event_prob_exact(&cone, &EventSpec::DoubleConn(x.clone()), &p)?;
            let closed = binomial_pi0_concrete(&p, d);
            checks.push(SuiteCheck {
                name: format!("oracle:double_connection d={d} p={}", fmt_rat(&p)),
                passed: exact == closed,
                detail: format!(
                    "enumeration {} closed form {}",
                    fmt_rat(&exact),
                    fmt_rat(&closed)
                ),
            });
            for text in [
                "double((o,2))",
                "marked(e1;(o,2),(o,2))",
                "with(pair((o,0)->(e1,1),(o,0)->(-e1,1));(2e1,2))",
            ] {
                let e = parse_event(text)?;
                let a = event_prob_exact(&cone, &e, &p)?;
                let b = t2_factorized_prob(d, &e, &p)?;
                checks.push(SuiteCheck {
                    name: format!("oracle:factorized {text} d={d} p={}", fmt_rat(&p)),
                    passed: a == b,
                    detail: format!("enumeration {} factorized {}", fmt_rat(&a), fmt_rat(&b)),
                });
            }
        }
    }
    Ok(())
}

fn mc_check(checks: &mut Vec<SuiteCheck>, name: String, est: &Estimate, exact: f64, k: f64) {
    checks.push(SuiteCheck {
        name,
        passed: est.within(exact, k),
        detail: format!("estimate {} ± {} vs exact {exact}", est.mean, est.stderr),
    });
}

fn mc_suite(ctx: &Ctx, checks: &mut Vec<SuiteCheck>) -> Result<(), CliError> {
    let o = LatticePoint::origin();
    for (p, seed) in [(rat(1, 2), 17u64), (int(1), 23)] {
        let cfg = SimConfig::new(1, &p, 4, 100_000, seed)?.with_threads(ctx.threads);
        let ps = fmt_rat(&p);
        let x = LatticePoint::new(Site::origin(), 2);
        let tau = event_prob_exact(
            &cone_build(1, 2)?,
            &EventSpec::Connect(o.clone(), x.clone()),
            &p,
        )?;
        mc_check(
            checks,
            format!("mc:tau (o,2) d=1 p={ps}"),
            &estimate_tau(&cfg, &x)?,
            rat_to_f64(&tau),
            4.0,
        );
        let slices = estimate_pi0_slices(&cfg)?;
        for t in 1..=4u32 {
            let cone = cone_build(1, t)?;
            let mut exact = Rational::from_integer(0.into());
            for y in &cone.slices[t as usize] {
                exact += event_prob_exact(&cone, &EventSpec::DoubleConn(y.clone()), &p)?;
            }
            mc_check(
                checks,
                format!("mc:pi0 slice {t} d=1 p={ps}"),
                &slices[t as usize - 1],
                rat_to_f64(&exact),
                4.0,
            );
        }
        let cone = cone_build(1, 2)?;
        let mut marked = Rational::from_integer(0.into());
        for y in &cone.slices[2] {
            for s in Site::origin().neighbors(1) {
                let e = EventSpec::MarkedFirstBond {
                    s,
                    x: y.clone(),
                    y: y.clone(),
                };
                marked += event_prob_exact(&cone, &e, &p)?;
            }
        }
        mc_check(
            checks,
            format!("mc:marked slice 2 d=1 p={ps}"),
            &estimate_marked_sum(&cfg, 2)?,
            rat_to_f64(&marked),
            4.0,
        );
    }
    let p = truncated_pc(8);
    let cfg = SimConfig::new(8, &p, 2, 100_000, 31)?.with_threads(ctx.threads);
    let exact = time2_pi0_sum(8, &p)?;
    mc_check(
        checks,
        "mc:pi0 slice 2 d=8 truncated p_c".into(),
        &estimate_pi0_sum(&cfg, 2)?,
        rat_to_f64(&exact),
        3.0,
    );
    Ok(())
}

/// `1 + s² + (7/2)s³ + (129/8)s⁴` at `s = 1/(2d)`.
pub fn truncated_pc(d: usize) -> Rational {
    let s = rat(1, 2 * d as i64);
    printed_pc()
        .coeffs()
        .iter()
        .rev()
        .fold(int(0), |acc, c| acc * &s + c)
}

/// Exact `Σ_x P(o ⇒ x)` over the time-2 slice: one factorized value per orbit.
pub fn time2_pi0_sum(d: usize, p: &Rational) -> Result<Rational, CliError> {
    let mut total = int(0);
    for shape in [vec![], vec![2], vec![1, 1]] {
        let t = if shape.is_empty() {
            PointType::origin()
        } else {
            PointType::new(shape).map_err(|e| CliError::Args(e.to_string()))?
        };
        if t.min_dimension() > d {
            continue;
        }
        let x = LatticePoint::new(t.representative(), 2);
        let v = t2_factorized_prob(d, &EventSpec::DoubleConn(x), p)?;
        total += orbit_count(&t).eval(&int(d as i64)) * v;
    }
    Ok(total)
}

pub fn verify(ctx: &Ctx, full: bool) -> Result<u8, CliError> {
    let report = build_report(ctx)?;
    let mut checks: Vec<SuiteCheck> = report
        .checks
        .iter()
        .map(|c| SuiteCheck {
            name: c.name.clone(),
            passed: c.is_match() || c.flag.is_some(),
            detail: match c.flag {
                Some(f) if !c.is_match() => format!("flagged discrepancy {f}"),
                _ => c.category.to_string(),
            },
        })
        .collect();
    oracle_suite(&mut checks)?;
    if full {
        mc_suite(ctx, &mut checks)?;
    }
    let first = checks.iter().find(|c| !c.passed).map(|c| c.name.clone());
    let passed = checks.iter().filter(|c| c.passed).count();
    let result = json!({
        "level": if full { "full" } else { "fast" },
        "passed": passed,
        "total": checks.len(),
        "first_failure": first,
        "checks": checks,
    });
    ctx.sink
        .json(&RunManifest::new("verify", &ctx.args), &result)?;
    match first {
        Some(name) => Err(CliError::Mismatch(name)),
        None => Ok(0),
    }
}
