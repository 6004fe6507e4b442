//! Finite-horizon bisection for the critical point.
//!
//! Replicas share bond variates across every trial `p`, so survival is
//! monotone in `p` replica by replica.

use serde::Serialize;

use super::{survival_depth, tally, Estimate, McError, SimConfig};
use crate::qalg::{fmt_rat, int, Rational};

/// Which finite-horizon statistic crosses zero at the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SurvivalCriterion {
    /// `P(slice T reached) = θ`.
    Threshold(f64),
    /// `P(slice T reached) / P(slice T/2 reached) = 1/2`, the critical `1/T` decay.
    HalvingRatio,
}

impl SurvivalCriterion {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "halving" | "ratio" => Some(SurvivalCriterion::HalvingRatio),
            _ => text
                .parse::<f64>()
                .ok()
                .filter(|x| *x > 0.0 && *x < 1.0)
                .map(SurvivalCriterion::Threshold),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectConfig {
    pub d: usize,
    pub horizon: u32,
    pub replicas: u64,
    pub seed: u64,
    pub threads: usize,
    pub criterion: SurvivalCriterion,
    pub tol: f64,
    pub low: Rational,
    pub high: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketStep {
    pub p: String,
    pub p_value: f64,
    /// Estimated statistic minus its target.
    pub excess: f64,
    pub stderr: f64,
    pub survived_full: u64,
    pub survived_half: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bisection {
    pub p_low: String,
    pub p_high: String,
    pub p_mid: f64,
    pub criterion: SurvivalCriterion,
    pub horizon: u32,
    pub replicas: u64,
    /// The statistic at the final midpoint.
    pub estimate: Estimate,
    pub history: Vec<BracketStep>,
}

fn evaluate(
    base: &SimConfig,
    p: &Rational,
    criterion: SurvivalCriterion,
) -> Result<(BracketStep, Estimate), McError> {
    let cfg = base.with_p(p)?;
    let half = cfg.horizon / 2;
    let t = tally(&cfg, 2, |r| {
        let depth = survival_depth(&cfg, r)?;
        Ok(vec![(depth >= cfg.horizon) as u64, (depth >= half) as u64])
    })?;
    let n = cfg.replicas;
    let full = t.estimate(0, n);
    let (full_count, half_count) = (t.sum[0] as u64, t.sum[1] as u64);
    let (excess, est) = match criterion {
        SurvivalCriterion::Threshold(theta) => (full.mean - theta, full.clone()),
        SurvivalCriterion::HalvingRatio => {
            let ratio = if half_count == 0 {
                0.0
            } else {
                full_count as f64 / half_count as f64
            };
            let stderr = if half_count == 0 {
                f64::INFINITY
            } else {
                (ratio * (1.0 - ratio) / half_count as f64).sqrt()
            };
            (
                ratio - 0.5,
                Estimate {
                    mean: ratio,
                    stderr,
                    n: half_count,
                    raw_count: Some(full_count),
                },
            )
        }
    };
    let step = BracketStep {
        p: fmt_rat(p),
        p_value: crate::qalg::rat_to_f64(p),
        excess,
        stderr: est.stderr,
        survived_full: full_count,
        survived_half: half_count,
    };
    Ok((step, est))
}

/// Bisect on `p` until the bracket is narrower than `tol`.
///
/// A heuristic: the horizon is finite, so the result carries a bias that
/// shrinks with `T` and is not controlled here.
pub fn bisect_pc(cfg: &BisectConfig) -> Result<Bisection, McError> {
    if let SurvivalCriterion::Threshold(theta) = cfg.criterion {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(McError::Config(format!(
                "survival threshold {theta} outside (0,1)"
            )));
        }
    }
    if cfg.horizon < 2 {
        return Err(McError::Config(
            "bisection needs a horizon of at least 2".into(),
        ));
    }
    if !(cfg.tol > 0.0) || cfg.low >= cfg.high {
        return Err(McError::Config("need tol > 0 and low < high".into()));
    }
    let base = SimConfig::new(cfg.d, &cfg.low, cfg.horizon, cfg.replicas, cfg.seed)?
        .with_threads(cfg.threads);
    let mut history = Vec::new();
    let (lo_step, _) = evaluate(&base, &cfg.low, cfg.criterion)?;
    let (hi_step, _) = evaluate(&base, &cfg.high, cfg.criterion)?;
    let bracketed = lo_step.excess < 0.0 && hi_step.excess > 0.0;
    history.push(lo_step);
    history.push(hi_step);
    if !bracketed {
        return Err(McError::NotBracketed {
            low: fmt_rat(&cfg.low),
            high: fmt_rat(&cfg.high),
        });
    }
    let (mut lo, mut hi) = (cfg.low.clone(), cfg.high.clone());
    loop {
        let mid = (&lo + &hi) / int(2);
        let (step, est) = evaluate(&base, &mid, cfg.criterion)?;
        let above = step.excess > 0.0;
        history.push(step);
        if above {
            hi = mid.clone();
        } else {
            lo = mid.clone();
        }
        if crate::qalg::rat_to_f64(&(&hi - &lo)) <= cfg.tol {
            return Ok(Bisection {
                p_low: fmt_rat(&lo),
                p_high: fmt_rat(&hi),
                p_mid: crate::qalg::rat_to_f64(&((&lo + &hi) / int(2))),
                criterion: cfg.criterion,
                horizon: cfg.horizon,
                replicas: cfg.replicas,
                estimate: est,
                history,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(criterion: SurvivalCriterion) -> BisectConfig {
        BisectConfig {
            d: 4,
            horizon: 16,
            replicas: 2000,
            seed: 3,
            threads: 1,
            criterion,
            tol: 1.0 / 64.0,
            low: int(1) / int(2),
            high: int(2),
        }
    }

    #[test]
    fn bracket_narrows_to_tolerance() {
        let b = bisect_pc(&config(SurvivalCriterion::Threshold(0.2))).unwrap();
        assert!(b.history.len() >= 7);
        let lo: Rational = crate::qalg::parse_rational(&b.p_low).unwrap();
        let hi: Rational = crate::qalg::parse_rational(&b.p_high).unwrap();
        assert!(crate::qalg::rat_to_f64(&(hi - lo)) <= 1.0 / 64.0);
        assert!(b.p_mid > 0.9 && b.p_mid < 1.6, "{}", b.p_mid);
    }

    #[test]
    fn unbracketed_threshold_is_reported() {
        let mut c = config(SurvivalCriterion::Threshold(0.2));
        c.low = int(3) / int(2);
        assert!(matches!(bisect_pc(&c), Err(McError::NotBracketed { .. })));
        assert!(bisect_pc(&config(SurvivalCriterion::Threshold(1.5))).is_err());
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!(
            SurvivalCriterion::parse("halving"),
            Some(SurvivalCriterion::HalvingRatio)
        );
        assert_eq!(
            SurvivalCriterion::parse("0.5"),
            Some(SurvivalCriterion::Threshold(0.5))
        );
        assert_eq!(SurvivalCriterion::parse("1.5"), None);
    }
}
