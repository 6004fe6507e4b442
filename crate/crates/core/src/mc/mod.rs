//! Monte Carlo for oriented percolation: cluster growth, connection
//! statistics and a finite-horizon bisection for the critical point.

mod bisect;
mod cluster;

pub use bisect::{bisect_pc, BisectConfig, Bisection, BracketStep, SurvivalCriterion};
pub use cluster::{grow_cluster, survival_depth, BondField, ClusterSample, McSite};

use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::flow::edge_disjoint_paths;
use crate::qalg::{int, Rational};
use crate::walks::LatticePoint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum McError {
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported statistic: {0}")]
    Unsupported(String),
    #[error("criterion is not bracketed by [{low}, {high}]")]
    NotBracketed { low: String, high: String },
}

/// Default cap on realized sites per replica.
pub const DEFAULT_MAX_SITES: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub d: usize,
    pub p: Rational,
    /// Per-bond probability `p/(2d)`.
    pub q: Rational,
    /// `⌊q·2⁶⁴⌋`: a bond is open when its 64-bit variate is below this.
    pub threshold: u128,
    pub horizon: u32,
    pub replicas: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool, 1 runs sequentially.
    pub threads: usize,
    pub max_sites: usize,
}

impl SimConfig {
    pub fn new(
        d: usize,
        p: &Rational,
        horizon: u32,
        replicas: u64,
        seed: u64,
    ) -> Result<Self, McError> {
        if d == 0 || d > u16::MAX as usize / 2 {
            return Err(McError::Config(format!("dimension {d} out of range")));
        }
        if horizon > i16::MAX as u32 {
            return Err(McError::Config(format!("horizon {horizon} too large")));
        }
        if replicas == 0 {
            return Err(McError::Config("at least one replica is required".into()));
        }
        let q = p / int(2 * d as i64);
        if q < Rational::zero() || q > Rational::one() {
            return Err(McError::Config(format!(
                "p = {p} gives a bond probability outside [0,1]"
            )));
        }
        let scaled = (q.numer() << 64u32) / q.denom();
        let threshold = scaled.to_u128().unwrap_or(0);
        Ok(SimConfig {
            d,
            p: p.clone(),
            q,
            threshold,
            horizon,
            replicas,
            seed,
            threads: 0,
            max_sites: DEFAULT_MAX_SITES,
        })
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_replicas(mut self, replicas: u64) -> Self {
        self.replicas = replicas.max(1);
        self
    }

    pub fn with_p(&self, p: &Rational) -> Result<Self, McError> {
        let mut c = SimConfig::new(self.d, p, self.horizon, self.replicas, self.seed)?;
        c.threads = self.threads;
        c.max_sites = self.max_sites;
        Ok(c)
    }
}

/// Sample mean of a per-replica statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub raw_count: Option<u64>,
}

impl Estimate {
    fn from_sums(sum: u128, sumsq: u128, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum as f64 / nf;
        let var = if n > 1 {
            ((sumsq as f64) - (sum as f64) * mean) / (nf - 1.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            stderr: (var.max(0.0) / nf).sqrt(),
            n,
            raw_count: Some(sum as u64),
        }
    }

    /// `|mean − exact| ≤ k·stderr`, treating a zero stderr as exact agreement.
    pub fn within(&self, exact: f64, k: f64) -> bool {
        (self.mean - exact).abs() <= k * self.stderr + 1e-12
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    sum: Vec<u128>,
    sumsq: Vec<u128>,
}

impl Tally {
    fn new(width: usize) -> Self {
        Tally {
            sum: vec![0; width],
            sumsq: vec![0; width],
        }
    }

    fn add(&mut self, v: &[u64]) {
        for (i, &x) in v.iter().enumerate() {
            self.sum[i] += x as u128;
            self.sumsq[i] += (x as u128) * (x as u128);
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        for i in 0..self.sum.len() {
            self.sum[i] += o.sum[i];
            self.sumsq[i] += o.sumsq[i];
        }
        self
    }

    fn estimate(&self, i: usize, n: u64) -> Estimate {
        Estimate::from_sums(self.sum[i], self.sumsq[i], n)
    }
}

const BLOCK: u64 = 256;

/// Sum per-replica statistic vectors; integer sums make the result independent of scheduling.
fn tally<F>(cfg: &SimConfig, width: usize, f: F) -> Result<Tally, McError>
where
    F: Fn(u64) -> Result<Vec<u64>, McError> + Sync,
{
    let blocks = cfg.replicas.div_ceil(BLOCK);
    let block = |b: u64| -> Result<Tally, McError> {
        let mut t = Tally::new(width);
        for r in b * BLOCK..((b + 1) * BLOCK).min(cfg.replicas) {
            t.add(&f(r)?);
        }
        Ok(t)
    };
    let fold = |a: Result<Tally, McError>, b: Result<Tally, McError>| Ok(a?.merge(b?));
    match cfg.threads {
        1 => (0..blocks).map(block).fold(Ok(Tally::new(width)), fold),
        0 => (0..blocks)
            .into_par_iter()
            .map(block)
            .reduce(|| Ok(Tally::new(width)), fold),
        n => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| McError::Config(e.to_string()))?;
            pool.install(|| {
                (0..blocks)
                    .into_par_iter()
                    .map(block)
                    .reduce(|| Ok(Tally::new(width)), fold)
            })
        }
    }
}

/// Ancestor subgraph of site `j` of slice `t ≥ 1`: node 0 is the origin,
/// node 1 the target. Also returns the node count and the first-slice nodes.
fn ancestors(c: &ClusterSample, t: usize, j: u32) -> (Vec<(usize, usize)>, usize, Vec<usize>) {
    let mut ids: FxHashMap<(usize, u32), usize> = FxHashMap::default();
    ids.insert((0, 0), 0);
    ids.insert((t, j), 1);
    let mut edges = Vec::new();
    let mut frontier = vec![j];
    let mut first = if t == 1 { vec![1] } else { Vec::new() };
    for s in (1..=t).rev() {
        let mut next = Vec::new();
        for i in frontier {
            let v = ids[&(s, i)];
            for &k in &c.parents[s][i as usize] {
                let fresh = ids.len();
                let u = *ids.entry((s - 1, k)).or_insert_with(|| {
                    next.push(k);
                    fresh
                });
                if s - 1 == 1 && u == fresh {
                    first.push(u);
                }
                edges.push((u, v));
            }
        }
        frontier = next;
    }
    (edges, ids.len(), first)
}

/// Two bond-disjoint open paths from the origin to site `j` of slice `t`.
pub fn doubly_connected(c: &ClusterSample, t: u32, j: u32) -> bool {
    let t = t as usize;
    if t == 0 {
        return true;
    }
    if c.parents[t][j as usize].len() < 2 || c.slices[1].len() < 2 {
        return false;
    }
    let (edges, nodes, _) = ancestors(c, t, j);
    edge_disjoint_paths(nodes, &edges, 0, 1, 2) >= 2
}

/// Number of first steps `s` for which `{[o,s⟩ → x} ∘ {o → x}` holds, `x` = site `j` of slice `t`.
pub fn marked_first_steps(c: &ClusterSample, t: u32, j: u32) -> u64 {
    let t = t as usize;
    if t < 1 || c.parents[t][j as usize].len() < 2 || c.slices[1].len() < 2 {
        return 0;
    }
    let (edges, nodes, first) = ancestors(c, t, j);
    let mut hits = 0;
    for s_node in first {
        let split = nodes;
        let mut e: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(u, v)| !(u == 0 && v == s_node))
            .collect();
        e.push((split, 0));
        e.push((split, s_node));
        if edge_disjoint_paths(nodes + 1, &e, split, 1, 2) >= 2 {
            hits += 1;
        }
    }
    hits
}

/// Occupation of a single point.
pub fn estimate_tau(cfg: &SimConfig, x: &LatticePoint) -> Result<Estimate, McError> {
    if x.time > cfg.horizon {
        return Err(McError::Config(format!(
            "{x} lies beyond the horizon {}",
            cfg.horizon
        )));
    }
    let cfg = SimConfig {
        horizon: x.time,
        ..cfg.clone()
    };
    let t = tally(&cfg, 1, |r| {
        Ok(vec![grow_cluster(&cfg, r)?.is_occupied(x) as u64])
    })?;
    Ok(t.estimate(0, cfg.replicas))
}

fn pi0_counts(c: &ClusterSample, t: u32) -> u64 {
    (0..c.slices[t as usize].len() as u32)
        .filter(|&j| doubly_connected(c, t, j))
        .count() as u64
}

/// Doubly-connected site counts for every slice `1..=T`.
pub fn estimate_pi0_slices(cfg: &SimConfig) -> Result<Vec<Estimate>, McError> {
    let width = cfg.horizon as usize;
    let t = tally(cfg, width, |r| {
        let c = grow_cluster(cfg, r)?;
        Ok((1..=cfg.horizon).map(|t| pi0_counts(&c, t)).collect())
    })?;
    Ok((0..width).map(|i| t.estimate(i, cfg.replicas)).collect())
}

/// Mean number of doubly-connected sites at slice `t`.
pub fn estimate_pi0_sum(cfg: &SimConfig, t: u32) -> Result<Estimate, McError> {
    if t == 0 || t > cfg.horizon {
        return Err(McError::Config(format!(
            "slice {t} outside 1..={}",
            cfg.horizon
        )));
    }
    let cfg = SimConfig {
        horizon: t,
        ..cfg.clone()
    };
    let tl = tally(&cfg, 1, |r| {
        Ok(vec![pi0_counts(&grow_cluster(&cfg, r)?, t)])
    })?;
    Ok(tl.estimate(0, cfg.replicas))
}

/// Mean number of pairs `(s, x)` at slice `t` with `{[o,s⟩ → x} ∘ {o → x}`.
pub fn estimate_marked_sum(cfg: &SimConfig, t: u32) -> Result<Estimate, McError> {
    if !(2..=3).contains(&t) {
        return Err(McError::Unsupported(format!(
            "marked sums are defined for slices 2 and 3, not {t}"
        )));
    }
    if t > cfg.horizon {
        return Err(McError::Config(format!(
            "slice {t} beyond the horizon {}",
            cfg.horizon
        )));
    }
    let cfg = SimConfig {
        horizon: t,
        ..cfg.clone()
    };
    let tl = tally(&cfg, 1, |r| {
        let c = grow_cluster(&cfg, r)?;
        Ok(vec![(0..c.slices[t as usize].len() as u32)
            .map(|j| marked_first_steps(&c, t, j))
            .sum()])
    })?;
    Ok(tl.estimate(0, cfg.replicas))
}

/// Doubly-connected site count summed over slices `t_min..=t_max`.
pub fn estimate_tail(cfg: &SimConfig, t_min: u32, t_max: u32) -> Result<Estimate, McError> {
    if t_min == 0 || t_min > t_max || t_max > cfg.horizon {
        return Err(McError::Config(format!(
            "slices {t_min}..={t_max} invalid for horizon {}",
            cfg.horizon
        )));
    }
    let cfg = SimConfig {
        horizon: t_max,
        ..cfg.clone()
    };
    let tl = tally(&cfg, 1, |r| {
        let c = grow_cluster(&cfg, r)?;
        Ok(vec![(t_min..=t_max).map(|t| pi0_counts(&c, t)).sum()])
    })?;
    Ok(tl.estimate(0, cfg.replicas))
}

/// Fraction of replicas whose cluster reaches slice `T`.
pub fn estimate_survival(cfg: &SimConfig) -> Result<Estimate, McError> {
    let tl = tally(cfg, 1, |r| {
        Ok(vec![(survival_depth(cfg, r)? == cfg.horizon) as u64])
    })?;
    Ok(tl.estimate(0, cfg.replicas))
}
