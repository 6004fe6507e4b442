//! Lazily realized clusters with bond randomness keyed by position.

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;

use super::{McError, SimConfig};
use crate::walks::{LatticePoint, Site};

/// Sparse lattice site: sorted `(axis, coordinate)` pairs with nonzero coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct McSite(SmallVec<[(u16, i16); 8]>);

impl McSite {
    pub fn origin() -> Self {
        McSite::default()
    }

    /// Neighbour in direction `dir`: axis `dir / 2`, positive when `dir` is even.
    pub fn step(&self, dir: usize) -> McSite {
        let axis = (dir / 2) as u16;
        let delta: i16 = if dir % 2 == 0 { 1 } else { -1 };
        let mut v = self.0.clone();
        match v.binary_search_by_key(&axis, |e| e.0) {
            Ok(i) => {
                v[i].1 += delta;
                if v[i].1 == 0 {
                    v.remove(i);
                }
            }
            Err(i) => v.insert(i, (axis, delta)),
        }
        McSite(v)
    }

    pub fn to_site(&self) -> Site {
        let pairs: Vec<(u32, i32)> = self.0.iter().map(|&(a, c)| (a as u32, c as i32)).collect();
        Site::from_pairs(&pairs)
    }

    pub fn from_site(s: &Site) -> Option<McSite> {
        let mut v = SmallVec::new();
        for &(a, c) in s.entries() {
            v.push((u16::try_from(a).ok()?, i16::try_from(c).ok()?));
        }
        Some(McSite(v))
    }

    fn key(&self) -> u64 {
        self.0.iter().fold(0x5851_f42d_4c95_7f2d, |h, &(a, c)| {
            mix(h ^ ((a as u64) << 16 | c as u16 as u64))
        })
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Bond randomness for one replica: a pure function of `(seed, replica, site, time, dir)`.
#[derive(Debug, Clone, Copy)]
pub struct BondField {
    base: u64,
    threshold: u128,
}

impl BondField {
    pub fn new(cfg: &SimConfig, replica: u64) -> Self {
        BondField {
            base: mix(cfg.seed ^ mix(replica)),
            threshold: cfg.threshold,
        }
    }

    fn site_hash(&self, x: &McSite, time: u32) -> u64 {
        mix(self.base ^ x.key() ^ mix(time as u64))
    }

    /// Directions of the open bonds out of `(x, time)`.
    fn open_dirs(&self, x: &McSite, time: u32, dirs: usize) -> impl Iterator<Item = usize> + '_ {
        let h = self.site_hash(x, time);
        (0..dirs).filter(move |&dir| (mix(h ^ dir as u64) as u128) < self.threshold)
    }
}

/// Open cluster of `(o,0)` up to the horizon.
#[derive(Debug, Clone)]
pub struct ClusterSample {
    pub d: usize,
    /// Occupied sites per slice.
    pub slices: Vec<Vec<McSite>>,
    /// For each occupied site, indices of its occupied parents with an open bond into it.
    pub parents: Vec<Vec<SmallVec<[u32; 4]>>>,
    index: Vec<FxHashMap<McSite, u32>>,
}

impl ClusterSample {
    pub fn horizon(&self) -> u32 {
        self.slices.len() as u32 - 1
    }

    pub fn find(&self, x: &McSite, t: u32) -> Option<u32> {
        self.index.get(t as usize)?.get(x).copied()
    }

    pub fn is_occupied(&self, x: &LatticePoint) -> bool {
        McSite::from_site(&x.site).is_some_and(|s| self.find(&s, x.time).is_some())
    }

    pub fn site_count(&self) -> usize {
        self.slices.iter().map(Vec::len).sum()
    }

    /// Open bonds in the realized cluster.
    pub fn bond_count(&self) -> usize {
        self.parents.iter().flatten().map(|p| p.len()).sum()
    }
}

/// Breadth-first realization of the open cluster up to `cfg.horizon`.
pub fn grow_cluster(cfg: &SimConfig, replica: u64) -> Result<ClusterSample, McError> {
    let field = BondField::new(cfg, replica);
    let dirs = 2 * cfg.d;
    let mut slices = vec![vec![McSite::origin()]];
    let mut parents = vec![vec![SmallVec::new()]];
    let mut index = vec![FxHashMap::from_iter([(McSite::origin(), 0u32)])];
    let mut total = 1usize;
    for t in 0..cfg.horizon {
        let mut next: Vec<McSite> = Vec::new();
        let mut next_parents: Vec<SmallVec<[u32; 4]>> = Vec::new();
        let mut next_index: FxHashMap<McSite, u32> = FxHashMap::default();
        for (i, x) in slices[t as usize].iter().enumerate() {
            for dir in field.open_dirs(x, t, dirs) {
                let y = x.step(dir);
                let j = *next_index.entry(y.clone()).or_insert_with(|| {
                    next.push(y);
                    next_parents.push(SmallVec::new());
                    (next.len() - 1) as u32
                });
                next_parents[j as usize].push(i as u32);
            }
        }
        total += next.len();
        if total > cfg.max_sites {
            return Err(McError::Guard(format!(
                "replica {replica} exceeded {} sites",
                cfg.max_sites
            )));
        }
        slices.push(next);
        parents.push(next_parents);
        index.push(next_index);
    }
    Ok(ClusterSample {
        d: cfg.d,
        slices,
        parents,
        index,
    })
}

/// Deepest slice reached by the open cluster, searching depth-first and
/// stopping as soon as `horizon` is reached.
pub fn survival_depth(cfg: &SimConfig, replica: u64) -> Result<u32, McError> {
    let field = BondField::new(cfg, replica);
    let dirs = 2 * cfg.d;
    let mut seen: FxHashSet<(u32, McSite)> = FxHashSet::default();
    let mut stack = vec![(0u32, McSite::origin())];
    let mut deepest = 0;
    while let Some((t, x)) = stack.pop() {
        deepest = deepest.max(t);
        if t == cfg.horizon {
            break;
        }
        for dir in field.open_dirs(&x, t, dirs) {
            let y = x.step(dir);
            if seen.insert((t + 1, y.clone())) {
                stack.push((t + 1, y));
            }
        }
        if seen.len() > cfg.max_sites {
            return Err(McError::Guard(format!(
                "replica {replica} exceeded {} sites",
                cfg.max_sites
            )));
        }
    }
    Ok(deepest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::{int, rat};

    #[test]
    fn steps_round_trip() {
        let o = McSite::origin();
        assert_eq!(o.step(0).step(1), o);
        assert_eq!(o.step(5).to_site(), Site::unit(2, -1));
        assert_eq!(
            McSite::from_site(&Site::from_dense(&[1, 0, -2]))
                .unwrap()
                .to_site(),
            Site::from_dense(&[1, 0, -2])
        );
    }

    #[test]
    fn extreme_probabilities() {
        let cfg = SimConfig::new(1, &int(0), 3, 1, 7).unwrap();
        let c = grow_cluster(&cfg, 0).unwrap();
        assert_eq!(c.site_count(), 1);
        let cfg = SimConfig::new(1, &int(2), 3, 1, 7).unwrap();
        let c = grow_cluster(&cfg, 0).unwrap();
        let sizes: Vec<usize> = c.slices.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
        assert_eq!(survival_depth(&cfg, 0).unwrap(), 3);
    }

    #[test]
    fn clusters_are_deterministic_and_monotone() {
        let lo = SimConfig::new(3, &rat(9, 10), 6, 1, 11).unwrap();
        let hi = SimConfig::new(3, &rat(12, 10), 6, 1, 11).unwrap();
        for r in 0..200 {
            let a = grow_cluster(&lo, r).unwrap();
            let b = grow_cluster(&lo, r).unwrap();
            assert_eq!(a.slices, b.slices);
            let c = grow_cluster(&hi, r).unwrap();
            for (t, slice) in a.slices.iter().enumerate() {
                for x in slice {
                    assert!(c.find(x, t as u32).is_some());
                }
            }
            let reached = a.slices.iter().rposition(|s| !s.is_empty()).unwrap() as u32;
            assert_eq!(survival_depth(&lo, r).unwrap(), reached);
        }
    }
}
