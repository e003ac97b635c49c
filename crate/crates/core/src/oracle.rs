//! Brute-force ground truth, written independently of the production
//! enumeration and search code.

use crate::density::Codensity;
use crate::graph::{Edge, EdgeId, Multigraph, VertexId};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_COVER_EDGE_CAP: usize = 16;
pub const DEFAULT_BRUTE_VERTEX_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} is {actual}, above the cap of {cap}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        cap: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifyFailure {
    #[error("cover {cover} uses {edge}, which is not an edge of the graph")]
    UnknownEdge { cover: usize, edge: EdgeId },
    #[error("{edge} appears in covers {first} and {second}")]
    SharedEdge {
        edge: EdgeId,
        first: usize,
        second: usize,
    },
    #[error("cover {cover} does not saturate {vertex}")]
    Uncovered { cover: usize, vertex: VertexId },
}

/// Checks that `covers` are pairwise disjoint edge covers of `g`.
pub fn verify_decomposition(g: &Multigraph, covers: &[Vec<EdgeId>]) -> Result<(), VerifyFailure> {
    let mut owner: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (i, cover) in covers.iter().enumerate() {
        for &e in cover {
            if !g.contains_edge(e) {
                return Err(VerifyFailure::UnknownEdge { cover: i, edge: e });
            }
            match owner.get(&e) {
                Some(&first) if first != i => {
                    return Err(VerifyFailure::SharedEdge {
                        edge: e,
                        first,
                        second: i,
                    })
                }
                _ => {
                    owner.insert(e, i);
                }
            }
        }
    }
    for (i, cover) in covers.iter().enumerate() {
        let mut hit = vec![false; g.vertex_count()];
        for e in cover.iter().filter_map(|&e| g.edge(e)) {
            hit[e.u.0] = true;
            hit[e.v.0] = true;
        }
        if let Some(v) = hit.iter().position(|&h| !h) {
            return Err(VerifyFailure::Uncovered {
                cover: i,
                vertex: VertexId(v),
            });
        }
    }
    Ok(())
}

struct Partition<'a> {
    edges: &'a [(usize, usize)],
    parts: usize,
    all: u64,
    covered: Vec<u64>,
    left_at: Vec<usize>,
}

impl Partition<'_> {
    fn feasible(&self, remaining: usize) -> bool {
        let mut need = 0;
        for c in &self.covered {
            need += ((self.all & !c).count_ones() as usize).div_ceil(2);
        }
        if need > remaining {
            return false;
        }
        (0..self.left_at.len()).all(|v| {
            let short = self.covered.iter().filter(|&&c| c >> v & 1 == 0).count();
            short <= self.left_at[v]
        })
    }

    fn run(&mut self, i: usize, opened: usize) -> bool {
        if i == self.edges.len() {
            return self.covered.iter().all(|&c| c == self.all);
        }
        let (a, b) = self.edges[i];
        self.left_at[a] -= 1;
        self.left_at[b] -= 1;
        let limit = (opened + 1).min(self.parts);
        let mut found = false;
        for p in 0..limit {
            let saved = self.covered[p];
            let gain = (1u64 << a | 1u64 << b) & !saved;
            // Once every part exists, an edge adding nothing new anywhere is
            // only tried in the first part.
            if gain == 0 && opened == self.parts && p > 0 {
                continue;
            }
            self.covered[p] |= 1u64 << a | 1u64 << b;
            if self.feasible(self.edges.len() - i - 1) && self.run(i + 1, opened.max(p + 1)) {
                found = true;
            }
            self.covered[p] = saved;
            if found {
                break;
            }
        }
        self.left_at[a] += 1;
        self.left_at[b] += 1;
        found
    }
}

/// Whether the edges of `g` split into exactly `t` edge covers.
pub fn partitions_into_covers(g: &Multigraph, t: usize) -> Result<bool, OracleError> {
    let n = g.vertex_count();
    if n > 64 {
        return Err(OracleError::TooLarge {
            what: "vertex count",
            actual: n,
            cap: 64,
        });
    }
    if t == 0 {
        return Ok(true);
    }
    let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u.0, e.v.0)).collect();
    // Edges at low-degree vertices first: their placement is most forced.
    let deg = g.degrees();
    edges.sort_by_key(|&(a, b)| (deg[a].min(deg[b]), a, b));
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = Partition {
        edges: &edges,
        parts: t,
        all,
        covered: vec![0; t],
        left_at: deg,
    };
    Ok(search.feasible(edges.len()) && search.run(0, 0))
}

/// The largest number of pairwise disjoint edge covers of `g`.
pub fn brute_cover_index(g: &Multigraph, cap: usize) -> Result<usize, OracleError> {
    if g.edge_count() > cap {
        return Err(OracleError::TooLarge {
            what: "edge count",
            actual: g.edge_count(),
            cap,
        });
    }
    if g.vertex_count() == 0 {
        return Ok(0);
    }
    let delta = g.degrees().into_iter().min().unwrap_or(0);
    for t in (1..=delta).rev() {
        if partitions_into_covers(g, t)? {
            return Ok(t);
        }
    }
    Ok(0)
}

/// Co-density by direct recursion over every vertex subset.
pub fn brute_codensity(g: &Multigraph) -> Result<Codensity, OracleError> {
    let n = g.vertex_count();
    if n > DEFAULT_BRUTE_VERTEX_CAP {
        return Err(OracleError::TooLarge {
            what: "vertex count",
            actual: n,
            cap: DEFAULT_BRUTE_VERTEX_CAP,
        });
    }
    let mut best: Option<Ratio<u64>> = None;
    let mut chosen = vec![false; n];
    walk(g.edges(), &mut chosen, 0, 0, &mut best);
    Ok(best.map_or(Codensity::Infinite, Codensity::Finite))
}

fn walk(edges: &[Edge], chosen: &mut [bool], v: usize, size: usize, best: &mut Option<Ratio<u64>>) {
    if v == chosen.len() {
        if size >= 3 && size % 2 == 1 {
            let touching = edges.iter().filter(|e| chosen[e.u.0] || chosen[e.v.0]).count() as u64;
            let r = Ratio::new(2 * touching, size as u64 + 1);
            if best.is_none_or(|b| r < b) {
                *best = Some(r);
            }
        }
        return;
    }
    chosen[v] = true;
    walk(edges, chosen, v + 1, size + 1, best);
    chosen[v] = false;
    walk(edges, chosen, v + 1, size, best);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub n: usize,
    pub max_multiplicity: usize,
    /// Chance that a vertex pair is joined at all.
    pub edge_probability: f64,
    pub seed: u64,
    /// Join components with extra single edges.
    pub connected: bool,
}

impl FuzzConfig {
    pub fn new(n: usize, max_multiplicity: usize, seed: u64) -> Self {
        Self {
            n,
            max_multiplicity,
            edge_probability: 0.5,
            seed,
            connected: true,
        }
    }
}

/// Each pair is joined with probability `edge_probability`, with a uniform
/// multiplicity in `1..=max_multiplicity`.
pub fn random_multigraph(cfg: &FuzzConfig) -> Multigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let mut pairs = Vec::new();
    let p = cfg.edge_probability.clamp(0.0, 1.0);
    for a in 0..n {
        for b in a + 1..n {
            if cfg.max_multiplicity > 0 && rng.gen_bool(p) {
                let m = rng.gen_range(1..=cfg.max_multiplicity);
                pairs.extend(std::iter::repeat_n((a, b), m));
            }
        }
    }
    if cfg.connected && n > 1 && cfg.max_multiplicity > 0 {
        let mut root: Vec<usize> = (0..n).collect();
        fn find(root: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        for &(a, b) in &pairs {
            let (ra, rb) = (find(&mut root, a), find(&mut root, b));
            root[ra] = rb;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        for w in order.windows(2) {
            let (ra, rb) = (find(&mut root, w[0]), find(&mut root, w[1]));
            if ra != rb {
                root[ra] = rb;
                pairs.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        pairs.sort();
    }
    Multigraph::build(n, &pairs).expect("generated pairs are loopless and in range")
}

/// Joins several tight odd gadgets: a gadget `U` of odd size `m ≤ k` has
/// every degree `k+1`, `((k+2)(m−1)+2)/2` internal edges and `k − m`
/// boundary edges, so it is an optimal set whenever the bound is `k`.
/// Returns `None` when the sampled degree sequences do not realize.
pub fn random_tight_multigraph(seed: u64, max_multiplicity: usize) -> Option<Multigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = max_multiplicity.max(1);
    let sizes_for = |k: usize| -> Vec<usize> {
        (3..=k)
            .step_by(2)
            .filter(|&m| (k + 2) * (m - 1) + 2 <= mu * m * (m - 1))
            .collect()
    };
    let ks: Vec<usize> = (2..=8).filter(|&k| !sizes_for(k).is_empty()).collect();
    let k = *ks.choose(&mut rng)?;
    let sizes = sizes_for(k);
    let gadgets = rng.gen_range(2..=3);
    let mut pairs = Vec::new();
    let mut stubs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for gadget in 0..gadgets {
        let m = *sizes.choose(&mut rng)?;
        let mut boundary = vec![0; m];
        for _ in 0..k - m {
            boundary[rng.gen_range(0..m)] += 1;
        }
        let mut need: Vec<usize> = boundary.iter().map(|b| (k + 1).checked_sub(*b)).collect::<Option<_>>()?;
        let mut mult = vec![vec![0; m]; m];
        while let Some(a) = (0..m).filter(|&v| need[v] > 0).max_by_key(|&v| (need[v], v)) {
            let options: Vec<usize> = (0..m)
                .filter(|&b| b != a && need[b] > 0 && mult[a][b] < mu)
                .collect();
            let b = *options.choose(&mut rng)?;
            need[a] -= 1;
            need[b] -= 1;
            mult[a][b] += 1;
            mult[b][a] += 1;
            pairs.push((start + a.min(b), start + a.max(b)));
        }
        for (v, &b) in boundary.iter().enumerate() {
            stubs.extend(std::iter::repeat_n((gadget, start + v), b));
        }
        start += m;
    }
    stubs.shuffle(&mut rng);
    let mut mult: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    while let Some((ga, a)) = stubs.pop() {
        let j = stubs.iter().position(|&(gb, b)| {
            gb != ga && mult.get(&(a.min(b), a.max(b))).copied().unwrap_or(0) < mu
        })?;
        let (_, b) = stubs.swap_remove(j);
        *mult.entry((a.min(b), a.max(b))).or_default() += 1;
        pairs.push((a.min(b), a.max(b)));
    }
    pairs.sort();
    Multigraph::build(start, &pairs).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::{complete, cycle, petersen};

    #[test]
    fn verify_examples() {
        let k3 = complete(3);
        let all: Vec<EdgeId> = k3.edge_ids().collect();
        assert_eq!(verify_decomposition(&k3, std::slice::from_ref(&all)), Ok(()));
        assert_eq!(
            verify_decomposition(&k3, &[vec![EdgeId(0)]]),
            Err(VerifyFailure::Uncovered {
                cover: 0,
                vertex: VertexId(2)
            })
        );
        assert!(matches!(
            verify_decomposition(&k3, &[all.clone(), vec![EdgeId(1)]]),
            Err(VerifyFailure::SharedEdge { edge: EdgeId(1), .. })
        ));
        assert!(matches!(
            verify_decomposition(&k3, &[vec![EdgeId(9)]]),
            Err(VerifyFailure::UnknownEdge { .. })
        ));
        assert_eq!(verify_decomposition(&k3, &[]), Ok(()));
    }

    #[test]
    fn cover_index_examples() {
        assert_eq!(brute_cover_index(&cycle(5), 16).unwrap(), 1);
        assert_eq!(brute_cover_index(&complete(4), 16).unwrap(), 3);
        assert_eq!(brute_cover_index(&petersen(), 16).unwrap(), 2);
        assert_eq!(brute_cover_index(&complete(3), 16).unwrap(), 1);
        assert_eq!(brute_cover_index(&cycle(4), 16).unwrap(), 2);
        assert!(matches!(
            brute_cover_index(&complete(7), 16),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn codensity_examples() {
        assert_eq!(brute_codensity(&cycle(5)).unwrap(), Codensity::Finite(Ratio::new(5, 3)));
        assert_eq!(brute_codensity(&complete(4)).unwrap(), Codensity::Finite(Ratio::from_integer(3)));
        assert_eq!(brute_codensity(&complete(2)).unwrap(), Codensity::Infinite);
        assert_eq!(brute_codensity(&petersen()).unwrap(), Codensity::Finite(Ratio::from_integer(3)));
    }

    #[test]
    fn generator_is_seed_stable() {
        let cfg = FuzzConfig::new(7, 2, 42);
        let a = random_multigraph(&cfg);
        assert_eq!(a, random_multigraph(&cfg));
        assert!(a.is_connected());
        assert!(a.max_multiplicity() <= 2);
        let simple = random_multigraph(&FuzzConfig::new(8, 1, 3));
        assert!(simple.max_multiplicity() <= 1);
        assert!(simple.edge_count() <= 28);
        let other = random_multigraph(&FuzzConfig::new(7, 2, 43));
        assert_ne!(a, other);
    }

    #[test]
    fn tight_gadgets_are_regular() {
        let mut built = 0;
        for seed in 0..40 {
            if let Some(g) = random_tight_multigraph(seed, 2) {
                built += 1;
                assert_eq!(g.min_degree(), g.max_degree());
                assert!(g.max_multiplicity() <= 2);
                assert_eq!(Some(g.clone()), random_tight_multigraph(seed, 2));
            }
        }
        assert!(built > 10, "{built}");
    }
}
