//! Co-density, density and the Gupta bound, by exhaustive enumeration of odd
//! vertex sets.
//!
//! An odd set is a vertex set `U` with `|U| ≥ 3` odd. The co-density is the
//! minimum of `e⁺(U) / ((|U|+1)/2)` over odd sets and upper-bounds the number
//! of disjoint edge covers. All ratios are exact rationals.

use crate::graph::{Multigraph, VertexId};
use num_rational::Ratio;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

/// Largest vertex set that is enumerated exhaustively unless overridden.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Hard limit imposed by the 64-bit subset masks.
const MASK_LIMIT: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("{vertices} vertices exceed the exhaustive enumeration cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("a set of size {size} is not an odd set (need |U| >= 3 odd)")]
    BadSet { size: usize },
    #[error("optimal-set structure violated: {detail}")]
    LemmaViolation {
        detail: String,
        sets: Vec<Vec<VertexId>>,
    },
}

/// Co-density value: a reduced fraction, or `+∞` when no odd set exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Codensity {
    Finite(Ratio<u64>),
    Infinite,
}

impl Codensity {
    pub fn floor(&self) -> Option<u64> {
        match self {
            Codensity::Finite(r) => Some(r.to_integer()),
            Codensity::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Codensity::Infinite)
    }
}

impl PartialOrd for Codensity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Codensity {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Codensity::Finite(a), Codensity::Finite(b)) => a.cmp(b),
            (Codensity::Finite(_), Codensity::Infinite) => Ordering::Less,
            (Codensity::Infinite, Codensity::Finite(_)) => Ordering::Greater,
            (Codensity::Infinite, Codensity::Infinite) => Ordering::Equal,
        }
    }
}

/// Always `p/q`, even for integers, or `inf`.
impl fmt::Display for Codensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Codensity::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Codensity::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Codensity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn serialize_ratio<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

/// An odd set together with `e⁺(U)` and the exact ratio `e⁺(U)/((|U|+1)/2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OddSetCertificate {
    /// Sorted ascending.
    pub vertices: Vec<VertexId>,
    pub e_plus: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub ratio: Ratio<u64>,
}

impl OddSetCertificate {
    fn new(vertices: Vec<VertexId>, e_plus: usize) -> Self {
        let half = (vertices.len() as u64).div_ceil(2);
        OddSetCertificate {
            ratio: Ratio::new(e_plus as u64, half),
            vertices,
            e_plus,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuptaBound {
    pub delta: usize,
    pub codensity: Codensity,
    pub k: usize,
}

/// `min{δ − 1, ⌊ρ_c⌋}` clamped below at 0.
pub fn bound_from(delta: usize, codensity: Codensity) -> usize {
    let from_degree = delta.saturating_sub(1);
    match codensity.floor() {
        Some(f) => from_degree.min(f as usize),
        None => from_degree,
    }
}

/// Subset enumeration over a fixed list of vertices of a graph. Degrees are
/// taken in the whole graph, so `e⁺` counts edges leaving the scanned list.
struct OddSetScanner {
    vertices: Vec<VertexId>,
    degree: Vec<usize>,
    /// `adjacency[i][l]` has bit `j` set iff `μ(v_i, v_j) > l`.
    adjacency: Vec<Vec<u64>>,
}

impl OddSetScanner {
    fn new(g: &Multigraph, within: &[VertexId], cap: usize) -> Result<Self, DensityError> {
        let mut vertices = within.to_vec();
        vertices.sort();
        vertices.dedup();
        if vertices.len() > cap.min(MASK_LIMIT) {
            return Err(DensityError::TooLarge {
                vertices: vertices.len(),
                cap: cap.min(MASK_LIMIT),
            });
        }
        let mut local = vec![usize::MAX; g.vertex_count()];
        for (i, v) in vertices.iter().enumerate() {
            local[v.0] = i;
        }
        let n = vertices.len();
        let mut mult = vec![vec![0usize; n]; n];
        for e in g.edges() {
            let (a, b) = (local[e.u.0], local[e.v.0]);
            if a != usize::MAX && b != usize::MAX {
                mult[a][b] += 1;
                mult[b][a] += 1;
            }
        }
        let adjacency = mult
            .iter()
            .map(|row| {
                let top = row.iter().copied().max().unwrap_or(0);
                (0..top)
                    .map(|level| {
                        row.iter()
                            .enumerate()
                            .filter(|&(_, &m)| m > level)
                            .fold(0u64, |acc, (j, _)| acc | (1 << j))
                    })
                    .collect()
            })
            .collect();
        let degree = vertices.iter().map(|&v| g.degree(v)).collect();
        Ok(OddSetScanner {
            vertices,
            degree,
            adjacency,
        })
    }

    fn len(&self) -> usize {
        self.vertices.len()
    }

    fn local_index(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// `(e(U), e⁺(U))` for the subset encoded by `mask`.
    fn counts(&self, mask: u64) -> (usize, usize) {
        let mut twice_internal = 0usize;
        let mut degree_sum = 0usize;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            degree_sum += self.degree[i];
            twice_internal += self.adjacency[i]
                .iter()
                .map(|level| (level & mask).count_ones() as usize)
                .sum::<usize>();
        }
        let internal = twice_internal / 2;
        (internal, degree_sum - internal)
    }

    fn members(&self, mask: u64) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(mask.count_ones() as usize);
        let mut rest = mask;
        while rest != 0 {
            out.push(self.vertices[rest.trailing_zeros() as usize]);
            rest &= rest - 1;
        }
        out
    }

    /// Calls `visit` on every odd subset by increasing size; within a size,
    /// in increasing mask order. Stops early when `visit` returns `false`.
    fn for_each_odd(&self, mut visit: impl FnMut(u64) -> bool) {
        let n = self.len();
        let mut size = 3;
        while size <= n {
            for mask in SubsetsOfSize::new(n, size) {
                if !visit(mask) {
                    return;
                }
            }
            size += 2;
        }
    }

    fn certificate(&self, mask: u64) -> OddSetCertificate {
        let (_, e_plus) = self.counts(mask);
        OddSetCertificate::new(self.members(mask), e_plus)
    }

    /// All optimal subsets w.r.t. `k`, by increasing size.
    fn optimal_masks(&self, k: usize) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_odd(|mask| {
            let (_, e_plus) = self.counts(mask);
            if e_plus * 2 == k * (mask.count_ones() as usize + 1) {
                out.push(mask);
            }
            true
        });
        out
    }
}

/// Gosper's hack: all `size`-subsets of `0..n` in increasing numeric order.
struct SubsetsOfSize {
    next: Option<u64>,
    limit: u64,
}

impl SubsetsOfSize {
    fn new(n: usize, size: usize) -> Self {
        let next = if size > n {
            None
        } else if size == 0 {
            Some(0)
        } else {
            Some((1u64 << size) - 1)
        };
        SubsetsOfSize {
            next,
            limit: 1u64 << n,
        }
    }
}

impl Iterator for SubsetsOfSize {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        if cur >= self.limit {
            self.next = None;
            return None;
        }
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            Some((((ripple ^ cur) >> 2) / low) | ripple)
        };
        Some(cur)
    }
}

fn all_vertices(g: &Multigraph) -> Vec<VertexId> {
    g.vertices().collect()
}

pub fn codensity(g: &Multigraph) -> Result<(Codensity, Option<OddSetCertificate>), DensityError> {
    codensity_within(g, &all_vertices(g), DEFAULT_ENUMERATION_CAP)
}

/// Co-density restricted to odd sets inside `within`. The witness minimizes
/// `(ratio, size, sorted vertex list)` lexicographically.
pub fn codensity_within(
    g: &Multigraph,
    within: &[VertexId],
    cap: usize,
) -> Result<(Codensity, Option<OddSetCertificate>), DensityError> {
    let scan = OddSetScanner::new(g, within, cap)?;
    let mut best: Option<(Ratio<u64>, u64)> = None;
    scan.for_each_odd(|mask| {
        let (_, e_plus) = scan.counts(mask);
        let ratio = Ratio::new(e_plus as u64, (mask.count_ones() as u64).div_ceil(2));
        let better = match best {
            None => true,
            Some((r, m)) => match ratio.cmp(&r) {
                Ordering::Less => true,
                // Sizes only grow during the scan, so a tie on ratio needs a
                // lexicographic comparison only between equal sizes.
                Ordering::Equal => {
                    m.count_ones() == mask.count_ones() && scan.members(mask) < scan.members(m)
                }
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((ratio, mask));
        }
        true
    });
    Ok(match best {
        Some((ratio, mask)) => (Codensity::Finite(ratio), Some(scan.certificate(mask))),
        None => (Codensity::Infinite, None),
    })
}

/// Density `ρ(G)`: the maximum of `e(U)/((|U|+1)/2)` over odd sets, or `None`
/// when there is no odd set.
pub fn density(g: &Multigraph) -> Result<Option<Ratio<u64>>, DensityError> {
    let scan = OddSetScanner::new(g, &all_vertices(g), DEFAULT_ENUMERATION_CAP)?;
    let mut best: Option<Ratio<u64>> = None;
    scan.for_each_odd(|mask| {
        let (internal, _) = scan.counts(mask);
        let ratio = Ratio::new(internal as u64, (mask.count_ones() as u64).div_ceil(2));
        if best.is_none_or(|b| ratio > b) {
            best = Some(ratio);
        }
        true
    });
    Ok(best)
}

pub fn gupta_bound(g: &Multigraph) -> Result<GuptaBound, DensityError> {
    gupta_bound_with_cap(g, DEFAULT_ENUMERATION_CAP)
}

pub fn gupta_bound_with_cap(g: &Multigraph, cap: usize) -> Result<GuptaBound, DensityError> {
    let delta = g.min_degree();
    let (codensity, _) = codensity_within(g, &all_vertices(g), cap)?;
    Ok(GuptaBound {
        delta,
        codensity,
        k: bound_from(delta, codensity),
    })
}

fn check_odd(size: usize) -> Result<(), DensityError> {
    if size < 3 || size.is_multiple_of(2) {
        Err(DensityError::BadSet { size })
    } else {
        Ok(())
    }
}

/// Whether `e⁺(U) = k(|U|+1)/2` exactly.
pub fn is_optimal(g: &Multigraph, set: &[VertexId], k: usize) -> Result<bool, DensityError> {
    let mut set = set.to_vec();
    set.sort();
    set.dedup();
    check_odd(set.len())?;
    let e_plus = g.boundary_counts(&set).e_plus;
    Ok(2 * e_plus == k * (set.len() + 1))
}

/// The unique minimum-size optimal set containing `x`, over all of `V(g)`.
pub fn min_optimal_containing(
    g: &Multigraph,
    x: VertexId,
    k: usize,
) -> Result<Option<OddSetCertificate>, DensityError> {
    min_optimal_containing_within(g, x, k, &all_vertices(g), DEFAULT_ENUMERATION_CAP)
}

/// As [`min_optimal_containing`], with odd sets drawn from `within` only.
pub fn min_optimal_containing_within(
    g: &Multigraph,
    x: VertexId,
    k: usize,
    within: &[VertexId],
    cap: usize,
) -> Result<Option<OddSetCertificate>, DensityError> {
    let scan = OddSetScanner::new(g, within, cap)?;
    let Some(xi) = scan.local_index(x) else {
        return Ok(None);
    };
    let bit = 1u64 << xi;
    let mut found: Vec<u64> = Vec::new();
    scan.for_each_odd(|mask| {
        if let Some(&first) = found.first() {
            if mask.count_ones() > first.count_ones() {
                return false;
            }
        }
        if mask & bit != 0 {
            let (_, e_plus) = scan.counts(mask);
            if e_plus * 2 == k * (mask.count_ones() as usize + 1) {
                found.push(mask);
            }
        }
        true
    });
    match found.as_slice() {
        [] => Ok(None),
        [mask] => Ok(Some(scan.certificate(*mask))),
        many => Err(DensityError::LemmaViolation {
            detail: format!(
                "{} distinct minimum optimal sets of size {} contain {x}",
                many.len(),
                many[0].count_ones()
            ),
            sets: many.iter().map(|&m| scan.members(m)).collect(),
        }),
    }
}

/// The distinct minimum optimal sets containing some vertex of `within`,
/// each a subset of `within`, ordered by smallest member. They are pairwise
/// disjoint; an intersection is reported as [`DensityError::LemmaViolation`].
pub fn all_min_optimal_sets(
    g: &Multigraph,
    k: usize,
    within: &[VertexId],
    cap: usize,
) -> Result<Vec<OddSetCertificate>, DensityError> {
    let scan = OddSetScanner::new(g, within, cap)?;
    let optimal = scan.optimal_masks(k);
    let mut chosen: Vec<u64> = Vec::new();
    for xi in 0..scan.len() {
        let bit = 1u64 << xi;
        let mut containing = optimal.iter().copied().filter(|m| m & bit != 0);
        let Some(first) = containing.next() else {
            continue;
        };
        let ties: Vec<u64> = std::iter::once(first)
            .chain(containing.take_while(|m| m.count_ones() == first.count_ones()))
            .collect();
        if ties.len() > 1 {
            return Err(DensityError::LemmaViolation {
                detail: format!(
                    "{} distinct minimum optimal sets contain {}",
                    ties.len(),
                    scan.vertices[xi]
                ),
                sets: ties.iter().map(|&m| scan.members(m)).collect(),
            });
        }
        if !chosen.contains(&first) {
            chosen.push(first);
        }
    }
    for (i, &a) in chosen.iter().enumerate() {
        for &b in &chosen[i + 1..] {
            if a & b != 0 {
                return Err(DensityError::LemmaViolation {
                    detail: "two minimum optimal sets intersect".into(),
                    sets: vec![scan.members(a), scan.members(b)],
                });
            }
        }
    }
    Ok(chosen.into_iter().map(|m| scan.certificate(m)).collect())
}

/// The first odd set inside `within` with `e⁺(U) < k(|U|+1)/2`, if any.
pub fn deficient_odd_set(
    g: &Multigraph,
    k: usize,
    within: &[VertexId],
    cap: usize,
) -> Result<Option<OddSetCertificate>, DensityError> {
    let scan = OddSetScanner::new(g, within, cap)?;
    let mut hit = None;
    scan.for_each_odd(|mask| {
        let (_, e_plus) = scan.counts(mask);
        if 2 * e_plus < k * (mask.count_ones() as usize + 1) {
            hit = Some(mask);
            false
        } else {
            true
        }
    });
    Ok(hit.map(|m| scan.certificate(m)))
}
