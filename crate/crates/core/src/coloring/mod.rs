//! Proper edge colorings of multigraphs, `(α,β)`-chains and Kempe swaps.
//!
//! Colors are 1-based: an `m`-coloring uses colors `1..=m`.

mod solver;

pub use solver::{chromatic_index, find_coloring, SolveStats, DEFAULT_NODE_BUDGET};

use crate::graph::{EdgeId, Multigraph, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub type Color = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("palette of {palette} colors exceeds the solver limit of {limit}")]
    PaletteTooLarge { palette: usize, limit: usize },
}

/// Why an assignment fails to be a proper coloring of a given graph.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringViolation {
    #[error("{0} has no color")]
    Uncolored(EdgeId),
    #[error("{edge} has color {color} outside 1..={palette}")]
    OutOfPalette {
        edge: EdgeId,
        color: Color,
        palette: usize,
    },
    #[error("{a} and {b} share {vertex} and color {color}")]
    Clash {
        a: EdgeId,
        b: EdgeId,
        vertex: VertexId,
        color: Color,
    },
}

/// Assignment of colors to edge ids with a fixed palette size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    palette: usize,
    /// Indexed by edge id; 0 means unassigned.
    colors: Vec<Color>,
}

impl EdgeColoring {
    pub fn new(palette: usize) -> Self {
        EdgeColoring {
            palette,
            colors: Vec::new(),
        }
    }

    pub fn from_assignment(palette: usize, pairs: impl IntoIterator<Item = (EdgeId, Color)>) -> Self {
        let mut c = EdgeColoring::new(palette);
        for (e, col) in pairs {
            c.set(e, col);
        }
        c
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn color(&self, e: EdgeId) -> Option<Color> {
        match self.colors.get(e.0) {
            Some(&c) if c != 0 => Some(c),
            _ => None,
        }
    }

    pub fn set(&mut self, e: EdgeId, color: Color) {
        if self.colors.len() <= e.0 {
            self.colors.resize(e.0 + 1, 0);
        }
        self.colors[e.0] = color;
    }

    pub fn unset(&mut self, e: EdgeId) {
        if let Some(c) = self.colors.get_mut(e.0) {
            *c = 0;
        }
    }

    /// Assigned `(edge, color)` pairs in id order.
    pub fn assignment(&self) -> Vec<(EdgeId, Color)> {
        self.colors
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (EdgeId(i), c))
            .collect()
    }

    /// The edges of `g` carrying `color`.
    pub fn class(&self, g: &Multigraph, color: Color) -> Vec<EdgeId> {
        g.edge_ids().filter(|&e| self.color(e) == Some(color)).collect()
    }

    /// The edge of color `color` at `v`, if any.
    pub fn edge_at(&self, g: &Multigraph, v: VertexId, color: Color) -> Option<EdgeId> {
        g.incident(v)
            .find(|e| self.color(e.id) == Some(color))
            .map(|e| e.id)
    }

    pub fn present(&self, g: &Multigraph, v: VertexId) -> BTreeSet<Color> {
        g.incident(v).filter_map(|e| self.color(e.id)).collect()
    }

    pub fn missing(&self, g: &Multigraph, v: VertexId) -> BTreeSet<Color> {
        let present = self.present(g, v);
        (1..=self.palette).filter(|c| !present.contains(c)).collect()
    }

    pub fn is_present(&self, g: &Multigraph, v: VertexId, color: Color) -> bool {
        self.edge_at(g, v, color).is_some()
    }

    pub fn is_missing(&self, g: &Multigraph, v: VertexId, color: Color) -> bool {
        !self.is_present(g, v, color)
    }

    pub fn check_proper(&self, g: &Multigraph) -> Result<(), ColoringViolation> {
        for e in g.edges() {
            match self.color(e.id) {
                None => return Err(ColoringViolation::Uncolored(e.id)),
                Some(c) if c > self.palette => {
                    return Err(ColoringViolation::OutOfPalette {
                        edge: e.id,
                        color: c,
                        palette: self.palette,
                    })
                }
                Some(_) => {}
            }
        }
        for v in g.vertices() {
            let mut seen: Vec<Option<EdgeId>> = vec![None; self.palette + 1];
            for e in g.incident(v) {
                let c = self.color(e.id).expect("checked above");
                if let Some(prev) = seen[c] {
                    return Err(ColoringViolation::Clash {
                        a: prev,
                        b: e.id,
                        vertex: v,
                        color: c,
                    });
                }
                seen[c] = Some(e.id);
            }
        }
        Ok(())
    }

    pub fn is_proper(&self, g: &Multigraph) -> bool {
        self.check_proper(g).is_ok()
    }

    /// Keeps only the colors of edges present in `g`.
    pub fn restricted_to(&self, g: &Multigraph) -> EdgeColoring {
        EdgeColoring::from_assignment(
            self.palette,
            g.edge_ids().filter_map(|e| self.color(e).map(|c| (e, c))),
        )
    }

    /// Renames colors through `map[old] = new` (index 0 unused).
    pub fn permuted(&self, map: &[Color]) -> EdgeColoring {
        EdgeColoring {
            palette: self.palette,
            colors: self
                .colors
                .iter()
                .map(|&c| if c == 0 { 0 } else { map[c] })
                .collect(),
        }
    }

    /// Exchanges `α` and `β` on the chain's edges in place.
    pub fn swap_in_place(&mut self, chain: &Chain) {
        for &e in &chain.edges {
            match self.color(e) {
                Some(c) if c == chain.alpha => self.set(e, chain.beta),
                Some(c) if c == chain.beta => self.set(e, chain.alpha),
                _ => {}
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Path,
    Cycle,
}

/// A connected component of the subgraph formed by two color classes.
///
/// For a path, `vertices` runs from one end to the other and `edges[i]` joins
/// `vertices[i]` and `vertices[i+1]`. For a cycle, the last edge closes back
/// to `vertices[0]`. A vertex seeing neither color is a path of one vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub alpha: Color,
    pub beta: Color,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub kind: ChainKind,
}

impl Chain {
    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    /// The two ends of a path chain (equal for a trivial chain).
    pub fn ends(&self) -> Option<(VertexId, VertexId)> {
        match self.kind {
            ChainKind::Path => Some((self.vertices[0], *self.vertices.last().unwrap())),
            ChainKind::Cycle => None,
        }
    }

    /// The other end of a path chain having `v` as an end.
    pub fn other_end(&self, v: VertexId) -> Option<VertexId> {
        let (a, b) = self.ends()?;
        if a == v {
            Some(b)
        } else if b == v {
            Some(a)
        } else {
            None
        }
    }
}

/// Follows alternating colors from `start`, beginning with `first`, until the
/// walk stops or returns to `start`.
fn walk(
    c: &EdgeColoring,
    g: &Multigraph,
    start: VertexId,
    first: Color,
    second: Color,
) -> (Vec<VertexId>, Vec<EdgeId>, bool) {
    let mut vertices = vec![start];
    let mut edges = Vec::new();
    let mut cur = start;
    let mut col = first;
    while let Some(e) = c.edge_at(g, cur, col) {
        let next = g.edge(e).and_then(|edge| edge.other(cur)).expect("incident edge");
        edges.push(e);
        if next == start {
            return (vertices, edges, true);
        }
        vertices.push(next);
        cur = next;
        col = if col == first { second } else { first };
    }
    (vertices, edges, false)
}

/// The `(α,β)`-chain containing `v`. When `v` is an end of a path chain, the
/// result starts at `v`.
pub fn chain(c: &EdgeColoring, g: &Multigraph, v: VertexId, alpha: Color, beta: Color) -> Chain {
    let has_alpha = c.is_present(g, v, alpha);
    let has_beta = c.is_present(g, v, beta);
    let make = |vertices, edges, kind| Chain {
        alpha,
        beta,
        vertices,
        edges,
        kind,
    };
    match (has_alpha, has_beta) {
        (false, false) => make(vec![v], Vec::new(), ChainKind::Path),
        (true, false) => {
            let (vs, es, _) = walk(c, g, v, alpha, beta);
            make(vs, es, ChainKind::Path)
        }
        (false, true) => {
            let (vs, es, _) = walk(c, g, v, beta, alpha);
            make(vs, es, ChainKind::Path)
        }
        (true, true) => {
            let (vs, es, closed) = walk(c, g, v, alpha, beta);
            if closed {
                return make(vs, es, ChainKind::Cycle);
            }
            let (back_vs, back_es, _) = walk(c, g, v, beta, alpha);
            let mut vertices: Vec<VertexId> = back_vs.into_iter().skip(1).rev().collect();
            vertices.extend(vs);
            let mut edges: Vec<EdgeId> = back_es.into_iter().rev().collect();
            edges.extend(es);
            make(vertices, edges, ChainKind::Path)
        }
    }
}

/// A copy of `c` with `α` and `β` exchanged along `chain`.
pub fn kempe_swap(c: &EdgeColoring, chain: &Chain) -> EdgeColoring {
    let mut out = c.clone();
    out.swap_in_place(chain);
    out
}

/// Whether `u` and `v` lie on the same `(α,β)`-chain.
pub fn linked(
    c: &EdgeColoring,
    g: &Multigraph,
    u: VertexId,
    v: VertexId,
    alpha: Color,
    beta: Color,
) -> bool {
    chain(c, g, u, alpha, beta).contains(v)
}

/// `Some(s)` when `|V| ≥ 3` is odd and `|E| = s(|V|−1)/2` for an integer
/// `s ≥ 1`.
pub fn is_s_dense(g: &Multigraph) -> Option<usize> {
    let n = g.vertex_count();
    if n < 3 || n.is_multiple_of(2) {
        return None;
    }
    let twice = 2 * g.edge_count();
    if !twice.is_multiple_of(n - 1) || twice == 0 {
        return None;
    }
    Some(twice / (n - 1))
}

/// A way in which an `s`-coloring of an `s`-dense graph lacks the structure
/// forced on it: near-perfect color classes and disjoint missing sets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenseViolation {
    #[error("color {color} covers {covered} of {n} vertices, not n-1")]
    NotNearPerfect { color: Color, covered: usize, n: usize },
    #[error("{u} and {v} both miss color {color}")]
    SharedMissing { u: VertexId, v: VertexId, color: Color },
    #[error("{vertex} is missed by {missed} classes, expected {expected}")]
    WrongMissCount {
        vertex: VertexId,
        missed: usize,
        expected: usize,
    },
}

/// Checks the structure of an `s`-coloring of an `s`-dense graph: every class
/// is a near-perfect matching, missing sets are pairwise disjoint, and each
/// `v` is missed by exactly `s − d(v)` classes.
pub fn check_dense_structure(g: &Multigraph, c: &EdgeColoring, s: usize) -> Result<(), DenseViolation> {
    let n = g.vertex_count();
    for color in 1..=s {
        let covered = 2 * c.class(g, color).len();
        if covered + 1 != n {
            return Err(DenseViolation::NotNearPerfect { color, covered, n });
        }
    }
    let mut owner: Vec<Option<VertexId>> = vec![None; s + 1];
    for v in g.vertices() {
        let missing: Vec<Color> = c.missing(g, v).into_iter().filter(|&m| m <= s).collect();
        for &m in &missing {
            if let Some(u) = owner[m] {
                return Err(DenseViolation::SharedMissing { u, v, color: m });
            }
            owner[m] = Some(v);
        }
        let expected = s.saturating_sub(g.degree(v));
        if missing.len() != expected {
            return Err(DenseViolation::WrongMissCount {
                vertex: v,
                missed: missing.len(),
                expected,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::{complete, cycle, star};

    fn k3_coloring() -> (Multigraph, EdgeColoring) {
        let g = Multigraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = EdgeColoring::from_assignment(3, [(EdgeId(0), 1), (EdgeId(1), 2), (EdgeId(2), 3)]);
        (g, c)
    }

    #[test]
    fn present_and_missing() {
        let (g, c) = k3_coloring();
        for v in g.vertices() {
            assert_eq!(c.missing(&g, v).len(), 1);
            assert_eq!(c.present(&g, v).len(), 2);
        }
        let g4 = Multigraph::build(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(c.missing(&g4, VertexId(3)), (1..=3).collect());
        let digon = Multigraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        let d = EdgeColoring::from_assignment(2, [(EdgeId(0), 1), (EdgeId(1), 2)]);
        assert!(d.missing(&digon, VertexId(0)).is_empty());
        assert!(d.is_proper(&digon));
    }

    #[test]
    fn chain_examples() {
        let (g, c) = k3_coloring();
        let ch = chain(&c, &g, VertexId(0), 1, 2);
        assert_eq!(ch.kind, ChainKind::Path);
        assert_eq!(ch.vertices, vec![VertexId(0), VertexId(1), VertexId(2)]);
        assert_eq!(ch.edges, vec![EdgeId(0), EdgeId(1)]);

        let g4 = Multigraph::build(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let trivial = chain(&c, &g4, VertexId(3), 1, 2);
        assert!(trivial.is_trivial());
        assert_eq!(trivial.vertices, vec![VertexId(3)]);

        let c6 = cycle(6);
        let alt = EdgeColoring::from_assignment(2, (0..6).map(|i| (EdgeId(i), 1 + i % 2)));
        for v in c6.vertices() {
            let ch = chain(&alt, &c6, v, 1, 2);
            assert_eq!(ch.kind, ChainKind::Cycle);
            assert_eq!(ch.edges.len(), 6);
        }
    }

    #[test]
    fn chain_from_interior_vertex() {
        let (g, c) = k3_coloring();
        let ch = chain(&c, &g, VertexId(1), 1, 2);
        assert_eq!(ch.kind, ChainKind::Path);
        assert_eq!(ch.edges.len(), 2);
        assert_eq!(ch.other_end(VertexId(0)), Some(VertexId(2)));
    }

    #[test]
    fn digon_chain_is_two_cycle() {
        let digon = Multigraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        let d = EdgeColoring::from_assignment(3, [(EdgeId(0), 1), (EdgeId(1), 2)]);
        let ch = chain(&d, &digon, VertexId(1), 1, 2);
        assert_eq!(ch.kind, ChainKind::Cycle);
        assert_eq!(ch.vertices.len(), 2);
        assert_eq!(ch.edges.len(), 2);
    }

    #[test]
    fn kempe_swap_examples() {
        let (g, c) = k3_coloring();
        let g4 = Multigraph::build(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let trivial = chain(&c, &g4, VertexId(3), 1, 2);
        assert_eq!(kempe_swap(&c, &trivial), c);

        let ch = chain(&c, &g, VertexId(0), 1, 2);
        let once = kempe_swap(&c, &ch);
        assert!(once.is_proper(&g));
        assert_eq!(kempe_swap(&once, &ch), c);

        // Vertex 0 missed 2 before the swap and misses 1 after.
        assert!(c.is_missing(&g, VertexId(0), 2));
        assert!(once.is_missing(&g, VertexId(0), 1));
        assert!(once.is_present(&g, VertexId(0), 2));
    }

    #[test]
    fn linked_examples() {
        let (g, c) = k3_coloring();
        assert!(linked(&c, &g, VertexId(0), VertexId(2), 1, 2));
        let g4 = Multigraph::build(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!linked(&c, &g4, VertexId(0), VertexId(3), 1, 2));
        assert!(linked(&c, &g, VertexId(0), VertexId(1), 2, 3));
    }

    #[test]
    fn s_dense_examples() {
        assert_eq!(is_s_dense(&complete(3)), Some(3));
        assert_eq!(is_s_dense(&complete(5)), Some(5));
        assert_eq!(is_s_dense(&complete(4)), None);
        assert_eq!(is_s_dense(&Multigraph::build(3, &[(0, 1), (1, 2)]).unwrap()), Some(2));
        assert_eq!(is_s_dense(&Multigraph::empty(3)), None);
    }

    #[test]
    fn violations_are_reported() {
        let g = star(2);
        let clash = EdgeColoring::from_assignment(2, [(EdgeId(0), 1), (EdgeId(1), 1)]);
        assert!(matches!(clash.check_proper(&g), Err(ColoringViolation::Clash { .. })));
        let partial = EdgeColoring::from_assignment(2, [(EdgeId(0), 1)]);
        assert_eq!(partial.check_proper(&g), Err(ColoringViolation::Uncolored(EdgeId(1))));
        let wide = EdgeColoring::from_assignment(2, [(EdgeId(0), 1), (EdgeId(1), 3)]);
        assert!(matches!(wide.check_proper(&g), Err(ColoringViolation::OutOfPalette { .. })));
    }

    #[test]
    fn dense_structure_of_triangle() {
        let (g, c) = k3_coloring();
        assert_eq!(check_dense_structure(&g, &c, 3), Ok(()));
        let p3 = Multigraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let pc = EdgeColoring::from_assignment(2, [(EdgeId(0), 1), (EdgeId(1), 2)]);
        assert_eq!(check_dense_structure(&p3, &pc, 2), Ok(()));
        assert_eq!(pc.missing(&p3, VertexId(1)).len(), 0);
    }
}
