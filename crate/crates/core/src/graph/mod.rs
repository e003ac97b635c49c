//! Loopless multigraphs with stable edge identities.
//!
//! Every edge instance carries an [`EdgeId`] that survives all structural
//! transformations (splitting off, contraction, induction). Parallel edges
//! are distinct instances with distinct ids, so colorings, covers and traces
//! are all keyed by id rather than by endpoint pair.

mod io;

pub use io::{parse_edge_list, write_edge_list, ParseError};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
}

impl Edge {
    pub fn is_incident(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite to `x`, or `None` if `x` is not an endpoint.
    pub fn other(&self, x: VertexId) -> Option<VertexId> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {index} is a loop at {vertex}")]
    LoopEdge { index: usize, vertex: VertexId },
    #[error("{vertex} is out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: VertexId, vertex_count: usize },
    #[error("{edge} is not incident to {vertex}")]
    EdgeNotIncident { edge: EdgeId, vertex: VertexId },
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge id {0} used twice")]
    DuplicateEdgeId(EdgeId),
}

/// Edge counts of a vertex set `U`: internal edges `e(U)`, boundary edges
/// `e(U, V∖U)` and `e⁺(U) = e(U) + e(U, V∖U)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCounts {
    pub internal: usize,
    pub boundary: usize,
    pub e_plus: usize,
}

/// An immutable loopless multigraph on vertices `0..vertex_count`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Multigraph {
    vertex_count: usize,
    /// Sorted by id.
    edges: Vec<Edge>,
    /// Positions into `edges`, per vertex, ascending by edge id.
    incidence: Vec<Vec<usize>>,
    /// Lower bound for fresh ids; inherited by every derived graph so ids are
    /// never reused within one lineage.
    next_edge_id: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    next_edge_id: usize,
}

impl TryFrom<RawGraph> for Multigraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        let g = Multigraph::from_edges(raw.vertex_count, raw.edges)?;
        Ok(g.reserve_ids(raw.next_edge_id))
    }
}

impl From<Multigraph> for RawGraph {
    fn from(g: Multigraph) -> Self {
        RawGraph {
            vertex_count: g.vertex_count,
            edges: g.edges,
            next_edge_id: g.next_edge_id,
        }
    }
}

impl fmt::Debug for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multigraph(n={}; ", self.vertex_count)?;
        let mut first = true;
        for e in &self.edges {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{}:{}-{}", e.id.0, e.u.0, e.v.0)?;
        }
        write!(f, ")")
    }
}

/// Result of [`Multigraph::induced_subgraph`]: the subgraph relabeled onto
/// `0..|S|` in ascending order of the original vertex ids.
#[derive(Debug, Clone)]
pub struct Induced {
    pub graph: Multigraph,
    /// `original[new] = old`.
    pub original: Vec<VertexId>,
}

impl Induced {
    pub fn local(&self, old: VertexId) -> Option<VertexId> {
        self.original.binary_search(&old).ok().map(VertexId)
    }
}

/// Result of [`Multigraph::contract_set`].
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: Multigraph,
    /// `vertex_map[old] = new`; every vertex of the contracted set maps to
    /// `contracted`.
    pub vertex_map: Vec<VertexId>,
    pub contracted: VertexId,
    /// Ids of the edges that had both endpoints in the contracted set.
    pub removed_edges: Vec<EdgeId>,
}

/// One splitting-off step: `moved_edge = xy` was replaced by `new_edge = yx'`
/// where `x' = new_vertex` and `x = original_vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub new_vertex: VertexId,
    pub original_vertex: VertexId,
    pub moved_edge: EdgeId,
    pub new_edge: EdgeId,
}

/// Ordered log of split-off operations, sufficient to map every edge of the
/// derived graph back to an edge of the graph the log started from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitTrace {
    pub records: Vec<SplitRecord>,
}

impl SplitTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: SplitRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Follows split records backwards until reaching an id of the base graph.
    pub fn original_edge(&self, id: EdgeId) -> EdgeId {
        let renamed: BTreeMap<EdgeId, EdgeId> = self
            .records
            .iter()
            .map(|r| (r.new_edge, r.moved_edge))
            .collect();
        let mut cur = id;
        while let Some(&prev) = renamed.get(&cur) {
            cur = prev;
        }
        cur
    }

    /// Undoes every split: each split vertex is re-identified with the vertex
    /// it was split from and each new edge takes back its original id.
    pub fn merge_back(&self, derived: &Multigraph) -> Result<Multigraph, GraphError> {
        let mut edges: Vec<Edge> = derived.edges().to_vec();
        let mut n = derived.vertex_count();
        for r in self.records.iter().rev() {
            if r.new_vertex.0 + 1 != n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: r.new_vertex,
                    vertex_count: n,
                });
            }
            let e = edges
                .iter_mut()
                .find(|e| e.id == r.new_edge)
                .ok_or(GraphError::UnknownEdge(r.new_edge))?;
            if e.u == r.new_vertex {
                e.u = r.original_vertex;
            } else {
                e.v = r.original_vertex;
            }
            e.id = r.moved_edge;
            n -= 1;
        }
        Ok(Multigraph::from_edges(n, edges)?.reserve_ids(derived.next_edge_id))
    }
}

impl Multigraph {
    pub fn empty(vertex_count: usize) -> Self {
        Multigraph {
            vertex_count,
            edges: Vec::new(),
            incidence: vec![Vec::new(); vertex_count],
            next_edge_id: 0,
        }
    }

    /// Builds a graph with sequential edge ids `0..pairs.len()`.
    pub fn build(vertex_count: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| Edge {
                id: EdgeId(i),
                u: VertexId(u),
                v: VertexId(v),
            })
            .collect();
        Self::from_edges(vertex_count, edges)
    }

    /// Builds a graph from edges carrying explicit, unique ids.
    pub fn from_edges(vertex_count: usize, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        for (i, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x.0 >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: x,
                        vertex_count,
                    });
                }
            }
            if e.u == e.v {
                return Err(GraphError::LoopEdge {
                    index: i,
                    vertex: e.u,
                });
            }
        }
        edges.sort_by_key(|e| e.id);
        if let Some(w) = edges.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateEdgeId(w[0].id));
        }
        let mut incidence = vec![Vec::new(); vertex_count];
        for (pos, e) in edges.iter().enumerate() {
            incidence[e.u.0].push(pos);
            incidence[e.v.0].push(pos);
        }
        let next_edge_id = edges.last().map_or(0, |e| e.id.0 + 1);
        Ok(Multigraph {
            vertex_count,
            edges,
            incidence,
            next_edge_id,
        })
    }

    /// Raises the fresh-id watermark so ids below `next` are never handed out.
    pub fn reserve_ids(mut self, next: usize) -> Self {
        self.next_edge_id = self.next_edge_id.max(next);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn next_edge_id(&self) -> usize {
        self.next_edge_id
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|pos| &self.edges[pos])
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edge(id).is_some()
    }

    /// Edges incident to `v`, ascending by id.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.incidence[v.0].iter().map(move |&pos| &self.edges[pos])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v.0].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.incidence.iter().map(Vec::len).collect()
    }

    /// Minimum degree; 0 for the graph without vertices.
    pub fn min_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> usize {
        self.incident(u).filter(|e| e.other(u) == Some(v)).count()
    }

    pub fn max_multiplicity(&self) -> usize {
        let mut counts: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
        for e in &self.edges {
            let key = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
            *counts.entry(key).or_default() += 1;
        }
        counts.into_values().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![VertexId(0)];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for e in self.incident(v) {
                let w = e.other(v).expect("incident edge");
                if !seen[w.0] {
                    seen[w.0] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == self.vertex_count
    }

    fn membership(&self, set: &[VertexId]) -> Vec<bool> {
        let mut inside = vec![false; self.vertex_count];
        for &v in set {
            inside[v.0] = true;
        }
        inside
    }

    pub fn boundary_counts(&self, set: &[VertexId]) -> BoundaryCounts {
        let inside = self.membership(set);
        let mut internal = 0;
        let mut boundary = 0;
        for e in &self.edges {
            match (inside[e.u.0], inside[e.v.0]) {
                (true, true) => internal += 1,
                (true, false) | (false, true) => boundary += 1,
                (false, false) => {}
            }
        }
        BoundaryCounts {
            internal,
            boundary,
            e_plus: internal + boundary,
        }
    }

    /// Detaches edge `e = xy` from `x` onto a fresh vertex `x'`, replacing it by
    /// `yx'` under a fresh edge id.
    pub fn split_off(&self, x: VertexId, e: EdgeId) -> Result<(Multigraph, SplitRecord), GraphError> {
        let edge = *self.edge(e).ok_or(GraphError::UnknownEdge(e))?;
        let y = edge
            .other(x)
            .ok_or(GraphError::EdgeNotIncident { edge: e, vertex: x })?;
        let new_vertex = VertexId(self.vertex_count);
        let new_edge = EdgeId(self.next_edge_id);
        let mut edges: Vec<Edge> = self.edges.iter().copied().filter(|f| f.id != e).collect();
        edges.push(Edge {
            id: new_edge,
            u: y,
            v: new_vertex,
        });
        let g = Multigraph::from_edges(self.vertex_count + 1, edges)?.reserve_ids(new_edge.0 + 1);
        Ok((
            g,
            SplitRecord {
                new_vertex,
                original_vertex: x,
                moved_edge: e,
                new_edge,
            },
        ))
    }

    /// Contracts `set` into one vertex. Internal edges disappear, boundary
    /// edges keep their ids, and the remaining vertices are renumbered in
    /// ascending order followed by the contracted vertex.
    pub fn contract_set(&self, set: &[VertexId]) -> Contraction {
        let inside = self.membership(set);
        let mut vertex_map = vec![VertexId(0); self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            if !inside[v] {
                vertex_map[v] = VertexId(next);
                next += 1;
            }
        }
        let contracted = VertexId(next);
        for v in 0..self.vertex_count {
            if inside[v] {
                vertex_map[v] = contracted;
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut removed_edges = Vec::new();
        for e in &self.edges {
            if inside[e.u.0] && inside[e.v.0] {
                removed_edges.push(e.id);
            } else {
                edges.push(Edge {
                    id: e.id,
                    u: vertex_map[e.u.0],
                    v: vertex_map[e.v.0],
                });
            }
        }
        let graph = Multigraph::from_edges(next + 1, edges)
            .expect("contraction of a loopless graph along a set is loopless")
            .reserve_ids(self.next_edge_id);
        Contraction {
            graph,
            vertex_map,
            contracted,
            removed_edges,
        }
    }

    pub fn induced_subgraph(&self, set: &[VertexId]) -> Induced {
        let inside = self.membership(set);
        let original: Vec<VertexId> = self.vertices().filter(|v| inside[v.0]).collect();
        let mut local = vec![usize::MAX; self.vertex_count];
        for (i, v) in original.iter().enumerate() {
            local[v.0] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| inside[e.u.0] && inside[e.v.0])
            .map(|e| Edge {
                id: e.id,
                u: VertexId(local[e.u.0]),
                v: VertexId(local[e.v.0]),
            })
            .collect();
        let graph = Multigraph::from_edges(original.len(), edges)
            .expect("induced subgraph of a valid graph is valid")
            .reserve_ids(self.next_edge_id);
        Induced { graph, original }
    }

    /// Same vertex set, only the edges whose ids satisfy `keep`.
    pub fn edge_subgraph(&self, keep: impl Fn(EdgeId) -> bool) -> Multigraph {
        let edges = self.edges.iter().copied().filter(|e| keep(e.id)).collect();
        Multigraph::from_edges(self.vertex_count, edges)
            .expect("edge subgraph of a valid graph is valid")
            .reserve_ids(self.next_edge_id)
    }

    /// Applies a vertex permutation `perm[old] = new`, keeping edge ids.
    pub fn relabel(&self, perm: &[usize]) -> Multigraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id,
                u: VertexId(perm[e.u.0]),
                v: VertexId(perm[e.v.0]),
            })
            .collect();
        Multigraph::from_edges(self.vertex_count, edges)
            .expect("relabeling keeps the graph valid")
            .reserve_ids(self.next_edge_id)
    }
}

/// Named graphs used throughout tests and examples.
pub mod named {
    use super::Multigraph;

    pub fn complete(n: usize) -> Multigraph {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push((u, v));
            }
        }
        Multigraph::build(n, &pairs).expect("complete graph")
    }

    pub fn cycle(n: usize) -> Multigraph {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Multigraph::build(n, &pairs).expect("cycle")
    }

    pub fn petersen() -> Multigraph {
        let mut pairs = Vec::new();
        for i in 0..5 {
            pairs.push((i, (i + 1) % 5));
            pairs.push((i, i + 5));
            pairs.push((5 + i, 5 + (i + 2) % 5));
        }
        Multigraph::build(10, &pairs).expect("petersen")
    }

    pub fn star(leaves: usize) -> Multigraph {
        let pairs: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Multigraph::build(leaves + 1, &pairs).expect("star")
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    fn vs(ids: &[usize]) -> Vec<VertexId> {
        ids.iter().copied().map(VertexId).collect()
    }

    fn handshake(g: &Multigraph) {
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn build_triangle_and_digon() {
        let k3 = Multigraph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k3.degrees(), vec![2, 2, 2]);
        let digon = Multigraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(digon.multiplicity(VertexId(0), VertexId(1)), 2);
        assert_eq!(digon.degrees(), vec![2, 2]);
        assert_eq!(digon.max_multiplicity(), 2);
    }

    #[test]
    fn build_rejects_loops_and_range() {
        assert!(matches!(
            Multigraph::build(2, &[(0, 0)]),
            Err(GraphError::LoopEdge { .. })
        ));
        assert!(matches!(
            Multigraph::build(2, &[(0, 2)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn boundary_counts_examples() {
        let k3 = complete(3);
        let c = k3.boundary_counts(&vs(&[0, 1]));
        assert_eq!((c.internal, c.boundary, c.e_plus), (1, 2, 3));

        let k4 = complete(4);
        let c = k4.boundary_counts(&vs(&[0, 1, 2]));
        assert_eq!((c.internal, c.boundary, c.e_plus), (3, 3, 6));

        let p = petersen();
        let all: Vec<_> = p.vertices().collect();
        let c = p.boundary_counts(&all);
        assert_eq!((c.boundary, c.e_plus), (0, 15));
    }

    #[test]
    fn split_off_digon() {
        let digon = Multigraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        let (h, rec) = digon.split_off(VertexId(0), EdgeId(0)).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.degrees(), vec![1, 2, 1]);
        assert_eq!(rec.new_vertex, VertexId(2));
        assert_eq!(rec.new_edge, EdgeId(2));
        assert_eq!(h.edge(EdgeId(2)).unwrap().other(VertexId(1)), Some(VertexId(2)));
    }

    #[test]
    fn split_off_k4_conserves_edges() {
        let k4 = complete(4);
        let (h, _) = k4.split_off(VertexId(0), EdgeId(0)).unwrap();
        assert_eq!(h.degree(VertexId(0)), 2);
        assert_eq!(h.degree(VertexId(4)), 1);
        assert_eq!(h.degree(VertexId(1)), 3);
        assert_eq!(h.edge_count(), 6);
        handshake(&h);
    }

    #[test]
    fn split_off_twice_gets_fresh_vertices() {
        let k4 = complete(4);
        let (h, a) = k4.split_off(VertexId(0), EdgeId(0)).unwrap();
        let (h, b) = h.split_off(VertexId(0), EdgeId(1)).unwrap();
        assert_ne!(a.new_vertex, b.new_vertex);
        assert_ne!(a.new_edge, b.new_edge);
        assert_eq!(h.degree(VertexId(0)), 1);
    }

    #[test]
    fn split_off_rejects_non_incident() {
        let k3 = complete(3);
        // complete(3) is (0,1), (0,2), (1,2)
        assert!(matches!(
            k3.split_off(VertexId(0), EdgeId(2)),
            Err(GraphError::EdgeNotIncident { .. })
        ));
    }

    #[test]
    fn contract_examples() {
        let k3 = complete(3);
        let c = k3.contract_set(&vs(&[0, 1]));
        assert_eq!(c.graph.vertex_count(), 2);
        assert_eq!(c.graph.edge_count(), 2);
        assert_eq!(c.graph.multiplicity(c.contracted, VertexId(0)), 2);

        let k4 = complete(4);
        let c = k4.contract_set(&vs(&[0, 1, 2]));
        assert_eq!(c.graph.degree(c.contracted), 3);
        assert_eq!(c.graph.multiplicity(c.contracted, c.vertex_map[3]), 3);
        assert_eq!(c.removed_edges.len(), 3);

        let all: Vec<_> = k4.vertices().collect();
        let c = k4.contract_set(&all);
        assert_eq!(c.graph.vertex_count(), 1);
        assert_eq!(c.graph.edge_count(), 0);
    }

    #[test]
    fn contract_keeps_boundary_ids() {
        let p = petersen();
        let set = vs(&[0, 1, 2, 5]);
        let inside = p.membership(&set);
        let mut expected: Vec<EdgeId> = p
            .edges()
            .iter()
            .filter(|e| inside[e.u.0] != inside[e.v.0])
            .map(|e| e.id)
            .collect();
        expected.sort();
        let c = p.contract_set(&set);
        let got: Vec<EdgeId> = c.graph.incident(c.contracted).map(|e| e.id).collect();
        assert_eq!(got, expected);
        assert_eq!(c.graph.degree(c.contracted), p.boundary_counts(&set).boundary);
    }

    #[test]
    fn induced_examples() {
        let k4 = complete(4);
        let s = k4.induced_subgraph(&vs(&[0, 1, 2]));
        assert_eq!(s.graph.vertex_count(), 3);
        assert_eq!(s.graph.edge_count(), 3);
        assert_eq!(s.graph.degrees(), vec![2, 2, 2]);
        assert!(k4.induced_subgraph(&[]).graph.edge_count() == 0);
        let all: Vec<_> = k4.vertices().collect();
        assert_eq!(k4.induced_subgraph(&all).graph, k4);
        assert_eq!(s.local(VertexId(2)), Some(VertexId(2)));
        assert_eq!(s.local(VertexId(3)), None);
    }

    #[test]
    fn merge_back_restores_original() {
        let g = Multigraph::build(3, &[(0, 1), (0, 1), (1, 2), (0, 2)]).unwrap();
        let mut trace = SplitTrace::new();
        let (h, r) = g.split_off(VertexId(0), EdgeId(1)).unwrap();
        trace.push(r);
        let (h, r) = h.split_off(VertexId(1), EdgeId(4)).unwrap();
        trace.push(r);
        assert_eq!(trace.original_edge(EdgeId(5)), EdgeId(1));
        let back = trace.merge_back(&h).unwrap();
        assert_eq!(back.vertex_count(), 3);
        let mut a: Vec<_> = back.edges().to_vec();
        let mut b: Vec<_> = g.edges().to_vec();
        for e in a.iter_mut().chain(b.iter_mut()) {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        a.sort_by_key(|e| e.id);
        b.sort_by_key(|e| e.id);
        assert_eq!(a, b);
    }

    #[test]
    fn serde_roundtrip_keeps_watermark() {
        let (h, _) = complete(3).split_off(VertexId(0), EdgeId(0)).unwrap();
        let (h, _) = h.split_off(VertexId(3), EdgeId(3)).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        let back: Multigraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.next_edge_id(), 5);
    }
}
