//! Construction of `k = min{δ−1, ⌊ρ_c⌋}` edge-disjoint edge covers.
//!
//! Stages: regularize by splitting off, puncture every minimum optimal set,
//! color the punctured graph, contract the blocks, recolor specially, lift
//! the coloring back, orient the `(k+1,k+2)`-subgraph and augment the first
//! `k` color classes, then map edges back to the input graph.
//!
//! Every odd-set computation ranges over the input vertices only; split
//! vertices are pendant and never belong to an odd set.

use crate::coloring::{find_coloring, Color, ColoringError, EdgeColoring, DEFAULT_NODE_BUDGET};
use crate::density::{
    all_min_optimal_sets, deficient_odd_set, gupta_bound_with_cap, min_optimal_containing_within,
    DensityError, GuptaBound, DEFAULT_ENUMERATION_CAP,
};
use crate::graph::{EdgeId, Multigraph, SplitRecord, SplitTrace, VertexId};
use crate::lift::{assemble_lift, color_dense_block, permute_block_palette, BlockColoring, LiftError};
use crate::oracle::{verify_decomposition, VerifyFailure};
use crate::special::{special_coloring_from, SpecialColoringError, SpecialColoringOptions};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Bound,
    Regularize,
    Puncture,
    Color,
    Contract,
    SpecialColoring,
    Lift,
    Orient,
    Augment,
    MapBack,
    Verify,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Bound => "bound",
            Stage::Regularize => "regularize",
            Stage::Puncture => "puncture",
            Stage::Color => "color",
            Stage::Contract => "contract",
            Stage::SpecialColoring => "special_coloring",
            Stage::Lift => "lift",
            Stage::Orient => "orient",
            Stage::Augment => "augment",
            Stage::MapBack => "map_back",
            Stage::Verify => "verify",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("after splitting {} off {}, odd set {set:?} has e+ = {e_plus} < k(|U|+1)/2", .record.moved_edge, .record.original_vertex)]
    CodensityDropped {
        record: SplitRecord,
        set: Vec<VertexId>,
        e_plus: usize,
    },
    #[error("no edge to split off at {vertex}")]
    NoSplitCandidate { vertex: VertexId },
    #[error("optimal set {set:?} has no internal edge")]
    NoInternalEdge { set: Vec<VertexId> },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("the punctured graph on the input vertices has no {colors}-edge-coloring")]
    NotColorable { colors: usize },
    #[error("boundary edges {first} and {second} of block {block} share color {color}")]
    BoundaryColorClash {
        block: usize,
        first: EdgeId,
        second: EdgeId,
        color: Color,
    },
    #[error("contracted block {block} has degree {degree} > k/2 with k = {k}")]
    DegreeBoundFailed { block: usize, degree: usize, k: usize },
    #[error(transparent)]
    Special(#[from] SpecialColoringError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error("orientation failed: {0}")]
    Orientation(String),
    #[error("augmentation failed at {vertex}: {detail}")]
    AugmentationFailed { vertex: VertexId, detail: String },
    #[error("stage invariant violated: {0}")]
    Invariant(String),
    #[error("result is not a cover decomposition: {0}")]
    Verification(#[from] VerifyFailure),
}

impl DecomposeError {
    /// Size caps and search budgets, as opposed to broken invariants.
    pub fn is_resource_limit(&self) -> bool {
        use ColoringError::{BudgetExhausted, PaletteTooLarge};
        matches!(
            self,
            DecomposeError::Density(DensityError::TooLarge { .. })
                | DecomposeError::Coloring(BudgetExhausted { .. } | PaletteTooLarge { .. })
                | DecomposeError::Special(
                    SpecialColoringError::BudgetExhausted { .. }
                        | SpecialColoringError::Coloring(BudgetExhausted { .. } | PaletteTooLarge { .. })
                )
                | DecomposeError::Lift(LiftError::Coloring(BudgetExhausted { .. } | PaletteTooLarge { .. }))
        )
    }
}

/// One punctured block: the minimum optimal set `set` lost the internal
/// edge `edge = xy`, with `x < y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Puncture {
    pub set: Vec<VertexId>,
    pub x: VertexId,
    pub y: VertexId,
    pub edge: EdgeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub edge: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

/// Orientation of the subgraph formed by the two top color classes: each
/// component is a directed path or a directed cycle.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub arcs: Vec<Arc>,
}

impl Orientation {
    pub fn in_arc(&self, v: VertexId) -> Option<Arc> {
        self.arcs.iter().copied().find(|a| a.head == v)
    }
}

/// Everything computed so far; dumped on failure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineState {
    pub original: Multigraph,
    pub k: usize,
    pub h: Option<Multigraph>,
    pub trace: SplitTrace,
    pub h1: Option<Multigraph>,
    pub punctures: Vec<Puncture>,
    pub h2: Option<Multigraph>,
    /// `h2_vertex_map[v]` is the image of `H₁` vertex `v`.
    pub h2_vertex_map: Vec<VertexId>,
    pub block_vertices: Vec<VertexId>,
    pub initial_coloring: Option<EdgeColoring>,
    pub special_coloring: Option<EdgeColoring>,
    pub psi: Option<EdgeColoring>,
    pub orientation: Option<Orientation>,
    pub notes: Vec<String>,
}

impl PipelineState {
    fn new(g: &Multigraph) -> Self {
        PipelineState {
            original: g.clone(),
            k: 0,
            h: None,
            trace: SplitTrace::new(),
            h1: None,
            punctures: Vec::new(),
            h2: None,
            h2_vertex_map: Vec::new(),
            block_vertices: Vec::new(),
            initial_coloring: None,
            special_coloring: None,
            psi: None,
            orientation: None,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverDecomposition {
    pub k: usize,
    /// Sorted edge ids of the input graph.
    pub covers: Vec<Vec<EdgeId>>,
    pub stages: Vec<StageRecord>,
    /// Recorded when the theorem's hypotheses fail but the run went on.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureReport {
    pub stage: Stage,
    pub message: String,
    /// `μ(G) ≤ 2` or `k ≤ 6`. A failure with these holding is a bug.
    pub hypotheses_held: bool,
    pub resource_limit: bool,
    pub state: PipelineState,
    #[serde(skip)]
    pub error: DecomposeError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecomposeOptions {
    pub enumeration_cap: usize,
    pub node_budget: u64,
    pub special_step_cap: Option<usize>,
    pub timings: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            node_budget: DEFAULT_NODE_BUDGET,
            special_step_cap: None,
            timings: false,
        }
    }
}

pub fn hypotheses_hold(g: &Multigraph, k: usize) -> bool {
    g.max_multiplicity() <= 2 || k <= 6
}

/// Splits edges off vertices of degree above `k+1` until every input vertex
/// has degree exactly `k+1`, checking after every split that no odd set of
/// input vertices fell below `k(|U|+1)/2`.
///
/// Vertices are handled in ascending order. Inside a minimum optimal set
/// `U ∋ x` the edge goes to the smallest neighbor of `x` in `U`; otherwise
/// the smallest edge id to another input vertex is used.
pub fn regularize(g: &Multigraph, k: usize, cap: usize) -> Result<(Multigraph, SplitTrace), DecomposeError> {
    if g.min_degree() < k + 1 {
        return Err(DecomposeError::Invariant(format!(
            "minimum degree {} is below k+1 = {}",
            g.min_degree(),
            k + 1
        )));
    }
    let within: Vec<VertexId> = g.vertices().collect();
    let mut h = g.clone();
    let mut trace = SplitTrace::new();
    for &x in &within {
        while h.degree(x) > k + 1 {
            let other = |e: &crate::graph::Edge| e.other(x).expect("incident edge");
            let edge = match min_optimal_containing_within(&h, x, k, &within, cap)? {
                Some(u) => h
                    .incident(x)
                    .filter(|e| u.contains(other(e)))
                    .min_by_key(|e| (other(e), e.id))
                    .map(|e| e.id),
                None => h
                    .incident(x)
                    .filter(|e| other(e).0 < g.vertex_count())
                    .map(|e| e.id)
                    .min()
                    .or_else(|| h.incident(x).map(|e| e.id).min()),
            }
            .ok_or(DecomposeError::NoSplitCandidate { vertex: x })?;
            let (next, record) = h
                .split_off(x, edge)
                .map_err(|e| DecomposeError::Invariant(e.to_string()))?;
            h = next;
            trace.push(record);
            if let Some(bad) = deficient_odd_set(&h, k, &within, cap)? {
                return Err(DecomposeError::CodensityDropped {
                    record,
                    set: bad.vertices,
                    e_plus: bad.e_plus,
                });
            }
        }
    }
    Ok((h, trace))
}

/// Removes one internal edge from each minimum optimal set of `h` (sets
/// inside `within`): the lexicographically least pair, then least id.
pub fn puncture(
    h: &Multigraph,
    k: usize,
    within: &[VertexId],
    cap: usize,
) -> Result<(Multigraph, Vec<Puncture>), DecomposeError> {
    let sets = all_min_optimal_sets(h, k, within, cap)?;
    let mut punctures = Vec::with_capacity(sets.len());
    for cert in sets {
        let internal: Vec<_> = h
            .edges()
            .iter()
            .filter(|e| cert.contains(e.u) && cert.contains(e.v))
            .collect();
        let expected = ((k + 2) * (cert.len() - 1) + 2) / 2;
        if internal.len() != expected {
            return Err(DecomposeError::Invariant(format!(
                "optimal set {:?} has {} internal edges, expected {expected}",
                cert.vertices,
                internal.len()
            )));
        }
        let e = internal
            .iter()
            .min_by_key(|e| (e.u.min(e.v), e.u.max(e.v), e.id))
            .ok_or_else(|| DecomposeError::NoInternalEdge {
                set: cert.vertices.clone(),
            })?;
        punctures.push(Puncture {
            set: cert.vertices.clone(),
            x: e.u.min(e.v),
            y: e.u.max(e.v),
            edge: e.id,
        });
    }
    let removed: BTreeSet<EdgeId> = punctures.iter().map(|p| p.edge).collect();
    Ok((h.edge_subgraph(|id| !removed.contains(&id)), punctures))
}

#[derive(Debug, Clone)]
pub struct Contracted {
    pub graph: Multigraph,
    /// Image of every `H₁` vertex.
    pub vertex_map: Vec<VertexId>,
    /// `u_i` for each puncture, in order.
    pub block_vertices: Vec<VertexId>,
}

pub fn contract_blocks(h1: &Multigraph, punctures: &[Puncture]) -> Contracted {
    let mut graph = h1.clone();
    let mut vertex_map: Vec<VertexId> = h1.vertices().collect();
    for p in punctures {
        let set: Vec<VertexId> = p.set.iter().map(|v| vertex_map[v.0]).collect();
        let c = graph.contract_set(&set);
        for m in vertex_map.iter_mut() {
            *m = c.vertex_map[m.0];
        }
        graph = c.graph;
    }
    let block_vertices = punctures.iter().map(|p| vertex_map[p.set[0].0]).collect();
    Contracted {
        graph,
        vertex_map,
        block_vertices,
    }
}

fn boundary_edges(g: &Multigraph, set: &[VertexId]) -> Vec<EdgeId> {
    g.edges()
        .iter()
        .filter(|e| set.contains(&e.u) != set.contains(&e.v))
        .map(|e| e.id)
        .collect()
}

/// Colors `H₁` with `k+2` colors: the exact solver on the input vertices,
/// then pendant edges greedily.
pub fn color_punctured(h1: &Multigraph, n: usize, k: usize, budget: u64) -> Result<EdgeColoring, DecomposeError> {
    let within: Vec<VertexId> = (0..n).map(VertexId).collect();
    let core = h1.induced_subgraph(&within);
    let base = find_coloring(&core.graph, k + 2, budget)?.ok_or(DecomposeError::NotColorable { colors: k + 2 })?;
    let mut coloring = EdgeColoring::from_assignment(k + 2, base.assignment());
    for e in h1.edges() {
        if coloring.color(e.id).is_some() {
            continue;
        }
        let free = (1..=k + 2)
            .find(|&c| coloring.is_missing(h1, e.u, c) && coloring.is_missing(h1, e.v, c))
            .ok_or(DecomposeError::NotColorable { colors: k + 2 })?;
        coloring.set(e.id, free);
    }
    Ok(coloring)
}

/// Orients the subgraph on colors `k+1` and `k+2`. Paths point toward an
/// `x_i` end, otherwise from the smaller end to the larger; a cycle leaves
/// its smallest vertex toward that vertex's smaller neighbor (smaller edge
/// id on a digon).
pub fn orient(
    h1: &Multigraph,
    psi: &EdgeColoring,
    punctures: &[Puncture],
    k: usize,
) -> Result<Orientation, DecomposeError> {
    let n = h1.vertex_count();
    let mut adj: Vec<Vec<(EdgeId, VertexId)>> = vec![Vec::new(); n];
    for e in h1.edges() {
        if matches!(psi.color(e.id), Some(c) if c > k) {
            adj[e.u.0].push((e.id, e.v));
            adj[e.v.0].push((e.id, e.u));
        }
    }
    let is_x: BTreeSet<VertexId> = punctures.iter().map(|p| p.x).collect();
    for &x in &is_x {
        if adj[x.0].len() > 1 {
            return Err(DecomposeError::Orientation(format!(
                "{x} has degree {} in the top two classes",
                adj[x.0].len()
            )));
        }
    }
    let walk = |start: VertexId, first: (EdgeId, VertexId)| -> Vec<Arc> {
        let mut arcs = vec![Arc {
            edge: first.0,
            tail: start,
            head: first.1,
        }];
        loop {
            let last = *arcs.last().expect("nonempty");
            if last.head == start {
                break;
            }
            match adj[last.head.0].iter().find(|(id, _)| *id != last.edge) {
                Some(&(edge, next)) => arcs.push(Arc {
                    edge,
                    tail: last.head,
                    head: next,
                }),
                None => break,
            }
        }
        arcs
    };
    let mut seen: BTreeSet<EdgeId> = BTreeSet::new();
    let mut arcs = Vec::new();
    for v in (0..n).map(VertexId) {
        if adj[v.0].len() != 1 || seen.contains(&adj[v.0][0].0) {
            continue;
        }
        let mut path = walk(v, adj[v.0][0]);
        let end = path.last().expect("nonempty").head;
        if is_x.contains(&v) {
            if is_x.contains(&end) {
                return Err(DecomposeError::Orientation(format!("a path joins {v} and {end}")));
            }
            path.reverse();
            for a in &mut path {
                std::mem::swap(&mut a.tail, &mut a.head);
            }
        }
        seen.extend(path.iter().map(|a| a.edge));
        arcs.extend(path);
    }
    for v in (0..n).map(VertexId) {
        let fresh: Vec<(EdgeId, VertexId)> = adj[v.0].iter().copied().filter(|(id, _)| !seen.contains(id)).collect();
        if fresh.is_empty() {
            continue;
        }
        let first = *fresh.iter().min_by_key(|&&(id, w)| (w, id)).expect("nonempty");
        let cycle = walk(v, first);
        if cycle.last().map(|a| a.head) != Some(v) {
            return Err(DecomposeError::Orientation(format!(
                "component at {v} is neither a path nor a cycle"
            )));
        }
        seen.extend(cycle.iter().map(|a| a.edge));
        arcs.extend(cycle);
    }
    Ok(Orientation { arcs })
}

/// Turns color classes `1..=k` into `k` disjoint sets saturating the first
/// `n` vertices, adding in-arcs of the orientation and punctured edges.
/// The sets live in the edge-id universe of `H`.
pub fn orient_and_augment(
    h1: &Multigraph,
    psi: &EdgeColoring,
    punctures: &[Puncture],
    k: usize,
    n: usize,
) -> Result<(Orientation, Vec<Vec<EdgeId>>), DecomposeError> {
    let orientation = orient(h1, psi, punctures, k)?;
    let mut sets: Vec<BTreeSet<EdgeId>> = (1..=k).map(|c| psi.class(h1, c).into_iter().collect()).collect();
    let needs_arc = |w: VertexId, why: &str| {
        orientation.in_arc(w).ok_or_else(|| DecomposeError::AugmentationFailed {
            vertex: w,
            detail: format!("{why} but it has no in-arc"),
        })
    };
    for w in (0..n).map(VertexId) {
        let missed: Vec<Color> = (1..=k).filter(|&c| psi.is_missing(h1, w, c)).collect();
        let puncture = punctures.iter().find(|p| p.y == w);
        match (puncture, missed.as_slice()) {
            (_, []) => {}
            (None, &[c]) => {
                sets[c - 1].insert(needs_arc(w, &format!("missed by class {c}"))?.edge);
            }
            (Some(p), &[c]) => {
                sets[c - 1].insert(p.edge);
            }
            (Some(p), &[c, d]) => {
                sets[c - 1].insert(needs_arc(w, &format!("missed by classes {c} and {d}"))?.edge);
                sets[d - 1].insert(p.edge);
            }
            (_, many) => {
                return Err(DecomposeError::AugmentationFailed {
                    vertex: w,
                    detail: format!("missed by classes {many:?}"),
                })
            }
        }
    }
    let ends = |e: EdgeId| -> (VertexId, VertexId) {
        match h1.edge(e) {
            Some(edge) => (edge.u, edge.v),
            None => {
                let p = punctures.iter().find(|p| p.edge == e).expect("augmenting edges come from H");
                (p.x, p.y)
            }
        }
    };
    for (j, set) in sets.iter().enumerate() {
        let mut hit = vec![false; h1.vertex_count()];
        for &e in set {
            let (a, b) = ends(e);
            hit[a.0] = true;
            hit[b.0] = true;
        }
        if let Some(v) = (0..n).find(|&v| !hit[v]) {
            return Err(DecomposeError::AugmentationFailed {
                vertex: VertexId(v),
                detail: format!("set {} does not saturate it", j + 1),
            });
        }
    }
    Ok((orientation, sets.into_iter().map(|s| s.into_iter().collect()).collect()))
}

/// Replaces every split edge by the input edge it descends from.
pub fn map_back(sets: &[Vec<EdgeId>], trace: &SplitTrace) -> Vec<Vec<EdgeId>> {
    sets.iter()
        .map(|set| {
            let mut mapped: Vec<EdgeId> = set.iter().map(|&e| trace.original_edge(e)).collect();
            mapped.sort();
            mapped
        })
        .collect()
}

struct Run {
    options: DecomposeOptions,
    state: PipelineState,
    stages: Vec<StageRecord>,
    clock: Instant,
    hypotheses: bool,
}

impl Run {
    fn done(&mut self, stage: Stage, detail: String) {
        let micros = self.options.timings.then(|| self.clock.elapsed().as_micros() as u64);
        self.stages.push(StageRecord { stage, detail, micros });
        self.clock = Instant::now();
    }

    fn fail(self, stage: Stage, error: DecomposeError) -> Box<FailureReport> {
        Box::new(FailureReport {
            stage,
            message: error.to_string(),
            hypotheses_held: self.hypotheses,
            resource_limit: error.is_resource_limit(),
            state: self.state,
            error,
        })
    }
}

/// Runs every stage and returns `k` verified edge covers, or a report of
/// the first stage that failed together with the state reached so far.
pub fn decompose(g: &Multigraph, options: DecomposeOptions) -> Result<CoverDecomposition, Box<FailureReport>> {
    let mut run = Run {
        options,
        state: PipelineState::new(g),
        stages: Vec::new(),
        clock: Instant::now(),
        hypotheses: true,
    };
    macro_rules! stage {
        ($stage:expr, $e:expr) => {
            match $e {
                Ok(v) => v,
                Err(err) => return Err(run.fail($stage, DecomposeError::from(err))),
            }
        };
    }
    let bound: GuptaBound = stage!(Stage::Bound, gupta_bound_with_cap(g, options.enumeration_cap));
    let k = bound.k;
    run.state.k = k;
    run.hypotheses = hypotheses_hold(g, k);
    run.done(Stage::Bound, format!("delta = {}, codensity = {}, k = {k}", bound.delta, bound.codensity));
    if k == 0 || g.edge_count() == 0 {
        return Ok(CoverDecomposition {
            k: 0,
            covers: Vec::new(),
            stages: run.stages,
            notes: Vec::new(),
        });
    }
    let n = g.vertex_count();
    let within: Vec<VertexId> = g.vertices().collect();
    let cap = options.enumeration_cap;
    let budget = options.node_budget;

    let (h, trace) = stage!(Stage::Regularize, regularize(g, k, cap));
    run.state.h = Some(h.clone());
    run.state.trace = trace.clone();
    run.done(Stage::Regularize, format!("{} splits", trace.len()));

    let (h1, punctures) = stage!(Stage::Puncture, puncture(&h, k, &within, cap));
    run.state.h1 = Some(h1.clone());
    run.state.punctures = punctures.clone();
    run.done(Stage::Puncture, format!("{} blocks", punctures.len()));

    let coloring = stage!(Stage::Color, color_punctured(&h1, n, k, budget));
    run.state.initial_coloring = Some(coloring.clone());
    for (i, p) in punctures.iter().enumerate() {
        let mut by_color: BTreeMap<Color, EdgeId> = BTreeMap::new();
        for e in boundary_edges(&h1, &p.set) {
            let c = coloring.color(e).expect("complete coloring");
            if let Some(&first) = by_color.get(&c) {
                let err = DecomposeError::BoundaryColorClash {
                    block: i,
                    first,
                    second: e,
                    color: c,
                };
                return Err(run.fail(Stage::Color, err));
            }
            by_color.insert(c, e);
        }
    }
    run.done(Stage::Color, format!("{} colors", k + 2));

    let contracted = contract_blocks(&h1, &punctures);
    let h2 = contracted.graph.clone();
    run.state.h2 = Some(h2.clone());
    run.state.h2_vertex_map = contracted.vertex_map.clone();
    run.state.block_vertices = contracted.block_vertices.clone();
    let mut check_degrees = true;
    for (i, (p, &u)) in punctures.iter().zip(&contracted.block_vertices).enumerate() {
        let degree = h2.degree(u);
        let boundary = h.boundary_counts(&p.set).boundary;
        if degree != boundary {
            let err = DecomposeError::Invariant(format!(
                "contracted block {i} has degree {degree} but {boundary} boundary edges"
            ));
            return Err(run.fail(Stage::Contract, err));
        }
        if 2 * degree > k {
            let err = DecomposeError::DegreeBoundFailed { block: i, degree, k };
            if run.hypotheses {
                return Err(run.fail(Stage::Contract, err));
            }
            run.state.notes.push(err.to_string());
            check_degrees = false;
        }
    }
    run.done(Stage::Contract, format!("{} vertices", h2.vertex_count()));

    let special = SpecialColoringOptions {
        node_budget: budget,
        step_cap: options.special_step_cap,
        check_degrees,
    };
    let phi0 = coloring.restricted_to(&h2);
    let special_run = stage!(
        Stage::SpecialColoring,
        special_coloring_from(&h2, k, &contracted.block_vertices, &phi0, special)
    );
    let phi = special_run.coloring;
    run.state.special_coloring = Some(phi.clone());
    run.done(Stage::SpecialColoring, format!("{} moves", special_run.steps.len()));

    let mut blocks = Vec::with_capacity(punctures.len());
    for p in &punctures {
        let block = h1.induced_subgraph(&p.set);
        let local = stage!(Stage::Lift, color_dense_block(&block.graph, k + 2, budget));
        let bc = BlockColoring {
            block,
            coloring: local,
            x: p.x,
            y: p.y,
        };
        let requirements: BTreeMap<EdgeId, Color> = boundary_edges(&h1, &p.set)
            .into_iter()
            .map(|e| (e, phi.color(e).expect("complete coloring")))
            .collect();
        blocks.push(stage!(Stage::Lift, permute_block_palette(&h1, &bc, &requirements, k)));
    }
    let psi = stage!(Stage::Lift, assemble_lift(&h1, &phi, &blocks, k));
    run.state.psi = Some(psi.clone());
    run.done(Stage::Lift, "properties hold".into());

    let (orientation, sets) = match orient_and_augment(&h1, &psi, &punctures, k, n) {
        Ok(v) => v,
        Err(err @ DecomposeError::Orientation(_)) => return Err(run.fail(Stage::Orient, err)),
        Err(err) => return Err(run.fail(Stage::Augment, err)),
    };
    run.state.orientation = Some(orientation.clone());
    run.done(Stage::Orient, format!("{} arcs", orientation.arcs.len()));
    let added: usize = sets.iter().map(Vec::len).sum::<usize>()
        - (1..=k).map(|c| psi.class(&h1, c).len()).sum::<usize>();
    run.done(Stage::Augment, format!("{added} edges added"));

    let covers = map_back(&sets, &trace);
    run.done(Stage::MapBack, format!("{} covers", covers.len()));
    stage!(Stage::Verify, verify_decomposition(g, &covers));
    run.done(Stage::Verify, "ok".into());
    Ok(CoverDecomposition {
        k,
        covers,
        stages: run.stages,
        notes: run.state.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::{complete, cycle, petersen};

    fn cap() -> usize {
        DEFAULT_ENUMERATION_CAP
    }

    #[test]
    fn regular_graphs_need_no_splits() {
        let (h, trace) = regularize(&complete(4), 2, cap()).unwrap();
        assert_eq!(h, complete(4));
        assert!(trace.is_empty());
    }

    #[test]
    fn high_degree_vertex_is_split_down() {
        // K4 plus two parallel edges 0-1: d(0) = d(1) = 5 = k+3 with k = 2.
        let g = Multigraph::build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 1), (0, 1)]).unwrap();
        let (h, trace) = regularize(&g, 2, cap()).unwrap();
        for v in 0..4 {
            assert_eq!(h.degree(VertexId(v)), 3);
        }
        let at_zero = trace.records.iter().filter(|r| r.original_vertex == VertexId(0)).count();
        assert_eq!(at_zero, 2);
        for v in 4..h.vertex_count() {
            assert_eq!(h.degree(VertexId(v)), 1);
        }
        let merged = trace.merge_back(&h).unwrap();
        assert_eq!(merged.vertex_count(), 4);
        let pairs = |g: &Multigraph| -> Vec<(EdgeId, VertexId, VertexId)> {
            g.edges().iter().map(|e| (e.id, e.u.min(e.v), e.u.max(e.v))).collect()
        };
        assert_eq!(pairs(&merged), pairs(&g));
    }

    #[test]
    fn puncture_examples() {
        let (h1, ps) = puncture(&complete(4), 2, &(0..4).map(VertexId).collect::<Vec<_>>(), cap()).unwrap();
        assert!(ps.is_empty());
        assert_eq!(h1, complete(4));
        // Doubled triangle, k = 3: the whole vertex set is optimal.
        let fat = Multigraph::build(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (0, 2), (0, 2)]).unwrap();
        let (h1, ps) = puncture(&fat, 3, &[VertexId(0), VertexId(1), VertexId(2)], cap()).unwrap();
        assert_eq!(
            ps,
            vec![Puncture {
                set: vec![VertexId(0), VertexId(1), VertexId(2)],
                x: VertexId(0),
                y: VertexId(1),
                edge: EdgeId(0),
            }]
        );
        assert_eq!(h1.edge_count(), 5);
    }

    #[test]
    fn doubled_triangle_decomposes() {
        let fat = Multigraph::build(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (0, 2), (0, 2)]).unwrap();
        let d = decompose(&fat, DecomposeOptions::default()).unwrap();
        assert_eq!(d.k, 3);
        assert_eq!(verify_decomposition(&fat, &d.covers), Ok(()));
    }

    #[test]
    fn contracting_nothing_is_identity() {
        let c = contract_blocks(&petersen(), &[]);
        assert_eq!(c.graph, petersen());
        assert!(c.block_vertices.is_empty());
    }

    #[test]
    fn map_back_examples() {
        let sets = vec![vec![EdgeId(2), EdgeId(0)]];
        assert_eq!(map_back(&sets, &SplitTrace::new()), vec![vec![EdgeId(0), EdgeId(2)]]);
        let g = Multigraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let (_, record) = g.split_off(VertexId(1), EdgeId(0)).unwrap();
        let mut trace = SplitTrace::new();
        trace.push(record);
        assert_eq!(map_back(&[vec![record.new_edge]], &trace), vec![vec![EdgeId(0)]]);
    }

    #[test]
    fn named_decompositions() {
        let c5 = decompose(&cycle(5), DecomposeOptions::default()).unwrap();
        assert_eq!(c5.k, 1);
        assert_eq!(verify_decomposition(&cycle(5), &c5.covers), Ok(()));
        let k4 = decompose(&complete(4), DecomposeOptions::default()).unwrap();
        assert_eq!(k4.k, 2);
        assert_eq!(k4.covers.len(), 2);
        let k2 = decompose(&complete(2), DecomposeOptions::default()).unwrap();
        assert_eq!(k2.k, 0);
        assert!(k2.covers.is_empty());
        let p = decompose(&petersen(), DecomposeOptions::default()).unwrap();
        assert_eq!(p.covers.len(), 2);
        assert!(p.stages.iter().all(|s| s.micros.is_none()));
    }
}
