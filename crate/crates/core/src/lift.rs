//! Coloring punctured dense blocks and lifting a coloring of the contracted
//! graph back to the graph before contraction.
//!
//! Each block `U_i` induces a `(k+2)`-dense graph whose `(k+2)`-colorings
//! consist of near-perfect matchings with pairwise disjoint missing sets.
//! The block palette is permuted so that every boundary edge `wz` finds its
//! color (fixed by the contracted coloring) missing at `w`, and so that
//! color `k+2` misses the designated vertex `x_i`.

use crate::coloring::{
    chain, check_dense_structure, find_coloring, ChainKind, Color, ColoringError, DenseViolation,
    EdgeColoring,
};
use crate::graph::{EdgeId, Induced, Multigraph, VertexId};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("block has {edges} edges, an {s}-dense block on {vertices} vertices needs {expected}")]
    DensityMismatch {
        s: usize,
        vertices: usize,
        edges: usize,
        expected: usize,
    },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("block has no {s}-edge-coloring")]
    NotColorable { s: usize },
    #[error("block coloring lacks dense structure: {0}")]
    DenseStructure(#[from] DenseViolation),
    #[error("no feasible palette permutation: {0}")]
    NoFeasiblePermutation(String),
    #[error("lift property {property} violated: {detail}")]
    LiftInvariantViolated { property: u8, detail: String },
}

/// A proper `(k+2)`-coloring of one punctured block `H₁[U_i]`.
#[derive(Debug, Clone)]
pub struct BlockColoring {
    /// The block as an induced subgraph; `block.original` is `U_i`.
    pub block: Induced,
    /// Keyed by the block's edge ids, which are `H₁`'s ids.
    pub coloring: EdgeColoring,
    /// Endpoints of the punctured edge, as `H₁` vertices.
    pub x: VertexId,
    pub y: VertexId,
}

impl BlockColoring {
    pub fn vertices(&self) -> &[VertexId] {
        &self.block.original
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.block.local(v).is_some()
    }

    /// Whether block color `color` is missing at `H₁` vertex `w`.
    pub fn misses(&self, w: VertexId, color: Color) -> bool {
        match self.block.local(w) {
            Some(lw) => self.coloring.is_missing(&self.block.graph, lw, color),
            None => true,
        }
    }

    /// Checks each requirement edge by edge: the required color must be
    /// missing at the block endpoint.
    pub fn satisfies(&self, h1: &Multigraph, requirements: &BTreeMap<EdgeId, Color>) -> bool {
        requirements.iter().all(|(&e, &color)| {
            h1.edge(e)
                .and_then(|edge| [edge.u, edge.v].into_iter().find(|&w| self.contains(w)))
                .is_some_and(|w| self.misses(w, color))
        })
    }
}

/// Colors an `s`-dense block with `s` colors and checks the near-perfect
/// matching structure of the result.
pub fn color_dense_block(block: &Multigraph, s: usize, budget: u64) -> Result<EdgeColoring, LiftError> {
    let n = block.vertex_count();
    let expected = if n == 0 { 0 } else { s * (n - 1) / 2 };
    if n < 3 || n.is_multiple_of(2) || block.edge_count() != expected || !(s * (n - 1)).is_multiple_of(2) {
        return Err(LiftError::DensityMismatch {
            s,
            vertices: n,
            edges: block.edge_count(),
            expected,
        });
    }
    let coloring = find_coloring(block, s, budget)?.ok_or(LiftError::NotColorable { s })?;
    check_dense_structure(block, &coloring, s)?;
    Ok(coloring)
}

/// Renames the block's colors so that every requirement `e ↦ c` has `c`
/// missing at the block endpoint of `e`, and color `k+2` misses `x`.
///
/// Solved as a perfect matching between global colors and block color
/// classes; the identity is preferred where it is admissible.
pub fn permute_block_palette(
    h1: &Multigraph,
    bc: &BlockColoring,
    requirements: &BTreeMap<EdgeId, Color>,
    k: usize,
) -> Result<BlockColoring, LiftError> {
    let s = k + 2;
    let mut required_at: Vec<Option<VertexId>> = vec![None; s + 1];
    for (&e, &color) in requirements {
        let edge = h1
            .edge(e)
            .ok_or_else(|| LiftError::NoFeasiblePermutation(format!("unknown boundary edge {e}")))?;
        let w = [edge.u, edge.v]
            .into_iter()
            .find(|&w| bc.contains(w))
            .ok_or_else(|| LiftError::NoFeasiblePermutation(format!("{e} does not touch the block")))?;
        if color == 0 || color > s {
            return Err(LiftError::NoFeasiblePermutation(format!(
                "{e} requires color {color} outside 1..={s}"
            )));
        }
        if required_at[color].is_some() {
            return Err(LiftError::NoFeasiblePermutation(format!(
                "color {color} is required by two boundary edges"
            )));
        }
        required_at[color] = Some(w);
    }

    // allowed[g] = block classes that may become global color g.
    let allowed: Vec<Vec<Color>> = (0..=s)
        .map(|global| {
            if global == 0 {
                return Vec::new();
            }
            let mut order: Vec<Color> = std::iter::once(global)
                .chain((1..=s).filter(|&l| l != global))
                .collect();
            order.retain(|&local| {
                required_at[global].is_none_or(|w| bc.misses(w, local))
                    && (global != s || bc.misses(bc.x, local))
            });
            order
        })
        .collect();

    let mut owner: Vec<Option<Color>> = vec![None; s + 1];
    for global in 1..=s {
        let mut seen = vec![false; s + 1];
        if !augment(global, &allowed, &mut owner, &mut seen) {
            return Err(LiftError::NoFeasiblePermutation(hall_dump(
                global, &allowed, &owner, &required_at, bc.x, s,
            )));
        }
    }
    let mut map = vec![0; s + 1];
    for (local, g) in owner.iter().enumerate().skip(1) {
        map[local] = g.expect("perfect matching");
    }
    let permuted = BlockColoring {
        block: bc.block.clone(),
        coloring: bc.coloring.permuted(&map),
        x: bc.x,
        y: bc.y,
    };
    debug_assert!(permuted.satisfies(h1, requirements));
    Ok(permuted)
}

fn augment(global: Color, allowed: &[Vec<Color>], owner: &mut [Option<Color>], seen: &mut [bool]) -> bool {
    for &local in &allowed[global] {
        if seen[local] {
            continue;
        }
        seen[local] = true;
        if owner[local].is_none_or(|g| augment(g, allowed, owner, seen)) {
            owner[local] = Some(global);
            return true;
        }
    }
    false
}

/// Describes the alternating tree grown from an unmatched global color: its
/// global colors outnumber the block classes they can reach.
fn hall_dump(
    start: Color,
    allowed: &[Vec<Color>],
    owner: &[Option<Color>],
    required_at: &[Option<VertexId>],
    x: VertexId,
    s: usize,
) -> String {
    let mut globals = vec![start];
    let mut locals: Vec<Color> = Vec::new();
    let mut i = 0;
    while i < globals.len() {
        for &l in &allowed[globals[i]] {
            if !locals.contains(&l) {
                locals.push(l);
                if let Some(g) = owner[l] {
                    if !globals.contains(&g) {
                        globals.push(g);
                    }
                }
            }
        }
        i += 1;
    }
    globals.sort();
    locals.sort();
    let why: Vec<String> = globals
        .iter()
        .map(|&g| match (required_at[g], g == s) {
            (Some(w), _) => format!("{g}@{w}"),
            (None, true) => format!("{g}@{x}"),
            (None, false) => format!("{g}"),
        })
        .collect();
    format!(
        "global colors [{}] can only use block classes {:?}",
        why.join(", "),
        locals
    )
}

/// Combines the contracted coloring (for every edge outside the blocks) with
/// the block colorings, then checks properness and the lift properties.
pub fn assemble_lift(
    h1: &Multigraph,
    contracted: &EdgeColoring,
    blocks: &[BlockColoring],
    k: usize,
) -> Result<EdgeColoring, LiftError> {
    let mut psi = EdgeColoring::new(k + 2);
    for e in h1.edges() {
        let inner = blocks
            .iter()
            .find(|b| b.contains(e.u) && b.contains(e.v))
            .and_then(|b| b.coloring.color(e.id));
        let color = inner.or_else(|| contracted.color(e.id)).ok_or_else(|| {
            LiftError::LiftInvariantViolated {
                property: 0,
                detail: format!("{} has no color", e.id),
            }
        })?;
        psi.set(e.id, color);
    }
    check_lift_properties(h1, &psi, blocks, k)?;
    Ok(psi)
}

/// Property 0 is properness; 1 to 3 are the lift properties:
/// no boundary edge has color `k+2`; a `(k+1,k+2)`-chain through a boundary
/// edge is a path ending outside every block, and then the whole block
/// presents `k+1`; and color `k+2` misses each `x_i`.
pub fn check_lift_properties(
    h1: &Multigraph,
    psi: &EdgeColoring,
    blocks: &[BlockColoring],
    k: usize,
) -> Result<(), LiftError> {
    let violated = |property: u8, detail: String| LiftError::LiftInvariantViolated { property, detail };
    psi.check_proper(h1).map_err(|v| violated(0, v.to_string()))?;
    let (low, top) = (k + 1, k + 2);
    let in_any_block = |v: VertexId| blocks.iter().any(|b| b.contains(v));
    for (i, b) in blocks.iter().enumerate() {
        for e in h1.edges() {
            let (cu, cv) = (b.contains(e.u), b.contains(e.v));
            if cu == cv {
                continue;
            }
            let w = if cu { e.u } else { e.v };
            let color = psi.color(e.id).expect("proper");
            if color == top {
                return Err(violated(1, format!("boundary edge {} of block {i} has color {top}", e.id)));
            }
            if color == low {
                let ch = chain(psi, h1, w, low, top);
                let outside_end = match ch.kind {
                    ChainKind::Cycle => None,
                    ChainKind::Path => ch
                        .ends()
                        .and_then(|(a, z)| [a, z].into_iter().find(|&v| !in_any_block(v))),
                };
                if outside_end.is_none() {
                    return Err(violated(
                        2,
                        format!("({low},{top})-chain through {} does not end outside the blocks", e.id),
                    ));
                }
                if let Some(&v) = b.vertices().iter().find(|&&v| psi.is_missing(h1, v, low)) {
                    return Err(violated(2, format!("{v} in block {i} misses color {low}")));
                }
            }
        }
        if psi.is_present(h1, b.x, top) {
            return Err(violated(3, format!("x = {} of block {i} presents color {top}", b.x)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::DEFAULT_NODE_BUDGET;
    use crate::graph::named::complete;

    fn block_of(g: &Multigraph, set: &[usize], x: usize, y: usize, s: usize) -> BlockColoring {
        let set: Vec<VertexId> = set.iter().copied().map(VertexId).collect();
        let block = g.induced_subgraph(&set);
        let coloring = color_dense_block(&block.graph, s, DEFAULT_NODE_BUDGET).unwrap();
        BlockColoring {
            block,
            coloring,
            x: VertexId(x),
            y: VertexId(y),
        }
    }

    #[test]
    fn dense_block_examples() {
        let c = color_dense_block(&complete(3), 3, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(c.assignment().len(), 3);
        let k5 = complete(5);
        let c = color_dense_block(&k5, 5, DEFAULT_NODE_BUDGET).unwrap();
        for color in 1..=5 {
            assert_eq!(c.class(&k5, color).len(), 2);
        }
        let p3 = Multigraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let c = color_dense_block(&p3, 2, DEFAULT_NODE_BUDGET).unwrap();
        assert!(c.missing(&p3, VertexId(1)).is_empty());
        assert!(matches!(
            color_dense_block(&complete(4), 3, DEFAULT_NODE_BUDGET),
            Err(LiftError::DensityMismatch { .. })
        ));
    }

    #[test]
    fn identity_when_unconstrained() {
        // Triangle block of K3 with k = 1: s = 3; x misses exactly one class.
        let g = complete(3);
        let bc = block_of(&g, &[0, 1, 2], 0, 1, 3);
        let lx = bc.block.local(bc.x).unwrap();
        let missing_at_x = *bc.coloring.missing(&bc.block.graph, lx).iter().next().unwrap();
        let out = permute_block_palette(&g, &bc, &BTreeMap::new(), 1).unwrap();
        assert!(out.misses(out.x, 3));
        if missing_at_x == 3 {
            assert_eq!(out.coloring, bc.coloring);
        }
    }

    #[test]
    fn forced_transposition() {
        // Triangle 0,1,2 inside a graph with one extra vertex 3 and boundary
        // edge (0,3). The block is colored so that vertex 0 misses class 3;
        // requiring color 1 on the boundary edge forces swapping 1 and 3.
        let g = Multigraph::build(4, &[(0, 1), (1, 2), (0, 2), (0, 3)]).unwrap();
        let set = [VertexId(0), VertexId(1), VertexId(2)];
        let block = g.induced_subgraph(&set);
        let coloring = EdgeColoring::from_assignment(3, [(EdgeId(0), 1), (EdgeId(1), 3), (EdgeId(2), 2)]);
        let bc = BlockColoring {
            block,
            coloring,
            x: VertexId(1),
            y: VertexId(2),
        };
        let req: BTreeMap<EdgeId, Color> = [(EdgeId(3), 1)].into();
        // k = 1 so color k+2 = 3 must miss x = 1, which misses class 2.
        let out = permute_block_palette(&g, &bc, &req, 1).unwrap();
        assert!(out.satisfies(&g, &req));
        assert!(out.misses(VertexId(1), 3));
        assert_eq!(out.coloring.color(EdgeId(1)), Some(1));
    }

    #[test]
    fn infeasible_requirements_are_explained() {
        let g = Multigraph::build(4, &[(0, 1), (1, 2), (0, 2), (0, 3)]).unwrap();
        let set = [VertexId(0), VertexId(1), VertexId(2)];
        let block = g.induced_subgraph(&set);
        let coloring = EdgeColoring::from_assignment(3, [(EdgeId(0), 1), (EdgeId(1), 3), (EdgeId(2), 2)]);
        // x = 0 and the boundary edge at 0 both compete for the one class
        // missing at 0.
        let bc = BlockColoring {
            block,
            coloring,
            x: VertexId(0),
            y: VertexId(1),
        };
        let req: BTreeMap<EdgeId, Color> = [(EdgeId(3), 1)].into();
        match permute_block_palette(&g, &bc, &req, 1) {
            Err(LiftError::NoFeasiblePermutation(msg)) => assert!(msg.contains("@v0")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn assemble_without_blocks_is_identity() {
        let g = complete(4);
        let c = find_coloring(&g, 4, DEFAULT_NODE_BUDGET).unwrap().unwrap();
        assert_eq!(assemble_lift(&g, &c, &[], 2).unwrap(), c);
    }

    #[test]
    fn assemble_single_block_no_boundary() {
        let g = complete(3);
        let bc = block_of(&g, &[0, 1, 2], 0, 1, 3);
        let bc = permute_block_palette(&g, &bc, &BTreeMap::new(), 1).unwrap();
        let psi = assemble_lift(&g, &EdgeColoring::new(3), std::slice::from_ref(&bc), 1).unwrap();
        assert_eq!(psi, bc.coloring);
    }
}
