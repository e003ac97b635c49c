//! Recoloring toward a `(k+2)`-coloring in which color `k+2` is missing at
//! every vertex of a set `S` of small-degree vertices, and no
//! `(k+1,k+2)`-path has both ends in `S`.
//!
//! The procedure applies local moves (a Kempe swap along an `(α,k+2)`-path,
//! recoloring the first edge of a path, or a `(β,γ)`-swap followed by a
//! recolor) and checks after every move that the potential went down:
//!
//! * phase 1 (`s_φ > 0`): `(s_φ, i)` decreases lexicographically, where `i`
//!   is the first position on the current path whose missing set meets the
//!   missing set of the path's start;
//! * phase 2 (`s_φ = 0`): `s_φ` stays 0 and `(c_φ, i)` decreases.
//!
//! Ties among candidate vertices and colors go to the smallest index.

use crate::coloring::{chain, find_coloring, Chain, Color, ColoringError, EdgeColoring};
use crate::graph::{Multigraph, VertexId};
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Potentials {
    /// Vertices of `S` presenting color `k+2`.
    pub s_phi: usize,
    /// `(k+1,k+2)`-path chains whose two distinct ends both lie in `S`.
    pub c_phi: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecialColoringError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("recoloring did not finish within {steps} moves")]
    BudgetExhausted { steps: usize },
    #[error("potential did not decrease: {0:?}")]
    PotentialNotDecreasing(StepRecord),
    #[error("no admissible move: {0}")]
    Stuck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Kempe swap of the whole `(α,k+2)`-path at `x`.
    EndSwap,
    /// Recolor of the first path edge at `x`.
    RecolorFirst,
    /// `(β,γ)`-swap at `v_i`, recolor of `v_{i−1}v_i`, possibly a final swap.
    SwapAndRecolor,
    /// `(β,γ)`-swap on a chain linking `v_i` and `v_{i−1}`; moves the
    /// first meeting position closer to `x`.
    LinkedSwap,
}

/// `(s_φ, c_φ, i)` at one point of the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Measure {
    pub s_phi: usize,
    pub c_phi: usize,
    /// First meeting position on the path being worked on; 0 when the move
    /// finished with that path.
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub phase: u8,
    pub kind: MoveKind,
    pub before: Measure,
    pub after: Measure,
}

impl StepRecord {
    /// Phase 1 needs `(s_φ, i)` to drop; phase 2 needs `s_φ = 0` and
    /// `(c_φ, i)` to drop. `c_φ` is not tracked in phase 1 because a
    /// `(β,γ)`-swap there may involve color `k+1`.
    pub fn decreases(&self) -> bool {
        let (b, a) = (self.before, self.after);
        if self.phase == 1 {
            (a.s_phi, a.index) < (b.s_phi, b.index) && (a.s_phi < b.s_phi || a.index > 0)
        } else {
            a.s_phi == 0
                && (a.c_phi, a.index) < (b.c_phi, b.index)
                && (a.c_phi < b.c_phi || a.index > 0)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpecialColoringOptions {
    pub node_budget: u64,
    /// Defaults to `10·|E|·(k+2)²` when `None`.
    pub step_cap: Option<usize>,
    /// Reject inputs violating `Δ ≤ k+1` or `d(v) ≤ k/2` on `S`. When off,
    /// moves are attempted anyway and fail with `Stuck` if none applies.
    pub check_degrees: bool,
}

impl Default for SpecialColoringOptions {
    fn default() -> Self {
        SpecialColoringOptions {
            node_budget: crate::coloring::DEFAULT_NODE_BUDGET,
            step_cap: None,
            check_degrees: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpecialColoringRun {
    pub coloring: EdgeColoring,
    pub initial: Potentials,
    pub steps: Vec<StepRecord>,
}

pub fn potentials(g: &Multigraph, c: &EdgeColoring, k: usize, s: &[VertexId]) -> Potentials {
    let top = k + 2;
    let in_s = membership(g, s);
    let s_phi = s.iter().filter(|&&x| c.is_present(g, x, top)).count();
    let mut c_phi = 0;
    for &x in s {
        let ch = chain(c, g, x, k + 1, top);
        if let Some((a, b)) = ch.ends() {
            if a != b && in_s[a.0] && in_s[b.0] && x == a.min(b) {
                c_phi += 1;
            }
        }
    }
    Potentials { s_phi, c_phi }
}

fn membership(g: &Multigraph, s: &[VertexId]) -> Vec<bool> {
    let mut in_s = vec![false; g.vertex_count()];
    for &v in s {
        in_s[v.0] = true;
    }
    in_s
}

/// Finds a `(k+2)`-coloring with the exact solver, then recolors it.
pub fn special_coloring(
    g: &Multigraph,
    k: usize,
    s: &[VertexId],
    budget: u64,
) -> Result<EdgeColoring, SpecialColoringError> {
    let options = SpecialColoringOptions {
        node_budget: budget,
        ..Default::default()
    };
    check_degrees(g, k, s)?;
    let initial = find_coloring(g, k + 2, budget)?.ok_or_else(|| {
        SpecialColoringError::PreconditionViolated(format!("no {}-edge-coloring exists", k + 2))
    })?;
    special_coloring_from(g, k, s, &initial, options).map(|run| run.coloring)
}

fn check_degrees(g: &Multigraph, k: usize, s: &[VertexId]) -> Result<(), SpecialColoringError> {
    if g.max_degree() > k + 1 {
        return Err(SpecialColoringError::PreconditionViolated(format!(
            "maximum degree {} exceeds k+1 = {}",
            g.max_degree(),
            k + 1
        )));
    }
    if let Some(&v) = s.iter().find(|&&v| 2 * g.degree(v) > k) {
        return Err(SpecialColoringError::PreconditionViolated(format!(
            "{v} in S has degree {} > k/2",
            g.degree(v)
        )));
    }
    Ok(())
}

/// Recolors `initial` until both potentials vanish.
pub fn special_coloring_from(
    g: &Multigraph,
    k: usize,
    s: &[VertexId],
    initial: &EdgeColoring,
    options: SpecialColoringOptions,
) -> Result<SpecialColoringRun, SpecialColoringError> {
    if options.check_degrees {
        check_degrees(g, k, s)?;
    }
    if initial.palette() != k + 2 {
        return Err(SpecialColoringError::PreconditionViolated(format!(
            "initial coloring has palette {}, expected {}",
            initial.palette(),
            k + 2
        )));
    }
    if let Err(v) = initial.check_proper(g) {
        return Err(SpecialColoringError::PreconditionViolated(format!(
            "initial coloring is not proper: {v}"
        )));
    }
    let mut s_sorted = s.to_vec();
    s_sorted.sort();
    s_sorted.dedup();
    let cap = options
        .step_cap
        .unwrap_or(10 * g.edge_count().max(1) * (k + 2) * (k + 2));
    let mut run = Recoloring {
        g,
        k,
        s: s_sorted,
        in_s: membership(g, s),
        c: initial.clone(),
        steps: Vec::new(),
        cap,
    };
    let initial_potentials = run.potentials();
    run.phase_one()?;
    run.phase_two()?;
    debug_assert!(run.c.is_proper(g));
    Ok(SpecialColoringRun {
        coloring: run.c,
        initial: initial_potentials,
        steps: run.steps,
    })
}

struct Recoloring<'a> {
    g: &'a Multigraph,
    k: usize,
    s: Vec<VertexId>,
    in_s: Vec<bool>,
    c: EdgeColoring,
    steps: Vec<StepRecord>,
    cap: usize,
}

impl Recoloring<'_> {
    fn top(&self) -> Color {
        self.k + 2
    }

    fn potentials(&self) -> Potentials {
        potentials(self.g, &self.c, self.k, &self.s)
    }

    fn missing(&self, v: VertexId) -> BTreeSet<Color> {
        self.c.missing(self.g, v)
    }

    fn measure(&self, index: usize) -> Measure {
        let p = self.potentials();
        Measure {
            s_phi: p.s_phi,
            c_phi: p.c_phi,
            index,
        }
    }

    fn record(
        &mut self,
        phase: u8,
        kind: MoveKind,
        before: Measure,
        index_after: usize,
    ) -> Result<(), SpecialColoringError> {
        let step = StepRecord {
            phase,
            kind,
            before,
            after: self.measure(index_after),
        };
        if !step.decreases() {
            return Err(SpecialColoringError::PotentialNotDecreasing(step));
        }
        self.steps.push(step);
        if self.steps.len() > self.cap {
            return Err(SpecialColoringError::BudgetExhausted { steps: self.cap });
        }
        Ok(())
    }

    fn recolor(&mut self, edge: crate::graph::EdgeId, color: Color) {
        self.c.set(edge, color);
    }

    fn swap(&mut self, ch: &Chain) {
        self.c.swap_in_place(ch);
    }

    /// First position `j ≥ 1` on `path` whose missing set meets `target`
    /// (restricted to `limit` colors), with the smallest shared color.
    fn first_meeting(
        &self,
        path: &Chain,
        target: &BTreeSet<Color>,
        limit: Color,
    ) -> Option<(usize, Color)> {
        path.vertices.iter().enumerate().skip(1).find_map(|(j, &v)| {
            self.missing(v)
                .intersection(target)
                .copied()
                .find(|&col| col <= limit)
                .map(|col| (j, col))
        })
    }

    fn phase_one(&mut self) -> Result<(), SpecialColoringError> {
        let top = self.top();
        while self.potentials().s_phi > 0 {
            let x = *self
                .s
                .iter()
                .find(|&&x| self.c.is_present(self.g, x, top))
                .expect("s_phi > 0");
            let alpha = self
                .missing(x)
                .into_iter()
                .find(|&a| a <= self.k)
                .ok_or_else(|| SpecialColoringError::Stuck(format!("{x} misses no color in 1..=k")))?;
            loop {
                let path = chain(&self.c, self.g, x, alpha, top);
                let y = *path.vertices.last().unwrap();
                if !self.in_s[y.0] || self.c.is_present(self.g, y, top) {
                    let before = self.measure(0);
                    self.swap(&path);
                    self.record(1, MoveKind::EndSwap, before, 0)?;
                    break;
                }
                let mx = self.missing(x);
                let (i, beta) = self.first_meeting(&path, &mx, top).ok_or_else(|| {
                    SpecialColoringError::Stuck(format!("{x} and {y} share no missing color"))
                })?;
                let before = self.measure(i);
                if i == 1 {
                    self.recolor(path.edges[0], beta);
                    self.record(1, MoveKind::RecolorFirst, before, 0)?;
                    break;
                }
                let prev = path.vertices[i - 1];
                let gamma = *self.missing(prev).iter().next().ok_or_else(|| {
                    SpecialColoringError::Stuck(format!("{prev} misses no color"))
                })?;
                let q = chain(&self.c, self.g, path.vertices[i], beta, gamma);
                self.swap(&q);
                if q.contains(prev) {
                    let after = chain(&self.c, self.g, x, alpha, top);
                    let mx = self.missing(x);
                    let index = self.first_meeting(&after, &mx, top).map_or(0, |(j, _)| j);
                    self.record(1, MoveKind::LinkedSwap, before, index)?;
                    continue;
                }
                self.recolor(path.edges[i - 1], gamma);
                // The path at x now ends at v_{i-1}. Swapping it removes k+2
                // from x unless v_{i-1} in S already lost k+2 itself.
                if self.c.is_missing(self.g, prev, alpha) || !self.in_s[prev.0] {
                    let rest = chain(&self.c, self.g, x, alpha, top);
                    self.swap(&rest);
                }
                self.record(1, MoveKind::SwapAndRecolor, before, 0)?;
                break;
            }
        }
        Ok(())
    }

    fn phase_two(&mut self) -> Result<(), SpecialColoringError> {
        let (low, top) = (self.k + 1, self.k + 2);
        while self.potentials().c_phi > 0 {
            let x = *self
                .s
                .iter()
                .find(|&&x| {
                    chain(&self.c, self.g, x, low, top)
                        .other_end(x)
                        .is_some_and(|y| y != x && self.in_s[y.0])
                })
                .expect("c_phi > 0");
            loop {
                let path = chain(&self.c, self.g, x, low, top);
                let y = *path.vertices.last().unwrap();
                let mx = self.missing(x);
                let (i, beta) = self.first_meeting(&path, &mx, self.k).ok_or_else(|| {
                    SpecialColoringError::Stuck(format!("{x} and {y} share no missing color in 1..=k"))
                })?;
                let before = self.measure(i);
                if i == 1 {
                    self.recolor(path.edges[0], beta);
                    self.record(2, MoveKind::RecolorFirst, before, 0)?;
                    break;
                }
                let prev = path.vertices[i - 1];
                let gamma = self
                    .missing(prev)
                    .into_iter()
                    .find(|&col| col <= self.k && col != beta)
                    .ok_or_else(|| {
                        SpecialColoringError::Stuck(format!("{prev} misses no color in 1..=k"))
                    })?;
                let q = chain(&self.c, self.g, path.vertices[i], beta, gamma);
                self.swap(&q);
                if q.contains(prev) {
                    let after = chain(&self.c, self.g, x, low, top);
                    let mx = self.missing(x);
                    let index = self.first_meeting(&after, &mx, self.k).map_or(0, |(j, _)| j);
                    self.record(2, MoveKind::LinkedSwap, before, index)?;
                    continue;
                }
                self.recolor(path.edges[i - 1], gamma);
                self.record(2, MoveKind::SwapAndRecolor, before, 0)?;
                break;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::DEFAULT_NODE_BUDGET;
    use crate::graph::named::star;
    use crate::graph::EdgeId;

    #[test]
    fn potentials_examples() {
        let g = star(3);
        let c = EdgeColoring::from_assignment(6, [(EdgeId(0), 1), (EdgeId(1), 2), (EdgeId(2), 3)]);
        let leaves = [VertexId(1), VertexId(2), VertexId(3)];
        assert_eq!(potentials(&g, &c, 4, &leaves).s_phi, 0);
        assert_eq!(potentials(&g, &c, 4, &[]), Potentials { s_phi: 0, c_phi: 0 });

        // u - w - v with u, v in S, colored k+1 then k+2 (k = 2).
        let p = Multigraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let c = EdgeColoring::from_assignment(4, [(EdgeId(0), 3), (EdgeId(1), 4)]);
        let pot = potentials(&p, &c, 2, &[VertexId(0), VertexId(2)]);
        assert_eq!(pot, Potentials { s_phi: 1, c_phi: 1 });
    }

    #[test]
    fn empty_s_is_unchanged() {
        let g = crate::graph::named::complete(4);
        let init = find_coloring(&g, 4, DEFAULT_NODE_BUDGET).unwrap().unwrap();
        let run = special_coloring_from(&g, 2, &[], &init, Default::default()).unwrap();
        assert_eq!(run.coloring, init);
        assert!(run.steps.is_empty());
    }

    #[test]
    fn star_leaves_lose_top_color() {
        let g = star(3);
        let leaves = [VertexId(1), VertexId(2), VertexId(3)];
        for top_edge in 0..3 {
            let mut pairs: Vec<(EdgeId, Color)> = (0..3).map(|i| (EdgeId(i), i + 1)).collect();
            pairs[top_edge].1 = 6;
            let init = EdgeColoring::from_assignment(6, pairs);
            let run = special_coloring_from(&g, 4, &leaves, &init, Default::default()).unwrap();
            assert!(run.coloring.is_proper(&g));
            assert_eq!(potentials(&g, &run.coloring, 4, &leaves), Potentials { s_phi: 0, c_phi: 0 });
            assert_eq!(run.initial.s_phi, 1);
        }
    }

    #[test]
    fn star_all_proper_six_colorings() {
        // Every proper 6-coloring of the 3-leaf star is fixed up.
        let g = star(3);
        let leaves = [VertexId(1), VertexId(2), VertexId(3)];
        for a in 1..=6 {
            for b in 1..=6 {
                for c in 1..=6 {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    let init = EdgeColoring::from_assignment(6, [(EdgeId(0), a), (EdgeId(1), b), (EdgeId(2), c)]);
                    let out = special_coloring_from(&g, 4, &leaves, &init, Default::default()).unwrap();
                    assert_eq!(potentials(&g, &out.coloring, 4, &leaves), Potentials { s_phi: 0, c_phi: 0 });
                }
            }
        }
    }

    #[test]
    fn rejects_bad_preconditions() {
        let g = star(3);
        assert!(matches!(
            special_coloring(&g, 1, &[], DEFAULT_NODE_BUDGET),
            Err(SpecialColoringError::PreconditionViolated(_))
        ));
        assert!(matches!(
            special_coloring(&g, 4, &[VertexId(0)], DEFAULT_NODE_BUDGET),
            Err(SpecialColoringError::PreconditionViolated(_))
        ));
        let bad = EdgeColoring::from_assignment(6, [(EdgeId(0), 1), (EdgeId(1), 1), (EdgeId(2), 2)]);
        assert!(matches!(
            special_coloring_from(&g, 4, &[], &bad, Default::default()),
            Err(SpecialColoringError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn two_leaf_chain_is_broken() {
        // Path 0-1-2 colored k+1, then a pendant: with k = 2, S = {0, 3}.
        // Path 0-1-2-3: edges (0,1)=3, (1,2)=4, (2,3)=3: ends 0 and 3 in S.
        let g = Multigraph::build(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let init = EdgeColoring::from_assignment(4, [(EdgeId(0), 3), (EdgeId(1), 4), (EdgeId(2), 3)]);
        let s = [VertexId(0), VertexId(3)];
        assert_eq!(potentials(&g, &init, 2, &s), Potentials { s_phi: 0, c_phi: 1 });
        let run = special_coloring_from(&g, 2, &s, &init, Default::default()).unwrap();
        assert_eq!(potentials(&g, &run.coloring, 2, &s), Potentials { s_phi: 0, c_phi: 0 });
        assert!(run.coloring.is_proper(&g));
    }
}
