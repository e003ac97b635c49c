//! Exact backtracking search for an `m`-edge-coloring.
//!
//! The next edge is the uncolored one with the fewest admissible colors,
//! ties broken by larger endpoint degree sum, then by lower position.
//! Colors are opened in ascending order (an unused color may only be the
//! smallest unused one), and after each assignment every uncolored edge at
//! the two endpoints must keep a nonempty domain whose union covers the
//! number of uncolored edges there.

use super::{Color, ColoringError, EdgeColoring};
use crate::graph::Multigraph;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

const PALETTE_LIMIT: usize = 128;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
}

struct Search {
    ends: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    degree_sum: Vec<usize>,
    color: Vec<Color>,
    used: Vec<u128>,
    full: u128,
    highest: Color,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn domain(&self, e: usize) -> u128 {
        let (a, b) = self.ends[e];
        self.full & !(self.used[a] | self.used[b])
    }

    fn assign(&mut self, e: usize, c: Color) {
        let (a, b) = self.ends[e];
        self.color[e] = c;
        self.used[a] |= 1 << (c - 1);
        self.used[b] |= 1 << (c - 1);
    }

    fn clear(&mut self, e: usize) {
        let (a, b) = self.ends[e];
        let c = self.color[e];
        self.used[a] &= !(1 << (c - 1));
        self.used[b] &= !(1 << (c - 1));
        self.color[e] = 0;
    }

    fn consistent_at(&self, v: usize) -> bool {
        let mut union = 0u128;
        let mut open = 0u32;
        for &f in &self.incident[v] {
            if self.color[f] == 0 {
                let dom = self.domain(f);
                if dom == 0 {
                    return false;
                }
                union |= dom;
                open += 1;
            }
        }
        union.count_ones() >= open
    }

    fn select(&self) -> Option<(usize, u128)> {
        let mut best: Option<(usize, u128, u32)> = None;
        for e in 0..self.ends.len() {
            if self.color[e] != 0 {
                continue;
            }
            let dom = self.domain(e);
            let size = dom.count_ones();
            let better = match best {
                None => true,
                Some((b, _, bs)) => {
                    size < bs || (size == bs && self.degree_sum[e] > self.degree_sum[b])
                }
            };
            if better {
                best = Some((e, dom, size));
                if size == 0 {
                    break;
                }
            }
        }
        best.map(|(e, dom, _)| (e, dom))
    }

    fn solve(&mut self, remaining: usize) -> Result<bool, ()> {
        if remaining == 0 {
            return Ok(true);
        }
        let Some((e, dom)) = self.select() else {
            return Ok(true);
        };
        let (a, b) = self.ends[e];
        let mut rest = dom;
        while rest != 0 {
            let c = rest.trailing_zeros() as Color + 1;
            rest &= rest - 1;
            if c > self.highest + 1 {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(());
            }
            let before = self.highest;
            self.assign(e, c);
            self.highest = self.highest.max(c);
            if self.consistent_at(a) && self.consistent_at(b) && self.solve(remaining - 1)? {
                return Ok(true);
            }
            self.clear(e);
            self.highest = before;
        }
        Ok(false)
    }
}

/// Searches for a proper `m`-edge-coloring of `g`.
///
/// `Ok(None)` means the search space was exhausted: no such coloring exists.
pub fn find_coloring(g: &Multigraph, m: usize, budget: u64) -> Result<Option<EdgeColoring>, ColoringError> {
    find_coloring_with_stats(g, m, budget).map(|(c, _)| c)
}

pub fn find_coloring_with_stats(
    g: &Multigraph,
    m: usize,
    budget: u64,
) -> Result<(Option<EdgeColoring>, SolveStats), ColoringError> {
    if g.edge_count() == 0 {
        return Ok((Some(EdgeColoring::new(m)), SolveStats::default()));
    }
    if g.max_degree() > m {
        return Ok((None, SolveStats::default()));
    }
    if m > PALETTE_LIMIT {
        return Err(ColoringError::PaletteTooLarge {
            palette: m,
            limit: PALETTE_LIMIT,
        });
    }
    let edges = g.edges();
    let ends: Vec<(usize, usize)> = edges.iter().map(|e| (e.u.0, e.v.0)).collect();
    let mut incident = vec![Vec::new(); g.vertex_count()];
    for (i, &(a, b)) in ends.iter().enumerate() {
        incident[a].push(i);
        incident[b].push(i);
    }
    let degree_sum = ends
        .iter()
        .map(|&(a, b)| incident[a].len() + incident[b].len())
        .collect();
    let full = if m == PALETTE_LIMIT {
        u128::MAX
    } else {
        (1u128 << m) - 1
    };
    let mut search = Search {
        color: vec![0; ends.len()],
        used: vec![0; g.vertex_count()],
        ends,
        incident,
        degree_sum,
        full,
        highest: 0,
        nodes: 0,
        budget,
    };
    let outcome = search.solve(edges.len());
    let stats = SolveStats {
        nodes: search.nodes,
    };
    match outcome {
        Err(()) => Err(ColoringError::BudgetExhausted { budget }),
        Ok(false) => Ok((None, stats)),
        Ok(true) => {
            let coloring = EdgeColoring::from_assignment(
                m,
                edges.iter().zip(&search.color).map(|(e, &c)| (e.id, c)),
            );
            debug_assert!(coloring.is_proper(g));
            Ok((Some(coloring), stats))
        }
    }
}

/// The least `m` for which [`find_coloring`] succeeds, starting from `Δ`.
pub fn chromatic_index(g: &Multigraph, budget: u64) -> Result<usize, ColoringError> {
    let mut m = g.max_degree();
    loop {
        if find_coloring(g, m, budget)?.is_some() {
            return Ok(m);
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::{complete, cycle, petersen};

    #[test]
    fn triangle() {
        let k3 = complete(3);
        let c = find_coloring(&k3, 3, DEFAULT_NODE_BUDGET).unwrap().unwrap();
        assert!(c.is_proper(&k3));
        assert!(find_coloring(&k3, 2, DEFAULT_NODE_BUDGET).unwrap().is_none());
        assert_eq!(chromatic_index(&k3, DEFAULT_NODE_BUDGET).unwrap(), 3);
    }

    #[test]
    fn petersen_is_class_two() {
        let p = petersen();
        assert!(find_coloring(&p, 3, DEFAULT_NODE_BUDGET).unwrap().is_none());
        let c = find_coloring(&p, 4, DEFAULT_NODE_BUDGET).unwrap().unwrap();
        assert!(c.is_proper(&p));
    }

    #[test]
    fn small_chromatic_indices() {
        let digon = Multigraph::build(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(chromatic_index(&digon, DEFAULT_NODE_BUDGET).unwrap(), 2);
        assert_eq!(chromatic_index(&complete(4), DEFAULT_NODE_BUDGET).unwrap(), 3);
        assert_eq!(chromatic_index(&complete(5), DEFAULT_NODE_BUDGET).unwrap(), 5);
        assert_eq!(chromatic_index(&cycle(6), DEFAULT_NODE_BUDGET).unwrap(), 2);
        assert_eq!(chromatic_index(&Multigraph::empty(3), DEFAULT_NODE_BUDGET).unwrap(), 0);
        // Shannon triangle with multiplicity 2: 6 edges, every pair adjacent.
        let fat = Multigraph::build(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (0, 2), (0, 2)]).unwrap();
        assert_eq!(chromatic_index(&fat, DEFAULT_NODE_BUDGET).unwrap(), 6);
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let p = petersen();
        assert_eq!(
            find_coloring(&p, 3, 5),
            Err(ColoringError::BudgetExhausted { budget: 5 })
        );
    }
}
