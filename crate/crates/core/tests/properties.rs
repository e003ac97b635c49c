use covdex::coloring::{chain, find_coloring, kempe_swap, DEFAULT_NODE_BUDGET};
use covdex::density::codensity;
use covdex::graph::{parse_edge_list, write_edge_list};
use covdex::graph::SplitTrace;
use covdex::oracle::brute_codensity;
use covdex::{EdgeColoring, EdgeId, Multigraph, VertexId};
use proptest::prelude::*;

fn multigraph(max_n: usize, max_edges: usize) -> impl Strategy<Value = Multigraph> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 1..n), 0..=max_edges).prop_map(move |raw| {
            let pairs: Vec<(usize, usize)> = raw.into_iter().map(|(a, d)| (a, (a + d) % n)).collect();
            Multigraph::build(n, &pairs).unwrap()
        })
    })
}

fn greedy(g: &Multigraph) -> EdgeColoring {
    let palette = (2 * g.max_degree()).max(1);
    let mut c = EdgeColoring::new(palette);
    for e in g.edges() {
        let free = (1..=palette)
            .find(|&col| c.is_missing(g, e.u, col) && c.is_missing(g, e.v, col))
            .unwrap();
        c.set(e.id, free);
    }
    c
}

proptest! {
    #[test]
    fn handshake(g in multigraph(9, 30)) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn edge_list_round_trip(g in multigraph(9, 30)) {
        let back = parse_edge_list(&write_edge_list(&g)).unwrap();
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn json_round_trip(g in multigraph(9, 30)) {
        let text = serde_json::to_string(&g).unwrap();
        let back: Multigraph = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn splits_merge_back(g in multigraph(8, 25), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..6)) {
        let mut h = g.clone();
        let mut trace = SplitTrace::new();
        for pick in picks {
            let v = VertexId(pick.index(g.vertex_count()));
            let incident: Vec<EdgeId> = h.incident(v).map(|e| e.id).collect();
            if incident.is_empty() {
                continue;
            }
            let e = incident[pick.index(incident.len())];
            let (next, record) = h.split_off(v, e).unwrap();
            prop_assert_eq!(next.degree(v) + 1, h.degree(v));
            prop_assert_eq!(next.edge_count(), h.edge_count());
            h = next;
            trace.push(record);
        }
        let merged = trace.merge_back(&h).unwrap();
        prop_assert_eq!(merged.vertex_count(), g.vertex_count());
        prop_assert_eq!(merged.degrees(), g.degrees());
        for e in h.edge_ids() {
            prop_assert!(g.contains_edge(trace.original_edge(e)));
        }
    }

    #[test]
    fn codensity_matches_brute_force(g in multigraph(8, 24)) {
        prop_assert_eq!(codensity(&g).unwrap().0, brute_codensity(&g).unwrap());
    }

    #[test]
    fn codensity_ignores_labels(g in multigraph(8, 24), seed in any::<u64>()) {
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(codensity(&g).unwrap().0, codensity(&g.relabel(&perm)).unwrap().0);
    }

    #[test]
    fn kempe_swaps_stay_proper(g in multigraph(8, 24), v in any::<prop::sample::Index>(), a in 1usize..8, b in 1usize..8) {
        prop_assume!(a != b && g.edge_count() > 0);
        let c = greedy(&g);
        prop_assume!(a <= c.palette() && b <= c.palette());
        let ch = chain(&c, &g, VertexId(v.index(g.vertex_count())), a, b);
        let once = kempe_swap(&c, &ch);
        prop_assert!(once.is_proper(&g));
        prop_assert_eq!(kempe_swap(&once, &ch), c);
    }

    #[test]
    fn solver_colorings_are_proper(g in multigraph(6, 12)) {
        let m = g.max_degree() + 1;
        if let Some(c) = find_coloring(&g, m.max(1), DEFAULT_NODE_BUDGET).unwrap() {
            prop_assert!(c.is_proper(&g));
        }
    }
}
