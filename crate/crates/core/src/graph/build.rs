use num_traits::{One, Zero};

use super::{one, BunkbedInstance, GadgetHandle, Hyperedge, Hypergraph3, WeightedGraph};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// Hollom's six 3-edges `(apex, b, c)` over `u1..u10` (indices 0..9), in the
/// order along the `u1 -> u10` path through every hyperedge.
pub const HOLLOM_ORDER: [(usize, usize, usize); 6] = [
    (1, 0, 2), // (u1, u2, u3), apex u2
    (8, 2, 5), // (u3, u6, u9), apex u9
    (6, 4, 5), // (u5, u6, u7), apex u7
    (1, 3, 4), // (u2, u4, u5), apex u2
    (6, 3, 7), // (u4, u7, u8), apex u7
    (8, 7, 9), // (u8, u9, u10), apex u9
];

/// `(u1, u10)`.
pub const HOLLOM_POLES: (usize, usize) = (0, 9);

/// Fan graph on `n + 1` vertices: apex `a` (index 0) joined to each of the
/// path vertices `v_1..v_n` (indices 1..=n). Spokes are open with
/// probability `1 - p`, path edges with probability `p`.
pub fn build_gadget(n: usize, p: &Rational) -> Result<GadgetHandle> {
    if n == 0 {
        return Err(Error::invalid("gadget needs n >= 1"));
    }
    let spoke = one() - p;
    let mut graph = WeightedGraph::new(n + 1);
    graph.set_label(0, "a");
    for k in 1..=n {
        graph.set_label(k, format!("v{k}"));
        graph.add_edge(0, k, spoke.clone())?;
    }
    for k in 1..n {
        graph.add_edge(k, k + 1, p.clone())?;
    }
    Ok(GadgetHandle { graph, terminal_a: 0, terminal_b: 1, terminal_c: n })
}

pub fn build_hollom() -> Hypergraph3 {
    let hyperedges = HOLLOM_ORDER
        .iter()
        .map(|&(apex, b, c)| Hyperedge { apex, b, c })
        .collect();
    Hypergraph3::new(10, hyperedges, [1, 6, 8])
        .and_then(|h| h.with_poles(HOLLOM_POLES.0, HOLLOM_POLES.1))
        .expect("Hollom's hypergraph is well formed")
        .with_labels((0..10).map(|i| (i, format!("u{}", i + 1))))
}

/// One hyperedge `{s, a, t}` with apex `a` transversal and poles `(s, t)`.
/// Indices: `s = 0`, `a = 1`, `t = 2`.
pub fn single_hyperedge() -> Hypergraph3 {
    Hypergraph3::new(3, vec![Hyperedge { apex: 1, b: 0, c: 2 }], [1])
        .and_then(|h| h.with_poles(0, 2))
        .expect("single hyperedge is well formed")
        .with_labels([(0, "s".to_string()), (1, "a".to_string()), (2, "t".to_string())])
}

/// Replaces every hyperedge of `h` by a fresh copy of the `n`-gadget glued
/// at `a -> apex`, `v_1 -> b`, `v_n -> c`.
pub fn substitute_gadgets(h: &Hypergraph3, n: usize, p: &Rational) -> Result<BunkbedInstance> {
    Ok(substitute_with_map(h, n, p)?.0)
}

/// Also returns, per hyperedge, the global index of each gadget vertex
/// (`map[k]` is the image of gadget vertex `k`, with `a` at 0).
pub(crate) fn substitute_with_map(
    h: &Hypergraph3,
    n: usize,
    p: &Rational,
) -> Result<(BunkbedInstance, Vec<Vec<usize>>)> {
    if n < 2 {
        return Err(Error::invalid("gadget substitution needs n >= 2"));
    }
    h.check_wz()?;
    let (pole_u, pole_v) = h
        .poles()
        .ok_or_else(|| Error::invalid("hypergraph has no poles"))?;
    let gadget = build_gadget(n, p)?;
    let mut g = WeightedGraph::new(h.vertex_count());
    for (v, label) in h.labels() {
        g.set_label(*v, label.clone());
    }
    let mut maps = Vec::with_capacity(h.hyperedges().len());
    for (i, e) in h.hyperedges().iter().enumerate() {
        let mut map = vec![0usize; n + 1];
        map[gadget.terminal_a] = e.apex;
        map[gadget.terminal_b] = e.b;
        map[gadget.terminal_c] = e.c;
        for (k, slot) in map.iter_mut().enumerate().take(n).skip(2) {
            let v = g.add_vertex();
            g.set_label(v, format!("g{i}.v{k}"));
            *slot = v;
        }
        for edge in gadget.graph.edges() {
            g.add_edge(map[edge.u], map[edge.v], edge.p.clone())?;
        }
        maps.push(map);
    }
    let instance = BunkbedInstance::new(g, h.transversal().iter().copied(), pole_u, pole_v)?;
    Ok((instance, maps))
}

/// Two copies of the base graph (vertex `v` on level 0, `v + |V|` on level 1)
/// plus a post `(w, w')` with probability 1 for every transversal `w`.
/// Edge order: level 0, level 1, posts.
pub fn build_bunkbed_graph(b: &BunkbedInstance) -> WeightedGraph {
    build_bunkbed_graph_with_posts(b, &b.transversal.iter().copied().collect::<Vec<_>>(), &Rational::one())
}

pub(crate) fn build_bunkbed_graph_with_posts(
    b: &BunkbedInstance,
    posts: &[usize],
    post_p: &Rational,
) -> WeightedGraph {
    let base = &b.base;
    let n = base.vertex_count();
    let mut g = WeightedGraph::new(2 * n);
    for v in 0..n {
        let name = base.label(v).map(str::to_string).unwrap_or_else(|| v.to_string());
        g.set_label(v, name.clone());
        g.set_label(v + n, format!("{name}'"));
    }
    for level in 0..2 {
        for e in base.edges() {
            g.add_edge(e.u + level * n, e.v + level * n, e.p.clone())
                .expect("base edges are valid");
        }
    }
    for &w in posts {
        g.add_edge(w, w + n, post_p.clone()).expect("post endpoints are valid");
    }
    g
}

/// Gadget-substituted Hollom graph at `(1204, 1/2)` with `k - 1` extra
/// clones of each transversal vertex. Each clone of `w` is joined, with
/// probability 1/2, to the two lowest-indexed spoke endpoints of each of
/// the two gadgets whose apex is `w`.
pub fn build_complete_clone_instance(k: usize) -> Result<WeightedGraph> {
    build_clone_instance(k, 1204, &rat(1, 2))
}

pub(crate) fn build_clone_instance(k: usize, n: usize, p: &Rational) -> Result<WeightedGraph> {
    if k == 0 {
        return Err(Error::invalid("clone count k must be >= 1"));
    }
    let hollom = build_hollom();
    let (instance, maps) = substitute_with_map(&hollom, n, p)?;
    let base_vertices = instance.base.vertex_count();
    let base_edges = instance.base.edge_count();
    let mut g = instance.base;
    let half = rat(1, 2);
    for copy in 1..k {
        for &w in hollom.transversal() {
            let clone = g.add_vertex();
            let name = g.label(w).unwrap_or("w").to_string();
            g.set_label(clone, format!("{name}*{copy}"));
            for (e, map) in hollom.hyperedges().iter().zip(&maps) {
                if e.apex != w {
                    continue;
                }
                let mut spoke_ends: Vec<usize> = map[1..].to_vec();
                spoke_ends.sort_unstable();
                for &x in &spoke_ends[..2] {
                    g.add_edge(clone, x, half.clone())?;
                }
            }
        }
    }
    let extra = k - 1;
    let transversal = hollom.transversal().len();
    let expect_v = base_vertices + transversal * extra;
    let expect_e = base_edges + transversal * 4 * extra;
    if g.vertex_count() != expect_v || g.edge_count() != expect_e {
        return Err(Error::Verification(format!(
            "clone instance has {} vertices / {} edges, expected {expect_v} / {expect_e}",
            g.vertex_count(),
            g.edge_count()
        )));
    }
    debug_assert!(g.edges().iter().all(|e| !e.p.is_zero()));
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn edge_multiset(g: &WeightedGraph, relabel: impl Fn(usize) -> usize) -> Vec<(usize, usize, Rational)> {
        let mut out: Vec<_> = g
            .edges()
            .iter()
            .map(|e| {
                let (x, y) = (relabel(e.u), relabel(e.v));
                (x.min(y), x.max(y), e.p.clone())
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn gadget_shape() {
        let g = build_gadget(1204, &rat(1, 2)).unwrap();
        assert_eq!(g.graph.vertex_count(), 1205);
        assert_eq!(g.graph.edge_count(), 2407);
        assert!(g.graph.edges().iter().all(|e| e.p == rat(1, 2)));

        let g = build_gadget(1, &rat(1, 2)).unwrap();
        assert_eq!((g.graph.vertex_count(), g.graph.edge_count()), (2, 1));
        assert_eq!(g.terminal_b, g.terminal_c);

        let g = build_gadget(2, &rat(1, 3)).unwrap();
        assert_eq!(g.graph.vertex_count(), 3);
        for e in g.graph.edges() {
            let spoke = e.u == g.terminal_a || e.v == g.terminal_a;
            assert_eq!(e.p, if spoke { rat(2, 3) } else { rat(1, 3) });
        }
    }

    #[test]
    fn gadget_reflection_symmetry() {
        for n in 1..12 {
            let g = build_gadget(n, &rat(2, 7)).unwrap();
            let reflect = |v: usize| if v == 0 { 0 } else { n + 1 - v };
            assert_eq!(edge_multiset(&g.graph, |v| v), edge_multiset(&g.graph, reflect));
        }
    }

    #[test]
    fn hollom_structure() {
        let h = build_hollom();
        assert_eq!(h.vertex_count(), 10);
        assert_eq!(h.hyperedges().len(), 6);
        assert_eq!(h.transversal().len(), 3);
        h.check_wz().unwrap();
        for w in [1, 6, 8] {
            assert_eq!(h.hyperedges().iter().filter(|e| e.apex == w).count(), 2);
        }
        for e in h.hyperedges() {
            let in_t = e.vertices().iter().filter(|v| h.transversal().contains(v)).count();
            assert_eq!(in_t, 1);
        }
        assert_eq!(h.labels()[&9], "u10");
    }

    #[test]
    fn substitution_counts() {
        let h = build_hollom();
        let b = substitute_gadgets(&h, 1204, &rat(1, 2)).unwrap();
        assert_eq!((b.base.vertex_count(), b.base.edge_count()), (7222, 14442));
        let b = substitute_gadgets(&h, 14, &rat(1, 2)).unwrap();
        assert_eq!((b.base.vertex_count(), b.base.edge_count()), (82, 162));
        let b = substitute_gadgets(&h, 5, &rat(349, 10000)).unwrap();
        assert_eq!((b.base.vertex_count(), b.base.edge_count()), (28, 54));
        assert_eq!((b.pole_u, b.pole_v), (0, 9));
        assert_eq!(b.transversal.iter().copied().collect::<Vec<_>>(), vec![1, 6, 8]);
        for n in 2..=20 {
            let b = substitute_gadgets(&h, n, &rat(1, 2)).unwrap();
            assert_eq!(b.base.vertex_count(), 10 + 6 * (n - 2));
            assert_eq!(b.base.edge_count(), 6 * (2 * n - 1));
        }
        assert!(substitute_gadgets(&h, 1, &rat(1, 2)).is_err());
    }

    #[test]
    fn bunkbed_graph_shape() {
        let k2 = WeightedGraph::complete(2, &rat(1, 2));
        let b = BunkbedInstance::new(k2.clone(), [0], 0, 1).unwrap();
        let g = build_bunkbed_graph(&b);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 3));
        assert_eq!(g.edges()[2].p, rat(1, 1));
        let b = BunkbedInstance::new(k2, [], 0, 1).unwrap();
        let g = build_bunkbed_graph(&b);
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 2));
        assert!(!g.is_connected());
    }

    #[test]
    fn full_size_bunkbed_graph() {
        let b = substitute_gadgets(&build_hollom(), 1204, &rat(1, 2)).unwrap();
        let g = build_bunkbed_graph(&b);
        assert_eq!((g.vertex_count(), g.edge_count()), (14444, 28887));
        let posts = g.edges().iter().filter(|e| e.p == rat(1, 1)).count();
        assert_eq!(posts, 3);
    }

    #[test]
    fn clone_instance_counts() {
        // 7222 + 3 * 101 vertices; 14442 + 12 * 101 edges
        let g = build_complete_clone_instance(102).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (7525, 15654));
        let g = build_complete_clone_instance(2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (7225, 14454));
        let g1 = build_complete_clone_instance(1).unwrap();
        let plain = substitute_gadgets(&build_hollom(), 1204, &rat(1, 2)).unwrap().base;
        assert_eq!(g1, plain);
        assert!(g1.is_connected());
    }

    #[test]
    fn builders_are_deterministic() {
        let a = substitute_gadgets(&build_hollom(), 9, &rat(1, 3)).unwrap();
        let b = substitute_gadgets(&build_hollom(), 9, &rat(1, 3)).unwrap();
        assert_eq!(a, b);
    }
}
