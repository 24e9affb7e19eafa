mod common;

use bunkbed::graph::{
    build_bunkbed_graph, build_gadget, build_hollom, emit_edge_list, emit_graph6, parse_edge_list, parse_graph6,
    substitute_gadgets, BunkbedInstance,
};
use bunkbed::rational::{int, rat};
use common::{below, random_graph, rng};

#[test]
fn graph6_round_trip() {
    let mut r = rng(10);
    for i in 0..100 {
        let n = 1 + below(&mut r, 70);
        let max = n * (n - 1) / 2;
        let m = if max == 0 { 0 } else { below(&mut r, max as u64 + 1) };
        let g = random_graph(&mut r, n, m, |_| rat(1, 2));
        let s = emit_graph6(&g).unwrap();
        let back = parse_graph6(&s).unwrap();
        assert_eq!(emit_graph6(&back).unwrap(), s, "graph {i}");
        assert_eq!(back.vertex_count(), n);
        assert_eq!(back.edge_count(), m);
    }
}

#[test]
fn edge_list_round_trip() {
    let mut r = rng(11);
    let g = random_graph(&mut r, 8, 12, common::small_prob);
    let text = emit_edge_list(&g);
    assert_eq!(emit_edge_list(&parse_edge_list(&text).unwrap()), text);
}

#[test]
fn bunkbed_edge_classes() {
    let mut r = rng(12);
    for _ in 0..20 {
        let g = random_graph(&mut r, 6, 8, common::small_prob);
        let t: Vec<usize> = (0..6).filter(|_| below(&mut r, 2) == 0).collect();
        let b = BunkbedInstance::new(g.clone(), t.iter().copied(), 0, 5).unwrap();
        let bb = build_bunkbed_graph(&b);
        let posts = bb.edges().iter().filter(|e| e.p == int(1) && e.v == e.u + 6).count();
        assert_eq!(posts, t.len());
        assert_eq!(bb.edge_count(), 2 * g.edge_count() + t.len());
    }
}

#[test]
fn substitution_counts() {
    let h = build_hollom();
    for n in 2..=20 {
        let b = substitute_gadgets(&h, n, &rat(1, 2)).unwrap();
        assert_eq!(b.base.vertex_count(), 10 + 6 * (n - 2));
        assert_eq!(b.base.edge_count(), 6 * (2 * n - 1));
    }
}

#[test]
fn builders_are_deterministic() {
    let a = substitute_gadgets(&build_hollom(), 7, &rat(1, 3)).unwrap();
    let b = substitute_gadgets(&build_hollom(), 7, &rat(1, 3)).unwrap();
    assert_eq!(emit_edge_list(&a.base), emit_edge_list(&b.base));
    assert_eq!(build_gadget(9, &rat(1, 2)).unwrap().graph.edges(), build_gadget(9, &rat(1, 2)).unwrap().graph.edges());
}
