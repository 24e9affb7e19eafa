#![allow(dead_code)]

use bunkbed::graph::WeightedGraph;
use bunkbed::rational::rat;
use bunkbed::Rational;
use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn below(rng: &mut Xoshiro256PlusPlus, n: u64) -> usize {
    (rng.next_u64() % n) as usize
}

pub fn small_prob(rng: &mut Xoshiro256PlusPlus) -> Rational {
    [rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), rat(3, 4)][below(rng, 5)].clone()
}

/// Random simple graph with `m` edges on `n` vertices (`m` at most n(n-1)/2).
pub fn random_graph(rng: &mut Xoshiro256PlusPlus, n: usize, m: usize, p: impl Fn(&mut Xoshiro256PlusPlus) -> Rational) -> WeightedGraph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
    for i in (1..pairs.len()).rev() {
        pairs.swap(i, below(rng, i as u64 + 1));
    }
    let mut g = WeightedGraph::new(n);
    for &(u, v) in pairs.iter().take(m) {
        let q = p(rng);
        g.add_edge(u, v, q).unwrap();
    }
    g
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected(rng: &mut Xoshiro256PlusPlus, n: usize, extra: usize) -> WeightedGraph {
    let mut g = WeightedGraph::new(n);
    let mut present = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = below(rng, v as u64);
        g.add_edge(u, v, rat(1, 2)).unwrap();
        present.insert((u, v));
    }
    let mut added = 0;
    let mut tries = 0;
    while added < extra && tries < 1000 {
        tries += 1;
        let (a, b) = (below(rng, n as u64), below(rng, n as u64));
        let (u, v) = (a.min(b), a.max(b));
        if u != v && present.insert((u, v)) {
            g.add_edge(u, v, rat(1, 2)).unwrap();
            added += 1;
        }
    }
    g
}
