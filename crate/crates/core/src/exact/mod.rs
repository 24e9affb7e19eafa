//! Exact connection probabilities by edge-subset enumeration.
//!
//! Edges that are surely open are contracted and surely closed edges are
//! deleted before enumeration. The remaining random edges are grouped by
//! their probability; a subset's weight then depends only on how many
//! edges of each group are open, so the hot loop only increments integer
//! counters and the rational arithmetic happens once per count vector.

mod kernel;

use std::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub use kernel::{
    check_eq390, check_hk, gadget_bc_only_closed, gadget_kernel_closed, gadget_marginal_closed,
    gadget_three_closed, kernel_gap_lower_bound, HyperedgeKernel, TerminalPartition,
};

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rational::{common_denominator, Rational};

pub const DEFAULT_CAP: usize = 26;

/// Counter tables larger than this switch to the split-weight path.
const MAX_COUNTER_CELLS: usize = 1 << 24;

#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    /// Largest number of random edges that will be enumerated.
    pub cap: usize,
    /// Contract `p = 1` and delete `p = 0` edges before enumerating.
    pub contract: bool,
    /// Worker threads; results do not depend on this.
    pub workers: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { cap: DEFAULT_CAP, contract: true, workers: 1 }
    }
}

/// Collects outcome indices reported for one subset.
pub struct Hits<'a> {
    counters: &'a mut [u64],
    stride: usize,
    offset: usize,
}

impl Hits<'_> {
    #[inline]
    pub fn hit(&mut self, outcome: usize) {
        self.counters[outcome * self.stride + self.offset] += 1;
    }
}

/// A graph prepared for subset enumeration.
#[derive(Clone, Debug)]
pub struct SubsetEnumerator {
    vertex_map: Vec<usize>,
    reduced_vertices: usize,
    edges: Vec<(usize, usize)>,
    classes: Vec<Rational>,
    edge_class: Vec<usize>,
    class_sizes: Vec<usize>,
    options: EnumOptions,
}

impl SubsetEnumerator {
    pub fn new(g: &WeightedGraph, options: EnumOptions) -> Result<Self> {
        let n = g.vertex_count();
        let mut dsu = Dsu::new(n);
        if options.contract {
            for e in g.edges() {
                if e.p.is_one() {
                    dsu.union(e.u, e.v);
                }
            }
        }
        let mut rep_index = vec![usize::MAX; n];
        let mut vertex_map = vec![0; n];
        let mut reduced = 0;
        for (v, slot) in vertex_map.iter_mut().enumerate() {
            let r = dsu.find(v);
            if rep_index[r] == usize::MAX {
                rep_index[r] = reduced;
                reduced += 1;
            }
            *slot = rep_index[r];
        }
        let mut edges = Vec::new();
        let mut classes: Vec<Rational> = Vec::new();
        let mut edge_class = Vec::new();
        for e in g.edges() {
            let (a, b) = (vertex_map[e.u], vertex_map[e.v]);
            if options.contract && (e.p.is_zero() || e.p.is_one() || a == b) {
                continue;
            }
            let class = match classes.iter().position(|c| *c == e.p) {
                Some(i) => i,
                None => {
                    classes.push(e.p.clone());
                    classes.len() - 1
                }
            };
            edges.push((a, b));
            edge_class.push(class);
        }
        if edges.len() > options.cap {
            return Err(Error::CapExceeded { needed: edges.len(), cap: options.cap });
        }
        let mut class_sizes = vec![0; classes.len()];
        for &c in &edge_class {
            class_sizes[c] += 1;
        }
        Ok(SubsetEnumerator {
            vertex_map,
            reduced_vertices: reduced,
            edges,
            classes,
            edge_class,
            class_sizes,
            options,
        })
    }

    /// Index of an original vertex in the contracted graph.
    pub fn vertex(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn reduced_vertex_count(&self) -> usize {
        self.reduced_vertices
    }

    /// Number of random edges, i.e. `log2` of the subsets enumerated.
    pub fn random_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn subset_count(&self) -> u64 {
        1u64 << self.edges.len()
    }

    fn class_strides(&self) -> (Vec<usize>, usize) {
        let mut strides = Vec::with_capacity(self.classes.len());
        let mut size = 1usize;
        for &m in &self.class_sizes {
            strides.push(size);
            size = size.saturating_mul(m + 1);
        }
        (strides, size)
    }

    /// Enumerates all subsets of random edges. For each, `visit` receives the
    /// union-find of the open subgraph (on contracted indices) and reports
    /// outcome indices in `0..outcomes`. Returns the probability of each
    /// outcome.
    pub fn run<F>(&self, outcomes: usize, visit: F) -> Vec<Rational>
    where
        F: Fn(&mut Dsu, &mut Hits<'_>) + Sync,
    {
        let (strides, table) = self.class_strides();
        if table.saturating_mul(outcomes.max(1)) <= MAX_COUNTER_CELLS {
            self.run_counted(outcomes, &strides, table, &visit)
        } else {
            self.run_split(outcomes, &visit)
        }
    }

    /// Raw counters for a graph whose random edges all share one
    /// probability: `result[o][k]` is the number of subsets with `k` open
    /// edges that report outcome `o`.
    pub fn run_counts_by_size<F>(&self, outcomes: usize, visit: F) -> Result<Vec<Vec<u64>>>
    where
        F: Fn(&mut Dsu, &mut Hits<'_>) + Sync,
    {
        if self.classes.len() > 1 {
            return Err(Error::invalid("edge probabilities are not uniform"));
        }
        let m = self.edges.len();
        let table = m + 1;
        let counters = self.count(outcomes, &vec![1; m], table, &visit);
        Ok(counters.chunks(table).map(<[u64]>::to_vec).collect())
    }

    fn chunks(&self) -> Vec<Range<u64>> {
        let total = self.subset_count();
        let workers = self.options.workers.max(1) as u64;
        let per = total.div_ceil(workers).max(1);
        (0..workers)
            .map(|w| (w * per).min(total)..((w + 1) * per).min(total))
            .filter(|r| !r.is_empty())
            .collect()
    }

    fn for_each_worker<T: Send>(&self, work: impl Fn(Range<u64>) -> T + Sync) -> Vec<T> {
        let chunks = self.chunks();
        if chunks.len() <= 1 {
            return chunks.into_iter().map(&work).collect();
        }
        std::thread::scope(|s| {
            let handles: Vec<_> = chunks.into_iter().map(|r| s.spawn(|| work(r))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    }

    fn run_counted<F>(&self, outcomes: usize, strides: &[usize], table: usize, visit: &F) -> Vec<Rational>
    where
        F: Fn(&mut Dsu, &mut Hits<'_>) + Sync,
    {
        let edge_stride: Vec<usize> = self.edge_class.iter().map(|&c| strides[c]).collect();
        let counters = self.count(outcomes, &edge_stride, table, visit);
        let weights = self.count_vector_weights(strides, table);
        (0..outcomes)
            .map(|o| {
                let mut acc = BigInt::zero();
                for (cell, &count) in counters[o * table..(o + 1) * table].iter().enumerate() {
                    if count != 0 {
                        acc += &weights.0[cell] * BigInt::from(count);
                    }
                }
                Rational::new(acc, weights.1.clone())
            })
            .collect()
    }

    fn count<F>(&self, outcomes: usize, edge_stride: &[usize], table: usize, visit: &F) -> Vec<u64>
    where
        F: Fn(&mut Dsu, &mut Hits<'_>) + Sync,
    {
        let partials = self.for_each_worker(|range| {
            let mut counters = vec![0u64; outcomes * table];
            let mut dsu = Dsu::new(self.reduced_vertices);
            for mask in range {
                dsu.reset();
                let mut offset = 0usize;
                let mut bits = mask;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let (a, b) = self.edges[i];
                    dsu.union(a, b);
                    offset += edge_stride[i];
                }
                let mut hits = Hits { counters: &mut counters, stride: table, offset };
                visit(&mut dsu, &mut hits);
            }
            counters
        });
        let mut counters = vec![0u64; outcomes * table];
        for part in partials {
            for (acc, x) in counters.iter_mut().zip(part) {
                *acc += x;
            }
        }
        counters
    }

    /// Weight numerators of every count vector over the common denominator.
    fn count_vector_weights(&self, strides: &[usize], table: usize) -> (Vec<BigInt>, BigInt) {
        let denom = common_denominator(self.classes.iter());
        // per class: (p * denom, (1 - p) * denom) as integers
        let factors: Vec<(BigInt, BigInt)> = self
            .classes
            .iter()
            .map(|p| {
                let open = (p * Rational::from_integer(denom.clone())).to_integer();
                (open.clone(), &denom - open)
            })
            .collect();
        let mut weights = Vec::with_capacity(table);
        for cell in 0..table {
            let mut w = BigInt::one();
            for (c, (open, closed)) in factors.iter().enumerate() {
                let k = (cell / strides[c]) % (self.class_sizes[c] + 1);
                let m = self.class_sizes[c];
                w *= num_traits::pow(open.clone(), k) * num_traits::pow(closed.clone(), m - k);
            }
            weights.push(w);
        }
        let total_denom = num_traits::pow(denom, self.edges.len());
        (weights, total_denom)
    }

    /// Fallback when count vectors are too many: the subset weight is the
    /// product of a weight over the low half of the edges and one over the
    /// high half, both tabulated as integers.
    fn run_split<F>(&self, outcomes: usize, visit: &F) -> Vec<Rational>
    where
        F: Fn(&mut Dsu, &mut Hits<'_>) + Sync,
    {
        let m = self.edges.len();
        let low_bits = m / 2;
        let denom = common_denominator(self.classes.iter());
        let factor: Vec<(BigInt, BigInt)> = self
            .edge_class
            .iter()
            .map(|&c| {
                let open = (&self.classes[c] * Rational::from_integer(denom.clone())).to_integer();
                (open.clone(), &denom - open)
            })
            .collect();
        let table = |edges: Range<usize>| -> Vec<BigInt> {
            let width = edges.len();
            (0..1u64 << width)
                .map(|mask| {
                    edges.clone().enumerate().fold(BigInt::one(), |acc, (j, e)| {
                        if mask >> j & 1 == 1 { acc * &factor[e].0 } else { acc * &factor[e].1 }
                    })
                })
                .collect()
        };
        let low = table(0..low_bits);
        let high = table(low_bits..m);
        let low_count = 1u64 << low_bits;
        let mut counters = vec![0u64; outcomes];
        let mut totals = vec![BigInt::zero(); outcomes];
        let mut dsu = Dsu::new(self.reduced_vertices);
        for (h, high_weight) in high.iter().enumerate() {
            let mut inner = vec![BigInt::zero(); outcomes];
            for (l, low_weight) in low.iter().enumerate() {
                let mask = (h as u64) * low_count + l as u64;
                dsu.reset();
                let mut bits = mask;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    dsu.union(self.edges[i].0, self.edges[i].1);
                }
                counters.iter_mut().for_each(|c| *c = 0);
                let mut hits = Hits { counters: &mut counters, stride: 1, offset: 0 };
                visit(&mut dsu, &mut hits);
                for (o, &c) in counters.iter().enumerate() {
                    if c != 0 {
                        inner[o] += low_weight * BigInt::from(c);
                    }
                }
            }
            for (t, x) in totals.iter_mut().zip(inner) {
                *t += high_weight * x;
            }
        }
        let total_denom = num_traits::pow(denom, m);
        totals.into_iter().map(|t| Rational::new(t, total_denom.clone())).collect()
    }
}

/// `P[u <-> v]` under independent edge percolation.
pub fn connect_prob_exact(g: &WeightedGraph, u: usize, v: usize) -> Result<Rational> {
    connect_prob_exact_with(g, u, v, EnumOptions::default())
}

pub fn connect_prob_exact_with(g: &WeightedGraph, u: usize, v: usize, options: EnumOptions) -> Result<Rational> {
    check_vertex(g, u)?;
    check_vertex(g, v)?;
    let en = SubsetEnumerator::new(g, options)?;
    let (a, b) = (en.vertex(u), en.vertex(v));
    let probs = en.run(1, |dsu, hits| {
        if dsu.same(a, b) {
            hits.hit(0);
        }
    });
    Ok(probs.into_iter().next().expect("one outcome"))
}

/// Distribution of the partition induced on the terminals `{a, b, c}`.
pub fn terminal_kernel_exact(g: &WeightedGraph, a: usize, b: usize, c: usize) -> Result<HyperedgeKernel> {
    terminal_kernel_exact_with(g, a, b, c, EnumOptions::default())
}

pub fn terminal_kernel_exact_with(
    g: &WeightedGraph,
    a: usize,
    b: usize,
    c: usize,
    options: EnumOptions,
) -> Result<HyperedgeKernel> {
    for v in [a, b, c] {
        check_vertex(g, v)?;
    }
    if a == b || b == c || a == c {
        return Err(Error::invalid("terminals must be distinct"));
    }
    let en = SubsetEnumerator::new(g, options)?;
    let (a, b, c) = (en.vertex(a), en.vertex(b), en.vertex(c));
    let probs = en.run(5, |dsu, hits| {
        let (ra, rb, rc) = (dsu.find(a), dsu.find(b), dsu.find(c));
        hits.hit(TerminalPartition::classify(ra == rb, ra == rc, rb == rc).index());
    });
    let values: [Rational; 5] = probs.try_into().expect("five outcomes");
    HyperedgeKernel::from_array(values)
}

fn check_vertex(g: &WeightedGraph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        return Err(Error::invalid(format!("vertex {v} out of range")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_gadget;
    use crate::rational::{int, rat};

    /// Direct sum over subsets with per-subset rational products.
    pub(crate) fn brute_force_connect(g: &WeightedGraph, u: usize, v: usize) -> Rational {
        let m = g.edge_count();
        let mut total = Rational::zero();
        for mask in 0u64..1 << m {
            let mut dsu = Dsu::new(g.vertex_count());
            let mut w = Rational::one();
            for (i, e) in g.edges().iter().enumerate() {
                if mask >> i & 1 == 1 {
                    dsu.union(e.u, e.v);
                    w *= &e.p;
                } else {
                    w *= Rational::one() - &e.p;
                }
            }
            if dsu.same(u, v) {
                total += w;
            }
        }
        total
    }

    #[test]
    fn connection_examples() {
        let k2 = WeightedGraph::complete(2, &rat(1, 2));
        assert_eq!(connect_prob_exact(&k2, 0, 1).unwrap(), rat(1, 2));
        let g = build_gadget(2, &rat(1, 2)).unwrap();
        assert_eq!(connect_prob_exact(&g.graph, 0, 2).unwrap(), rat(5, 8));
        let g = build_gadget(3, &rat(1, 2)).unwrap();
        assert_eq!(connect_prob_exact(&g.graph, 0, 3).unwrap(), rat(21, 32));
        assert_eq!(connect_prob_exact(&k2, 1, 1).unwrap(), int(1));
    }

    #[test]
    fn kernel_examples() {
        let g = build_gadget(2, &rat(1, 2)).unwrap();
        let k = terminal_kernel_exact(&g.graph, 0, 1, 2).unwrap();
        assert_eq!(k.to_array(), [rat(1, 2), rat(1, 8), rat(1, 8), rat(1, 8), rat(1, 8)]);
        let tri = WeightedGraph::complete(3, &int(1));
        assert_eq!(terminal_kernel_exact(&tri, 0, 1, 2).unwrap(), HyperedgeKernel::all_connected());
        let empty = WeightedGraph::new(3);
        assert_eq!(terminal_kernel_exact(&empty, 0, 1, 2).unwrap(), HyperedgeKernel::none_connected());
        assert!(terminal_kernel_exact(&empty, 0, 0, 2).is_err());
    }

    #[test]
    fn oracle_equivalence_with_closed_forms() {
        for n in 2..=6 {
            for p in [rat(1, 4), rat(1, 2), rat(2, 3)] {
                let g = build_gadget(n, &p).unwrap();
                let k = terminal_kernel_exact(&g.graph, g.terminal_a, g.terminal_b, g.terminal_c).unwrap();
                assert_eq!(k, gadget_kernel_closed(n, &p).unwrap(), "n={n}");
                let marginal = connect_prob_exact(&g.graph, g.terminal_a, g.terminal_b).unwrap();
                assert_eq!(marginal, gadget_marginal_closed(n, &p));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = WeightedGraph::complete(8, &rat(1, 2));
        let err = connect_prob_exact(&g, 0, 1).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { needed: 28, cap: 26 }));
        let sure = WeightedGraph::complete(8, &int(1));
        assert_eq!(connect_prob_exact(&sure, 0, 7).unwrap(), int(1));
    }

    #[test]
    fn split_path_matches_brute_force() {
        // eleven distinct probabilities: 2^11 count vectors, forced onto the split path
        let mut g = WeightedGraph::new(6);
        let mut k = 0;
        for v in 1..6 {
            for u in 0..v {
                if k < 11 {
                    g.add_edge(u, v, rat(k + 1, 13)).unwrap();
                }
                k += 1;
            }
        }
        let en = SubsetEnumerator::new(&g, EnumOptions::default()).unwrap();
        let split = en.run_split(1, &|dsu: &mut Dsu, hits: &mut Hits<'_>| {
            if dsu.same(0, 5) {
                hits.hit(0)
            }
        });
        assert_eq!(split[0], brute_force_connect(&g, 0, 5));
        assert_eq!(connect_prob_exact(&g, 0, 5).unwrap(), split[0]);
    }

    #[test]
    fn workers_do_not_change_results() {
        let g = WeightedGraph::complete(5, &rat(1, 3));
        let one = connect_prob_exact(&g, 0, 4).unwrap();
        for workers in [2, 3, 7] {
            let opts = EnumOptions { workers, ..Default::default() };
            assert_eq!(connect_prob_exact_with(&g, 0, 4, opts).unwrap(), one);
        }
    }
}
