//! Graphs, bunkbed instances and 3-uniform hypergraphs.
//!
//! Vertices are dense 0-based indices everywhere; human-readable names
//! (`u1`, `u10`, `a`, ...) live in an optional label map.

mod build;
mod io;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

pub use build::{
    build_bunkbed_graph, build_complete_clone_instance, build_gadget, build_hollom,
    single_hyperedge, substitute_gadgets, HOLLOM_ORDER, HOLLOM_POLES,
};
pub(crate) use build::build_bunkbed_graph_with_posts;
pub use io::{emit_edge_list, emit_graph6, parse_edge_list, parse_graph6, parse_graph6_with};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, in_unit_interval, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// Probability that the edge is open.
    pub p: Rational,
}

/// Finite multigraph with an exact open-probability on every edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    labels: BTreeMap<usize, String>,
}

impl WeightedGraph {
    pub fn new(vertex_count: usize) -> Self {
        WeightedGraph { vertex_count, ..Default::default() }
    }

    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self> {
        let mut g = WeightedGraph::new(vertex_count);
        for (u, v, p) in edges {
            g.add_edge(u, v, p)?;
        }
        Ok(g)
    }

    /// Every edge of the complete graph, all open with probability `p`.
    pub fn complete(vertex_count: usize, p: &Rational) -> Self {
        let mut g = WeightedGraph::new(vertex_count);
        for v in 1..vertex_count {
            for u in 0..v {
                g.edges.push(Edge { u, v, p: p.clone() });
            }
        }
        g
    }

    pub fn path(vertex_count: usize, p: &Rational) -> Self {
        let mut g = WeightedGraph::new(vertex_count);
        for v in 1..vertex_count {
            g.edges.push(Edge { u: v - 1, v, p: p.clone() });
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, p: Rational) -> Result<()> {
        if u >= self.vertex_count || v >= self.vertex_count {
            return Err(Error::invalid(format!(
                "edge ({u}, {v}) out of range for {} vertices",
                self.vertex_count
            )));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        if !in_unit_interval(&p) {
            return Err(Error::invalid(format!("probability {} outside [0, 1]", fmt_rational(&p))));
        }
        self.edges.push(Edge { u, v, p });
        Ok(())
    }

    pub fn set_label(&mut self, v: usize, label: impl Into<String>) {
        self.labels.insert(v, label.into());
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Same graph with every edge probability replaced by `p`.
    pub fn with_uniform_probability(&self, p: &Rational) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.p = p.clone();
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut dsu = crate::dsu::Dsu::new(self.vertex_count);
        let mut parts = self.vertex_count;
        for e in &self.edges {
            if dsu.union(e.u, e.v) {
                parts -= 1;
            }
        }
        parts == 1
    }

    /// Indices of the edges in canonical order: by (min endpoint, max
    /// endpoint, insertion index).
    pub fn canonical_edge_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| {
            let e = &self.edges[i];
            (e.u.min(e.v), e.u.max(e.v), i)
        });
        order
    }
}

/// Base graph with transversal set and the two poles `u`, `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BunkbedInstance {
    pub base: WeightedGraph,
    pub transversal: BTreeSet<usize>,
    pub pole_u: usize,
    pub pole_v: usize,
}

impl BunkbedInstance {
    pub fn new(
        base: WeightedGraph,
        transversal: impl IntoIterator<Item = usize>,
        pole_u: usize,
        pole_v: usize,
    ) -> Result<Self> {
        let n = base.vertex_count();
        let transversal: BTreeSet<usize> = transversal.into_iter().collect();
        if let Some(&w) = transversal.iter().find(|&&w| w >= n) {
            return Err(Error::invalid(format!("transversal vertex {w} out of range")));
        }
        if pole_u >= n || pole_v >= n {
            return Err(Error::invalid(format!("poles ({pole_u}, {pole_v}) out of range")));
        }
        Ok(BunkbedInstance { base, transversal, pole_u, pole_v })
    }

    pub fn summary(&self) -> InstanceSummary {
        InstanceSummary {
            vertices: self.base.vertex_count(),
            edges: self.base.edge_count(),
            transversal: self.transversal.len(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct InstanceSummary {
    pub vertices: usize,
    pub edges: usize,
    pub transversal: usize,
}

/// A 3-edge `{apex, b, c}`; for the WZ model the apex is the unique
/// transversal vertex of the edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Hyperedge {
    pub apex: usize,
    pub b: usize,
    pub c: usize,
}

impl Hyperedge {
    pub fn vertices(&self) -> [usize; 3] {
        [self.apex, self.b, self.c]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph3 {
    vertex_count: usize,
    hyperedges: Vec<Hyperedge>,
    transversal: BTreeSet<usize>,
    poles: Option<(usize, usize)>,
    labels: BTreeMap<usize, String>,
}

impl Hypergraph3 {
    pub fn new(
        vertex_count: usize,
        hyperedges: Vec<Hyperedge>,
        transversal: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let transversal: BTreeSet<usize> = transversal.into_iter().collect();
        for (i, e) in hyperedges.iter().enumerate() {
            let [a, b, c] = e.vertices();
            if a >= vertex_count || b >= vertex_count || c >= vertex_count {
                return Err(Error::invalid(format!("hyperedge {i} has a vertex out of range")));
            }
            if a == b || b == c || a == c {
                return Err(Error::invalid(format!("hyperedge {i} repeats a vertex")));
            }
        }
        if transversal.iter().any(|&w| w >= vertex_count) {
            return Err(Error::invalid("transversal vertex out of range"));
        }
        Ok(Hypergraph3 { vertex_count, hyperedges, transversal, poles: None, labels: BTreeMap::new() })
    }

    pub fn with_poles(mut self, s: usize, t: usize) -> Result<Self> {
        if s >= self.vertex_count || t >= self.vertex_count {
            return Err(Error::invalid("pole out of range"));
        }
        self.poles = Some((s, t));
        Ok(self)
    }

    pub fn with_labels(mut self, labels: impl IntoIterator<Item = (usize, String)>) -> Self {
        self.labels.extend(labels);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }

    pub fn transversal(&self) -> &BTreeSet<usize> {
        &self.transversal
    }

    pub fn poles(&self) -> Option<(usize, usize)> {
        self.poles
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    /// Checks that each hyperedge's apex is transversal and its other two
    /// vertices are not.
    pub fn check_wz(&self) -> Result<()> {
        for (i, e) in self.hyperedges.iter().enumerate() {
            let t = &self.transversal;
            if !t.contains(&e.apex) || t.contains(&e.b) || t.contains(&e.c) {
                return Err(Error::invalid(format!(
                    "hyperedge {i} does not have exactly one transversal vertex at its apex"
                )));
            }
        }
        Ok(())
    }

    /// The same hypergraph with `b` and `c` exchanged in every hyperedge.
    pub fn swapped_bc(&self) -> Self {
        let mut h = self.clone();
        for e in &mut h.hyperedges {
            std::mem::swap(&mut e.b, &mut e.c);
        }
        h
    }
}

/// Fan gadget with its three boundary terminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetHandle {
    pub graph: WeightedGraph,
    pub terminal_a: usize,
    pub terminal_b: usize,
    pub terminal_c: usize,
}

pub(crate) fn one() -> Rational {
    Rational::one()
}
