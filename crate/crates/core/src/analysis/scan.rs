//! Exhaustive bunkbed scan: every transversal set and every pole pair of
//! every graph in a stream.
//!
//! For each subset of level edges the components of the two levels are
//! found once, without posts. Each transversal set then only merges the
//! component labels of `w` and `w'` in a second small union-find.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dsu::SmallDsu;
use crate::error::{Error, Result};
use crate::exact::{EnumOptions, SubsetEnumerator};
use crate::graph::{build_bunkbed_graph, emit_graph6, BunkbedInstance, WeightedGraph};
use crate::rational::{fmt_rational, Rational};

const LABEL_SLOTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransversalFamily {
    /// All `2^|V|` subsets, including the empty set.
    All,
    /// Only these sets; entries outside the vertex range are skipped.
    Given(Vec<BTreeSet<usize>>),
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Overrides every edge probability when set.
    pub p: Option<Rational>,
    pub transversals: TransversalFamily,
    pub enumeration: EnumOptions,
    /// Emit a record for every instance, not only violations.
    pub verbose: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { p: None, transversals: TransversalFamily::All, enumeration: EnumOptions::default(), verbose: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRecord {
    pub graph_index: usize,
    pub graph6: Option<String>,
    pub transversal: Vec<usize>,
    pub u: usize,
    pub v: usize,
    pub p_same: Rational,
    pub p_cross: Rational,
    pub gap: Rational,
}

impl Serialize for ScanRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ScanRecord", 8)?;
        st.serialize_field("graph_index", &self.graph_index)?;
        st.serialize_field("graph6", &self.graph6)?;
        st.serialize_field("transversal", &self.transversal)?;
        st.serialize_field("u", &self.u)?;
        st.serialize_field("v", &self.v)?;
        st.serialize_field("p_same", &fmt_rational(&self.p_same))?;
        st.serialize_field("p_cross", &fmt_rational(&self.p_cross))?;
        st.serialize_field("gap", &fmt_rational(&self.gap))?;
        st.end()
    }
}

#[derive(Clone, Debug)]
pub enum ScanEvent {
    Instance(ScanRecord),
    Violation(ScanRecord),
    GraphError { graph_index: usize, message: String },
}

#[derive(Clone, Debug, Default)]
pub struct ScanSummary {
    pub graphs: usize,
    pub instances: u64,
    pub min_gap: Option<Rational>,
    pub witness: Option<ScanRecord>,
    pub violations: u64,
    pub failures: usize,
}

impl Serialize for ScanSummary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ScanSummary", 6)?;
        st.serialize_field("graphs", &self.graphs)?;
        st.serialize_field("instances", &self.instances)?;
        st.serialize_field("min_gap", &self.min_gap.as_ref().map(fmt_rational))?;
        st.serialize_field("witness", &self.witness)?;
        st.serialize_field("violations", &self.violations)?;
        st.serialize_field("failures", &self.failures)?;
        st.end()
    }
}

/// Scans every graph; events are passed to `sink` as soon as they are
/// known, violations included. Graphs that fail (cap exceeded, too many
/// vertices) are reported and skipped.
pub fn batch_scan<I>(graphs: I, options: &ScanOptions, mut sink: impl FnMut(ScanEvent)) -> ScanSummary
where
    I: IntoIterator<Item = WeightedGraph>,
{
    let mut summary = ScanSummary::default();
    for (graph_index, graph) in graphs.into_iter().enumerate() {
        summary.graphs += 1;
        let graph = match &options.p {
            Some(p) => graph.with_uniform_probability(p),
            None => graph,
        };
        let records = match scan_graph(&graph, graph_index, options) {
            Ok(r) => r,
            Err(e) => {
                summary.failures += 1;
                sink(ScanEvent::GraphError { graph_index, message: e.to_string() });
                continue;
            }
        };
        for record in records {
            summary.instances += 1;
            let better = summary.min_gap.as_ref().is_none_or(|m| record.gap < *m);
            if better {
                summary.min_gap = Some(record.gap.clone());
                summary.witness = Some(record.clone());
            }
            if record.gap < Rational::default() {
                summary.violations += 1;
                sink(ScanEvent::Violation(record));
            } else if options.verbose {
                sink(ScanEvent::Instance(record));
            }
        }
    }
    summary
}

fn transversal_sets(n: usize, family: &TransversalFamily) -> Vec<BTreeSet<usize>> {
    match family {
        TransversalFamily::All => (0u64..1 << n)
            .map(|mask| (0..n).filter(|&w| mask >> w & 1 == 1).collect())
            .collect(),
        TransversalFamily::Given(sets) => sets
            .iter()
            .filter(|t| t.iter().all(|&w| w < n))
            .cloned()
            .collect(),
    }
}

fn scan_graph(g: &WeightedGraph, graph_index: usize, options: &ScanOptions) -> Result<Vec<ScanRecord>> {
    let n = g.vertex_count();
    if 2 * n > LABEL_SLOTS {
        return Err(Error::invalid(format!("scan supports at most {} vertices", LABEL_SLOTS / 2)));
    }
    let sets = transversal_sets(n, &options.transversals);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
    if sets.is_empty() || pairs.is_empty() {
        return Ok(Vec::new());
    }
    let levels = build_bunkbed_graph(&BunkbedInstance::new(g.clone(), [], 0, 0)?);
    let en = SubsetEnumerator::new(&levels, options.enumeration)?;
    let slot: Vec<usize> = (0..2 * n).map(|x| en.vertex(x)).collect();
    let set_lists: Vec<Vec<usize>> = sets.iter().map(|t| t.iter().copied().collect()).collect();
    let per_set = pairs.len() * 2;
    let probs = en.run(sets.len() * per_set, |dsu, hits| {
        let mut label = [0usize; LABEL_SLOTS];
        for (x, l) in label.iter_mut().take(2 * n).enumerate() {
            *l = dsu.find(slot[x]);
        }
        for (ti, t) in set_lists.iter().enumerate() {
            let mut merged = SmallDsu::<LABEL_SLOTS>::new();
            for &w in t {
                merged.union(label[w], label[w + n]);
            }
            let base = ti * per_set;
            for (pi, &(u, v)) in pairs.iter().enumerate() {
                let root = merged.find(label[u]);
                if merged.find(label[v]) == root {
                    hits.hit(base + 2 * pi);
                }
                if merged.find(label[v + n]) == root {
                    hits.hit(base + 2 * pi + 1);
                }
            }
        }
    });
    let graph6 = emit_graph6(g).ok();
    let mut records = Vec::with_capacity(sets.len() * pairs.len());
    for (ti, t) in set_lists.iter().enumerate() {
        for (pi, &(u, v)) in pairs.iter().enumerate() {
            let p_same = probs[ti * per_set + 2 * pi].clone();
            let p_cross = probs[ti * per_set + 2 * pi + 1].clone();
            let gap = &p_same - &p_cross;
            records.push(ScanRecord {
                graph_index,
                graph6: graph6.clone(),
                transversal: t.clone(),
                u,
                v,
                p_same,
                p_cross,
                gap,
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::bbc_gap_exact;
    use crate::rational::{int, rat};

    #[test]
    fn single_k2() {
        let k2 = WeightedGraph::complete(2, &rat(1, 2));
        let mut events = Vec::new();
        let summary = batch_scan([k2], &ScanOptions::default(), |e| events.push(e));
        assert_eq!(summary.graphs, 1);
        assert_eq!(summary.instances, 4);
        assert_eq!(summary.min_gap, Some(int(0)));
        assert_eq!(summary.witness.unwrap().transversal, vec![0]);
        assert!(events.is_empty());
    }

    #[test]
    fn empty_stream() {
        let summary = batch_scan(Vec::new(), &ScanOptions::default(), |_| panic!("no events expected"));
        assert_eq!((summary.graphs, summary.instances, summary.violations), (0, 0, 0));
        assert!(summary.min_gap.is_none());
    }

    #[test]
    fn matches_single_instance_engine() {
        let g = WeightedGraph::complete(4, &rat(1, 3));
        let mut records = Vec::new();
        let options = ScanOptions { verbose: true, ..Default::default() };
        batch_scan([g.clone()], &options, |e| {
            if let ScanEvent::Instance(r) = e {
                records.push(r)
            }
        });
        assert_eq!(records.len(), 16 * 6);
        for r in records.iter().step_by(7) {
            let b = BunkbedInstance::new(g.clone(), r.transversal.iter().copied(), r.u, r.v).unwrap();
            let report = bbc_gap_exact(&b).unwrap();
            assert_eq!(report.exact_gap(), Some(&r.gap));
        }
    }

    #[test]
    fn failures_are_logged_and_skipped() {
        let big = WeightedGraph::complete(6, &rat(1, 2));
        let k2 = WeightedGraph::complete(2, &rat(1, 2));
        let mut errors = 0;
        let summary = batch_scan([big, k2], &ScanOptions::default(), |e| {
            if matches!(e, ScanEvent::GraphError { graph_index: 0, .. }) {
                errors += 1;
            }
        });
        assert_eq!((errors, summary.failures, summary.graphs, summary.instances), (1, 1, 2, 4));
    }
}
