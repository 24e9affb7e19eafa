//! Bunkbed gaps: exact brute force, kernel reduction for the gadget
//! counterexample, the complete variant, gap polynomials and scans.

mod poly;
mod scan;

use num_bigint::Sign;
use serde::Serialize;

pub use poly::{gap_polynomial_per_edge, gap_polynomial_univariate, PerEdgeGapPolynomial, UnivariateGapPolynomial};
pub use scan::{batch_scan, ScanEvent, ScanOptions, ScanRecord, ScanSummary, TransversalFamily};

use crate::certified::CertifiedNumber;
use crate::error::{Error, Result};
use crate::exact::{gadget_kernel_closed, EnumOptions, SubsetEnumerator};
use crate::graph::{build_bunkbed_graph, build_hollom, BunkbedInstance, InstanceSummary, WeightedGraph, HOLLOM_POLES};
use crate::graph::build_bunkbed_graph_with_posts;
use crate::hyper::{wz_bunkbed_probs, EvalMode, WzProbs};
use crate::rational::{rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapSign {
    Negative,
    Zero,
    Positive,
    Uncertified,
}

impl GapSign {
    pub fn of(n: &CertifiedNumber) -> GapSign {
        match n.sign() {
            Some(Sign::Minus) => GapSign::Negative,
            Some(Sign::NoSign) => GapSign::Zero,
            Some(Sign::Plus) => GapSign::Positive,
            None => GapSign::Uncertified,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteForce,
    KernelReduction,
    MonteCarlo,
}

/// Evidence for or against `P[u <-> v] >= P[u <-> v']`.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub p_same: CertifiedNumber,
    pub p_cross: CertifiedNumber,
    /// `p_same - p_cross`; negative means a counterexample.
    pub gap: CertifiedNumber,
    pub sign: GapSign,
    pub method: Method,
    pub instance_summary: InstanceSummary,
    pub precision_bits: Option<u32>,
    /// Configurations (or edge subsets) processed.
    pub work: u64,
}

impl GapReport {
    fn new(
        p_same: CertifiedNumber,
        p_cross: CertifiedNumber,
        gap: CertifiedNumber,
        method: Method,
        instance_summary: InstanceSummary,
        work: u64,
    ) -> Self {
        let precision_bits = gap.bits();
        GapReport { sign: GapSign::of(&gap), p_same, p_cross, gap, method, instance_summary, precision_bits, work }
    }

    pub fn exact_gap(&self) -> Option<&Rational> {
        self.gap.exact()
    }

    /// Window for `log10 |gap|`; `None` if the gap is zero or uncertified.
    pub fn log10_window(&self) -> Option<(f64, f64)> {
        self.gap.log10_abs_window()
    }
}

/// Exact gap by enumerating every subset of the `2m` level edges. Posts
/// have probability 1 and are contracted before enumeration.
pub fn bbc_gap_exact(b: &BunkbedInstance) -> Result<GapReport> {
    bbc_gap_exact_with(b, EnumOptions::default())
}

pub fn bbc_gap_exact_with(b: &BunkbedInstance, options: EnumOptions) -> Result<GapReport> {
    let g = build_bunkbed_graph(b);
    let n = b.base.vertex_count();
    two_pole_report(&g, b.pole_u, b.pole_v, n, options, b.summary())
}

fn two_pole_report(
    g: &WeightedGraph,
    u: usize,
    v: usize,
    n: usize,
    options: EnumOptions,
    summary: InstanceSummary,
) -> Result<GapReport> {
    let en = SubsetEnumerator::new(g, options)?;
    let (u0, v0, v1) = (en.vertex(u), en.vertex(v), en.vertex(v + n));
    let probs = en.run(2, |dsu, hits| {
        let root = dsu.find(u0);
        if dsu.find(v0) == root {
            hits.hit(0);
        }
        if dsu.find(v1) == root {
            hits.hit(1);
        }
    });
    let [same, cross]: [Rational; 2] = probs.try_into().expect("two outcomes");
    let gap = &same - &cross;
    Ok(GapReport::new(
        CertifiedNumber::Exact(same),
        CertifiedNumber::Exact(cross),
        CertifiedNumber::Exact(gap),
        Method::BruteForce,
        summary,
        en.subset_count(),
    ))
}

/// Largest precision tried by interval-mode escalation.
pub const MAX_BITS: u32 = 1 << 20;

/// Gap of Hollom's hypergraph with every hyperedge replaced by the
/// `n`-fan at parameter `p`, computed by kernel reduction: each gadget is
/// entered only through its three terminals and gadget interiors are
/// independent, so the graph's bunkbed probabilities equal the WZ
/// probabilities with the gadget's terminal kernel.
///
/// In interval mode the precision is doubled until the sign is certified.
pub fn counterexample_gap(n: usize, p: &Rational, mode: EvalMode) -> Result<GapReport> {
    let kernel = gadget_kernel_closed(n, p)?;
    let hollom = build_hollom();
    let (s, t) = HOLLOM_POLES;
    let summary = InstanceSummary {
        vertices: hollom.vertex_count() + hollom.hyperedges().len() * (n - 2),
        edges: hollom.hyperedges().len() * (2 * n - 1),
        transversal: hollom.transversal().len(),
    };
    let mut mode = mode;
    loop {
        let WzProbs { p_same, p_cross, gap, configurations } = wz_bunkbed_probs(&hollom, &kernel, s, t, mode)?;
        let report = GapReport::new(p_same, p_cross, gap, Method::KernelReduction, summary, configurations);
        match (report.sign, mode) {
            (GapSign::Uncertified, EvalMode::Interval { bits }) if bits < MAX_BITS => {
                mode = EvalMode::Interval { bits: (bits * 2).min(MAX_BITS) };
            }
            _ => return Ok(report),
        }
    }
}

/// Precision that comfortably resolves the `n`-gadget gap.
pub fn suggested_bits(n: usize) -> u32 {
    (16 * (2 * n + 8)).max(256) as u32
}

/// Gap for percolation on `G x K2` where posts are also random with
/// probability 1/2 (every vertex is transversal).
pub fn complete_bbc_gap_exact(g: &WeightedGraph, u: usize, v: usize) -> Result<GapReport> {
    complete_bbc_gap_exact_with(g, u, v, EnumOptions::default())
}

pub fn complete_bbc_gap_exact_with(g: &WeightedGraph, u: usize, v: usize, options: EnumOptions) -> Result<GapReport> {
    if u == v {
        return Err(Error::invalid("complete BBC needs distinct poles"));
    }
    let n = g.vertex_count();
    let b = BunkbedInstance::new(g.clone(), 0..n, u, v)?;
    let all: Vec<usize> = (0..n).collect();
    let product = build_bunkbed_graph_with_posts(&b, &all, &rat(1, 2));
    two_pole_report(&product, u, v, n, options, b.summary())
}
