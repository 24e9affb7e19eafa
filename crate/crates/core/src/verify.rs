//! Reproduction checks for the published results, each reported as a
//! pass/fail line. Shared by the `acceptance` test target and the
//! `verify-paper` command.

use std::time::Instant;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::analysis::{
    batch_scan, bbc_gap_exact, complete_bbc_gap_exact, counterexample_gap, GapSign, ScanOptions, ScanSummary,
};
use crate::error::Result;
use crate::exact::{check_eq390, gadget_kernel_closed, terminal_kernel_exact};
use crate::graph::{
    build_complete_clone_instance, build_gadget, build_hollom, parse_graph6, single_hyperedge, substitute_gadgets,
    BunkbedInstance, WeightedGraph, HOLLOM_POLES,
};
use crate::hyper::{alt_bunkbed_probs, sample_kernel_satisfying_390, verify_robust_lemma, wz_bunkbed_probs, EvalMode};
use crate::montecarlo::mc_gap_standard;
use crate::rational::{fmt_rational, rat};

/// All connected graphs on 1 to 5 vertices, one graph6 string per line.
pub const CONNECTED_LE5_G6: &str = include_str!("../data/connected_le5.g6");

pub const CRITERIA: usize = 11;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {:<28} {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "hollom-constants",
        2 => "gadget-closed-forms",
        3 => "margin-threshold",
        4 => "counterexample-n14",
        5 => "counterexample-weighted",
        6 => "counterexample-n1204",
        7 => "reduction-oracle",
        8 => "small-graph-scan",
        9 => "robust-lemma-suite",
        10 => "complete-bbc",
        11 => "monte-carlo-calibration",
        _ => "unknown",
    }
}

/// Runs one criterion; errors become a failing line.
pub fn run_criterion(id: usize) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => hollom_constants(),
        2 => gadget_closed_forms(),
        3 => margin_threshold(),
        4 => counterexample_window(14, rat(1, 2), -48.0, -46.0),
        5 => counterexample_window(5, rat(349, 10000), -79.0, -77.0),
        6 => headline(),
        7 => reduction_oracle(),
        8 => small_graph_scan(),
        9 => robust_suite(100),
        10 => complete_bbc(),
        11 => mc_calibration(200, 100_000),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult { id, name: criterion_name(id), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA).map(run_criterion).collect()
}

type Check = Result<(bool, String)>;

fn hollom_constants() -> Check {
    let (same, cross) = alt_bunkbed_probs(&build_hollom(), HOLLOM_POLES.0, HOLLOM_POLES.1)?;
    let ok = same == rat(12, 64) && cross == rat(13, 64);
    Ok((ok, format!("p_same = {}, p_cross = {}", fmt_rational(&same), fmt_rational(&cross))))
}

fn gadget_closed_forms() -> Check {
    let mut cases = 0;
    for n in 2..=6 {
        for p in [rat(1, 4), rat(1, 2), rat(2, 3)] {
            let g = build_gadget(n, &p)?;
            let brute = terminal_kernel_exact(&g.graph, g.terminal_a, g.terminal_b, g.terminal_c)?;
            let closed = gadget_kernel_closed(n, &p)?;
            if brute != closed {
                return Ok((false, format!("mismatch at n = {n}, p = {}", fmt_rational(&p))));
            }
            cases += 1;
        }
    }
    Ok((true, format!("{cases} (n, p) cases equal field by field")))
}

fn margin_threshold() -> Check {
    let big = check_eq390(&gadget_kernel_closed(1204, &rat(1, 2))?);
    let small = check_eq390(&gadget_kernel_closed(2, &rat(1, 2))?);
    Ok((big && !small, format!("n = 1204: {big}, n = 2: {small}")))
}

fn counterexample_window(n: usize, p: crate::Rational, lo: f64, hi: f64) -> Check {
    let r = counterexample_gap(n, &p, EvalMode::Exact)?;
    let Some((a, b)) = r.log10_window() else {
        return Ok((false, format!("gap sign {:?}", r.sign)));
    };
    let ok = r.sign == GapSign::Negative && lo <= a && b <= hi;
    Ok((ok, format!("sign {:?}, log10|gap| = {a:.3}, window [{lo}, {hi}]", r.sign)))
}

fn headline() -> Check {
    let r = counterexample_gap(1204, &rat(1, 2), EvalMode::Interval { bits: 65536 })?;
    let below = r.gap.abs_below_pow10(-4331);
    let ok = r.sign == GapSign::Negative && below;
    let window = r.log10_window().map(|(a, b)| format!("[{a:.3}, {b:.3}]")).unwrap_or_else(|| "none".into());
    Ok((ok, format!("sign {:?} at {:?} bits, log10|gap| in {window}, below 1e-4331: {below}", r.sign, r.precision_bits)))
}

fn reduction_oracle() -> Check {
    let h = single_hyperedge();
    let (s, t) = h.poles().expect("single hyperedge has poles");
    for n in [2, 3] {
        for p in [rat(1, 4), rat(1, 2)] {
            let brute = bbc_gap_exact(&substitute_gadgets(&h, n, &p)?)?;
            let wz = wz_bunkbed_probs(&h, &gadget_kernel_closed(n, &p)?, s, t, EvalMode::Exact)?;
            if brute.p_same != wz.p_same || brute.p_cross != wz.p_cross {
                return Ok((false, format!("mismatch at n = {n}, p = {}", fmt_rational(&p))));
            }
        }
    }
    Ok((true, "4 instances agree exactly".into()))
}

/// Scans the bundled corpus restricted to at most `max_vertices`.
pub fn scan_corpus(max_vertices: usize) -> Result<ScanSummary> {
    let mut graphs = Vec::new();
    for line in CONNECTED_LE5_G6.lines().filter(|l| !l.trim().is_empty()) {
        let g = parse_graph6(line.trim())?;
        if g.vertex_count() <= max_vertices {
            graphs.push(g);
        }
    }
    let options = ScanOptions { p: Some(rat(1, 2)), ..Default::default() };
    Ok(batch_scan(graphs, &options, |_| {}))
}

fn small_graph_scan() -> Check {
    let gate_start = Instant::now();
    let gate = scan_corpus(4)?;
    let gate_secs = gate_start.elapsed().as_secs_f64();
    let full = scan_corpus(5)?;
    let min_ok = full.min_gap.as_ref().is_some_and(|m| *m >= rat(0, 1));
    let ok = gate_secs < 60.0 && full.violations == 0 && full.failures == 0 && min_ok && gate.violations == 0;
    Ok((
        ok,
        format!(
            "{} graphs, {} instances, {} violations, min gap {}, gate {:.1}s",
            full.graphs,
            full.instances,
            full.violations,
            full.min_gap.as_ref().map(fmt_rational).unwrap_or_default(),
            gate_secs
        ),
    ))
}

fn robust_suite(count: u64) -> Check {
    let mut max_bits = 0;
    for seed in 0..count {
        let k = sample_kernel_satisfying_390(seed)?;
        let report = verify_robust_lemma(&k, EvalMode::Interval { bits: 256 })?;
        max_bits = max_bits.max(report.bits.unwrap_or(0));
    }
    Ok((true, format!("{count} kernels certified negative, max precision {max_bits} bits")))
}

fn complete_bbc() -> Check {
    let g = build_complete_clone_instance(102)?;
    let k2 = WeightedGraph::complete(2, &rat(1, 2));
    let gap = complete_bbc_gap_exact(&k2, 0, 1)?;
    let gap_ok = gap.exact_gap() == Some(&rat(1, 8));
    let (v, e) = (g.vertex_count(), g.edge_count());
    Ok((
        v == 7523 && e == 15654 && gap_ok,
        format!("|V| = {v} (published 7523), |E| = {e} (published 15654), K2 gap {}", gap.gap),
    ))
}

/// K4 at p = 1/2 with `T = {0}` and poles `(1, 2)`.
pub fn calibration_instance() -> BunkbedInstance {
    BunkbedInstance::new(WeightedGraph::complete(4, &rat(1, 2)), [0], 1, 2).expect("valid instance")
}

fn mc_calibration(seeds: u64, samples: u64) -> Check {
    let b = calibration_instance();
    let exact = bbc_gap_exact(&b)?.exact_gap().and_then(|g| g.to_f64()).unwrap_or(f64::NAN);
    let covered = (0..seeds).filter(|&s| mc_gap_standard(&b, samples, s).ci95_contains(exact)).count();
    let rerun = mc_gap_standard(&b, samples, 7) == mc_gap_standard(&b, samples, 7);
    let ok = covered as u64 * 10 >= seeds * 9 && rerun;
    Ok((ok, format!("{covered}/{seeds} intervals cover {exact:.6}, reruns identical: {rerun}")))
}
