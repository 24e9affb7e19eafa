//! Percolation on bunkbed hypergraphs.
//!
//! Two models are covered. In the alternative model every hyperedge is
//! retained on exactly one level, chosen by a fair coin. In the WZ model
//! every hyperedge instance independently takes one of the five terminal
//! partitions with the kernel's probabilities.
//!
//! The WZ engine walks all `5^(2h)` configurations once per hypergraph and
//! pole pair, counting connected configurations per state count vector.
//! Since every instance shares one kernel, a configuration's probability
//! depends only on its count vector, so any kernel is then evaluated with a
//! few thousand big-number products.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};
use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::certified::{CertifiedNumber, Interval};
use crate::dsu::{Dsu, SmallDsu};
use crate::error::{Error, Result};
use crate::exact::{check_eq390, HyperedgeKernel, TerminalPartition};
use crate::graph::{build_hollom, Hypergraph3};
use crate::rational::{common_denominator, fmt_rational, rat, Rational};

/// Largest hypergraph the WZ engine accepts (`5^14` configurations).
pub const MAX_WZ_HYPEREDGES: usize = 7;
/// Largest hypergraph the alternative-model engine accepts.
pub const MAX_ALT_HYPEREDGES: usize = 30;
/// Interval precision used when the caller does not choose one.
pub const DEFAULT_BITS: u32 = 256;

const DSU_SLOTS: usize = 64;

/// A vertex on level 0 or level 1 of the bunkbed hypergraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VertexInstance {
    pub vertex: usize,
    pub level: usize,
}

impl VertexInstance {
    pub fn new(vertex: usize, level: usize) -> Self {
        VertexInstance { vertex, level }
    }

    fn slot(self, vertex_count: usize) -> usize {
        self.level * vertex_count + self.vertex
    }
}

/// One state per hyperedge instance; instance `level * h + e` is hyperedge
/// `e` on `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WzConfiguration {
    states: Vec<TerminalPartition>,
}

impl WzConfiguration {
    pub fn new(states: Vec<TerminalPartition>) -> Self {
        WzConfiguration { states }
    }

    pub fn uniform(h: &Hypergraph3, state: TerminalPartition) -> Self {
        WzConfiguration { states: vec![state; 2 * h.hyperedges().len()] }
    }

    pub fn state(&self, edge: usize, level: usize, edges: usize) -> TerminalPartition {
        self.states[level * edges + edge]
    }

    pub fn states(&self) -> &[TerminalPartition] {
        &self.states
    }
}

/// Whether `s` and `t` are joined in the bunkbed hypergraph under `cfg`;
/// posts at transversal vertices are always present.
pub fn partition_connectivity(h: &Hypergraph3, cfg: &WzConfiguration, s: VertexInstance, t: VertexInstance) -> Result<bool> {
    let edges = h.hyperedges().len();
    if cfg.states.len() != 2 * edges {
        return Err(Error::invalid(format!(
            "configuration has {} states, need {}",
            cfg.states.len(),
            2 * edges
        )));
    }
    let n = h.vertex_count();
    if s.vertex >= n || t.vertex >= n || s.level > 1 || t.level > 1 {
        return Err(Error::invalid("vertex instance out of range"));
    }
    let mut dsu = Dsu::new(2 * n);
    for &w in h.transversal() {
        dsu.union(w, w + n);
    }
    for level in 0..2 {
        for (i, e) in h.hyperedges().iter().enumerate() {
            let terminals = e.vertices();
            for &(x, y) in cfg.state(i, level, edges).merges() {
                dsu.union(terminals[x] + level * n, terminals[y] + level * n);
            }
        }
    }
    Ok(dsu.same(s.slot(n), t.slot(n)))
}

/// `(P[s0 <-> t0], P[s0 <-> t1])` in the alternative model.
pub fn alt_bunkbed_probs(h: &Hypergraph3, s: usize, t: usize) -> Result<(Rational, Rational)> {
    let edges = h.hyperedges().len();
    if edges > MAX_ALT_HYPEREDGES {
        return Err(Error::CapExceeded { needed: edges, cap: MAX_ALT_HYPEREDGES });
    }
    let n = h.vertex_count();
    if s >= n || t >= n {
        return Err(Error::invalid("pole out of range"));
    }
    let mut dsu = Dsu::new(2 * n);
    let (mut same, mut cross) = (0u64, 0u64);
    for coins in 0u64..1 << edges {
        dsu.reset();
        for &w in h.transversal() {
            dsu.union(w, w + n);
        }
        for (i, e) in h.hyperedges().iter().enumerate() {
            let offset = (coins >> i & 1) as usize * n;
            dsu.union(e.apex + offset, e.b + offset);
            dsu.union(e.apex + offset, e.c + offset);
        }
        same += dsu.same(s, t) as u64;
        cross += dsu.same(s, t + n) as u64;
    }
    let total = BigInt::one() << edges;
    Ok((
        Rational::new(BigInt::from(same), total.clone()),
        Rational::new(BigInt::from(cross), total),
    ))
}

/// How kernel probabilities are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Interval { bits: u32 },
}

/// Connected-configuration counts per state count vector.
///
/// A count vector `(c_0, .., c_4)` (how many instances take each state) is
/// encoded as `sum c_i * base^i` with `base = 2h + 1`.
#[derive(Clone, Debug)]
pub struct WzCounts {
    hyperedges: usize,
    base: usize,
    same: Vec<u64>,
    cross: Vec<u64>,
    configurations: u64,
}

impl WzCounts {
    pub fn configurations(&self) -> u64 {
        self.configurations
    }

    pub fn hyperedges(&self) -> usize {
        self.hyperedges
    }

    /// Count vectors with at least one connected configuration, together
    /// with the `(same, cross)` counts.
    pub fn nonzero(&self) -> impl Iterator<Item = ([usize; 5], u64, u64)> + '_ {
        let base = self.base;
        (0..self.same.len())
            .filter(move |&code| self.same[code] != 0 || self.cross[code] != 0)
            .map(move |code| {
                let mut cv = [0usize; 5];
                let mut rest = code;
                for c in cv.iter_mut() {
                    *c = rest % base;
                    rest /= base;
                }
                (cv, self.same[code], self.cross[code])
            })
    }

    /// Count vectors whose entries sum to `2h` (all encodable vectors).
    pub fn count_vector_total(&self) -> usize {
        let n = 2 * self.hyperedges;
        (n + 1) * (n + 2) * (n + 3) * (n + 4) / 24
    }
}

struct Walker<'a> {
    vertex_count: usize,
    terminals: Vec<[usize; 3]>,
    edges: usize,
    s: usize,
    t0: usize,
    t1: usize,
    steps: [usize; 5],
    same: &'a mut [u64],
    cross: &'a mut [u64],
}

impl Walker<'_> {
    /// Assigns instances `depth - 1, depth - 2, .., 0`, so instance 0 is the
    /// fastest-turning odometer digit.
    fn walk(&mut self, depth: usize, dsu: SmallDsu<DSU_SLOTS>, code: usize) {
        let instance = depth - 1;
        let edge = instance % self.edges;
        let offset = (instance / self.edges) * self.vertex_count;
        let [a, b, c] = self.terminals[edge];
        let (a, b, c) = (a + offset, b + offset, c + offset);
        for state in TerminalPartition::ALL {
            let mut next = dsu;
            match state {
                TerminalPartition::Abc => {
                    next.union(a, b);
                    next.union(a, c);
                }
                TerminalPartition::AbC => next.union(a, b),
                TerminalPartition::AcB => next.union(a, c),
                TerminalPartition::ABc => next.union(b, c),
                TerminalPartition::ABC => {}
            }
            let code = code + self.steps[state.index()];
            if instance == 0 {
                let root = next.find(self.s);
                self.same[code] += (next.find(self.t0) == root) as u64;
                self.cross[code] += (next.find(self.t1) == root) as u64;
            } else {
                self.walk(depth - 1, next, code);
            }
        }
    }
}

fn count_configurations(h: &Hypergraph3, s: usize, t: usize, workers: usize) -> Result<WzCounts> {
    let edges = h.hyperedges().len();
    if edges > MAX_WZ_HYPEREDGES {
        return Err(Error::CapExceeded { needed: 2 * edges, cap: 2 * MAX_WZ_HYPEREDGES });
    }
    let n = h.vertex_count();
    if 2 * n > DSU_SLOTS {
        return Err(Error::invalid(format!("WZ engine supports at most {} vertices", DSU_SLOTS / 2)));
    }
    if s >= n || t >= n {
        return Err(Error::invalid("pole out of range"));
    }
    let base = 2 * edges + 1;
    let table = base.pow(5);
    let steps = [1, base, base.pow(2), base.pow(3), base.pow(4)];
    let instances = 2 * edges;
    let mut root = SmallDsu::<DSU_SLOTS>::new();
    for &w in h.transversal() {
        root.union(w, w + n);
    }
    let terminals: Vec<[usize; 3]> = h.hyperedges().iter().map(|e| e.vertices()).collect();

    if instances == 0 {
        let mut same = vec![0u64; table];
        let mut cross = vec![0u64; table];
        same[0] = root.same(s, t) as u64;
        cross[0] = root.same(s, t + n) as u64;
        return Ok(WzCounts { hyperedges: edges, base, same, cross, configurations: 1 });
    }

    // split on the slowest digit (the last instance) across workers
    let top_states: Vec<TerminalPartition> = TerminalPartition::ALL.to_vec();
    let workers = workers.clamp(1, top_states.len());
    let groups: Vec<Vec<TerminalPartition>> = (0..workers)
        .map(|w| top_states.iter().copied().skip(w).step_by(workers).collect())
        .collect();
    let run_group = |group: &[TerminalPartition]| -> (Vec<u64>, Vec<u64>) {
        let mut same = vec![0u64; table];
        let mut cross = vec![0u64; table];
        let mut walker = Walker {
            vertex_count: n,
            terminals: terminals.clone(),
            edges,
            s,
            t0: t,
            t1: t + n,
            steps,
            same: &mut same,
            cross: &mut cross,
        };
        let instance = instances - 1;
        let edge = instance % edges;
        let offset = (instance / edges) * n;
        let [a, b, c] = terminals[edge].map(|x| x + offset);
        for &state in group {
            let mut dsu = root;
            for &(x, y) in state.merges() {
                dsu.union([a, b, c][x], [a, b, c][y]);
            }
            let code = steps[state.index()];
            if instance == 0 {
                let r = dsu.find(s);
                walker.same[code] += (dsu.find(t) == r) as u64;
                walker.cross[code] += (dsu.find(t + n) == r) as u64;
            } else {
                walker.walk(instance, dsu, code);
            }
        }
        (same, cross)
    };
    let parts: Vec<(Vec<u64>, Vec<u64>)> = if workers == 1 {
        groups.iter().map(|g| run_group(g)).collect()
    } else {
        std::thread::scope(|sc| {
            let handles: Vec<_> = groups.iter().map(|g| sc.spawn(|| run_group(g))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut same = vec![0u64; table];
    let mut cross = vec![0u64; table];
    for (ps, pc) in parts {
        for (acc, x) in same.iter_mut().zip(ps) {
            *acc += x;
        }
        for (acc, x) in cross.iter_mut().zip(pc) {
            *acc += x;
        }
    }
    Ok(WzCounts { hyperedges: edges, base, same, cross, configurations: 5u64.pow(instances as u32) })
}

type CountsKey = (usize, Vec<(usize, usize, usize)>, Vec<usize>, usize, usize);

fn counts_cache() -> &'static Mutex<HashMap<CountsKey, Arc<WzCounts>>> {
    static CACHE: OnceLock<Mutex<HashMap<CountsKey, Arc<WzCounts>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Connectivity counts for `(h, s, t)`, computed once per process.
pub fn wz_counts(h: &Hypergraph3, s: usize, t: usize) -> Result<Arc<WzCounts>> {
    wz_counts_with_workers(h, s, t, default_workers())
}

pub fn wz_counts_with_workers(h: &Hypergraph3, s: usize, t: usize, workers: usize) -> Result<Arc<WzCounts>> {
    let key: CountsKey = (
        h.vertex_count(),
        h.hyperedges().iter().map(|e| (e.apex, e.b, e.c)).collect(),
        h.transversal().iter().copied().collect(),
        s,
        t,
    );
    if let Some(hit) = counts_cache().lock().expect("cache lock").get(&key) {
        return Ok(hit.clone());
    }
    let counts = Arc::new(count_configurations(h, s, t, workers)?);
    counts_cache().lock().expect("cache lock").insert(key, counts.clone());
    Ok(counts)
}

/// Worker count from `BUNKBED_WORKERS`, defaulting to 1.
pub fn default_workers() -> usize {
    std::env::var("BUNKBED_WORKERS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1)
}

/// Both connection probabilities and their difference `same - cross`.
#[derive(Clone, Debug)]
pub struct WzProbs {
    pub p_same: CertifiedNumber,
    pub p_cross: CertifiedNumber,
    pub gap: CertifiedNumber,
    pub configurations: u64,
}

/// `(P[s0 <-> t0], P[s0 <-> t1])` in the WZ model with one kernel on every
/// hyperedge instance.
pub fn wz_bunkbed_probs(h: &Hypergraph3, k: &HyperedgeKernel, s: usize, t: usize, mode: EvalMode) -> Result<WzProbs> {
    h.check_wz()?;
    let counts = wz_counts(h, s, t)?;
    Ok(evaluate_counts(&counts, k, mode))
}

/// Applies a kernel to precomputed counts.
pub fn evaluate_counts(counts: &WzCounts, k: &HyperedgeKernel, mode: EvalMode) -> WzProbs {
    match mode {
        EvalMode::Exact => evaluate_exact(counts, k),
        EvalMode::Interval { bits } => evaluate_interval(counts, k, bits),
    }
}

fn evaluate_exact(counts: &WzCounts, k: &HyperedgeKernel) -> WzProbs {
    let values = k.to_array();
    let denom = common_denominator(values.iter());
    let numerators: Vec<BigInt> = values
        .iter()
        .map(|v| (v * Rational::from_integer(denom.clone())).to_integer())
        .collect();
    let depth = 2 * counts.hyperedges;
    let powers: Vec<Vec<BigInt>> = numerators
        .iter()
        .map(|x| {
            let mut row = vec![BigInt::one()];
            for i in 0..depth {
                let next = &row[i] * x;
                row.push(next);
            }
            row
        })
        .collect();
    let (mut same, mut cross) = (BigInt::zero(), BigInt::zero());
    for (cv, s, c) in counts.nonzero() {
        let weight = cv
            .iter()
            .enumerate()
            .fold(BigInt::one(), |acc, (i, &e)| acc * &powers[i][e]);
        if s != 0 {
            same += &weight * BigInt::from(s);
        }
        if c != 0 {
            cross += &weight * BigInt::from(c);
        }
    }
    let total = num_traits::pow(denom, depth);
    let p_same = Rational::new(same, total.clone());
    let p_cross = Rational::new(cross, total);
    let gap = &p_same - &p_cross;
    WzProbs {
        p_same: CertifiedNumber::Exact(p_same),
        p_cross: CertifiedNumber::Exact(p_cross),
        gap: CertifiedNumber::Exact(gap),
        configurations: counts.configurations,
    }
}

fn evaluate_interval(counts: &WzCounts, k: &HyperedgeKernel, bits: u32) -> WzProbs {
    let depth = 2 * counts.hyperedges;
    let powers: Vec<Vec<Interval>> = k
        .to_array()
        .iter()
        .map(|v| {
            let x = Interval::from_rational(v, bits);
            let mut row = vec![Interval::one(bits)];
            for i in 0..depth {
                let next = row[i].mul(&x);
                row.push(next);
            }
            row
        })
        .collect();
    let mut same = Interval::zero(bits);
    let mut cross = Interval::zero(bits);
    let mut gap = Interval::zero(bits);
    for (cv, s, c) in counts.nonzero() {
        let weight = cv
            .iter()
            .enumerate()
            .fold(Interval::one(bits), |acc, (i, &e)| acc.mul(&powers[i][e]));
        if s != 0 {
            same = same.add(&weight.mul_integer(&BigInt::from(s)));
        }
        if c != 0 {
            cross = cross.add(&weight.mul_integer(&BigInt::from(c)));
        }
        if s != c {
            let diff = BigInt::from(s) - BigInt::from(c);
            gap = gap.add(&weight.mul_integer(&diff));
        }
    }
    WzProbs {
        p_same: CertifiedNumber::Interval(same),
        p_cross: CertifiedNumber::Interval(cross),
        gap: CertifiedNumber::Interval(gap),
        configurations: counts.configurations,
    }
}

/// Evaluation of one kernel on Hollom's hypergraph.
#[derive(Clone, Debug)]
pub struct RobustReport {
    pub kernel: HyperedgeKernel,
    pub probs: WzProbs,
    pub bits: Option<u32>,
}

/// Checks that a kernel satisfying the 400-margin condition yields a
/// certified negative gap `P[u1 <-> u10] - P[u1 <-> u10']` on Hollom's
/// hypergraph. In interval mode precision is doubled until the sign is
/// certified (up to 2^20 bits). A certified non-negative gap is reported as
/// a verification error: it would contradict the robust hyperedge lemma.
pub fn verify_robust_lemma(k: &HyperedgeKernel, mode: EvalMode) -> Result<RobustReport> {
    if !check_eq390(k) {
        return Err(Error::invalid("kernel does not satisfy 400 p_a|bc <= p_abc p_a|b|c - p_ab|c^2"));
    }
    let h = build_hollom();
    let (s, t) = crate::graph::HOLLOM_POLES;
    let mut mode = mode;
    loop {
        let probs = wz_bunkbed_probs(&h, k, s, t, mode)?;
        match (probs.gap.sign(), mode) {
            (Some(Sign::Minus), _) => {
                let bits = probs.gap.bits();
                return Ok(RobustReport { kernel: k.clone(), probs, bits });
            }
            (Some(_), _) => {
                return Err(Error::Verification(format!(
                    "FALSIFICATION: kernel {:?} satisfies the 400-margin condition but the WZ gap {} is not negative",
                    k.to_array().iter().map(fmt_rational).collect::<Vec<_>>(),
                    probs.gap
                )));
            }
            (None, EvalMode::Interval { bits }) if bits < 1 << 20 => {
                mode = EvalMode::Interval { bits: bits * 2 };
            }
            (None, EvalMode::Interval { bits }) => return Err(Error::Uncertified { bits }),
            (None, EvalMode::Exact) => unreachable!("exact values always have a sign"),
        }
    }
}

/// Deterministic kernel satisfying the 400-margin condition, for property
/// tests over that region. `p_ab|c = p_ac|b` always.
pub fn sample_kernel_satisfying_390(seed: u64) -> Result<HyperedgeKernel> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    for _ in 0..10_000 {
        let x = 1 + (rng.next_u64() % 1000) as i64;
        let y = 1 + (rng.next_u64() % 1000) as i64;
        let z = (rng.next_u64() % 1000) as i64;
        if z * z >= x * y {
            continue;
        }
        let total = x + y + 2 * z;
        let margin = rat(x * y - z * z, total * total);
        let f = (rng.next_u64() % 1001) as i64;
        // bc-only mass at most margin / 800, so the shrunk margin still covers 400x
        let bc = margin * rat(f, 800 * 1000);
        let keep = Rational::one() - &bc;
        let scale = |v: i64| &keep * rat(v, total);
        let kernel = HyperedgeKernel::from_array([scale(x), scale(z), scale(z), bc, scale(y)])?;
        if check_eq390(&kernel) {
            return Ok(kernel);
        }
    }
    Err(Error::Verification(format!("no kernel found for seed {seed} after 10^4 attempts")))
}

/// The alternative model seen as a WZ configuration: hyperedge `e` is
/// retained (state `abc`) on level `coin_e` and deleted (`a|b|c`) on the
/// other level.
pub fn alternative_configuration(h: &Hypergraph3, coins: u64) -> WzConfiguration {
    let edges = h.hyperedges().len();
    let mut states = vec![TerminalPartition::ABC; 2 * edges];
    for e in 0..edges {
        let level = (coins >> e & 1) as usize;
        states[level * edges + e] = TerminalPartition::Abc;
    }
    WzConfiguration::new(states)
}
