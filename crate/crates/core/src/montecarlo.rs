//! Seeded Monte Carlo estimates of bunkbed gaps.
//!
//! Both indicators `[u <-> v]` and `[u <-> v']` are read from the same
//! realization, so the gap estimate is the mean of a paired difference.
//! The generator is xoshiro256++; worker streams in parallel mode are
//! separated with its `jump` function.

use std::thread;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::dsu::Dsu;
use crate::graph::BunkbedInstance;
use crate::rational::Rational;

pub const RNG_NAME: &str = "xoshiro256++ (rand_xoshiro 0.8, seed_from_u64)";

/// Samples drawn before early stopping is considered.
pub const MIN_BATCH: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub p_same_hat: f64,
    pub p_cross_hat: f64,
    pub gap_hat: f64,
    /// `sqrt(var / N)` of the paired difference.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub early_stopped: bool,
    pub rng: &'static str,
}

impl McEstimate {
    /// Normal-approximation 95% interval for the gap.
    pub fn ci95(&self) -> (f64, f64) {
        let half = 1.959963984540054 * self.std_error;
        (self.gap_hat - half, self.gap_hat + half)
    }

    pub fn ci95_contains(&self, x: f64) -> bool {
        let (lo, hi) = self.ci95();
        lo <= x && x <= hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StopDecision {
    Continue,
    Stop,
}

pub fn mc_early_stop_policy(current: &McEstimate, threshold: f64) -> StopDecision {
    if current.samples < MIN_BATCH || current.std_error == 0.0 {
        return StopDecision::Continue;
    }
    if current.gap_hat.abs() > threshold * current.std_error {
        StopDecision::Stop
    } else {
        StopDecision::Continue
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Every level edge independently open with its own probability.
    Standard,
    /// One fair coin per base edge picks which level keeps it.
    Alternative,
}

#[derive(Clone, Debug)]
enum Draw {
    Closed,
    Open,
    /// Open when the 64-bit draw is below `cut`; a draw equal to `cut`
    /// is settled by an exact Bernoulli on the fractional remainder.
    Cut { cut: u64, rest: Option<Rational> },
}

impl Draw {
    fn new(q: &Rational) -> Draw {
        if q <= &Rational::zero() {
            return Draw::Closed;
        }
        if q >= &Rational::from_integer(1.into()) {
            return Draw::Open;
        }
        let scaled = q * Rational::from_integer(BigInt::from(1u8) << 64);
        let floor = scaled.floor();
        let rest = &scaled - &floor;
        let cut = floor.to_integer().to_u64().expect("q < 1");
        Draw::Cut { cut, rest: (!rest.is_zero()).then_some(rest) }
    }

    fn sample(&self, rng: &mut Xoshiro256PlusPlus) -> bool {
        match self {
            Draw::Closed => false,
            Draw::Open => true,
            Draw::Cut { cut, rest } => {
                let x = rng.next_u64();
                if x != *cut {
                    return x < *cut;
                }
                match rest {
                    None => false,
                    Some(r) => Draw::new(r).sample(rng),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    same: u64,
    cross: u64,
    /// Samples where exactly one indicator holds, split by which one.
    only_same: u64,
    only_cross: u64,
    samples: u64,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        self.same += o.same;
        self.cross += o.cross;
        self.only_same += o.only_same;
        self.only_cross += o.only_cross;
        self.samples += o.samples;
    }

    fn estimate(&self, seed: u64, early_stopped: bool) -> McEstimate {
        let n = self.samples as f64;
        let diff = self.only_same as f64 - self.only_cross as f64;
        let mean = diff / n;
        let sq = (self.only_same + self.only_cross) as f64;
        let var = if self.samples > 1 { ((sq - diff * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        McEstimate {
            p_same_hat: self.same as f64 / n,
            p_cross_hat: self.cross as f64 / n,
            gap_hat: mean,
            std_error: (var / n).sqrt(),
            samples: self.samples,
            seed,
            early_stopped,
            rng: RNG_NAME,
        }
    }
}

struct Sampler {
    model: Model,
    n: usize,
    edges: Vec<(usize, usize, Draw)>,
    posts: Vec<usize>,
    u: usize,
    v: usize,
    dsu: Dsu,
}

impl Sampler {
    fn new(b: &BunkbedInstance, model: Model) -> Sampler {
        let n = b.base.vertex_count();
        Sampler {
            model,
            n,
            edges: b.base.edges().iter().map(|e| (e.u, e.v, Draw::new(&e.p))).collect(),
            posts: b.transversal.iter().copied().collect(),
            u: b.pole_u,
            v: b.pole_v,
            dsu: Dsu::new(2 * n),
        }
    }

    fn run(&mut self, rng: &mut Xoshiro256PlusPlus, samples: u64, tally: &mut Tally) {
        let n = self.n;
        for _ in 0..samples {
            self.dsu.reset();
            for &w in &self.posts {
                self.dsu.union(w, w + n);
            }
            match self.model {
                Model::Standard => {
                    for (a, b, draw) in &self.edges {
                        if draw.sample(rng) {
                            self.dsu.union(*a, *b);
                        }
                        if draw.sample(rng) {
                            self.dsu.union(a + n, b + n);
                        }
                    }
                }
                Model::Alternative => {
                    let mut bits = 0u64;
                    for (i, (a, b, _)) in self.edges.iter().enumerate() {
                        if i % 64 == 0 {
                            bits = rng.next_u64();
                        }
                        let shift = if bits >> (i % 64) & 1 == 0 { 0 } else { n };
                        self.dsu.union(a + shift, b + shift);
                    }
                }
            }
            let root = self.dsu.find(self.u);
            let same = self.dsu.find(self.v) == root;
            let cross = self.dsu.find(self.v + n) == root;
            tally.same += same as u64;
            tally.cross += cross as u64;
            tally.only_same += (same && !cross) as u64;
            tally.only_cross += (cross && !same) as u64;
            tally.samples += 1;
        }
    }
}

/// Sequential estimate; bit-identical for a fixed seed.
pub fn mc_gap(b: &BunkbedInstance, model: Model, n_samples: u64, seed: u64) -> McEstimate {
    let samples = n_samples.max(1);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut tally = Tally::default();
    Sampler::new(b, model).run(&mut rng, samples, &mut tally);
    tally.estimate(seed, false)
}

pub fn mc_gap_standard(b: &BunkbedInstance, n_samples: u64, seed: u64) -> McEstimate {
    mc_gap(b, Model::Standard, n_samples, seed)
}

pub fn mc_gap_alternative(b: &BunkbedInstance, n_samples: u64, seed: u64) -> McEstimate {
    mc_gap(b, Model::Alternative, n_samples, seed)
}

/// Samples in batches of [`MIN_BATCH`] until `max_samples` or until
/// [`mc_early_stop_policy`] says stop.
pub fn mc_gap_with_early_stop(
    b: &BunkbedInstance,
    model: Model,
    max_samples: u64,
    seed: u64,
    threshold: f64,
) -> McEstimate {
    let max_samples = max_samples.max(1);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut tally = Tally::default();
    let mut sampler = Sampler::new(b, model);
    while tally.samples < max_samples {
        let batch = MIN_BATCH.min(max_samples - tally.samples);
        sampler.run(&mut rng, batch, &mut tally);
        if tally.samples < max_samples
            && mc_early_stop_policy(&tally.estimate(seed, false), threshold) == StopDecision::Stop
        {
            return tally.estimate(seed, true);
        }
    }
    tally.estimate(seed, false)
}

/// Splits the samples over `workers` threads. Worker `i` uses the seeded
/// stream advanced by `i` jumps, so results depend on the worker count.
pub fn mc_gap_parallel(b: &BunkbedInstance, model: Model, n_samples: u64, seed: u64, workers: usize) -> McEstimate {
    let workers = workers.max(1) as u64;
    let samples = n_samples.max(1);
    if workers == 1 {
        return mc_gap(b, model, samples, seed);
    }
    let mut streams = Vec::new();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    for _ in 0..workers {
        streams.push(rng.clone());
        rng.jump();
    }
    let (share, extra) = samples.div_rem(&workers);
    let mut total = Tally::default();
    thread::scope(|scope| {
        let handles: Vec<_> = streams
            .into_iter()
            .enumerate()
            .map(|(i, mut rng)| {
                let count = share + u64::from((i as u64) < extra);
                scope.spawn(move || {
                    let mut tally = Tally::default();
                    Sampler::new(b, model).run(&mut rng, count, &mut tally);
                    tally
                })
            })
            .collect();
        for h in handles {
            total.merge(&h.join().expect("sampler thread"));
        }
    });
    total.estimate(seed, false)
}
