//! Noncontextual hidden-variable model of pairwise bunching.
//!
//! Each particle carries an independent uniform `λ ∈ (0,1)`. A beam splitter fed with particles
//! `j` (port 1) and `k` (port 2) sends both to output mode 1 when `λ_j + δ > λ_k` and to mode 2
//! otherwise. With `δ = 0` every pairwise event has probability 1/2, matching quantum bunching;
//! a positive bias lifts the sum of the three canonical events to `3/2 + δ - δ²/2`.
//!
//! # Sampling streams
//!
//! Monte Carlo runs split the budget into chunks of [`CHUNK_SIZE`] trials. Chunk `i` of a stream
//! with key `(seed, tag)` draws from ChaCha8 keyed by the little-endian bytes of `seed` and `tag`
//! (remaining key bytes zero), on ChaCha stream `i`. Counts are integers, so the reduced estimate
//! is bit-identical however the chunks are scheduled across threads.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bunching::{EventSpec, Particle, Port};
use crate::numfmt::sig12;
use crate::{Error, Result};

pub const CHUNK_SIZE: u64 = 1 << 16;

/// Stream tag of the joint-pattern sampler; single events use [`event_stream_tag`].
const JOINT_STREAM_TAG: u64 = 0;

/// Per-particle hidden variables, each strictly inside `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenAssignment {
    lambda: [f64; 3],
}

impl HiddenAssignment {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for x in [a, b, c] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::Config(format!("hidden variable {x} outside (0, 1)")));
            }
        }
        Ok(HiddenAssignment { lambda: [a, b, c] })
    }

    pub fn get(&self, p: Particle) -> f64 {
        self.lambda[p.index()]
    }
}

/// Bias `δ ∈ [0, 1]` in the routing rule `λ_port1 + δ > λ_port2`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct BiasParameter(f64);

impl BiasParameter {
    pub const ZERO: BiasParameter = BiasParameter(0.0);

    pub fn new(delta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&delta) {
            Ok(BiasParameter(delta))
        } else {
            Err(Error::Delta(delta))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Where both particles leave the beam splitter: mode 1 is occupation `(2,0)`, mode 2 is `(0,2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutputMode {
    Mode1,
    Mode2,
}

impl OutputMode {
    /// The output realizing an event: reflection of the port-1 particle is mode 1.
    pub fn for_event(event: &EventSpec) -> OutputMode {
        match event.reflected_port() {
            Port::First => OutputMode::Mode1,
            Port::Second => OutputMode::Mode2,
        }
    }
}

/// Three independent `Uniform(0,1)` draws for `a`, `b`, `c`, in that order.
pub fn sample_assignment<R: Rng + ?Sized>(rng: &mut R) -> HiddenAssignment {
    HiddenAssignment {
        lambda: [rng.sample(Open01), rng.sample(Open01), rng.sample(Open01)],
    }
}

/// Deterministic beam-splitter rule. Equality `λ_port1 + δ = λ_port2` goes to mode 2.
pub fn bs_outcome(lambda_port1: f64, lambda_port2: f64, delta: BiasParameter) -> OutputMode {
    if lambda_port1 + delta.0 > lambda_port2 {
        OutputMode::Mode1
    } else {
        OutputMode::Mode2
    }
}

pub fn event_indicator(h: &HiddenAssignment, event: &EventSpec, delta: BiasParameter) -> bool {
    bs_outcome(h.get(event.port1()), h.get(event.port2()), delta) == OutputMode::for_event(event)
}

/// `P(λ₁ + δ > λ₂) = 1 - (1 - δ)²/2` for independent uniforms.
pub fn mode1_probability(delta: BiasParameter) -> f64 {
    let d = delta.0;
    0.5 + d - 0.5 * d * d
}

pub fn analytic_event_prob(event: &EventSpec, delta: BiasParameter) -> f64 {
    match OutputMode::for_event(event) {
        OutputMode::Mode1 => mode1_probability(delta),
        OutputMode::Mode2 => {
            let d = 1.0 - delta.0;
            0.5 * d * d
        }
    }
}

pub fn analytic_event_probs(delta: BiasParameter) -> [f64; 3] {
    EventSpec::canonical().map(|e| analytic_event_prob(&e, delta))
}

/// Sum over the canonical events, `2 p₊ + p₋ = 3/2 + δ - δ²/2`.
pub fn analytic_sum(delta: BiasParameter) -> f64 {
    analytic_event_probs(delta).iter().sum()
}

/// Truth values of `(a̲b, b̲c, ac̲)` under a single assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventPattern(pub [bool; 3]);

impl EventPattern {
    pub fn of(h: &HiddenAssignment, delta: BiasParameter) -> Self {
        EventPattern(EventSpec::canonical().map(|e| event_indicator(h, &e, delta)))
    }

    /// `4·a̲b + 2·b̲c + ac̲`, so `(F,F,F)` is 0 and `(T,T,T)` is 7.
    pub fn index(self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < 8, "pattern index {i} out of range");
        EventPattern([i & 4 != 0, i & 2 != 0, i & 1 != 0])
    }

    pub fn true_count(self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// e.g. `TTF`
    pub fn label(self) -> String {
        self.0.iter().map(|&b| if b { 'T' } else { 'F' }).collect()
    }
}

/// Monte Carlo estimate of one probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// `sqrt(p̂(1 - p̂) / n)`
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_count(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        McEstimate {
            estimate: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }
}

/// Generator for chunk `chunk` of the stream keyed by `(seed, tag)`.
pub fn chunk_rng(seed: u64, tag: u64, chunk: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(chunk);
    rng
}

/// Distinct nonzero tag per event, so each event is estimated from its own stream.
pub fn event_stream_tag(event: &EventSpec) -> u64 {
    let p1 = event.port1().index() as u64;
    let p2 = event.port2().index() as u64;
    let r = event.reflected().index() as u64;
    1 + (p1 * 3 + p2) * 3 + r
}

/// Runs `trial` over `samples` draws split into chunks, reducing per-chunk accumulators with
/// `merge`. The result depends only on `(seed, tag, samples)`.
fn chunked<A, F, M>(samples: u64, seed: u64, tag: u64, init: A, trial: F, merge: M) -> A
where
    A: Clone + Send + Sync,
    F: Fn(&mut A, &HiddenAssignment) + Sync,
    M: Fn(A, A) -> A + Sync,
{
    let chunks = samples.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let len = CHUNK_SIZE.min(samples - i * CHUNK_SIZE);
            let mut rng = chunk_rng(seed, tag, i);
            let mut acc = init.clone();
            for _ in 0..len {
                let h = sample_assignment(&mut rng);
                trial(&mut acc, &h);
            }
            acc
        })
        .reduce(|| init.clone(), &merge)
}

pub fn monte_carlo_event_prob(
    event: &EventSpec,
    delta: BiasParameter,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let hits = chunked(
        samples,
        seed,
        event_stream_tag(event),
        0u64,
        |acc, h| *acc += u64::from(event_indicator(h, event, delta)),
        |a, b| a + b,
    );
    Ok(McEstimate::from_count(hits, samples))
}

/// Estimates for the canonical events `[a̲b, b̲c, ac̲]`, each on its own stream.
pub fn monte_carlo_event_probs(
    delta: BiasParameter,
    samples: u64,
    seed: u64,
) -> Result<[McEstimate; 3]> {
    let [ab, bc, ac] = EventSpec::canonical();
    Ok([
        monte_carlo_event_prob(&ab, delta, samples, seed)?,
        monte_carlo_event_prob(&bc, delta, samples, seed)?,
        monte_carlo_event_prob(&ac, delta, samples, seed)?,
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointMethod {
    /// Enumerate the six orderings of `(λ_a, λ_b, λ_c)`; only valid at `δ = 0`.
    Exact,
    MonteCarlo {
        samples: u64,
        seed: u64,
    },
}

/// Distribution over the eight [`EventPattern`]s, indexed by [`EventPattern::index`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternDistribution {
    pub delta: f64,
    pub probabilities: [f64; 8],
    /// Raw counts, for Monte Carlo distributions.
    pub counts: Option<[u64; 8]>,
    pub samples: Option<u64>,
}

impl PatternDistribution {
    pub fn probability(&self, pattern: EventPattern) -> f64 {
        self.probabilities[pattern.index()]
    }

    /// Marginal probability of canonical event `event` (0 = a̲b, 1 = b̲c, 2 = ac̲).
    pub fn marginal(&self, event: usize) -> f64 {
        (0..8)
            .filter(|&i| EventPattern::from_index(i).0[event])
            .map(|i| self.probabilities[i])
            .sum()
    }

    /// Probability that exactly `k` of the three events hold.
    pub fn exactly(&self, k: usize) -> f64 {
        (0..8)
            .filter(|&i| EventPattern::from_index(i).true_count() == k)
            .map(|i| self.probabilities[i])
            .sum()
    }

    pub fn expected_true_count(&self) -> f64 {
        (0..8)
            .map(|i| EventPattern::from_index(i).true_count() as f64 * self.probabilities[i])
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

pub fn joint_pattern_distribution(
    delta: BiasParameter,
    method: JointMethod,
) -> Result<PatternDistribution> {
    match method {
        JointMethod::Exact => {
            if delta.0 != 0.0 {
                return Err(Error::ExactRequiresZeroDelta(delta.0));
            }
            // With δ = 0 only the relative order of the three variables matters, and each of
            // the 3! orderings has probability 1/6.
            let mut probabilities = [0.0; 8];
            for ranks in PERMUTATIONS_3 {
                let lambda = ranks.map(|r| (r as f64 + 1.0) / 4.0);
                let h = HiddenAssignment::new(lambda[0], lambda[1], lambda[2])?;
                probabilities[EventPattern::of(&h, delta).index()] += 1.0 / 6.0;
            }
            Ok(PatternDistribution {
                delta: delta.0,
                probabilities,
                counts: None,
                samples: None,
            })
        }
        JointMethod::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::NoSamples);
            }
            let counts = chunked(
                samples,
                seed,
                JOINT_STREAM_TAG,
                [0u64; 8],
                |acc, h| acc[EventPattern::of(h, delta).index()] += 1,
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
            Ok(PatternDistribution {
                delta: delta.0,
                probabilities: counts.map(|c| c as f64 / samples as f64),
                counts: Some(counts),
                samples: Some(samples),
            })
        }
    }
}

const PERMUTATIONS_3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// One line of a δ sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub analytic_sum: f64,
    pub mc_sum: f64,
    /// Standard error of `mc_sum`; the three event streams are independent.
    pub mc_stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

pub const SWEEP_CSV_HEADER: &str = "delta,analytic_sum,mc_sum,mc_stderr,n_samples,seed";

/// Analytic and Monte Carlo event sums on every grid point. All points reuse the same per-event
/// streams, so neighbouring rows differ only through `δ`.
pub fn sweep_sum(grid: &[BiasParameter], samples: u64, seed: u64) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    grid.iter()
        .map(|&delta| {
            let mc = monte_carlo_event_probs(delta, samples, seed)?;
            Ok(SweepRow {
                delta: delta.value(),
                analytic_sum: analytic_sum(delta),
                mc_sum: mc.iter().map(|e| e.estimate).sum(),
                mc_stderr: mc.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt(),
                n_samples: samples,
                seed,
            })
        })
        .collect()
}

/// CSV with [`SWEEP_CSV_HEADER`] and 12 significant digits per float.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig12(r.delta),
            sig12(r.analytic_sum),
            sig12(r.mc_sum),
            sig12(r.mc_stderr),
            r.n_samples,
            r.seed
        ));
    }
    out
}
