//! Seeded sampling of trials `(a, b, x, y)`.
//!
//! Random numbers come from ChaCha8 keyed by the 64-bit seed (expanded with
//! `SeedableRng::seed_from_u64`), with the trial index as the stream number.
//! Every trial starts at word 0 of its own stream and consumes exactly two
//! `u64` words:
//!
//! 1. `u₁` picks the setting cell `⌊u₁·N²/2⁶⁴⌋ = a_index·N + b_index`;
//! 2. `u₂` gives `u = (u₂ >> 11)·2⁻⁵³ ∈ [0, 1)`, and the outcome is the first
//!    `(x, y)` in the order `(+,+), (+,−), (−,+), (−,−)` whose cumulative Born
//!    probability exceeds `u`.
//!
//! Trials are therefore independent of how a run is split into shards.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::{born_table, chained_family, entangled_state};
use crate::table::ConditionalTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub a: i64,
    pub b: i64,
    pub x: i8,
    pub y: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialDataset {
    pub n: usize,
    pub visibility: f64,
    pub seed: u64,
    pub records: Vec<TrialRecord>,
}

/// Per-trial sampler for a fixed `(a, b) → (x, y)` table.
#[derive(Clone, Debug)]
pub struct TrialSampler {
    alice: Vec<i64>,
    bob: Vec<i64>,
    cumulative: Vec<[f64; 4]>,
    base: ChaCha8Rng,
}

fn outcome_label(index: usize) -> i8 {
    if index == 0 {
        1
    } else {
        -1
    }
}

impl TrialSampler {
    /// Sampler for the chained family on the visibility-`v` state.
    pub fn new(n: usize, visibility: f64, seed: u64) -> Result<Self> {
        let table = born_table(&entangled_state(visibility)?, &chained_family(n)?)?;
        Self::from_table(&table, seed)
    }

    /// Sampler for any `(A, B) → (X, Y)` table with binary outcomes `[+1, −1]`.
    pub fn from_table(table: &ConditionalTable<f64>, seed: u64) -> Result<Self> {
        if table.inputs().len() != 2
            || table.outputs().len() != 2
            || table.outputs().iter().any(|o| o.labels != [1, -1])
        {
            return Err(Error::invalid("sampler needs an (A,B)→(X,Y) table with ±1 outcomes"));
        }
        let cumulative = (0..table.input_count())
            .map(|i| {
                let s = table.slice(i);
                let mut c = [0.0; 4];
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += s[k];
                    c[k] = acc;
                }
                c[3] = f64::INFINITY;
                c
            })
            .collect();
        Ok(Self {
            alice: table.inputs()[0].labels.clone(),
            bob: table.inputs()[1].labels.clone(),
            cumulative,
            base: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn sample(&self, trial_index: u64) -> TrialRecord {
        let (ai, bi, o) = self.sample_indices(trial_index);
        TrialRecord {
            trial_index,
            a: self.alice[ai],
            b: self.bob[bi],
            x: outcome_label(o / 2),
            y: outcome_label(o % 2),
        }
    }

    fn sample_indices(&self, trial_index: u64) -> (usize, usize, usize) {
        let mut rng = self.base.clone();
        rng.set_stream(trial_index);
        rng.set_word_pos(0);
        let cells = (self.alice.len() * self.bob.len()) as u128;
        let cell = ((rng.next_u64() as u128 * cells) >> 64) as usize;
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let cum = &self.cumulative[cell];
        let o = cum.iter().position(|&c| u < c).unwrap_or(3);
        (cell / self.bob.len(), cell % self.bob.len(), o)
    }
}

fn check_run(n: usize, visibility: f64, trials: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("chain length N must be at least 1"));
    }
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::invalid(format!("visibility {visibility} outside [0, 1]")));
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    Ok(())
}

pub fn simulate(n: usize, visibility: f64, trials: u64, seed: u64) -> Result<TrialDataset> {
    simulate_sharded(n, visibility, trials, seed, 1)
}

/// Same output as [`simulate`], with contiguous trial ranges generated on
/// `shards` threads and concatenated in order.
pub fn simulate_sharded(
    n: usize,
    visibility: f64,
    trials: u64,
    seed: u64,
    shards: usize,
) -> Result<TrialDataset> {
    check_run(n, visibility, trials)?;
    if shards == 0 {
        return Err(Error::invalid("need at least one shard"));
    }
    let sampler = TrialSampler::new(n, visibility, seed)?;
    let per = trials.div_ceil(shards as u64);
    let ranges: Vec<(u64, u64)> = (0..shards as u64)
        .map(|s| (s * per, ((s + 1) * per).min(trials)))
        .filter(|(lo, hi)| lo < hi)
        .collect();
    let parts: Vec<Vec<TrialRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(lo, hi)| {
                let sampler = &sampler;
                scope.spawn(move || (lo..hi).map(|t| sampler.sample(t)).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("shard thread panicked"))
            .collect()
    });
    Ok(TrialDataset {
        n,
        visibility,
        seed,
        records: parts.into_iter().flatten().collect(),
    })
}

/// Outcome counts per setting cell, the sufficient statistic for estimation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCounts {
    pub alice: Vec<i64>,
    pub bob: Vec<i64>,
    /// `counts[a_index·|B| + b_index][x_index·2 + y_index]`.
    pub counts: Vec<[u64; 4]>,
}

impl CellCounts {
    pub fn empty(n: usize) -> Self {
        Self {
            alice: (0..n as i64).map(|k| 2 * k).collect(),
            bob: (0..n as i64).map(|k| 2 * k + 1).collect(),
            counts: vec![[0; 4]; n * n],
        }
    }

    pub fn from_records(n: usize, records: &[TrialRecord]) -> Result<Self> {
        let mut c = Self::empty(n);
        for r in records {
            let ai = c.alice.iter().position(|&l| l == r.a);
            let bi = c.bob.iter().position(|&l| l == r.b);
            let (Some(ai), Some(bi)) = (ai, bi) else {
                return Err(Error::invalid(format!(
                    "trial {} has settings (a={}, b={}) outside the N={n} family",
                    r.trial_index, r.a, r.b
                )));
            };
            let xi = outcome_index(r.x, r.trial_index)?;
            let yi = outcome_index(r.y, r.trial_index)?;
            c.counts[ai * n + bi][xi * 2 + yi] += 1;
        }
        Ok(c)
    }

    pub fn cell(&self, a: i64, b: i64) -> Option<&[u64; 4]> {
        let ai = self.alice.iter().position(|&l| l == a)?;
        let bi = self.bob.iter().position(|&l| l == b)?;
        Some(&self.counts[ai * self.bob.len() + bi])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

fn outcome_index(v: i8, trial: u64) -> Result<usize> {
    match v {
        1 => Ok(0),
        -1 => Ok(1),
        _ => Err(Error::invalid(format!("trial {trial} has outcome {v}; outcomes are ±1"))),
    }
}

/// Streams `trials` samples into per-cell counts without storing records.
/// Identical to `CellCounts::from_records` on the output of [`simulate`].
pub fn tally(n: usize, visibility: f64, trials: u64, seed: u64) -> Result<CellCounts> {
    check_run(n, visibility, trials)?;
    let sampler = TrialSampler::new(n, visibility, seed)?;
    let cells = n * n;
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![[0u64; 4]; cells],
            |mut acc, t| {
                let (ai, bi, o) = sampler.sample_indices(t);
                acc[ai * n + bi][o] += 1;
                acc
            },
        )
        .reduce(
            || vec![[0u64; 4]; cells],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    for k in 0..4 {
                        x[k] += y[k];
                    }
                }
                a
            },
        );
    let mut out = CellCounts::empty(n);
    out.counts = counts;
    Ok(out)
}
