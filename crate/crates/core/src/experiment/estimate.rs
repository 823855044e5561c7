//! Estimation of `I_N` from trial counts.
//!
//! Each of the `2N` terms is a binomial proportion: `P(X≠Y | a, b)` for the
//! adjacent pairs and `P(X=Y | 0, 2N−1)` for the wrap-around pair. Each term
//! gets a Wilson score interval at the requested level, and the interval for
//! `I_N` adds the endpoints, which is conservative.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::simulate::{CellCounts, TrialDataset};
use crate::error::{Error, Result};
use crate::fmt::serialize_sig17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// Counts `x = y` (the wrap-around pair).
    Equal,
    /// Counts `x ≠ y` (adjacent pairs).
    Unequal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermEstimate {
    pub a: i64,
    pub b: i64,
    pub kind: TermKind,
    pub count: u64,
    pub successes: u64,
    #[serde(serialize_with = "serialize_sig17")]
    pub estimate: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub low: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainedEstimate {
    #[serde(serialize_with = "serialize_sig17")]
    pub i_n_hat: f64,
    pub per_term: Vec<TermEstimate>,
    #[serde(serialize_with = "serialize_sig17")]
    pub confidence_low: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub confidence_high: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub confidence_level: f64,
}

impl ChainedEstimate {
    pub fn contains(&self, value: f64) -> bool {
        self.confidence_low <= value && value <= self.confidence_high
    }
}

/// Wilson score interval for `successes` out of `count` at normal quantile `z`.
pub fn wilson_interval(successes: u64, count: u64, z: f64) -> (f64, f64) {
    let n = count as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn estimate(dataset: &TrialDataset, confidence_level: f64) -> Result<ChainedEstimate> {
    if dataset.records.is_empty() {
        return Err(Error::invalid("dataset has no trials"));
    }
    estimate_counts(&CellCounts::from_records(dataset.n, &dataset.records)?, confidence_level)
}

pub fn estimate_counts(counts: &CellCounts, confidence_level: f64) -> Result<ChainedEstimate> {
    if !(confidence_level > 0.0 && confidence_level < 1.0) {
        return Err(Error::invalid("confidence level must lie in (0, 1)"));
    }
    let n = counts.alice.len() as i64;
    let z = Normal::standard().inverse_cdf(0.5 + confidence_level / 2.0);
    let mut terms = vec![(0, 2 * n - 1, TermKind::Equal)];
    for a in (0..2 * n - 1).step_by(2) {
        for b in [a - 1, a + 1] {
            if (1..2 * n).contains(&b) {
                terms.push((a, b, TermKind::Unequal));
            }
        }
    }
    let mut per_term = Vec::with_capacity(terms.len());
    for (a, b, kind) in terms {
        let cell = counts
            .cell(a, b)
            .ok_or_else(|| Error::invalid(format!("counts have no cell (a={a}, b={b})")))?;
        let count: u64 = cell.iter().sum();
        if count == 0 {
            return Err(Error::InsufficientData { a, b });
        }
        let equal = cell[0] + cell[3];
        let successes = match kind {
            TermKind::Equal => equal,
            TermKind::Unequal => count - equal,
        };
        let estimate = successes as f64 / count as f64;
        let (low, high) = wilson_interval(successes, count, z);
        per_term.push(TermEstimate {
            a,
            b,
            kind,
            count,
            successes,
            estimate,
            low: low.min(estimate),
            high: high.max(estimate),
        });
    }
    Ok(ChainedEstimate {
        i_n_hat: per_term.iter().map(|t| t.estimate).sum(),
        confidence_low: per_term.iter().map(|t| t.low).sum(),
        confidence_high: per_term.iter().map(|t| t.high).sum(),
        confidence_level,
        per_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::simulate::{simulate, TrialRecord};
    use approx::assert_abs_diff_eq;

    #[test]
    fn wilson_known_values() {
        // 50/100 at z = 1.959964: centre 0.5, half-width z/(1+z²/n)·√(0.25/n + z²/4n²).
        let (lo, hi) = wilson_interval(50, 100, 1.959_963_984_540_054);
        assert_abs_diff_eq!(lo, 0.403_831_530_7, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 0.596_168_469_3, epsilon = 1e-9);
        let (lo, hi) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.2 && hi < 0.35);
    }

    fn record(t: u64, a: i64, b: i64, x: i8, y: i8) -> TrialRecord {
        TrialRecord { trial_index: t, a, b, x, y }
    }

    #[test]
    fn zero_terms() {
        // N=2: adjacent (0,1), (2,1), (2,3) agree; wrap (0,3) disagrees.
        let records = vec![
            record(0, 0, 1, 1, 1),
            record(1, 2, 1, -1, -1),
            record(2, 2, 3, 1, 1),
            record(3, 0, 3, 1, -1),
        ];
        let d = TrialDataset { n: 2, visibility: 1.0, seed: 0, records };
        let e = estimate(&d, 0.95).unwrap();
        assert_eq!(e.i_n_hat, 0.0);
        assert_eq!(e.per_term.len(), 4);
        assert!(e.confidence_low <= e.i_n_hat && e.i_n_hat <= e.confidence_high);
    }

    #[test]
    fn empty_cell_is_reported() {
        let d = TrialDataset {
            n: 2,
            visibility: 1.0,
            seed: 0,
            records: vec![record(0, 0, 1, 1, 1)],
        };
        let err = estimate(&d, 0.95).unwrap_err();
        assert_eq!(err, Error::InsufficientData { a: 0, b: 3 });
        assert!(estimate(&simulate(2, 1.0, 100, 1).unwrap(), 1.0).is_err());
    }

    #[test]
    fn single_setting_chain_has_two_terms_on_one_cell() {
        let e = estimate(&simulate(1, 0.7, 2000, 5).unwrap(), 0.9).unwrap();
        assert_eq!(e.per_term.len(), 2);
        assert_abs_diff_eq!(e.i_n_hat, 1.0, epsilon = 1e-12);
    }
}
