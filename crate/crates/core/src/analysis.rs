//! Minimum achievable `I_N` per visibility and the chain length attaining it.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::{serialize_sig17, sig17};
use crate::quantum::i_n_analytic;
use crate::scalar::Scalar;

pub const DEFAULT_N_MAX: usize = 256;
pub const DEFAULT_STEP: f64 = 1e-3;
/// Largest visibility a scan accepts; at `v = 1` there is no finite optimum.
pub const MAX_SCAN_VISIBILITY: f64 = 1.0 - 1e-9;
pub const CSV_HEADER: &str = "visibility,optimal_n,min_i,i_n2,i_n8";

/// `argmin_{1≤N≤n_max} I_N(v)`, ties to the smaller `N`.
///
/// Fails with [`Error::NeedsLargerCap`] when `I_N` still decreases at
/// `n_max`, since the true minimiser then lies beyond the cap.
pub fn optimal_n<T: Scalar>(visibility: T, n_max: usize) -> Result<(usize, T)> {
    if n_max < 2 {
        return Err(Error::invalid("n_max must be at least 2"));
    }
    let mut best = (1, i_n_analytic(1, visibility)?);
    let mut prev = best.1;
    let mut last = best.1;
    for n in 2..=n_max {
        let value = i_n_analytic(n, visibility)?;
        if value < best.1 {
            best = (n, value);
        }
        prev = last;
        last = value;
    }
    if last < prev {
        return Err(Error::NeedsLargerCap { n_max });
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VisibilityScanRow {
    #[serde(serialize_with = "serialize_sig17")]
    pub visibility: f64,
    pub optimal_n: usize,
    #[serde(serialize_with = "serialize_sig17")]
    pub min_i: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub i_at_n2: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub i_at_n8: f64,
}

impl VisibilityScanRow {
    pub fn at(visibility: f64, n_max: usize) -> Result<Self> {
        let (optimal_n, min_i) = optimal_n(visibility, n_max)?;
        Ok(Self {
            visibility,
            optimal_n,
            min_i,
            i_at_n2: i_n_analytic(2, visibility)?,
            i_at_n8: i_n_analytic(8, visibility)?,
        })
    }
}

/// `steps` evenly spaced visibilities from `v_min` to `v_max` inclusive.
pub fn visibility_scan(v_min: f64, v_max: f64, steps: usize, n_max: usize) -> Result<Vec<VisibilityScanRow>> {
    if !(0.0 <= v_min && v_min < v_max && v_max <= MAX_SCAN_VISIBILITY) {
        return Err(Error::invalid(format!(
            "need 0 <= vmin < vmax <= 1-1e-9, got vmin={v_min}, vmax={v_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::invalid("a scan needs at least 2 steps"));
    }
    let last = steps - 1;
    (0..steps)
        .into_par_iter()
        .map(|k| {
            let v = if k == last {
                v_max
            } else {
                v_min + (v_max - v_min) * (k as f64 / last as f64)
            };
            VisibilityScanRow::at(v, n_max)
        })
        .collect()
}

/// Number of grid points for a scan at spacing `step`, endpoints included.
pub fn steps_for(v_min: f64, v_max: f64, step: f64) -> usize {
    ((v_max - v_min) / step).round() as usize + 1
}

pub fn scan_to_csv(rows: &[VisibilityScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sig17(r.visibility),
            r.optimal_n,
            sig17(r.min_i),
            sig17(r.i_at_n2),
            sig17(r.i_at_n8)
        );
    }
    out
}
