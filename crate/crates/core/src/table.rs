//! Finite conditional distributions `P(outputs | inputs)` over labelled axes.
//!
//! Probabilities are stored densely in row-major order over
//! `(inputs..., outputs...)`, with the last output axis varying fastest. A
//! table is therefore a sequence of *slices*, one per input tuple, each a
//! normalized distribution over the output tuples.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::{serialize_sig17_vec, sig17};
use crate::scalar::Scalar;

/// Slices of ingested tables must sum to one within this tolerance.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A named axis with integer labels, e.g. `A ∈ {0, 2, 4}` or `X ∈ {+1, -1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub labels: Vec<i64>,
}

impl Axis {
    pub fn new(name: impl Into<String>, labels: Vec<i64>) -> Self {
        Self {
            name: name.into(),
            labels,
        }
    }

    /// Binary outcome axis with labels `[+1, -1]` (index 0 is `+1`).
    pub fn binary(name: impl Into<String>) -> Self {
        Self::new(name, vec![1, -1])
    }

    /// Axis with labels `0..len`.
    pub fn range(name: impl Into<String>, len: usize) -> Self {
        Self::new(name, (0..len as i64).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: i64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    fn validate(&self) -> Result<()> {
        if self.labels.is_empty() {
            return Err(Error::invalid(format!("axis {} has no labels", self.name)));
        }
        for (i, l) in self.labels.iter().enumerate() {
            if self.labels[..i].contains(l) {
                return Err(Error::invalid(format!(
                    "axis {} repeats label {l}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Row-major mixed-radix indexing over a list of axes.
pub(crate) fn flat_index(axes: &[Axis], index: &[usize]) -> usize {
    debug_assert_eq!(axes.len(), index.len());
    axes.iter()
        .zip(index)
        .fold(0, |acc, (axis, &i)| acc * axis.len() + i)
}

pub(crate) fn unflatten(axes: &[Axis], mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; axes.len()];
    for (slot, axis) in out.iter_mut().zip(axes).rev() {
        *slot = flat % axis.len();
        flat /= axis.len();
    }
    out
}

fn product_len(axes: &[Axis]) -> usize {
    axes.iter().map(Axis::len).product()
}

/// A conditional distribution `P(outputs | inputs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalTable<T> {
    inputs: Vec<Axis>,
    outputs: Vec<Axis>,
    probabilities: Vec<T>,
    normalization_error: T,
}

impl<T: Scalar> ConditionalTable<T> {
    /// Validates and stores a table.
    ///
    /// Entries may be slightly negative and slices may miss unit mass by up
    /// to [`NORMALIZATION_TOLERANCE`]; such tables are clamped and renormalized
    /// per slice, and the raw deviation is kept in
    /// [`normalization_error`](Self::normalization_error).
    pub fn new(inputs: Vec<Axis>, outputs: Vec<Axis>, probabilities: Vec<T>) -> Result<Self> {
        for axis in inputs.iter().chain(&outputs) {
            axis.validate()?;
        }
        let n_in = product_len(&inputs);
        let n_out = product_len(&outputs);
        if probabilities.len() != n_in * n_out {
            return Err(Error::invalid(format!(
                "table needs {} probabilities, got {}",
                n_in * n_out,
                probabilities.len()
            )));
        }
        let tol = T::tol(NORMALIZATION_TOLERANCE);
        let mut probabilities = probabilities;
        let mut worst = T::zero();
        for (slice_idx, slice) in probabilities.chunks_mut(n_out).enumerate() {
            let mut sum = T::zero();
            for p in slice.iter() {
                if !p.is_finite() {
                    return Err(Error::invalid("table contains a non-finite entry"));
                }
                if *p < -tol || *p > T::one() + tol {
                    return Err(Error::invalid(format!(
                        "entry {p} outside [0, 1] in input slice {slice_idx}"
                    )));
                }
                worst = worst.max(-*p);
                sum += *p;
            }
            let dev = (sum - T::one()).abs();
            if dev > tol {
                return Err(Error::invalid(format!(
                    "input slice {slice_idx} sums to {sum}, not 1"
                )));
            }
            worst = worst.max(dev);
            let has_negative = slice.iter().any(|p| *p < T::zero());
            // Rounding-level deviations are left alone so re-ingesting a
            // serialized table reproduces it bit for bit.
            if has_negative || dev > T::tol(1e-14) {
                let mut clamped_sum = T::zero();
                for p in slice.iter_mut() {
                    *p = p.max(T::zero());
                    clamped_sum += *p;
                }
                for p in slice.iter_mut() {
                    *p /= clamped_sum;
                }
            }
        }
        Ok(Self {
            inputs,
            outputs,
            probabilities,
            normalization_error: worst,
        })
    }

    /// Builds a table by evaluating `f(input_index, output_index)` at every cell.
    pub fn from_fn<F>(inputs: Vec<Axis>, outputs: Vec<Axis>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize], &[usize]) -> T,
    {
        let n_in = product_len(&inputs);
        let n_out = product_len(&outputs);
        let mut probs = Vec::with_capacity(n_in * n_out);
        for i in 0..n_in {
            let ii = unflatten(&inputs, i);
            for o in 0..n_out {
                probs.push(f(&ii, &unflatten(&outputs, o)));
            }
        }
        Self::new(inputs, outputs, probs)
    }

    pub fn inputs(&self) -> &[Axis] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Axis] {
        &self.outputs
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    /// Largest deviation from normalization seen when the table was ingested.
    pub fn normalization_error(&self) -> T {
        self.normalization_error
    }

    /// Number of input tuples.
    pub fn input_count(&self) -> usize {
        product_len(&self.inputs)
    }

    /// Number of output tuples.
    pub fn output_count(&self) -> usize {
        product_len(&self.outputs)
    }

    pub fn input_flat(&self, input: &[usize]) -> usize {
        flat_index(&self.inputs, input)
    }

    pub fn output_flat(&self, output: &[usize]) -> usize {
        flat_index(&self.outputs, output)
    }

    pub fn input_tuple(&self, flat: usize) -> Vec<usize> {
        unflatten(&self.inputs, flat)
    }

    pub fn output_tuple(&self, flat: usize) -> Vec<usize> {
        unflatten(&self.outputs, flat)
    }

    /// The output distribution for one input tuple (by flat index).
    pub fn slice(&self, input_flat: usize) -> &[T] {
        let n = self.output_count();
        &self.probabilities[input_flat * n..(input_flat + 1) * n]
    }

    pub fn get(&self, input: &[usize], output: &[usize]) -> T {
        self.slice(self.input_flat(input))[self.output_flat(output)]
    }

    /// Looks up a probability by axis labels rather than positions.
    pub fn get_by_labels(&self, input: &[i64], output: &[i64]) -> Option<T> {
        let ii = labels_to_index(&self.inputs, input)?;
        let oo = labels_to_index(&self.outputs, output)?;
        Some(self.get(&ii, &oo))
    }

    /// Marginal over the output axes listed in `keep` (in that order).
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        for (i, &k) in keep.iter().enumerate() {
            if k >= self.outputs.len() || keep[..i].contains(&k) {
                return Err(Error::invalid(format!("bad output axis selection {keep:?}")));
            }
        }
        let kept: Vec<Axis> = keep.iter().map(|&k| self.outputs[k].clone()).collect();
        let n_kept = product_len(&kept);
        let n_out = self.output_count();
        let targets: Vec<usize> = (0..n_out)
            .map(|o| {
                let full = self.output_tuple(o);
                let sub: Vec<usize> = keep.iter().map(|&k| full[k]).collect();
                flat_index(&kept, &sub)
            })
            .collect();
        let mut probs = vec![T::zero(); self.input_count() * n_kept];
        for i in 0..self.input_count() {
            let dst = &mut probs[i * n_kept..(i + 1) * n_kept];
            for (o, p) in self.slice(i).iter().enumerate() {
                dst[targets[o]] += *p;
            }
        }
        Self::new(self.inputs.clone(), kept, probs)
    }

    /// Restricts input axis `axis` to position `index` and drops that axis.
    pub fn fix_input(&self, axis: usize, index: usize) -> Result<Self> {
        if axis >= self.inputs.len() || index >= self.inputs[axis].len() {
            return Err(Error::invalid("input axis or index out of range"));
        }
        let mut inputs = self.inputs.clone();
        inputs.remove(axis);
        let n_out = self.output_count();
        let mut probs = Vec::with_capacity(product_len(&inputs) * n_out);
        for i in 0..product_len(&inputs) {
            let mut full = unflatten(&inputs, i);
            full.insert(axis, index);
            probs.extend_from_slice(self.slice(self.input_flat(&full)));
        }
        Self::new(inputs, self.outputs.clone(), probs)
    }

    /// Appends a trivial input axis and a trivial output axis (one label each).
    pub fn with_trivial_party(&self, input_name: &str, output_name: &str) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        inputs.push(Axis::new(input_name, vec![0]));
        let mut outputs = self.outputs.clone();
        outputs.push(Axis::new(output_name, vec![0]));
        Self::new(inputs, outputs, self.probabilities.clone())
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Result<ConditionalTable<U>> {
        ConditionalTable::new(
            self.inputs.clone(),
            self.outputs.clone(),
            self.probabilities
                .iter()
                .map(|p| U::lit(p.to_f64_lossy()))
                .collect(),
        )
    }
}

fn labels_to_index(axes: &[Axis], labels: &[i64]) -> Option<Vec<usize>> {
    if axes.len() != labels.len() {
        return None;
    }
    axes.iter().zip(labels).map(|(a, &l)| a.position(l)).collect()
}

#[derive(Serialize)]
struct TableJsonOut<'a> {
    input_axes: &'a [Axis],
    output_axes: &'a [Axis],
    #[serde(serialize_with = "serialize_sig17_vec")]
    probabilities: &'a [f64],
}

#[derive(Deserialize)]
struct TableJsonIn {
    input_axes: Vec<Axis>,
    output_axes: Vec<Axis>,
    probabilities: Vec<f64>,
}

impl ConditionalTable<f64> {
    /// JSON form: `{"input_axes":[{"name","labels"}...],"output_axes":[...],"probabilities":[...]}`
    /// with probabilities flattened row-major and written with 17 significant digits.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TableJsonOut {
            input_axes: &self.inputs,
            output_axes: &self.outputs,
            probabilities: &self.probabilities,
        })
        .expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TableJsonIn = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), e.to_string()))?;
        Self::new(raw.input_axes, raw.output_axes, raw.probabilities)
    }

    /// CSV with one row per full index tuple: axis labels then `probability`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self
            .inputs
            .iter()
            .chain(&self.outputs)
            .map(|a| a.name.as_str())
            .collect();
        let _ = writeln!(out, "{},probability", names.join(","));
        let n_out = self.output_count();
        for i in 0..self.input_count() {
            let ii = self.input_tuple(i);
            for o in 0..n_out {
                let oo = self.output_tuple(o);
                let labels: Vec<String> = ii
                    .iter()
                    .zip(&self.inputs)
                    .chain(oo.iter().zip(&self.outputs))
                    .map(|(&k, axis)| axis.labels[k].to_string())
                    .collect();
                let _ = writeln!(
                    out,
                    "{},{}",
                    labels.join(","),
                    sig17(self.probabilities[i * n_out + o])
                );
            }
        }
        out
    }

    /// Reads the CSV form back. Axis label order is taken from first
    /// appearance; `n_inputs` says how many leading columns are inputs.
    pub fn from_csv(text: &str, n_inputs: usize) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty table CSV"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols.last() != Some(&"probability") || n_inputs >= cols.len() {
            return Err(Error::parse(1, "header must list axes then `probability`"));
        }
        let n_axes = cols.len() - 1;
        let mut axes: Vec<Axis> = cols[..n_axes].iter().map(|n| Axis::new(*n, vec![])).collect();
        let mut rows = Vec::new();
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != cols.len() {
                return Err(Error::parse(ln + 1, "wrong number of fields"));
            }
            let mut labels = Vec::with_capacity(n_axes);
            for (axis, f) in axes.iter_mut().zip(&fields) {
                let l: i64 = f
                    .parse()
                    .map_err(|_| Error::parse(ln + 1, format!("bad label `{f}`")))?;
                if axis.position(l).is_none() {
                    axis.labels.push(l);
                }
                labels.push(l);
            }
            let p: f64 = fields[n_axes]
                .parse()
                .map_err(|_| Error::parse(ln + 1, "bad probability"))?;
            rows.push((labels, p));
        }
        let outputs = axes.split_off(n_inputs);
        let inputs = axes;
        let n_out = product_len(&outputs);
        let mut probs = vec![f64::NAN; product_len(&inputs) * n_out];
        for (labels, p) in rows {
            let ii = labels_to_index(&inputs, &labels[..n_inputs]).expect("label registered");
            let oo = labels_to_index(&outputs, &labels[n_inputs..]).expect("label registered");
            probs[flat_index(&inputs, &ii) * n_out + flat_index(&outputs, &oo)] = p;
        }
        if probs.iter().any(|p| p.is_nan()) {
            return Err(Error::parse(0, "table CSV does not cover every index tuple"));
        }
        Self::new(inputs, outputs, probs)
    }
}
