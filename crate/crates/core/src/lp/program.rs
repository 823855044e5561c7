use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::scalar::Scalar;

/// `maximize cᵀx  subject to  Ax = b, x ≥ 0` with a sparse `A`.
///
/// Entries are kept as `(row, col, value)` triplets sorted by row then
/// column, duplicates summed.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    objective: Vec<T>,
    row_count: usize,
    entries: Vec<(usize, usize, T)>,
    rhs: Vec<T>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(objective: Vec<T>, rhs: Vec<T>, mut entries: Vec<(usize, usize, T)>) -> Result<Self> {
        let (rows, cols) = (rhs.len(), objective.len());
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= rows || c >= cols) {
            return Err(Error::invalid(format!(
                "entry ({r}, {c}) outside a {rows}x{cols} constraint matrix"
            )));
        }
        if objective.iter().chain(&rhs).chain(entries.iter().map(|e| &e.2)).any(|v| !v.is_finite()) {
            return Err(Error::invalid("linear program has non-finite data"));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, T)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != T::zero());
        Ok(Self {
            objective,
            row_count: rows,
            entries: merged,
            rhs,
        })
    }

    pub fn variable_count(&self) -> usize {
        self.objective.len()
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).map(|(c, v)| *c * *v).sum()
    }

    pub fn dual_objective(&self, y: &[T]) -> T {
        self.rhs.iter().zip(y).map(|(b, v)| *b * *v).sum()
    }

    /// `Ax − b`.
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        let mut r: Vec<T> = self.rhs.iter().map(|b| -*b).collect();
        for &(i, j, v) in &self.entries {
            r[i] += v * x[j];
        }
        r
    }

    /// `Aᵀy − c`; non-negative everywhere when `y` is dual feasible.
    pub fn reduced_costs(&self, y: &[T]) -> Vec<T> {
        let mut d: Vec<T> = self.objective.iter().map(|c| -*c).collect();
        for &(i, j, v) in &self.entries {
            d[j] += v * y[i];
        }
        d
    }

    /// Row-major dense copy of `A`.
    pub fn dense_matrix(&self) -> Vec<Vec<T>> {
        let mut a = vec![vec![T::zero(); self.variable_count()]; self.row_count];
        for &(i, j, v) in &self.entries {
            a[i][j] = v;
        }
        a
    }
}

impl LinearProgram<f64> {
    /// Plain-text dump:
    ///
    /// ```text
    /// lp <rows> <cols>
    /// objective <c_0> … <c_{cols-1}>
    /// rhs <b_0> … <b_{rows-1}>
    /// <row> <col> <value>      (one line per nonzero of A)
    /// ```
    pub fn to_dump(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| sig17(*x)).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "lp {} {}", self.row_count, self.variable_count());
        let _ = writeln!(out, "objective {}", join(&self.objective));
        let _ = writeln!(out, "rhs {}", join(&self.rhs));
        for &(i, j, v) in &self.entries {
            let _ = writeln!(out, "{i} {j} {}", sig17(v));
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing {what} line")))
        };
        let num = |ln: usize, s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::parse(ln + 1, format!("bad number `{s}`")))
        };
        let (ln, head) = next("header")?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() != 3 || head[0] != "lp" {
            return Err(Error::parse(ln + 1, "expected `lp <rows> <cols>`"));
        }
        let rows: usize = head[1].parse().map_err(|_| Error::parse(ln + 1, "bad row count"))?;
        let cols: usize = head[2].parse().map_err(|_| Error::parse(ln + 1, "bad column count"))?;
        let mut vector = |tag: &str, len: usize| -> Result<Vec<f64>> {
            let (ln, line) = next(tag)?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(tag) {
                return Err(Error::parse(ln + 1, format!("expected `{tag}` line")));
            }
            let v = parts.map(|s| num(ln, s)).collect::<Result<Vec<_>>>()?;
            if v.len() != len {
                return Err(Error::parse(ln + 1, format!("{tag} needs {len} values")));
            }
            Ok(v)
        };
        let objective = vector("objective", cols)?;
        let rhs = vector("rhs", rows)?;
        let mut entries = Vec::new();
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::parse(ln + 1, "expected `row col value`"));
            }
            let i = parts[0].parse().map_err(|_| Error::parse(ln + 1, "bad row index"))?;
            let j = parts[1].parse().map_err(|_| Error::parse(ln + 1, "bad column index"))?;
            entries.push((i, j, num(ln, parts[2])?));
        }
        Self::new(objective, rhs, entries)
    }
}
