//! The most predictive non-signalling extension of a bipartite table.
//!
//! Given `q = P(x, y | a, b)`, the variables are the entries of an extension
//! `P(x, y, z | a, b)` with a binary `Z` (and a single observation `C`). The
//! constraints make it reproduce `q` and keep `(X, Z)` independent of `B` and
//! `(Y, Z)` independent of `A`. The objective
//! `P(x*, z=0 | a*, b₀) − p_x·P(z=0 | a*, b₀)` equals
//! `p_x·(P(z=0 | a*, x*) − P(z=0 | a*))`, so the optimum divided by
//! `p_x = P(x* | a*)` is the largest distance `D(P_{Z|a*x*}, P_{Z|a*})`.

use serde::Serialize;

use super::program::LinearProgram;
use super::simplex::{solve_from, DualCertificate, LpSolution, SimplexOptions};
use crate::error::{Error, Result};
use crate::fmt::{serialize_sig17, Sig17};
use crate::nonlocality::{check_nonsignalling, i_n_of_table, ZERO_PROBABILITY};
use crate::scalar::Scalar;
use crate::table::{Axis, ConditionalTable, NORMALIZATION_TOLERANCE};

/// Slack allowed on `prediction_distance ≤ I_N(q)`.
pub const BOUND_SLACK: f64 = 1e-7;
/// Non-signalling tolerance for reconstructed extensions.
pub const EXTENSION_NS_TOLERANCE: f64 = 1e-8;

/// The adversary program together with what is needed to read its solution.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryLp<T> {
    pub program: LinearProgram<T>,
    q: ConditionalTable<T>,
    target_a: usize,
    target_x: usize,
    p_x: T,
}

impl<T: Scalar> AdversaryLp<T> {
    /// `P(target_x | target_a)` under `q`.
    pub fn p_x(&self) -> T {
        self.p_x
    }

    /// Column of `P(x, y, z | a, b)`, all arguments being axis positions.
    pub fn variable(&self, a: usize, b: usize, x: usize, y: usize, z: usize) -> usize {
        let nb = self.q.inputs()[1].len();
        (((a * nb + b) * 2 + x) * 2 + y) * 2 + z
    }

    /// The feasible vertex where `Z` is always 0: `P(x, y, 0 | a, b) = q(x, y | a, b)`.
    pub fn constant_z_point(&self) -> Vec<T> {
        let mut x0 = vec![T::zero(); self.program.variable_count()];
        let (na, nb) = (self.q.inputs()[0].len(), self.q.inputs()[1].len());
        for a in 0..na {
            for b in 0..nb {
                for xx in 0..2 {
                    for y in 0..2 {
                        x0[self.variable(a, b, xx, y, 0)] = self.q.get(&[a, b], &[xx, y]);
                    }
                }
            }
        }
        x0
    }

    /// Rebuilds `P(x, y, z | a, b, c)` (with `|C| = 1`) from a solution vector.
    pub fn extension_table(&self, x: &[T]) -> Result<ConditionalTable<T>> {
        let mut inputs = self.q.inputs().to_vec();
        inputs.push(Axis::new("C", vec![0]));
        let mut outputs = self.q.outputs().to_vec();
        outputs.push(Axis::range("Z", 2));
        ConditionalTable::new(inputs, outputs, x.iter().map(|v| v.max(T::zero())).collect())
    }
}

fn validate_bipartite<T: Scalar>(q: &ConditionalTable<T>) -> Result<()> {
    if q.inputs().len() != 2 || q.outputs().len() != 2 {
        return Err(Error::invalid("adversary needs an (A,B)→(X,Y) table"));
    }
    if q.outputs().iter().any(|o| o.len() != 2) {
        return Err(Error::invalid("adversary needs binary X and Y"));
    }
    let ns = check_nonsignalling(q, T::tol(NORMALIZATION_TOLERANCE))?;
    if let Some(desc) = ns.violating_constraint {
        return Err(Error::PreconditionViolated(format!("q is signalling: {desc}")));
    }
    Ok(())
}

/// Builds the equality-form LP over all non-signalling extensions of `q`.
pub fn build_adversary_lp<T: Scalar>(
    q: &ConditionalTable<T>,
    z_cardinality: usize,
    target_a: i64,
    target_x: i64,
) -> Result<AdversaryLp<T>> {
    if z_cardinality != 2 {
        return Err(Error::invalid("the adversary program uses a binary Z"));
    }
    validate_bipartite(q)?;
    let ta = q.inputs()[0]
        .position(target_a)
        .ok_or_else(|| Error::invalid(format!("A has no label {target_a}")))?;
    let tx = q.outputs()[0]
        .position(target_x)
        .ok_or_else(|| Error::invalid(format!("X has no outcome {target_x}")))?;
    let na = q.inputs()[0].len();
    let nb = q.inputs()[1].len();
    let slice = q.slice(q.input_flat(&[ta, 0]));
    let p_x = slice[tx * 2] + slice[tx * 2 + 1];
    if p_x < T::tol(ZERO_PROBABILITY) {
        return Err(Error::invalid(format!(
            "outcome {target_x} has probability {p_x} at A={target_a}"
        )));
    }

    let mut lp = AdversaryLp {
        program: LinearProgram::new(vec![], vec![], vec![])?,
        q: q.clone(),
        target_a: ta,
        target_x: tx,
        p_x,
    };
    let n_vars = na * nb * 8;
    let mut entries = Vec::new();
    let mut rhs = Vec::new();
    let mut row = |terms: &[(usize, T)], value: T, entries: &mut Vec<(usize, usize, T)>| {
        let r = rhs.len();
        entries.extend(terms.iter().map(|&(c, v)| (r, c, v)));
        rhs.push(value);
    };
    let one = T::one();
    let pairs = [(0, 0), (0, 1), (1, 0), (1, 1)];
    for a in 0..na {
        for b in 0..nb {
            // Normalization of each (a, b) slice.
            let all: Vec<(usize, T)> = pairs
                .iter()
                .flat_map(|&(x, y)| (0..2).map(move |z| (x, y, z)))
                .map(|(x, y, z)| (lp.variable(a, b, x, y, z), one))
                .collect();
            row(&all, one, &mut entries);
            // Summing out Z gives back q.
            let s = q.slice(q.input_flat(&[a, b]));
            for &(x, y) in &pairs {
                let terms = [(lp.variable(a, b, x, y, 0), one), (lp.variable(a, b, x, y, 1), one)];
                row(&terms, s[x * 2 + y], &mut entries);
            }
        }
    }
    // (X, Z) marginal independent of B.
    for a in 0..na {
        for b in 1..nb {
            for x in 0..2 {
                for z in 0..2 {
                    let mut terms = Vec::with_capacity(4);
                    for y in 0..2 {
                        terms.push((lp.variable(a, b - 1, x, y, z), one));
                        terms.push((lp.variable(a, b, x, y, z), -one));
                    }
                    row(&terms, T::zero(), &mut entries);
                }
            }
        }
    }
    // (Y, Z) marginal independent of A.
    for b in 0..nb {
        for a in 1..na {
            for y in 0..2 {
                for z in 0..2 {
                    let mut terms = Vec::with_capacity(4);
                    for x in 0..2 {
                        terms.push((lp.variable(a - 1, b, x, y, z), one));
                        terms.push((lp.variable(a, b, x, y, z), -one));
                    }
                    row(&terms, T::zero(), &mut entries);
                }
            }
        }
    }
    let mut objective = vec![T::zero(); n_vars];
    for x in 0..2 {
        for y in 0..2 {
            let j = lp.variable(ta, 0, x, y, 0);
            objective[j] -= p_x;
            if x == tx {
                objective[j] += one;
            }
        }
    }
    lp.program = LinearProgram::new(objective, rhs, entries)?;
    Ok(lp)
}

/// The extremal extension for one target `(a, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryResult<T> {
    pub optimal_table: ConditionalTable<T>,
    pub target: (i64, i64),
    /// `D(P_{Z|a x}, P_{Z|a})` at the optimum.
    pub prediction_distance: T,
    /// `I_N(q)`, the bound the distance must respect.
    pub i_n: T,
    pub p_x: T,
    pub certificate: DualCertificate<T>,
    pub iterations: usize,
}

/// Largest `D(P_{Z|target_a,target_x}, P_{Z|target_a})` over non-signalling
/// extensions of `q`, with the optimal extension and its certificate.
///
/// Fails with [`Error::Solver`] if the optimum is not non-signalling, depends on
/// the choice of `b`, or exceeds `I_N(q)`.
pub fn max_prediction_distance<T: Scalar>(
    q: &ConditionalTable<T>,
    target_a: i64,
    target_x: i64,
) -> Result<AdversaryResult<T>> {
    let i_n = i_n_of_table(q)?;
    let lp = build_adversary_lp(q, 2, target_a, target_x)?;
    let LpSolution {
        x,
        certificate,
        iterations,
        ..
    } = solve_from(&lp.program, &SimplexOptions::default(), Some(&lp.constant_z_point()))?;
    let optimal_table = lp.extension_table(&x)?;
    let ns = check_nonsignalling(&optimal_table, T::tol(EXTENSION_NS_TOLERANCE))?;
    if !ns.satisfied() {
        return Err(Error::Solver(format!(
            "optimal extension is signalling ({})",
            ns.max_violation
        )));
    }
    let prediction_distance = certificate.primal_objective / lp.p_x;
    let tol = T::tol(EXTENSION_NS_TOLERANCE);
    for b in 0..q.inputs()[1].len() {
        let shift = signed_shift(&optimal_table, lp.target_a, b, lp.target_x);
        if (shift - prediction_distance).abs() > tol {
            return Err(Error::Solver(format!(
                "prediction distance depends on b: {shift} at b index {b} vs {prediction_distance}"
            )));
        }
    }
    if prediction_distance > i_n + T::tol(BOUND_SLACK) {
        return Err(Error::Solver(format!(
            "prediction distance {prediction_distance} exceeds I_N = {i_n}"
        )));
    }
    Ok(AdversaryResult {
        optimal_table,
        target: (target_a, target_x),
        prediction_distance: prediction_distance.max(T::zero()),
        i_n,
        p_x: lp.p_x,
        certificate,
        iterations,
    })
}

/// `P(z=0 | a, b, x) − P(z=0 | a, b)` in an extension table with `|C| = 1`.
fn signed_shift<T: Scalar>(table: &ConditionalTable<T>, a: usize, b: usize, x: usize) -> T {
    let s = table.slice(table.input_flat(&[a, b, 0]));
    let at = |x: usize, y: usize, z: usize| s[(x * 2 + y) * 2 + z];
    let p_xz0 = at(x, 0, 0) + at(x, 1, 0);
    let p_x = p_xz0 + at(x, 0, 1) + at(x, 1, 1);
    let p_z0: T = (0..2).map(|xx| at(xx, 0, 0) + at(xx, 1, 0)).sum();
    p_xz0 / p_x - p_z0
}

#[derive(Serialize)]
pub struct AdversarySummary {
    pub target_a: i64,
    pub target_x: i64,
    #[serde(serialize_with = "serialize_sig17")]
    pub prediction_distance: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub i_n: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub p_x: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub primal_objective: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub dual_objective: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub duality_gap: f64,
    #[serde(serialize_with = "serialize_sig17")]
    pub complementary_slackness_gap: f64,
    pub iterations: usize,
    pub dual_values: Vec<Sig17>,
}

impl AdversaryResult<f64> {
    pub fn summary(&self) -> AdversarySummary {
        AdversarySummary {
            target_a: self.target.0,
            target_x: self.target.1,
            prediction_distance: self.prediction_distance,
            i_n: self.i_n,
            p_x: self.p_x,
            primal_objective: self.certificate.primal_objective,
            dual_objective: self.certificate.dual_objective,
            duality_gap: self.certificate.duality_gap(),
            complementary_slackness_gap: self.certificate.complementary_slackness_gap,
            iterations: self.iterations,
            dual_values: self.certificate.dual_values.iter().map(|v| Sig17(*v)).collect(),
        }
    }
}
