//! Checks on conditional tables: variational distance, non-signalling,
//! chained-Bell value `I_N`, the prediction bound for extensions, and the
//! splitting construction that flattens a distribution.
//!
//! Tables with two parties are `(A, B) → (X, Y)`; with an extension they are
//! `(A, B, C) → (X, Y, Z)`. Output axis `k` belongs to the party choosing
//! input axis `k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::serialize_sig17;
use crate::scalar::Scalar;
use crate::table::{ConditionalTable, NORMALIZATION_TOLERANCE};

/// Conditioning events below this probability are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Half the L1 distance between two distributions on the same alphabet.
pub fn variational_distance<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "alphabet sizes differ ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    check_normalized(p, "p")?;
    check_normalized(q, "q")?;
    Ok(distance(p, q))
}

pub(crate) fn distance<T: Scalar>(p: &[T], q: &[T]) -> T {
    p.iter().zip(q).map(|(a, b)| (*a - *b).abs()).sum::<T>() / T::lit(2.0)
}

fn check_normalized<T: Scalar>(p: &[T], name: &str) -> Result<()> {
    let sum: T = p.iter().copied().sum();
    if p.iter().any(|x| !x.is_finite() || *x < -T::tol(NORMALIZATION_TOLERANCE))
        || (sum - T::one()).abs() > T::tol(NORMALIZATION_TOLERANCE)
    {
        return Err(Error::invalid(format!("{name} is not a normalized distribution")));
    }
    Ok(())
}

/// Outcome of a non-signalling check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonsignallingReport<T> {
    /// Largest variational distance between marginal slices that ought to agree.
    pub max_violation: T,
    /// Description of the worst constraint when it exceeds the tolerance.
    pub violating_constraint: Option<String>,
    pub tolerance: T,
}

impl<T: Scalar> NonsignallingReport<T> {
    pub fn satisfied(&self) -> bool {
        self.max_violation <= self.tolerance
    }
}

fn check_party_shape<T: Scalar>(table: &ConditionalTable<T>) -> Result<()> {
    let (ni, no) = (table.inputs().len(), table.outputs().len());
    if ni != no || !(2..=3).contains(&ni) {
        return Err(Error::invalid(format!(
            "expected 2 or 3 parties with one input and one output each, got {ni} inputs and {no} outputs"
        )));
    }
    Ok(())
}

/// For each party `k`, the joint distribution of every other party's output
/// must not depend on party `k`'s input. The violation is the largest
/// variational distance between two such marginal slices.
pub fn check_nonsignalling<T: Scalar>(
    table: &ConditionalTable<T>,
    tolerance: T,
) -> Result<NonsignallingReport<T>> {
    check_party_shape(table)?;
    let parties = table.inputs().len();
    let mut worst = T::zero();
    let mut worst_desc = String::new();
    for k in 0..parties {
        let keep: Vec<usize> = (0..parties).filter(|&j| j != k).collect();
        let marginal = table.marginal(&keep)?;
        let others: Vec<usize> = keep.clone();
        let k_len = table.inputs()[k].len();
        let n_other: usize = others.iter().map(|&j| table.inputs()[j].len()).product();
        for rest in 0..n_other {
            let mut tuple = vec![0usize; parties];
            let mut r = rest;
            for &j in others.iter().rev() {
                let len = table.inputs()[j].len();
                tuple[j] = r % len;
                r /= len;
            }
            let slices: Vec<&[T]> = (0..k_len)
                .map(|v| {
                    tuple[k] = v;
                    marginal.slice(marginal.input_flat(&tuple))
                })
                .collect();
            for i in 0..k_len {
                for j in (i + 1)..k_len {
                    let d = distance(slices[i], slices[j]);
                    if d > worst {
                        worst = d;
                        worst_desc = describe_violation(table, k, &others, &tuple, i, j);
                    }
                }
            }
        }
    }
    Ok(NonsignallingReport {
        max_violation: worst,
        violating_constraint: (worst > tolerance).then_some(worst_desc),
        tolerance,
    })
}

fn describe_violation<T: Scalar>(
    table: &ConditionalTable<T>,
    k: usize,
    others: &[usize],
    tuple: &[usize],
    i: usize,
    j: usize,
) -> String {
    let outs: String = others.iter().map(|&o| table.outputs()[o].name.as_str()).collect();
    let ins: String = table.inputs().iter().map(|a| a.name.as_str()).collect();
    let fixed: Vec<String> = others
        .iter()
        .map(|&o| {
            let axis = &table.inputs()[o];
            format!("{}={}", axis.name, axis.labels[tuple[o]])
        })
        .collect();
    let axis = &table.inputs()[k];
    format!(
        "P({outs}|{ins}) depends on {name}: {name}={} vs {name}={} at {}",
        axis.labels[i],
        axis.labels[j],
        if fixed.is_empty() { "-".into() } else { fixed.join(", ") },
        name = axis.name,
    )
}

/// Result of replaying the free-choice argument on a finite table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreeChoiceReport<T> {
    /// `max |P(a|b,c,y,z) − P(a)|` over conditioning events of positive probability.
    pub premise_deviation: T,
    /// `max |P(y,z|a,b,c) − P(y,z|b,c)|` over `a` with positive prior.
    pub conclusion_deviation: T,
    pub premise_holds: bool,
    pub conclusion_holds: bool,
}

impl<T: Scalar> FreeChoiceReport<T> {
    /// Whether "A is a free choice" led to `P_{YZ|ABC} = P_{YZ|BC}`; vacuously
    /// true when the premise fails.
    pub fn implies_ns(&self) -> bool {
        !self.premise_holds || self.conclusion_holds
    }

    pub fn premise_violated(&self) -> bool {
        !self.premise_holds
    }
}

/// Builds `P_{YZA|BC}` both as `P_{YZ|BC}·P_{A|BCYZ}` and as
/// `P_{A|BC}·P_{YZ|ABC}`, with `A` drawn from `prior`, and reports whether
/// independence of `A` from `(B, C, Y, Z)` forces `P_{YZ|ABC} = P_{YZ|BC}`.
pub fn free_choice_implies_ns<T: Scalar>(
    table: &ConditionalTable<T>,
    prior: &[T],
) -> Result<FreeChoiceReport<T>> {
    if table.inputs().len() != 3 || table.outputs().len() != 3 {
        return Err(Error::invalid("free-choice check needs an (A,B,C)→(X,Y,Z) table"));
    }
    if prior.len() != table.inputs()[0].len() {
        return Err(Error::invalid("prior length differs from |A|"));
    }
    check_normalized(prior, "prior")?;
    let tol = T::tol(NORMALIZATION_TOLERANCE);
    let tiny = T::tol(ZERO_PROBABILITY);
    let yz = table.marginal(&[1, 2])?;
    let (na, nb, nc) = (
        table.inputs()[0].len(),
        table.inputs()[1].len(),
        table.inputs()[2].len(),
    );
    let n_yz = yz.output_count();
    let mut premise = T::zero();
    let mut conclusion = T::zero();
    for b in 0..nb {
        for c in 0..nc {
            for o in 0..n_yz {
                let given_a: Vec<T> = (0..na)
                    .map(|a| yz.slice(yz.input_flat(&[a, b, c]))[o])
                    .collect();
                // P_{A|BC}·P_{YZ|ABC}, with P_{A|BC} = P_A.
                let joint: Vec<T> = prior.iter().zip(&given_a).map(|(pa, p)| *pa * *p).collect();
                let p_yz_bc: T = joint.iter().copied().sum();
                if p_yz_bc > tiny {
                    for (j, pa) in joint.iter().zip(prior) {
                        premise = premise.max((*j / p_yz_bc - *pa).abs());
                    }
                }
                // P_{YZ|BC}·P_A, the other route under the premise.
                for a in 0..na {
                    if prior[a] <= tiny {
                        continue;
                    }
                    let route_one = p_yz_bc * prior[a];
                    conclusion = conclusion.max(((joint[a] - route_one) / prior[a]).abs());
                }
            }
        }
    }
    Ok(FreeChoiceReport {
        premise_deviation: premise,
        conclusion_deviation: conclusion,
        premise_holds: premise <= tol,
        conclusion_holds: conclusion <= tol,
    })
}

/// Positions of the chained labels: `A = {0,2,…,2N−2}`, `B = {1,3,…,2N−1}`.
struct ChainLayout {
    n: usize,
    a_pos: Vec<usize>,
    b_pos: Vec<usize>,
}

fn chain_layout<T: Scalar>(table: &ConditionalTable<T>) -> Result<ChainLayout> {
    let a = &table.inputs()[0];
    let b = &table.inputs()[1];
    let n = a.len();
    if b.len() != n {
        return Err(Error::invalid("A and B need the same number of settings"));
    }
    let lookup = |axis: &crate::table::Axis, first: i64| -> Result<Vec<usize>> {
        (0..n as i64)
            .map(|k| {
                axis.position(first + 2 * k).ok_or_else(|| {
                    Error::invalid(format!(
                        "axis {} must carry labels {first}, {}, …, {}",
                        axis.name,
                        first + 2,
                        first + 2 * (n as i64 - 1)
                    ))
                })
            })
            .collect()
    };
    Ok(ChainLayout {
        n,
        a_pos: lookup(a, 0)?,
        b_pos: lookup(b, 1)?,
    })
}

/// `P(X=Y | A=0, B=2N−1) + Σ_{|a−b|=1} P(X≠Y | a, b)` for an `(A, B) → (X, Y)` table.
pub fn i_n_of_table<T: Scalar>(table: &ConditionalTable<T>) -> Result<T> {
    if table.inputs().len() != 2 || table.outputs().len() != 2 {
        return Err(Error::invalid("I_N needs an (A,B)→(X,Y) table"));
    }
    let (xa, ya) = (&table.outputs()[0], &table.outputs()[1]);
    if xa.len() != 2 || ya.len() != 2 {
        return Err(Error::invalid("I_N needs binary outcomes"));
    }
    if ya.position(xa.labels[0]).is_none() || ya.position(xa.labels[1]).is_none() {
        return Err(Error::invalid("X and Y must share outcome labels"));
    }
    let layout = chain_layout(table)?;
    let p_equal = |a: usize, b: usize| -> T {
        let s = table.slice(table.input_flat(&[a, b]));
        (0..2)
            .map(|x| s[x * 2 + ya.position(xa.labels[x]).expect("checked")])
            .sum()
    };
    let n = layout.n;
    let mut total = p_equal(layout.a_pos[0], layout.b_pos[n - 1]);
    for (ka, &ai) in layout.a_pos.iter().enumerate() {
        let a_label = 2 * ka as i64;
        for (kb, &bi) in layout.b_pos.iter().enumerate() {
            let b_label = 2 * kb as i64 + 1;
            if (a_label - b_label).abs() == 1 {
                total += T::one() - p_equal(ai, bi);
            }
        }
    }
    Ok(total)
}

/// Result of bounding how well `Z` predicts `X`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Report<T> {
    pub holds: bool,
    /// `max D(P_{Z|abcx}, P_{Z|abc}) − I_N`; negative when the bound has slack.
    pub worst_gap: T,
    /// Largest distance `D(P_{Z|abcx}, P_{Z|abc})` found.
    pub worst_distance: T,
    /// `I_N` of the `(X, Y)` marginal.
    pub i_n: T,
}

fn check_extension_shape<T: Scalar>(table: &ConditionalTable<T>) -> Result<()> {
    if table.inputs().len() != 3 || table.outputs().len() != 3 {
        return Err(Error::invalid("expected an (A,B,C)→(X,Y,Z) table"));
    }
    Ok(())
}

/// Verifies `D(P_{Z|abcx}, P_{Z|abc}) ≤ I_N(P_{XY|AB})` over all `a, b, c, x`
/// with `P(x|a,b,c) > 0`.
pub fn lemma1_check<T: Scalar>(table: &ConditionalTable<T>, tolerance: T) -> Result<Lemma1Report<T>> {
    check_extension_shape(table)?;
    if table.outputs()[0].len() != 2 || table.outputs()[1].len() != 2 {
        return Err(Error::invalid("X and Y must be binary"));
    }
    let ns = check_nonsignalling(table, tolerance)?;
    if let Some(desc) = ns.violating_constraint {
        return Err(Error::PreconditionViolated(format!(
            "table is signalling ({desc}; violation {})",
            ns.max_violation
        )));
    }
    let nc = table.inputs()[2].len();
    let mut worst_gap = T::neg_infinity();
    let mut worst_distance = T::zero();
    let mut i_n_max = T::zero();
    for c in 0..nc {
        let slice_c = table.fix_input(2, c)?;
        let i_n = i_n_of_table(&slice_c.marginal(&[0, 1])?)?;
        i_n_max = i_n_max.max(i_n);
        let xz = slice_c.marginal(&[0, 2])?;
        let d = max_conditional_shift(&xz);
        worst_distance = worst_distance.max(d);
        worst_gap = worst_gap.max(d - i_n);
    }
    Ok(Lemma1Report {
        holds: worst_gap <= tolerance,
        worst_gap,
        worst_distance,
        i_n: i_n_max,
    })
}

/// `max_{inputs, x} D(P_{Z|inputs,x}, P_{Z|inputs})` for a table whose two
/// outputs are `(X, Z)`. Outcomes with `P(x|inputs)` below
/// [`ZERO_PROBABILITY`] are skipped.
fn max_conditional_shift<T: Scalar>(xz: &ConditionalTable<T>) -> T {
    let nx = xz.outputs()[0].len();
    let nz = xz.outputs()[1].len();
    let tiny = T::tol(ZERO_PROBABILITY);
    let mut worst = T::zero();
    for i in 0..xz.input_count() {
        let s = xz.slice(i);
        let pz: Vec<T> = (0..nz).map(|z| (0..nx).map(|x| s[x * nz + z]).sum()).collect();
        for x in 0..nx {
            let row = &s[x * nz..(x + 1) * nz];
            let px: T = row.iter().copied().sum();
            if px < tiny {
                continue;
            }
            let cond: Vec<T> = row.iter().map(|p| *p / px).collect();
            worst = worst.max(distance(&cond, &pz));
        }
    }
    worst
}

/// Result of a Markov-condition check `X ↔ inputs ↔ Z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkovReport<T> {
    pub max_distance: T,
    pub holds: bool,
}

/// `max D(P_{Z|…,x}, P_{Z|…})` for `(A,C)→(X,Z)` or `(A,B,C)→(X,Y,Z)` tables.
pub fn markov_check<T: Scalar>(table: &ConditionalTable<T>, tolerance: T) -> Result<MarkovReport<T>> {
    let xz = match (table.inputs().len(), table.outputs().len()) {
        (2, 2) => table.clone(),
        (3, 3) => table.marginal(&[0, 2])?,
        (ni, no) => {
            return Err(Error::invalid(format!(
                "Markov check needs (A,C)→(X,Z) or (A,B,C)→(X,Y,Z), got {ni} inputs and {no} outputs"
            )))
        }
    };
    let d = max_conditional_shift(&xz);
    Ok(MarkovReport {
        max_distance: d,
        holds: d <= tolerance,
    })
}

/// `(D(P_X, P_Y), P(X ≠ Y))` for a square joint distribution `joint[x][y]`.
pub fn lemma2_distance_bound<T: Scalar>(joint: &[Vec<T>]) -> Result<(T, T)> {
    let n = joint.len();
    if n == 0 || joint.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("joint must be square over a shared alphabet"));
    }
    let flat: Vec<T> = joint.iter().flatten().copied().collect();
    check_normalized(&flat, "joint")?;
    let px: Vec<T> = joint.iter().map(|row| row.iter().copied().sum()).collect();
    let py: Vec<T> = (0..n).map(|y| joint.iter().map(|row| row[y]).sum()).collect();
    let p_neq: T = (0..n)
        .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
        .map(|(x, y)| joint[x][y])
        .sum();
    Ok((distance(&px, &py), p_neq))
}

/// Split counts that refine a distribution towards the flat one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatteningScheme<T> {
    /// `split_counts[i]` equal parts replace outcome `i`.
    pub split_counts: Vec<usize>,
    /// Distance of the refined distribution from uniform.
    pub epsilon_achieved: T,
}

impl<T: Scalar> FlatteningScheme<T> {
    pub fn total_outcomes(&self) -> usize {
        self.split_counts.iter().sum()
    }

    /// The refined distribution, outcome by outcome in source order.
    pub fn refine(&self, p: &[T]) -> Vec<T> {
        p.iter()
            .zip(&self.split_counts)
            .flat_map(|(pi, &k)| std::iter::repeat_n(*pi / T::lit(k as f64), k))
            .collect()
    }
}

const FLATTEN_MAX_RESOLUTION: usize = 1 << 26;

/// Splits outcome `i` into `k_i = max(1, round(p_i·M))` equal parts for the
/// smallest resolution `M` whose refinement lies within `epsilon` of uniform.
pub fn flatten<T: Scalar>(p: &[T], epsilon: T) -> Result<FlatteningScheme<T>> {
    if epsilon.is_nan() || epsilon <= T::zero() {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if p.is_empty() {
        return Err(Error::invalid("empty distribution"));
    }
    check_normalized(p, "p")?;
    let half = T::lit(0.5);
    for m in 1..=FLATTEN_MAX_RESOLUTION {
        let mf = T::lit(m as f64);
        let counts: Vec<usize> = p
            .iter()
            .map(|pi| {
                let k = (*pi * mf + half).floor().to_f64_lossy() as usize;
                k.max(1)
            })
            .collect();
        let total = T::lit(counts.iter().sum::<usize>() as f64);
        let dist = p
            .iter()
            .zip(&counts)
            .map(|(pi, &k)| (*pi - T::lit(k as f64) / total).abs())
            .sum::<T>()
            * half;
        if dist <= epsilon {
            return Ok(FlatteningScheme {
                split_counts: counts,
                epsilon_achieved: dist,
            });
        }
    }
    Err(Error::invalid("epsilon too small for the splitting search"))
}

/// Serializable view of a report with `f64` values at 17 significant digits.
#[derive(Serialize)]
pub struct NonsignallingJson<'a> {
    #[serde(serialize_with = "serialize_sig17")]
    pub max_violation: f64,
    pub violating_constraint: &'a Option<String>,
    #[serde(serialize_with = "serialize_sig17")]
    pub tolerance: f64,
    pub satisfied: bool,
}

impl NonsignallingReport<f64> {
    pub fn json_view(&self) -> NonsignallingJson<'_> {
        NonsignallingJson {
            max_violation: self.max_violation,
            violating_constraint: &self.violating_constraint,
            tolerance: self.tolerance,
            satisfied: self.satisfied(),
        }
    }
}
