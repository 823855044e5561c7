//! Table generators shared by the integration tests.
#![allow(dead_code)]

use chainbound::quantum::{born_table, chained_family, entangled_state};
use chainbound::{Axis, ConditionalTable};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, k: usize) -> usize {
        ((self.0.next_u64() as u128 * k as u128) >> 64) as usize
    }

    /// Flat-Dirichlet sample of length `k`.
    pub fn distribution(&mut self, k: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..k).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    }

    /// Distribution with some exact zeros, to exercise zero-probability paths.
    pub fn sparse_distribution(&mut self, k: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..k)
            .map(|_| if self.uniform() < 0.3 { 0.0 } else { self.uniform() })
            .collect();
        if w.iter().all(|x| *x == 0.0) {
            w[self.below(k)] = 1.0;
        }
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    }
}

pub fn chain_inputs(n: usize, nc: usize) -> Vec<Axis> {
    vec![
        Axis::new("A", (0..n as i64).map(|k| 2 * k).collect()),
        Axis::new("B", (0..n as i64).map(|k| 2 * k + 1).collect()),
        Axis::range("C", nc),
    ]
}

pub fn extension_outputs(nz: usize) -> Vec<Axis> {
    vec![Axis::binary("X"), Axis::binary("Y"), Axis::range("Z", nz)]
}

/// Builds an `(A,B,C)→(X,Y,Z)` table from `p(a, b, c, x, y, z)` given as positions.
pub fn extension_from_fn(
    n: usize,
    nc: usize,
    nz: usize,
    f: impl Fn(usize, usize, usize, usize, usize, usize) -> f64,
) -> ConditionalTable {
    ConditionalTable::from_fn(chain_inputs(n, nc), extension_outputs(nz), |i, o| {
        f(i[0], i[1], i[2], o[0], o[1], o[2])
    })
    .unwrap()
}

/// Convex mixture of local deterministic strategies `x(a), y(b), z(c)`.
pub fn local_extension(g: &mut Gen, n: usize, nc: usize, nz: usize, strategies: usize) -> ConditionalTable {
    let weights = g.distribution(strategies);
    let plans: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> = (0..strategies)
        .map(|_| {
            (
                (0..n).map(|_| g.below(2)).collect(),
                (0..n).map(|_| g.below(2)).collect(),
                (0..nc).map(|_| g.below(nz)).collect(),
            )
        })
        .collect();
    extension_from_fn(n, nc, nz, |a, b, c, x, y, z| {
        plans
            .iter()
            .zip(&weights)
            .filter(|((fx, fy, fz), _)| fx[a] == x && fy[b] == y && fz[c] == z)
            .map(|(_, w)| *w)
            .sum()
    })
}

/// Chained PR box (`I_N = 0`) with `Z` drawn independently from `pz[c]`.
pub fn pr_box_extension(n: usize, pz: &[Vec<f64>]) -> ConditionalTable {
    let nz = pz[0].len();
    extension_from_fn(n, pz.len(), nz, |a, b, c, x, y, z| {
        let (al, bl) = (2 * a as i64, 2 * b as i64 + 1);
        let equal = if a == 0 && b == n - 1 && n > 1 {
            false
        } else if (al - bl).abs() == 1 {
            true
        } else {
            // Non-adjacent pairs do not enter I_N; keep them uncorrelated.
            return 0.25 * pz[c][z];
        };
        if (x == y) == equal {
            0.5 * pz[c][z]
        } else {
            0.0
        }
    })
}

/// Born table of the chained family with `Z` drawn independently from `pz[c]`.
pub fn quantum_extension(n: usize, v: f64, pz: &[Vec<f64>]) -> ConditionalTable {
    let q = born_table(&entangled_state(v).unwrap(), &chained_family(n).unwrap()).unwrap();
    let nz = pz[0].len();
    extension_from_fn(n, pz.len(), nz, |a, b, c, x, y, z| q.get(&[a, b], &[x, y]) * pz[c][z])
}

pub fn mix(tables: &[ConditionalTable], weights: &[f64]) -> ConditionalTable {
    let first = &tables[0];
    let probs = (0..first.probabilities().len())
        .map(|k| tables.iter().zip(weights).map(|(t, w)| t.probabilities()[k] * w).sum())
        .collect();
    ConditionalTable::new(first.inputs().to_vec(), first.outputs().to_vec(), probs).unwrap()
}

/// A random non-signalling extension mixing local, PR-box and quantum parts.
pub fn random_ns_extension(g: &mut Gen) -> ConditionalTable {
    let n = 1 + g.below(5);
    let nc = 1 + g.below(3);
    let nz = 2 + g.below(2);
    let pz: Vec<Vec<f64>> = (0..nc).map(|_| g.distribution(nz)).collect();
    let strategies = 1 + g.below(6);
    let local = local_extension(g, n, nc, nz, strategies);
    let pr = pr_box_extension(n, &pz);
    let v = g.uniform();
    let quantum = quantum_extension(n, v, &pz);
    let weights = g.distribution(3);
    match g.below(4) {
        0 => local,
        1 => quantum,
        _ => mix(&[local, pr, quantum], &weights),
    }
}

/// `(Y, Z)` drawn from a law that ignores `A`; `X` may depend on everything.
pub fn free_choice_table(g: &mut Gen) -> ConditionalTable {
    let n = 1 + g.below(4);
    let nc = 1 + g.below(2);
    let nz = 2 + g.below(2);
    let yz: Vec<Vec<f64>> = (0..n * nc).map(|_| g.sparse_distribution(2 * nz)).collect();
    let x_given: Vec<f64> = (0..n * n * nc * 2 * nz).map(|_| g.uniform()).collect();
    extension_from_fn(n, nc, nz, |a, b, c, x, y, z| {
        let p_yz = yz[b * nc + c][y * nz + z];
        let px0 = x_given[(((a * n + b) * nc + c) * 2 + y) * nz + z];
        p_yz * if x == 0 { px0 } else { 1.0 - px0 }
    })
}

/// `Y` copies a bit whose bias depends on `A`, so `(Y, Z)` signals `A`.
pub fn signalling_table(g: &mut Gen) -> ConditionalTable {
    let n = 2 + g.below(3);
    let bias: Vec<f64> = (0..n).map(|a| if a == 0 { 0.9 } else { 0.1 + 0.2 * g.uniform() }).collect();
    extension_from_fn(n, 1, 2, |a, _b, _c, x, y, z| {
        let p = if y == 0 { bias[a] } else { 1.0 - bias[a] };
        if x == y && z == 0 {
            p
        } else {
            0.0
        }
    })
}
