//! Dense two-phase tableau simplex.
//!
//! Phase one drives artificial variables out of an all-artificial starting
//! basis; rows whose artificial cannot be pivoted out are linearly dependent
//! and are zeroed. Phase two maximizes the real objective with artificial
//! columns barred from entering. Dual values are read off the reduced costs
//! of the artificial columns, which start as the identity.

use serde::Serialize;

use super::certificate::{check_certificate, CertificateCheck};
use super::program::LinearProgram;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Choice of entering column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest-index improving column and smallest-index leaving variable on
    /// ratio ties. Never cycles.
    Bland,
    /// Most negative reduced cost, falling back to Bland's rule after a run of
    /// degenerate pivots.
    DantzigThenBland { degenerate_run: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexOptions {
    pub pivot_tolerance: f64,
    pub feasibility_tolerance: f64,
    pub optimality_tolerance: f64,
    /// Required bound on `|cᵀx − bᵀy|` at the reported optimum.
    pub duality_gap_tolerance: f64,
    pub max_iterations: usize,
    pub rule: PivotRule,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            pivot_tolerance: 1e-10,
            feasibility_tolerance: 1e-9,
            optimality_tolerance: 1e-9,
            duality_gap_tolerance: 1e-7,
            max_iterations: 1_000_000,
            rule: PivotRule::DantzigThenBland { degenerate_run: 50 },
        }
    }
}

/// Optimality certificate for `max cᵀx, Ax = b, x ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCertificate<T> {
    pub dual_values: Vec<T>,
    pub primal_objective: T,
    pub dual_objective: T,
    /// `Σ_j x_j·(Aᵀy − c)_j`.
    pub complementary_slackness_gap: T,
}

impl<T: Scalar> DualCertificate<T> {
    pub fn duality_gap(&self) -> T {
        (self.primal_objective - self.dual_objective).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub certificate: DualCertificate<T>,
    pub iterations: usize,
    /// Independent re-check of the certificate against the program data.
    pub check: CertificateCheck<T>,
}

impl<T: Scalar> LpSolution<T> {
    pub fn objective(&self) -> T {
        self.certificate.primal_objective
    }
}

pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
    solve_with(lp, &SimplexOptions::default())
}

struct Tableau<T> {
    m: usize,
    n: usize,
    width: usize,
    t: Vec<T>,
    obj: Vec<T>,
    /// `±1` per row; rows with negative right-hand side are negated.
    sign: Vec<T>,
    basis: Vec<usize>,
    iterations: usize,
}

enum Phase {
    One,
    Two,
}

impl<T: Scalar> Tableau<T> {
    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn at(&self, i: usize, j: usize) -> T {
        self.t[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let inv = T::one() / self.t[r * w + q];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v *= inv;
        }
        self.t[r * w + q] = T::one();
        let nz: Vec<usize> = (0..w).filter(|&j| self.t[r * w + j] != T::zero()).collect();
        let pivot_row: Vec<T> = nz.iter().map(|&j| self.t[r * w + j]).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q];
            if f == T::zero() {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (&j, &p) in nz.iter().zip(&pivot_row) {
                row[j] -= f * p;
            }
            row[q] = T::zero();
        }
        let f = self.obj[q];
        if f != T::zero() {
            for (&j, &p) in nz.iter().zip(&pivot_row) {
                self.obj[j] -= f * p;
            }
            self.obj[q] = T::zero();
        }
        self.basis[r] = q;
        self.iterations += 1;
    }

    /// Pivots each column in the support of `x0` into a row still held by an
    /// artificial. Returns false when the resulting basic solution is not
    /// feasible, which happens if the support was linearly dependent.
    fn crash(&mut self, x0: &[T], opts: &SimplexOptions) -> bool {
        let piv_tol = T::tol(opts.pivot_tolerance);
        let feas_tol = T::tol(opts.feasibility_tolerance);
        for (j, &v) in x0.iter().enumerate() {
            if v <= feas_tol {
                continue;
            }
            let best = (0..self.m)
                .filter(|&r| self.basis[r] >= self.n)
                .map(|r| (r, self.at(r, j).abs()))
                .filter(|&(_, a)| a > piv_tol)
                .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite").then(b.0.cmp(&a.0)));
            if let Some((r, _)) = best {
                self.pivot(r, j);
            }
        }
        let rhs = self.rhs_col();
        (0..self.m).all(|i| self.at(i, rhs) >= -feas_tol)
    }

    /// Runs simplex iterations until no improving column remains.
    fn optimize(&mut self, phase: Phase, opts: &SimplexOptions) -> Result<()> {
        let opt_tol = T::tol(opts.optimality_tolerance);
        let piv_tol = T::tol(opts.pivot_tolerance);
        let rhs = self.rhs_col();
        let allowed = match phase {
            Phase::One => self.n + self.m,
            Phase::Two => self.n,
        };
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= opts.max_iterations {
                return Err(Error::IterationLimit {
                    limit: opts.max_iterations,
                });
            }
            let use_bland = match opts.rule {
                PivotRule::Bland => true,
                PivotRule::DantzigThenBland { degenerate_run } => degenerate >= degenerate_run,
            };
            let entering = if use_bland {
                (0..allowed).find(|&j| self.obj[j] < -opt_tol)
            } else {
                (0..allowed)
                    .filter(|&j| self.obj[j] < -opt_tol)
                    .min_by(|&a, &b| {
                        self.obj[a]
                            .partial_cmp(&self.obj[b])
                            .expect("finite reduced costs")
                            .then(a.cmp(&b))
                    })
            };
            let Some(q) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = self.at(i, q);
                if a > piv_tol {
                    let ratio = self.at(i, rhs).max(T::zero()) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((best, br)) => {
                            if ratio < br || (ratio == br && self.basis[i] < self.basis[best]) {
                                Some((i, ratio))
                            } else {
                                Some((best, br))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Solver("linear program is unbounded".into()));
            };
            if ratio <= T::zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, q);
        }
    }
}

/// Solves `lp` and returns the primal optimum with a dual certificate.
pub fn solve_with<T: Scalar>(lp: &LinearProgram<T>, opts: &SimplexOptions) -> Result<LpSolution<T>> {
    solve_from(lp, opts, None)
}

/// Like [`solve_with`], but first pivots the support of the feasible point
/// `start` into the basis. When that support is linearly independent phase
/// one starts at `start` instead of at the origin, which saves most of its
/// pivots on large degenerate programs. A start that does not yield a
/// feasible basis is discarded and the solve begins from scratch.
pub fn solve_from<T: Scalar>(
    lp: &LinearProgram<T>,
    opts: &SimplexOptions,
    start: Option<&[T]>,
) -> Result<LpSolution<T>> {
    if let Some(x0) = start {
        if x0.len() != lp.variable_count() {
            return Err(Error::invalid("start point length differs from the variable count"));
        }
    }
    let mut tab = initial_tableau(lp);
    if let Some(x0) = start {
        if !tab.crash(x0, opts) {
            tab = initial_tableau(lp);
        }
    }
    finish(lp, opts, tab)
}

fn initial_tableau<T: Scalar>(lp: &LinearProgram<T>) -> Tableau<T> {
    let m = lp.row_count();
    let n = lp.variable_count();
    let width = n + m + 1;
    let mut t = vec![T::zero(); m * width];
    let mut sign = vec![T::one(); m];
    for (i, b) in lp.rhs().iter().enumerate() {
        if *b < T::zero() {
            sign[i] = -T::one();
        }
        t[i * width + width - 1] = *b * sign[i];
        t[i * width + n + i] = T::one();
    }
    for &(i, j, v) in lp.entries() {
        t[i * width + j] = v * sign[i];
    }
    // Phase one maximizes −Σ artificials; reduced cost of structural j is −Σ_i a_ij.
    let mut obj = vec![T::zero(); width];
    for i in 0..m {
        for j in 0..n {
            obj[j] -= t[i * width + j];
        }
        obj[width - 1] -= t[i * width + width - 1];
    }
    Tableau {
        m,
        n,
        width,
        t,
        obj,
        sign,
        basis: (n..n + m).collect(),
        iterations: 0,
    }
}

fn finish<T: Scalar>(lp: &LinearProgram<T>, opts: &SimplexOptions, mut tab: Tableau<T>) -> Result<LpSolution<T>> {
    let (m, n, width) = (tab.m, tab.n, tab.width);
    tab.optimize(Phase::One, opts)?;

    let b_scale = lp.rhs().iter().fold(T::one(), |acc, b| acc.max(b.abs()));
    let residual = -tab.obj[width - 1];
    if residual > T::tol(opts.feasibility_tolerance) * b_scale {
        return Err(Error::Infeasible {
            residual: residual.to_f64_lossy(),
        });
    }

    let piv_tol = T::tol(opts.pivot_tolerance);
    for r in 0..m {
        if tab.basis[r] < n {
            continue;
        }
        let best = (0..n)
            .map(|j| (j, tab.at(r, j).abs()))
            .filter(|&(_, a)| a > piv_tol)
            .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite").then(b.0.cmp(&a.0)));
        match best {
            Some((j, _)) => tab.pivot(r, j),
            None => {
                // Dependent row: its structural part is numerically zero.
                for j in 0..n {
                    tab.t[r * width + j] = T::zero();
                }
                tab.t[r * width + width - 1] = T::zero();
            }
        }
    }

    // Phase two reduced costs d_j = c_B·B⁻¹A_j − c_j, artificial costs zero.
    let cost = |j: usize| if j < n { lp.objective()[j] } else { T::zero() };
    let mut obj = vec![T::zero(); width];
    for (j, d) in obj.iter_mut().enumerate() {
        let mut acc = T::zero();
        for i in 0..m {
            let a = tab.at(i, j);
            if a != T::zero() {
                acc += cost(tab.basis[i]) * a;
            }
        }
        *d = if j < width - 1 { acc - cost(j) } else { acc };
    }
    tab.obj = obj;
    tab.optimize(Phase::Two, opts)?;

    let mut x = vec![T::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.at(i, width - 1).max(T::zero());
        }
    }
    let y: Vec<T> = (0..m).map(|i| tab.obj[n + i] * tab.sign[i]).collect();

    let primal_objective = lp.objective_value(&x);
    let dual_objective = lp.dual_objective(&y);
    let complementary_slackness_gap = lp
        .reduced_costs(&y)
        .iter()
        .zip(&x)
        .map(|(d, v)| *d * *v)
        .sum::<T>()
        .abs();
    let certificate = DualCertificate {
        dual_values: y,
        primal_objective,
        dual_objective,
        complementary_slackness_gap,
    };
    let check = check_certificate(lp, &x, &certificate);
    let gap_tol = T::tol(opts.duality_gap_tolerance);
    // The independent re-check runs ten times tighter than the reported bound.
    let check_tol = T::tol(opts.duality_gap_tolerance / 10.0);
    if check.max_residual > T::tol(opts.feasibility_tolerance) * b_scale
        || certificate.duality_gap() > gap_tol
        || check.duality_gap > check_tol
        || check.complementary_slackness_gap > check_tol
        || check.max_dual_infeasibility > T::tol(opts.optimality_tolerance).max(gap_tol)
    {
        return Err(Error::Solver(format!(
            "optimum failed verification: residual {}, duality gap {}, slackness {}, dual infeasibility {}",
            check.max_residual,
            certificate.duality_gap(),
            check.complementary_slackness_gap,
            check.max_dual_infeasibility
        )));
    }
    Ok(LpSolution {
        x,
        certificate,
        iterations: tab.iterations,
        check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn lp(c: Vec<f64>, rows: &[(&[f64], f64)]) -> LinearProgram<f64> {
        let mut entries = Vec::new();
        for (i, (a, _)) in rows.iter().enumerate() {
            for (j, v) in a.iter().enumerate() {
                entries.push((i, j, *v));
            }
        }
        LinearProgram::new(c, rows.iter().map(|r| r.1).collect(), entries).unwrap()
    }

    #[test]
    fn one_constraint() {
        let s = solve(&lp(vec![1.0, 0.0], &[(&[1.0, 1.0], 1.0)])).unwrap();
        assert_eq!(s.x, vec![1.0, 0.0]);
        assert_abs_diff_eq!(s.objective(), 1.0);
        assert_abs_diff_eq!(s.certificate.dual_values[0], 1.0);
    }

    #[test]
    fn redundant_rows_do_not_change_optimum() {
        let base = lp(
            vec![3.0, 2.0, 0.0, 0.0],
            &[(&[1.0, 1.0, 1.0, 0.0], 4.0), (&[1.0, 3.0, 0.0, 1.0], 6.0)],
        );
        let dup = lp(
            vec![3.0, 2.0, 0.0, 0.0],
            &[
                (&[1.0, 1.0, 1.0, 0.0], 4.0),
                (&[1.0, 3.0, 0.0, 1.0], 6.0),
                (&[1.0, 1.0, 1.0, 0.0], 4.0),
                (&[2.0, 4.0, 1.0, 1.0], 10.0),
            ],
        );
        let a = solve(&base).unwrap();
        let b = solve(&dup).unwrap();
        assert_abs_diff_eq!(a.objective(), 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.objective(), a.objective(), epsilon = 1e-12);
        assert!(b.check.valid(1e-9));
    }

    #[test]
    fn negative_rhs_and_duals() {
        // max -x0 - x1 s.t. -x0 + x1 = -1, x0 + x1 + x2 = 3  -> x = (1, 0, 2), value -1.
        let p = lp(
            vec![-1.0, -1.0, 0.0],
            &[(&[-1.0, 1.0, 0.0], -1.0), (&[1.0, 1.0, 1.0], 3.0)],
        );
        for rule in [PivotRule::Bland, PivotRule::DantzigThenBland { degenerate_run: 5 }] {
            let s = solve_with(&p, &SimplexOptions { rule, ..Default::default() }).unwrap();
            assert_abs_diff_eq!(s.objective(), -1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.certificate.dual_objective, -1.0, epsilon = 1e-12);
            assert!(s.check.valid(1e-10));
        }
    }

    #[test]
    fn infeasible_detected() {
        let p = lp(vec![1.0, 1.0], &[(&[1.0, 1.0], 1.0), (&[1.0, 1.0], 2.0)]);
        assert!(matches!(solve(&p), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn unbounded_reported() {
        let p = lp(vec![1.0, 0.0], &[(&[1.0, -1.0], 1.0)]);
        assert!(matches!(solve(&p), Err(Error::Solver(_))));
    }

    #[test]
    fn iteration_cap() {
        let p = lp(vec![1.0, 0.0], &[(&[1.0, 1.0], 1.0)]);
        let opts = SimplexOptions { max_iterations: 0, ..Default::default() };
        assert_eq!(solve_with(&p, &opts), Err(Error::IterationLimit { limit: 0 }));
    }

    #[test]
    fn start_point_gives_same_optimum() {
        let p = lp(
            vec![3.0, 2.0, 0.0, 0.0],
            &[(&[1.0, 1.0, 1.0, 0.0], 4.0), (&[1.0, 3.0, 0.0, 1.0], 6.0)],
        );
        let cold = solve(&p).unwrap();
        let opts = SimplexOptions::default();
        // Slack vertex, and a non-vertex feasible point whose support is dependent.
        for x0 in [[0.0, 0.0, 4.0, 6.0], [1.0, 1.0, 2.0, 2.0]] {
            let warm = solve_from(&p, &opts, Some(&x0)).unwrap();
            assert_abs_diff_eq!(warm.objective(), cold.objective(), epsilon = 1e-12);
            assert!(warm.check.valid(1e-9));
        }
        assert!(solve_from(&p, &opts, Some(&[1.0])).is_err());
    }

    #[test]
    fn deterministic() {
        let p = lp(
            vec![1.0, 2.0, -1.0, 0.5],
            &[(&[1.0, 1.0, 1.0, 1.0], 2.0), (&[0.0, 1.0, -1.0, 2.0], 1.0)],
        );
        assert_eq!(solve(&p).unwrap(), solve(&p).unwrap());
    }
}
