//! Solver-independent verification of a primal/dual pair.

use super::program::LinearProgram;
use super::simplex::DualCertificate;
use crate::scalar::Scalar;

/// Measured optimality conditions for `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateCheck<T> {
    /// `max |Ax − b|`.
    pub max_residual: T,
    /// `max(0, −min_j x_j)`.
    pub max_negativity: T,
    /// `max(0, −min_j (Aᵀy − c)_j)`.
    pub max_dual_infeasibility: T,
    /// `|cᵀx − bᵀy|` recomputed from the data.
    pub duality_gap: T,
    /// `|Σ_j x_j·(Aᵀy − c)_j|`.
    pub complementary_slackness_gap: T,
    /// `|cᵀx − reported primal|` and `|bᵀy − reported dual|`, whichever is larger.
    pub reported_mismatch: T,
}

impl<T: Scalar> CertificateCheck<T> {
    /// Every condition within `tol`.
    pub fn valid(&self, tol: T) -> bool {
        self.max_residual <= tol
            && self.max_negativity <= tol
            && self.max_dual_infeasibility <= tol
            && self.duality_gap <= tol
            && self.complementary_slackness_gap <= tol
            && self.reported_mismatch <= tol
    }
}

/// Recomputes every optimality condition of `(x, certificate)` from `lp`.
pub fn check_certificate<T: Scalar>(
    lp: &LinearProgram<T>,
    x: &[T],
    certificate: &DualCertificate<T>,
) -> CertificateCheck<T> {
    let y = &certificate.dual_values;
    let max_abs = |v: &[T]| v.iter().fold(T::zero(), |acc, r| acc.max(r.abs()));
    let max_residual = max_abs(&lp.residual(x));
    let max_negativity = x.iter().fold(T::zero(), |acc, v| acc.max(-*v));
    let d = lp.reduced_costs(y);
    let max_dual_infeasibility = d.iter().fold(T::zero(), |acc, v| acc.max(-*v));
    let primal = lp.objective_value(x);
    let dual = lp.dual_objective(y);
    let slack: T = d.iter().zip(x).map(|(a, b)| *a * *b).sum();
    CertificateCheck {
        max_residual,
        max_negativity,
        max_dual_infeasibility,
        duality_gap: (primal - dual).abs(),
        complementary_slackness_gap: slack.abs(),
        reported_mismatch: (primal - certificate.primal_objective)
            .abs()
            .max((dual - certificate.dual_objective).abs()),
    }
}
