//! Linear programming: problem representation, simplex solver, certificate
//! checking and the extension adversary built on top of them.

pub mod adversary;
pub mod certificate;
pub mod program;
pub mod simplex;

pub use adversary::{build_adversary_lp, max_prediction_distance, AdversaryLp, AdversaryResult};
pub use certificate::{check_certificate, CertificateCheck};
pub use program::LinearProgram;
pub use simplex::{solve, solve_from, solve_with, DualCertificate, LpSolution, PivotRule, SimplexOptions};
