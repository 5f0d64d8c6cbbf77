//! Numerical thresholds used across the crate.
//!
//! Every comparison against a tolerance goes through [`Tolerances`], so a
//! caller can tighten or relax them in one place. The defaults are the
//! values the test suites are written against.

use serde::{Deserialize, Serialize};

/// Residual and equivalence checks (eigenpairs, representation agreement).
pub const VERIFICATION: f64 = 1e-10;
/// Hermiticity and trace checks on density operators.
pub const HERMITICITY: f64 = 1e-12;
/// Smallest admissible |<psi_f|psi_S>| before a weak value is refused.
pub const OVERLAP_FLOOR: f64 = 1e-12;
/// Largest gt accepted by the first-order Kraus constructor.
pub const WEAKNESS_BOUND: f64 = 0.05;
/// Post-selection probability below which a trajectory is starved.
pub const STARVATION: f64 = 1e-300;
/// Successive-step trace distance that marks convergence.
pub const CONVERGENCE: f64 = 1e-10;
/// Multiple of (gt)^2 below which first-order moduli gaps count as zero.
pub const MARGINAL_FACTOR: f64 = 10.0;
/// Relative modulus difference at which tau is reported as infinite.
pub const INFINITE_TAU: f64 = 1e-14;
/// Minimum r^2 for an accepted power-law fit.
pub const FIT_R_SQUARED: f64 = 0.999;
/// Revolutions per relaxation time above which a trajectory is a spiral.
pub const SPIRAL_REVOLUTIONS: f64 = 1.0;
/// Off-diagonal threshold (relative to the Frobenius norm) for Jacobi sweeps.
pub const JACOBI: f64 = 1e-13;
/// Bisection stopping width for critical angles.
pub const BISECTION: f64 = 1e-12;
/// |Im(weak value)| treated as an exact zero at a grid point.
pub const ZERO_IMAGINARY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub verification: f64,
    pub hermiticity: f64,
    pub overlap_floor: f64,
    pub weakness_bound: f64,
    pub starvation: f64,
    pub convergence: f64,
    pub marginal_factor: f64,
    pub infinite_tau: f64,
    pub fit_r_squared: f64,
    pub spiral_revolutions: f64,
    pub jacobi: f64,
    pub bisection: f64,
    pub zero_imaginary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            verification: VERIFICATION,
            hermiticity: HERMITICITY,
            overlap_floor: OVERLAP_FLOOR,
            weakness_bound: WEAKNESS_BOUND,
            starvation: STARVATION,
            convergence: CONVERGENCE,
            marginal_factor: MARGINAL_FACTOR,
            infinite_tau: INFINITE_TAU,
            fit_r_squared: FIT_R_SQUARED,
            spiral_revolutions: SPIRAL_REVOLUTIONS,
            jacobi: JACOBI,
            bisection: BISECTION,
            zero_imaginary: ZERO_IMAGINARY,
        }
    }
}
