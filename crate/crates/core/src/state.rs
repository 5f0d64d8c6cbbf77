//! Meter states and trajectories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, C64};
use crate::tolerance::Tolerances;

/// Density operator of the N-level meter.
#[derive(Debug, Clone, PartialEq)]
pub struct MeterState {
    rho: ComplexMatrix,
}

impl MeterState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_density(rho: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::DimensionMismatch {
                expected: rho.rows(),
                found: rho.cols(),
            });
        }
        if rho.hermiticity_deviation() > tol.hermiticity {
            return Err(Error::InvalidState("density operator is not Hermitian".into()));
        }
        let trace = rho.trace();
        if (trace - c64(1.0, 0.0)).norm() > tol.hermiticity {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let spectrum = linalg::hermitian_eig(&rho, tol)?;
        let smallest = spectrum
            .eigenvalues
            .iter()
            .map(|l| l.re)
            .fold(f64::INFINITY, f64::min);
        if smallest < -tol.verification {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {smallest:e} in density operator"
            )));
        }
        Ok(Self { rho })
    }

    /// `|ψ><ψ|` for a unit-norm amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let n = linalg::norm(amplitudes);
        if (n - 1.0).abs() > crate::tolerance::VERIFICATION {
            return Err(Error::InvalidState(format!("amplitude norm {n} differs from 1")));
        }
        Ok(Self {
            rho: ComplexMatrix::outer(amplitudes),
        })
    }

    /// Pure state from an arbitrary nonzero vector, normalizing it first.
    pub fn from_unnormalized(v: &[C64]) -> Result<Self> {
        let n = linalg::norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        Self::pure(&linalg::normalized(v))
    }

    pub fn from_bloch(r: BlochVector) -> Result<Self> {
        let len = r.norm();
        if len > 1.0 + crate::tolerance::VERIFICATION || !len.is_finite() {
            return Err(Error::InvalidState(format!("Bloch vector length {len} exceeds 1")));
        }
        let rho = ComplexMatrix::from_rows(&[
            &[c64(0.5 * (1.0 + r.rz), 0.0), c64(0.5 * r.rx, -0.5 * r.ry)],
            &[c64(0.5 * r.rx, 0.5 * r.ry), c64(0.5 * (1.0 - r.rz), 0.0)],
        ]);
        Ok(Self { rho })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            rho: ComplexMatrix::identity(n).scale(c64(1.0 / n as f64, 0.0)),
        }
    }

    /// Wraps a matrix produced by a trace-preserving normalization step
    /// without re-running the positivity check.
    pub(crate) fn from_normalized_unchecked(rho: ComplexMatrix) -> Self {
        Self { rho }
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dimension(&self) -> usize {
        self.rho.rows()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// Bloch vector of a qubit state; `None` for other dimensions.
    pub fn bloch(&self) -> Option<BlochVector> {
        if self.dimension() != 2 {
            return None;
        }
        let off = self.rho[(0, 1)];
        Some(BlochVector {
            rx: 2.0 * off.re,
            ry: -2.0 * off.im,
            rz: (self.rho[(0, 0)] - self.rho[(1, 1)]).re,
        })
    }

    /// `<v|ρ|v>`.
    pub fn population(&self, v: &[C64]) -> f64 {
        linalg::inner(v, &self.rho.mul_vec(v)).re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

impl BlochVector {
    pub const fn new(rx: f64, ry: f64, rz: f64) -> Self {
        Self { rx, ry, rz }
    }

    pub fn norm(&self) -> f64 {
        (self.rx * self.rx + self.ry * self.ry + self.rz * self.rz).sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        BlochVector::new(self.rx - other.rx, self.ry - other.ry, self.rz - other.rz).norm()
    }
}

/// Sequence of meter states produced by repeated protocol rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// `states[0]` is the initial meter state.
    pub states: Vec<MeterState>,
    /// Post-selection probability of each round; `probabilities[i]` produced
    /// `states[i + 1]`.
    pub probabilities: Vec<f64>,
    /// First step whose trace distance to its predecessor fell below the
    /// convergence threshold.
    pub converged_at: Option<usize>,
}

impl TrajectoryRecord {
    pub fn new(states: Vec<MeterState>, probabilities: Vec<f64>, threshold: f64) -> Result<Self> {
        let mut converged_at = None;
        for k in 1..states.len() {
            if linalg::trace_distance(&states[k], &states[k - 1])? < threshold {
                converged_at = Some(k);
                break;
            }
        }
        Ok(Self {
            states,
            probabilities,
            converged_at,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &MeterState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn bloch_path(&self) -> Option<Vec<BlochVector>> {
        self.states.iter().map(MeterState::bloch).collect()
    }
}
