//! Simulation of repeated weak measurements with post-selection.
//!
//! A qubit system is pre-selected, coupled weakly to an N-level meter and
//! post-selected; the system is then discarded and a fresh one prepared,
//! while the meter is kept. The meter therefore evolves under repeated
//! applications of a single non-unitary Kraus operator. This crate builds
//! those Kraus operators, iterates them, classifies their fixed points and
//! measures the critical slowing down that appears wherever the imaginary
//! part of the weak value vanishes.
//!
//! Module map:
//!
//! - [`linalg`]: small dense complex matrices and eigensolvers.
//! - [`params`] and [`protocol`]: pre/post-selection, weak values, Kraus operators.
//! - [`dynamics`]: trajectories, fixed points, long-time states, regimes.
//! - [`criticality`]: relaxation times, sweeps over the post-selection angle, exponent fits.
//! - [`oracle`]: brute-force bipartite simulation used as ground truth.

pub mod criticality;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod protocol;
pub mod state;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SpectralDecomposition, C64};
pub use params::{CouplingSpec, PostSelection, SystemPreparation};
pub use protocol::{
    CriticalAngles, DSign, Interaction, KrausForm, KrausOperator, MeterObservable, ProtocolConfig,
    WeakValue,
};
pub use state::{BlochVector, MeterState, TrajectoryRecord};
pub use tolerance::Tolerances;
