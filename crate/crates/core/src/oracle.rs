//! Brute-force reference simulation of one measurement round on the full
//! system ⊗ meter Hilbert space.
//!
//! Every round builds the product state, applies the interaction unitary
//! `exp(−i·gt·σz⊗Ô_A)` exactly, projects the system onto the post-selected
//! state and renormalizes. Nothing here shares code with the reduced
//! meter-only description; this module exists to check it.
//!
//! Vectors are indexed system-major: component `(s, m)` sits at `s·N + m`
//! for system index `s ∈ {0, 1}` and meter index `m < N`.

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, C64};
use crate::params::{CouplingSpec, PostSelection, SystemPreparation};
use crate::state::{MeterState, TrajectoryRecord};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    vector: Vec<C64>,
    meter_dim: usize,
}

impl BipartiteState {
    pub fn product(system: &[C64; 2], meter: &[C64]) -> Self {
        let n = meter.len();
        let mut vector = Vec::with_capacity(2 * n);
        for s in system {
            vector.extend(meter.iter().map(|m| s * m));
        }
        Self {
            vector,
            meter_dim: n,
        }
    }

    pub fn vector(&self) -> &[C64] {
        &self.vector
    }

    pub fn meter_dim(&self) -> usize {
        self.meter_dim
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.vector)
    }

    fn block(&self, s: usize) -> &[C64] {
        &self.vector[s * self.meter_dim..(s + 1) * self.meter_dim]
    }

    /// Unnormalized meter vector `(<f| ⊗ I)|Ψ>`.
    pub fn project_system(&self, f: &[C64; 2]) -> Vec<C64> {
        let (b0, b1) = (self.block(0), self.block(1));
        b0.iter()
            .zip(b1)
            .map(|(x0, x1)| f[0].conj() * x0 + f[1].conj() * x1)
            .collect()
    }
}

/// How the system couples to the meter.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleInteraction {
    /// Qubit meter, `U = cos(gt)·I⊗I − i·sin(gt)·σz⊗σx`.
    ExactQubit,
    /// Any Hermitian meter observable; `U` is applied through the
    /// eigenphases `exp(−i·gt·s·o_j)` of `σz⊗Ô_A`.
    General(ComplexMatrix),
}

impl OracleInteraction {
    fn meter_dim(&self) -> usize {
        match self {
            OracleInteraction::ExactQubit => 2,
            OracleInteraction::General(m) => m.rows(),
        }
    }

    fn apply(&self, gt: f64, psi: &BipartiteState, tol: &Tolerances) -> Result<BipartiteState> {
        match self {
            OracleInteraction::ExactQubit => {
                let zx = ComplexMatrix::pauli_z().kron(&ComplexMatrix::pauli_x());
                let u = &ComplexMatrix::identity(4).scale(c64(gt.cos(), 0.0))
                    + &zx.scale(c64(0.0, -gt.sin()));
                Ok(BipartiteState {
                    vector: u.mul_vec(&psi.vector),
                    meter_dim: 2,
                })
            }
            OracleInteraction::General(obs) => {
                let spectrum = linalg::hermitian_eig(obs, tol)?;
                let n = obs.rows();
                let mut out = Vec::with_capacity(2 * n);
                for (s, sign) in [(0usize, 1.0), (1usize, -1.0)] {
                    let block = psi.block(s);
                    let mut evolved = vec![c64(0.0, 0.0); n];
                    for (o, v) in spectrum.eigenvalues.iter().zip(&spectrum.eigenvectors) {
                        let amp = linalg::inner(v, block)
                            * C64::from_polar(1.0, -gt * sign * o.re);
                        for (e, vi) in evolved.iter_mut().zip(v) {
                            *e += amp * vi;
                        }
                    }
                    out.extend(evolved);
                }
                Ok(BipartiteState {
                    vector: out,
                    meter_dim: n,
                })
            }
        }
    }
}

/// Pure meter vector behind a density operator, if its purity is 1 within
/// the verification tolerance.
pub fn purify(state: &MeterState, tol: &Tolerances) -> Result<Vec<C64>> {
    let purity = state.purity();
    if (purity - 1.0).abs() > tol.verification {
        return Err(Error::InvalidState(format!(
            "reference simulation needs a pure meter state, purity is {purity}"
        )));
    }
    let spectrum = linalg::hermitian_eig(state.rho(), tol)?;
    Ok(spectrum.eigenvectors[0].clone())
}

/// One full round; returns the renormalized meter state and the
/// post-selection probability.
pub fn oracle_step(
    prep: &SystemPreparation,
    post: &PostSelection,
    coupling: &CouplingSpec,
    meter: &MeterState,
    interaction: &OracleInteraction,
    tol: &Tolerances,
) -> Result<(MeterState, f64)> {
    if meter.dimension() != interaction.meter_dim() {
        return Err(Error::DimensionMismatch {
            expected: interaction.meter_dim(),
            found: meter.dimension(),
        });
    }
    let phi_a = purify(meter, tol)?;
    let psi = BipartiteState::product(&prep.ket(), &phi_a);
    let evolved = interaction.apply(coupling.product(), &psi, tol)?;
    let projected = evolved.project_system(&post.ket());
    let probability = linalg::norm(&projected).powi(2);
    if !(probability >= tol.starvation) {
        return Err(Error::PostSelectionStarved {
            step: 1,
            probability,
        });
    }
    Ok((MeterState::from_unnormalized(&projected)?, probability))
}

/// `n` rounds, each with a freshly prepared system.
pub fn oracle_run(
    prep: &SystemPreparation,
    post: &PostSelection,
    coupling: &CouplingSpec,
    initial: &MeterState,
    n: usize,
    interaction: &OracleInteraction,
    tol: &Tolerances,
) -> Result<TrajectoryRecord> {
    let mut states = Vec::with_capacity(n + 1);
    let mut probabilities = Vec::with_capacity(n);
    states.push(initial.clone());
    for step in 1..=n {
        let (next, p) = oracle_step(prep, post, coupling, states.last().unwrap(), interaction, tol)
            .map_err(|e| match e {
                Error::PostSelectionStarved { probability, .. } => {
                    Error::PostSelectionStarved { step, probability }
                }
                other => other,
            })?;
        states.push(next);
        probabilities.push(p);
    }
    TrajectoryRecord::new(states, probabilities, tol.convergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::BlochVector;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn up() -> MeterState {
        MeterState::from_bloch(BlochVector::new(0.0, 0.0, 1.0)).unwrap()
    }

    #[test]
    fn zero_coupling_leaves_meter_alone() {
        let prep = SystemPreparation::new(0.4).unwrap();
        let post = PostSelection::new(1.2, 0.7).unwrap();
        let meter = MeterState::from_bloch(BlochVector::new(0.6, 0.0, 0.8)).unwrap();
        let (out, p) = oracle_step(
            &prep,
            &post,
            &CouplingSpec::from_product(0.0).unwrap(),
            &meter,
            &OracleInteraction::ExactQubit,
            &tol(),
        )
        .unwrap();
        let ov = linalg::inner(&post.ket(), &prep.ket());
        assert!((p - ov.norm_sqr()).abs() < 1e-15);
        assert!(linalg::trace_distance(&out, &meter).unwrap() < 1e-14);
    }

    #[test]
    fn closed_form_and_eigenphase_unitaries_agree() {
        let prep = SystemPreparation::new(FRAC_PI_4).unwrap();
        let post = PostSelection::new(1.0, PI / 7.0).unwrap();
        let c = CouplingSpec::from_product(0.3).unwrap();
        let a = oracle_step(&prep, &post, &c, &up(), &OracleInteraction::ExactQubit, &tol())
            .unwrap();
        let general = OracleInteraction::General(ComplexMatrix::pauli_x());
        let b = oracle_step(&prep, &post, &c, &up(), &general, &tol()).unwrap();
        assert!(linalg::trace_distance(&a.0, &b.0).unwrap() < 1e-14);
        assert!((a.1 - b.1).abs() < 1e-14);
    }

    #[test]
    fn product_indexing_is_system_major() {
        let psi = BipartiteState::product(
            &[c64(1.0, 0.0), c64(2.0, 0.0)],
            &[c64(3.0, 0.0), c64(4.0, 0.0), c64(5.0, 0.0)],
        );
        let re: Vec<f64> = psi.vector().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![3.0, 4.0, 5.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn mixed_meter_is_rejected() {
        let prep = SystemPreparation::new(FRAC_PI_4).unwrap();
        let post = PostSelection::new(1.0, 0.3).unwrap();
        let c = CouplingSpec::from_product(0.1).unwrap();
        assert!(matches!(
            oracle_step(&prep, &post, &c, &MeterState::maximally_mixed(2), &OracleInteraction::ExactQubit, &tol()),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn unitary_regime_keeps_rx() {
        let prep = SystemPreparation::new(FRAC_PI_4).unwrap();
        let post = PostSelection::new(FRAC_PI_2, PI / 7.0).unwrap();
        let c = CouplingSpec::from_product(0.1).unwrap();
        let start = MeterState::from_bloch(BlochVector::new(0.6, 0.0, 0.8)).unwrap();
        let t = oracle_run(&prep, &post, &c, &start, 300, &OracleInteraction::ExactQubit, &tol())
            .unwrap();
        for s in &t.states {
            assert!((s.bloch().unwrap().rx - 0.6).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_rounds() {
        let prep = SystemPreparation::new(FRAC_PI_4).unwrap();
        let post = PostSelection::new(1.0, 0.3).unwrap();
        let c = CouplingSpec::from_product(0.1).unwrap();
        let t = oracle_run(&prep, &post, &c, &up(), 0, &OracleInteraction::ExactQubit, &tol())
            .unwrap();
        assert_eq!(t.states, vec![up()]);
    }
}
