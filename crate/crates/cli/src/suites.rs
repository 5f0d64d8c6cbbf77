//! Randomized comparisons between the reduced meter dynamics and the
//! brute-force bipartite reference simulation.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use weakcrit_core::dynamics;
use weakcrit_core::linalg::trace_distance;
use weakcrit_core::oracle::{self, OracleInteraction};
use weakcrit_core::protocol;
use weakcrit_core::{
    BlochVector, ComplexMatrix, CouplingSpec, DSign, MeterObservable, MeterState, PostSelection,
    SystemPreparation, Tolerances,
};

/// Agreement demanded of the exact qubit form: both paths compute the same
/// product of 2×2 matrices, so only rounding separates them.
pub const EXACT_THRESHOLD: f64 = 1e-12;
/// Upper end of the coupling range drawn for the exact suite.
pub const EXACT_MAX_GT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trial {
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub gt: f64,
    pub n: usize,
    pub initial: [f64; 3],
}

/// Uniform draws of the protocol angles, an iteration count in
/// `1..=max_steps` and a pure initial meter uniform on the Bloch sphere.
/// `gt = None` draws the coupling from `[0, EXACT_MAX_GT)`.
pub fn random_trials(seed: u64, count: usize, max_steps: usize, gt: Option<f64>) -> Vec<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let theta = rng.gen::<f64>() * FRAC_PI_2;
            let phi = rng.gen::<f64>() * PI;
            let alpha = rng.gen::<f64>() * TAU;
            let gt = gt.unwrap_or_else(|| rng.gen::<f64>() * EXACT_MAX_GT);
            let n = rng.gen_range(1..=max_steps.max(1));
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let azimuth = rng.gen::<f64>() * TAU;
            let r = (1.0 - z * z).max(0.0).sqrt();
            Trial {
                theta,
                phi,
                alpha,
                gt,
                n,
                initial: [r * azimuth.cos(), r * azimuth.sin(), z],
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    ExactQubit,
    FirstOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: Trial,
    /// Largest trace distance over all steps and the step where it occurred.
    pub max_distance: f64,
    pub worst_step: usize,
    /// Largest gap between the reference post-selection probability and
    /// `Tr[KρK†]`; only meaningful for the exact form.
    pub max_probability_error: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub trials: usize,
    pub threshold: f64,
    pub max_distance: f64,
    pub max_probability_error: Option<f64>,
    pub failed_trials: usize,
    pub pass: bool,
    pub worst: Option<TrialOutcome>,
}

fn run_trial(kind: SuiteKind, t: &Trial, sign: DSign, tol: &Tolerances) -> TrialOutcome {
    let mut outcome = TrialOutcome {
        trial: *t,
        max_distance: 0.0,
        worst_step: 0,
        max_probability_error: 0.0,
        error: None,
    };
    let result = (|| -> weakcrit_core::Result<()> {
        let prep = SystemPreparation::new(t.theta)?;
        let post = PostSelection::new(t.phi, t.alpha)?;
        let coupling = CouplingSpec::from_product(t.gt)?;
        let [rx, ry, rz] = t.initial;
        let initial = MeterState::from_bloch(BlochVector::new(rx, ry, rz))?;
        let (k, interaction) = match kind {
            SuiteKind::ExactQubit => (
                protocol::kraus_exact_qubit_signed(&prep, &post, &coupling, sign),
                OracleInteraction::ExactQubit,
            ),
            SuiteKind::FirstOrder => (
                protocol::kraus_first_order_for(
                    &prep,
                    &post,
                    &coupling,
                    &MeterObservable::sigma_x(),
                    tol,
                )?,
                OracleInteraction::General(ComplexMatrix::pauli_x()),
            ),
        };
        let reduced = dynamics::iterate_matrix(&k, &initial, t.n, tol)?;
        let reference = oracle::oracle_run(&prep, &post, &coupling, &initial, t.n, &interaction, tol)?;
        for step in 1..=t.n {
            let d = trace_distance(&reduced.states[step], &reference.states[step])?;
            if d > outcome.max_distance || d.is_nan() {
                outcome.max_distance = d;
                outcome.worst_step = step;
            }
            let dp = (reduced.probabilities[step - 1] - reference.probabilities[step - 1]).abs();
            outcome.max_probability_error = outcome.max_probability_error.max(dp);
        }
        Ok(())
    })();
    if let Err(e) = result {
        outcome.error = Some(e.to_string());
    }
    outcome
}

/// Runs every trial and summarizes. A trial that errors counts as failed.
pub fn run_suite(
    kind: SuiteKind,
    trials: &[Trial],
    sign: DSign,
    tol: &Tolerances,
) -> SuiteReport {
    let outcomes: Vec<TrialOutcome> = trials
        .par_iter()
        .map(|t| run_trial(kind, t, sign, tol))
        .collect();
    let threshold = match kind {
        SuiteKind::ExactQubit => EXACT_THRESHOLD,
        SuiteKind::FirstOrder => {
            let gt = trials.iter().map(|t| t.gt).fold(0.0, f64::max);
            tol.marginal_factor * gt * gt
        }
    };
    let bad = |o: &TrialOutcome| {
        o.error.is_some()
            || !(o.max_distance <= threshold)
            || (kind == SuiteKind::ExactQubit && !(o.max_probability_error <= threshold))
    };
    let failed_trials = outcomes.iter().filter(|o| bad(o)).count();
    let max_distance = outcomes.iter().map(|o| o.max_distance).fold(0.0, f64::max);
    let max_probability_error = outcomes
        .iter()
        .map(|o| o.max_probability_error)
        .fold(0.0, f64::max);
    let worst = outcomes
        .iter()
        .find(|o| o.error.is_some())
        .or_else(|| {
            outcomes
                .iter()
                .max_by(|a, b| a.max_distance.total_cmp(&b.max_distance))
        })
        .cloned();
    SuiteReport {
        suite: kind,
        trials: trials.len(),
        threshold,
        max_distance,
        max_probability_error: (kind == SuiteKind::ExactQubit).then_some(max_probability_error),
        failed_trials,
        pass: failed_trials == 0 && !trials.is_empty(),
        worst,
    }
}
