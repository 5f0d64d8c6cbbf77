//! Repeated application of a Kraus operator to the meter.
//!
//! Three equivalent descriptions of the same evolution are provided: the
//! normalized density-matrix map `ρ → KρK†/Tr[KρK†]`, the closed Bloch-vector
//! recursion for qubit operators of the form `c·I + d·σx`, and the evolution
//! of populations in the eigenbasis of the meter observable for first-order
//! Kraus operators. Fixed points are the eigenvectors of `K`; the one with
//! the largest eigenvalue modulus attracts every state that overlaps it.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, C64};
use crate::protocol::{KrausForm, KrausOperator};
use crate::state::{BlochVector, MeterState, TrajectoryRecord};
use crate::tolerance::Tolerances;

fn check_dimension(k: &KrausOperator, state: &MeterState) -> Result<()> {
    if k.dimension() != state.dimension() {
        return Err(Error::DimensionMismatch {
            expected: k.dimension(),
            found: state.dimension(),
        });
    }
    Ok(())
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.adjoint()).scale(c64(0.5, 0.0))
}

/// One normalized protocol round; returns the new state and `Tr[KρK†]`.
pub fn step_matrix(
    k: &KrausOperator,
    rho: &MeterState,
    step: usize,
    tol: &Tolerances,
) -> Result<(MeterState, f64)> {
    let next = k.matrix().sandwich(rho.rho());
    let probability = next.trace().re;
    if !(probability >= tol.starvation) {
        return Err(Error::PostSelectionStarved { step, probability });
    }
    let rho = hermitize(&next).scale(c64(1.0 / probability, 0.0));
    Ok((MeterState::from_normalized_unchecked(rho), probability))
}

/// `n` rounds of `ρ → KρK†/Tr[KρK†]`, renormalizing after every round.
pub fn iterate_matrix(
    k: &KrausOperator,
    initial: &MeterState,
    n: usize,
    tol: &Tolerances,
) -> Result<TrajectoryRecord> {
    check_dimension(k, initial)?;
    let mut states = Vec::with_capacity(n + 1);
    let mut probabilities = Vec::with_capacity(n);
    states.push(initial.clone());
    for step in 1..=n {
        let (next, p) = step_matrix(k, states.last().unwrap(), step, tol)?;
        states.push(next);
        probabilities.push(p);
    }
    TrajectoryRecord::new(states, probabilities, tol.convergence)
}

/// State after `n` rounds without storing the path.
///
/// Uses `Kⁿ` built by repeated squaring with every intermediate product
/// rescaled to unit Frobenius norm. Since the overall scale cancels in the
/// final normalization this is the same state as [`iterate_matrix`] produces,
/// at `O(log n)` cost.
pub fn propagate(
    k: &KrausOperator,
    initial: &MeterState,
    n: usize,
    tol: &Tolerances,
) -> Result<MeterState> {
    check_dimension(k, initial)?;
    if n == 0 {
        return Ok(initial.clone());
    }
    let power = normalized_power(k.matrix(), n)
        .ok_or(Error::PostSelectionStarved { step: 1, probability: 0.0 })?;
    let next = power.sandwich(initial.rho());
    let weight = next.trace().re;
    if !(weight >= tol.starvation) {
        return Err(Error::PostSelectionStarved {
            step: n,
            probability: weight,
        });
    }
    Ok(MeterState::from_normalized_unchecked(
        hermitize(&next).scale(c64(1.0 / weight, 0.0)),
    ))
}

fn unit_frobenius(m: ComplexMatrix) -> Option<ComplexMatrix> {
    let s = m.frobenius_norm();
    (s > 0.0 && s.is_finite()).then(|| m.scale(c64(1.0 / s, 0.0)))
}

fn normalized_power(m: &ComplexMatrix, mut n: usize) -> Option<ComplexMatrix> {
    let mut base = unit_frobenius(m.clone())?;
    let mut result: Option<ComplexMatrix> = None;
    while n > 0 {
        if n & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => unit_frobenius(&r * &base)?,
            });
        }
        n >>= 1;
        if n > 0 {
            base = unit_frobenius(&base * &base)?;
        }
    }
    result
}

/// Per-round weights used by [`iterate_amplitudes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeWeights {
    /// `|1 − i·gt·O_w·o_j|²` per round: the exact population update of the
    /// first-order Kraus operator.
    Exact,
    /// `|1 + 2·gt·Im(O_w)·o_j|` per round: the same update expanded to first
    /// order in `gt`.
    FirstOrder,
}

/// Populations `|c_j⁽ⁿ⁾|²` in the eigenbasis of the meter observable.
///
/// `initial` holds the amplitudes `c_j⁽⁰⁾` with respect to
/// `meter_observable().spectrum.eigenvectors`, in that order. Weights are
/// accumulated in log space so that large `n` cannot underflow.
pub fn iterate_amplitudes(
    k: &KrausOperator,
    initial: &[C64],
    n: usize,
    weights: AmplitudeWeights,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    if k.form() != KrausForm::FirstOrderGeneral {
        return Err(Error::InvalidArgument(
            "amplitude evolution needs a first-order Kraus operator".into(),
        ));
    }
    let obs = k.meter_observable().expect("first-order Kraus carries its observable");
    let wv = k.weak_value().expect("first-order Kraus carries its weak value");
    if !obs.nondegenerate {
        return Err(Error::DegenerateMeterObservable);
    }
    if initial.len() != obs.dimension() {
        return Err(Error::DimensionMismatch {
            expected: obs.dimension(),
            found: initial.len(),
        });
    }
    let total: f64 = initial.iter().map(|c| c.norm_sqr()).sum();
    if (total - 1.0).abs() > tol.verification {
        return Err(Error::InvalidState(format!("amplitudes have norm² {total}")));
    }
    let gt = k.coupling_product();
    let log_p: Vec<f64> = initial
        .iter()
        .zip(obs.eigenvalues())
        .map(|(c, o)| {
            let per_round = match weights {
                AmplitudeWeights::Exact => {
                    2.0 * (c64(1.0, 0.0) - c64(0.0, gt * o) * wv.value).norm().ln()
                }
                AmplitudeWeights::FirstOrder => {
                    (1.0 + 2.0 * gt * wv.imaginary_part() * o).abs().ln()
                }
            };
            let base = c.norm_sqr().ln();
            if n == 0 {
                base
            } else {
                base + n as f64 * per_round
            }
        })
        .collect();
    let max = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::PostSelectionStarved {
            step: n,
            probability: 0.0,
        });
    }
    let unnormalized: Vec<f64> = log_p.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = unnormalized.iter().sum();
    Ok(unnormalized.into_iter().map(|p| p / sum).collect())
}

/// Amplitudes of a pure meter vector in the eigenbasis of the first-order
/// Kraus operator's meter observable.
pub fn eigenbasis_amplitudes(k: &KrausOperator, psi: &[C64]) -> Result<Vec<C64>> {
    let obs = k
        .meter_observable()
        .ok_or_else(|| Error::InvalidArgument("Kraus operator has no meter observable".into()))?;
    Ok(obs
        .spectrum
        .eigenvectors
        .iter()
        .map(|a| linalg::inner(a, psi))
        .collect())
}

/// One round of the Bloch-vector recursion for `K = c·I + d·σx`.
///
/// With `a± = |c|² ± |d|²` and `s = c·d*`:
///
/// ```text
/// den = a+ + 2·Re(s)·rx
/// rx' = (a+·rx + 2·Re(s)) / den
/// ry' = (a−·ry − 2·Im(s)·rz) / den
/// rz' = (a−·rz + 2·Im(s)·ry) / den
/// ```
///
/// The `x` component is driven by `a+`, the rotating `y, z` pair by `a−`;
/// this is exactly `KρK†/Tr[KρK†]` written in Pauli components.
pub fn bloch_step(k: &KrausOperator, r: &BlochVector, tol: &Tolerances) -> Result<BlochVector> {
    let (c, d) = k.qubit_coefficients(tol)?;
    let a_plus = c.norm_sqr() + d.norm_sqr();
    let a_minus = c.norm_sqr() - d.norm_sqr();
    let s = c * d.conj();
    let den = a_plus + 2.0 * s.re * r.rx;
    if !(den >= tol.starvation) {
        return Err(Error::PostSelectionStarved {
            step: 1,
            probability: den,
        });
    }
    Ok(BlochVector {
        rx: (a_plus * r.rx + 2.0 * s.re) / den,
        ry: (a_minus * r.ry - 2.0 * s.im * r.rz) / den,
        rz: (a_minus * r.rz + 2.0 * s.im * r.ry) / den,
    })
}

/// `n` chained [`bloch_step`]s, starting point included.
pub fn bloch_chain(
    k: &KrausOperator,
    r0: &BlochVector,
    n: usize,
    tol: &Tolerances,
) -> Result<Vec<BlochVector>> {
    let mut path = Vec::with_capacity(n + 1);
    path.push(*r0);
    for step in 1..=n {
        let next = bloch_step(k, path.last().unwrap(), tol).map_err(|e| match e {
            Error::PostSelectionStarved { probability, .. } => {
                Error::PostSelectionStarved { step, probability }
            }
            other => other,
        })?;
        path.push(next);
    }
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    MarginalUnitary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    /// Position in the sorted Kraus spectrum.
    pub index: usize,
    pub eigenvalue: C64,
    pub vector: Vec<C64>,
    /// Qubit meters only.
    pub bloch: Option<BlochVector>,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub fixed_points: Vec<FixedPoint>,
    pub moduli_gap: f64,
    pub marginal_band: f64,
}

impl FixedPointReport {
    pub fn stable(&self) -> Option<&FixedPoint> {
        self.fixed_points
            .iter()
            .find(|f| f.stability == Stability::Stable)
    }
}

/// Fixed points of the normalized map and their stability.
///
/// The eigenvector with the strictly largest eigenvalue modulus is stable
/// and all others unstable. When the two leading moduli agree within
/// [`KrausOperator::marginal_band`] the map is unitary up to that precision
/// and every fixed point is marginal.
pub fn classify_fixed_points(k: &KrausOperator, tol: &Tolerances) -> Result<FixedPointReport> {
    let spectrum = k.spectrum(tol)?;
    let leading = spectrum.eigenvalues[0].norm();
    let band = k.marginal_band(leading, tol);
    let marginal = spectrum.len() >= 2 && spectrum.moduli_gap <= band;
    let fixed_points = spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.eigenvectors)
        .enumerate()
        .map(|(index, (l, v))| FixedPoint {
            index,
            eigenvalue: *l,
            vector: v.clone(),
            bloch: MeterState::pure(v).ok().and_then(|s| s.bloch()),
            stability: if marginal {
                Stability::MarginalUnitary
            } else if index == 0 {
                Stability::Stable
            } else {
                Stability::Unstable
            },
        })
        .collect();
    Ok(FixedPointReport {
        fixed_points,
        moduli_gap: spectrum.moduli_gap,
        marginal_band: band,
    })
}

/// Limit of the normalized map as the number of rounds grows, read off the
/// spectrum: the projector onto the dominant eigenvector.
pub fn long_time_state(
    k: &KrausOperator,
    initial: &MeterState,
    tol: &Tolerances,
) -> Result<MeterState> {
    check_dimension(k, initial)?;
    let spectrum = k.spectrum(tol)?;
    if spectrum.len() < 2 {
        return Err(Error::DimensionTooSmall {
            found: spectrum.len(),
        });
    }
    let band = k.marginal_band(spectrum.eigenvalues[0].norm(), tol);
    if spectrum.moduli_gap <= band {
        return Err(Error::NoDominantEigenvalue {
            gap: spectrum.moduli_gap,
            band,
        });
    }
    let dominant = &spectrum.eigenvectors[0];
    let weight = initial.population(dominant);
    if weight <= tol.overlap_floor {
        return Err(Error::UnstableManifoldStart { weight });
    }
    MeterState::pure(dominant)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Equal eigenvalue moduli: rotation about x, no attracting pole.
    Unitary,
    /// The `rx = −1` pole attracts.
    StableFlowLow,
    /// The `rx = +1` pole attracts.
    StableFlowHigh,
    /// A pole attracts, but the state winds around the x axis at least
    /// `spiral_revolutions` times per relaxation time before settling.
    NearUnitarySpiral,
}

/// Revolutions about the fixed-point axis per e-folding of the subdominant
/// amplitude: `|arg(λ1/λ2)| / (2π·ln(|λ1|/|λ2|))`.
pub fn revolutions_per_relaxation(k: &KrausOperator, tol: &Tolerances) -> Result<f64> {
    let s = k.spectrum(tol)?;
    if s.len() < 2 {
        return Err(Error::DimensionTooSmall { found: s.len() });
    }
    let (l1, l2) = (s.eigenvalues[0], s.eigenvalues[1]);
    if l2.norm() == 0.0 {
        return Ok(0.0);
    }
    let contraction = (l1.norm() / l2.norm()).ln();
    let rotation = (l1 / l2).arg().abs();
    Ok(rotation / (TAU * contraction))
}

/// Dynamical regime of a qubit Kraus operator, decided from its spectrum.
pub fn classify_regime(k: &KrausOperator, tol: &Tolerances) -> Result<Regime> {
    if k.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: k.dimension(),
        });
    }
    let report = classify_fixed_points(k, tol)?;
    let Some(stable) = report.stable() else {
        return Ok(Regime::Unitary);
    };
    if revolutions_per_relaxation(k, tol)? >= tol.spiral_revolutions {
        return Ok(Regime::NearUnitarySpiral);
    }
    let rx = stable.bloch.map(|b| b.rx).unwrap_or(0.0);
    Ok(if rx > 0.0 {
        Regime::StableFlowHigh
    } else {
        Regime::StableFlowLow
    })
}

/// `Tr[O ρ]` for a Hermitian observable.
pub fn expectation(obs: &ComplexMatrix, state: &MeterState, tol: &Tolerances) -> Result<f64> {
    if obs.rows() != state.dimension() || !obs.is_square() {
        return Err(Error::DimensionMismatch {
            expected: state.dimension(),
            found: obs.rows(),
        });
    }
    if !obs.is_hermitian(tol.hermiticity) {
        return Err(Error::NotHermitian {
            deviation: obs.hermiticity_deviation(),
        });
    }
    let value = (obs * state.rho()).trace();
    let scale = obs.frobenius_norm().max(1.0);
    if value.im.abs() > tol.verification * scale {
        return Err(Error::InvalidState(format!(
            "expectation has imaginary residue {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{CouplingSpec, PostSelection, SystemPreparation};
    use crate::protocol::{self, MeterObservable, WeakValue};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn exact(phi: f64, gt: f64) -> KrausOperator {
        protocol::kraus_exact_qubit(
            &SystemPreparation::new(FRAC_PI_4).unwrap(),
            &PostSelection::new(phi, PI / 7.0).unwrap(),
            &CouplingSpec::from_product(gt).unwrap(),
        )
    }

    fn bloch_state(rx: f64, ry: f64, rz: f64) -> MeterState {
        MeterState::from_bloch(BlochVector::new(rx, ry, rz)).unwrap()
    }

    #[test]
    fn zero_rounds_returns_initial() {
        let s = bloch_state(0.0, 0.6, 0.8);
        let t = iterate_matrix(&exact(1.0, 0.1), &s, 0, &tol()).unwrap();
        assert_eq!(t.states, vec![s]);
        assert!(t.probabilities.is_empty());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = MeterState::maximally_mixed(3);
        assert!(matches!(
            iterate_matrix(&exact(1.0, 0.1), &s, 1, &tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eigenvector_is_stationary() {
        let k = exact(1.0, 0.1);
        let minus = bloch_state(-1.0, 0.0, 0.0);
        let t = iterate_matrix(&k, &minus, 200, &tol()).unwrap();
        for s in &t.states {
            assert!(linalg::trace_distance(s, &minus).unwrap() < 1e-12);
        }
        assert_eq!(t.converged_at, Some(1));
    }

    #[test]
    fn starvation_on_annihilated_state() {
        let k = KrausOperator::synthetic(ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
        let s = bloch_state(0.0, 0.0, -1.0);
        assert!(matches!(
            iterate_matrix(&k, &s, 3, &tol()),
            Err(Error::PostSelectionStarved { step: 1, .. })
        ));
    }

    #[test]
    fn propagate_matches_stepwise_iteration() {
        let k = exact(0.8, 0.05);
        let s = bloch_state(0.1, -0.3, 0.9);
        let t = iterate_matrix(&k, &s, 777, &tol()).unwrap();
        let p = propagate(&k, &s, 777, &tol()).unwrap();
        assert!(linalg::trace_distance(t.last(), &p).unwrap() < 1e-12);
    }

    #[test]
    fn bloch_step_matches_matrix_step() {
        let k = exact(1.1, 0.3);
        let r = BlochVector::new(0.3, 0.5, -0.2);
        let r = BlochVector::new(r.rx / r.norm(), r.ry / r.norm(), r.rz / r.norm());
        let next = bloch_step(&k, &r, &tol()).unwrap();
        let t = iterate_matrix(&k, &MeterState::from_bloch(r).unwrap(), 1, &tol()).unwrap();
        let want = t.last().bloch().unwrap();
        assert!(next.distance(&want) < 1e-12, "{next:?} vs {want:?}");
    }

    #[test]
    fn bloch_step_fixed_points_and_zero_coupling() {
        let k = exact(0.4, 0.2);
        for rx in [1.0, -1.0] {
            let r = BlochVector::new(rx, 0.0, 0.0);
            assert_eq!(bloch_step(&k, &r, &tol()).unwrap(), r);
        }
        let k0 = exact(0.4, 0.0);
        let r = BlochVector::new(0.0, 0.6, 0.8);
        assert!(bloch_step(&k0, &r, &tol()).unwrap().distance(&r) < 1e-15);
    }

    #[test]
    fn amplitudes_zero_rounds_and_real_weak_value() {
        let k = protocol::kraus_first_order(
            c64(0.8, 0.1),
            WeakValue::new(c64(0.7, 0.0)),
            &CouplingSpec::from_product(0.01).unwrap(),
            &MeterObservable::sigma_x(),
            &tol(),
        )
        .unwrap();
        let c0 = [c64(0.6, 0.0), c64(0.0, 0.8)];
        let p0 = iterate_amplitudes(&k, &c0, 0, AmplitudeWeights::Exact, &tol()).unwrap();
        assert!((p0[0] - 0.36).abs() < 1e-15 && (p0[1] - 0.64).abs() < 1e-15);
        for weights in [AmplitudeWeights::Exact, AmplitudeWeights::FirstOrder] {
            let p = iterate_amplitudes(&k, &c0, 5000, weights, &tol()).unwrap();
            assert!((p[0] - 0.36).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn amplitudes_two_level_reference_ratio() {
        // gt·Im(O_w) = 0.01 with a purely imaginary weak value, o = ±1
        let gt = 0.01;
        let k = protocol::kraus_first_order(
            c64(1.0, 0.0),
            WeakValue::new(c64(0.0, 1.0)),
            &CouplingSpec::from_product(gt).unwrap(),
            &MeterObservable::sigma_x(),
            &tol(),
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c0 = [c64(h, 0.0), c64(h, 0.0)];
        let n = 100;

        let p = iterate_amplitudes(&k, &c0, n, AmplitudeWeights::FirstOrder, &tol()).unwrap();
        let ratio = (1.02_f64 / 0.98).powi(n as i32);
        assert!((p[0] / p[1] - ratio).abs() / ratio < 1e-12);
        assert!((p[0] - ratio / (1.0 + ratio)).abs() < 1e-14);

        let p = iterate_amplitudes(&k, &c0, n, AmplitudeWeights::Exact, &tol()).unwrap();
        let ratio = (1.01_f64 / 0.99).powi(2 * n as i32);
        assert!((p[0] / p[1] - ratio).abs() / ratio < 1e-12);

        let psi = MeterState::pure(&[c64(1.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let t = iterate_matrix(&k, &psi, n, &tol()).unwrap();
        let obs = k.meter_observable().unwrap();
        let p_matrix = t.last().population(&obs.spectrum.eigenvectors[0]);
        assert!((p_matrix - p[0]).abs() < 1e-12);
    }

    #[test]
    fn amplitudes_need_first_order_kraus() {
        let k = exact(1.0, 0.01);
        let c0 = [c64(1.0, 0.0), c64(0.0, 0.0)];
        assert!(iterate_amplitudes(&k, &c0, 1, AmplitudeWeights::Exact, &tol()).is_err());
    }

    #[test]
    fn fixed_points_first_order() {
        let gt = 0.01;
        let mk = |w: C64| {
            protocol::kraus_first_order(
                c64(0.9, 0.0),
                WeakValue::new(w),
                &CouplingSpec::from_product(gt).unwrap(),
                &MeterObservable::sigma_x(),
                &tol(),
            )
            .unwrap()
        };
        let r = classify_fixed_points(&mk(c64(0.5, 0.0)), &tol()).unwrap();
        assert!(r
            .fixed_points
            .iter()
            .all(|f| f.stability == Stability::MarginalUnitary));

        let r = classify_fixed_points(&mk(c64(0.5, 0.8)), &tol()).unwrap();
        let stable = r.stable().unwrap();
        assert!((stable.bloch.unwrap().rx - 1.0).abs() < 1e-12);
        assert_eq!(
            r.fixed_points
                .iter()
                .filter(|f| f.stability == Stability::Stable)
                .count(),
            1
        );
    }

    #[test]
    fn long_time_state_errors() {
        let k = exact(1.0, 0.1);
        let stable = classify_fixed_points(&k, &tol()).unwrap();
        let unstable = &stable.fixed_points[1];
        let start = MeterState::pure(&unstable.vector).unwrap();
        assert!(matches!(
            long_time_state(&k, &start, &tol()),
            Err(Error::UnstableManifoldStart { .. })
        ));
        let unitary = exact(FRAC_PI_2, 0.1);
        assert!(matches!(
            long_time_state(&unitary, &bloch_state(0.0, 0.0, 1.0), &tol()),
            Err(Error::NoDominantEigenvalue { .. })
        ));
    }

    #[test]
    fn long_time_state_is_dominant_projector() {
        let k = exact(1.0, 0.1);
        let s = bloch_state(0.0, 0.6, 0.8);
        let limit = long_time_state(&k, &s, &tol()).unwrap();
        let far = propagate(&k, &s, 5000, &tol()).unwrap();
        assert!(linalg::trace_distance(&limit, &far).unwrap() < 1e-10);
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(&exact(FRAC_PI_2, 0.1), &tol()).unwrap(), Regime::Unitary);
        assert_eq!(
            classify_regime(&exact(FRAC_PI_2 + 0.1, 0.1), &tol()).unwrap(),
            Regime::NearUnitarySpiral
        );
        let far = classify_regime(&exact(1.0, 0.1), &tol()).unwrap();
        assert!(matches!(far, Regime::StableFlowHigh | Regime::StableFlowLow));
        // stability exchange across π/2
        let other = classify_regime(&exact(2.5, 0.1), &tol()).unwrap();
        assert!(matches!(other, Regime::StableFlowHigh | Regime::StableFlowLow));
        assert_ne!(far, other);
    }

    #[test]
    fn expectation_values() {
        let z = ComplexMatrix::pauli_z();
        let x = ComplexMatrix::pauli_x();
        assert_eq!(expectation(&z, &bloch_state(0.0, 0.0, 1.0), &tol()).unwrap(), 1.0);
        assert_eq!(expectation(&x, &MeterState::maximally_mixed(2), &tol()).unwrap(), 0.0);
        let bad = ComplexMatrix::from_rows(&[
            &[c64(0.0, 0.0), c64(1.0, 0.0)],
            &[c64(0.0, 0.0), c64(0.0, 0.0)],
        ]);
        assert!(matches!(
            expectation(&bad, &MeterState::maximally_mixed(2), &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }
}
