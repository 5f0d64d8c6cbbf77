//! Relaxation times, sweeps over the post-selection angle and power-law fits
//! of the divergence of the relaxation time at critical angles.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::params::CouplingSpec;
use crate::protocol::{KrausOperator, ProtocolConfig, WeakValue};
use crate::state::MeterState;
use crate::tolerance::Tolerances;

/// Relaxation time in protocol rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tau {
    Finite(f64),
    /// Leading eigenvalue moduli coincide: no relaxation at all.
    Infinite,
}

impl Tau {
    pub fn finite(self) -> Option<f64> {
        match self {
            Tau::Finite(t) => Some(t),
            Tau::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Tau::Infinite
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Finite(t) => write!(f, "{t}"),
            Tau::Infinite => f.write_str("inf"),
        }
    }
}

/// `τ = 1/|ln(|λ1|²/|λ2|²)|` from the sorted Kraus spectrum.
///
/// Returns [`Tau::Infinite`] when `|λ1|` and `|λ2|` agree to the relative
/// `infinite_tau` tolerance.
pub fn relaxation_time(k: &KrausOperator, tol: &Tolerances) -> Result<Tau> {
    let s = k.spectrum(tol)?;
    if s.len() < 2 {
        return Err(Error::DimensionTooSmall { found: s.len() });
    }
    let m1 = s.eigenvalues[0].norm();
    let m2 = s.eigenvalues[1].norm();
    if m1 == 0.0 || (m1 - m2) <= tol.infinite_tau * m1 {
        return Ok(Tau::Infinite);
    }
    if m2 == 0.0 {
        return Ok(Tau::Finite(0.0));
    }
    // ln(m1/m2) through ln_1p keeps full precision when the ratio is near 1
    let log_ratio = 2.0 * ((m1 - m2) / m2).ln_1p();
    Ok(Tau::Finite(1.0 / log_ratio.abs()))
}

/// First-order estimate `τ ≈ 1/|2·gt·Im(O_w)·(o1 − o2)|`.
pub fn analytic_tau_first_order(
    wv: WeakValue,
    coupling: &CouplingSpec,
    o1: f64,
    o2: f64,
) -> Result<Tau> {
    if o1 == o2 {
        return Err(Error::DegenerateMeterObservable);
    }
    let rate = 2.0 * coupling.product() * wv.imaginary_part() * (o1 - o2);
    if rate == 0.0 {
        return Ok(Tau::Infinite);
    }
    Ok(Tau::Finite(1.0 / rate.abs()))
}

/// `points` evenly spaced values from `start` to `stop`, both included.
pub fn uniform_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point".into()));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidArgument("grid bounds must be finite".into()));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    if stop <= start {
        return Err(Error::InvalidArgument(format!(
            "grid stop {stop} must exceed start {start}"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                stop
            } else {
                start + (stop - start) * (i as f64 / last)
            }
        })
        .collect())
}

/// Log-spaced offsets from `lo` to `hi` with `per_decade` intervals per
/// factor of ten; both ends included.
pub fn log_spaced_offsets(lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || per_decade == 0 {
        return Err(Error::InvalidArgument(format!(
            "bad offset window [{lo}, {hi}] with {per_decade} points per decade"
        )));
    }
    let decades = (hi / lo).log10();
    let intervals = (decades * per_decade as f64).round().max(1.0) as usize;
    let step = decades / intervals as f64;
    Ok((0..=intervals)
        .map(|i| {
            if i == intervals {
                hi
            } else {
                lo * 10f64.powf(i as f64 * step)
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSample {
    pub phi: f64,
    /// `None` when the point could not be evaluated; see `error`.
    pub tau: Option<Tau>,
    pub error: Option<String>,
}

/// `τ(φ)` over a grid; per-point failures are recorded, not propagated.
pub fn relaxation_profile(
    config: &ProtocolConfig,
    grid: &[f64],
    tol: &Tolerances,
) -> Vec<RelaxationSample> {
    grid.iter()
        .map(|&phi| match config.kraus_at(phi, tol).and_then(|k| relaxation_time(&k, tol)) {
            Ok(tau) => RelaxationSample {
                phi,
                tau: Some(tau),
                error: None,
            },
            Err(e) => RelaxationSample {
                phi,
                tau: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub n: usize,
    /// One entry per requested observable; `None` where iteration failed.
    pub expectations: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub phi: f64,
    pub abs_lambda_1: Option<f64>,
    pub abs_lambda_2: Option<f64>,
    pub im_weak_value: Option<f64>,
    pub tau: Option<Tau>,
    pub samples: Vec<SweepSample>,
    /// Failure to build the Kraus operator or its spectrum at this angle.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub ns: Vec<usize>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// `(φ, <obs>)` pairs of one observable at one iteration count.
    pub fn curve(&self, n: usize, observable: usize) -> Vec<(f64, Option<f64>)> {
        let Some(col) = self.ns.iter().position(|&m| m == n) else {
            return Vec::new();
        };
        self.points
            .iter()
            .map(|p| {
                let v = p
                    .samples
                    .get(col)
                    .and_then(|s| s.expectations.get(observable).copied().flatten());
                (p.phi, v)
            })
            .collect()
    }
}

/// Checks a sweep grid: nonempty, strictly increasing, inside `[0, π]`.
pub fn validate_phi_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("phi grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("phi grid is not strictly increasing".into()));
    }
    let slack = 1e-12;
    if grid[0] < -slack || grid[grid.len() - 1] > std::f64::consts::PI + slack {
        return Err(Error::InvalidArgument("phi grid leaves [0, pi]".into()));
    }
    Ok(())
}

/// All sweep columns at a single post-selection angle.
pub fn sweep_point(
    config: &ProtocolConfig,
    phi: f64,
    ns: &[usize],
    observables: &[ComplexMatrix],
    initial: &MeterState,
    tol: &Tolerances,
) -> SweepPoint {
    let im_weak_value = config.weak_value_at(phi, tol).ok().map(|w| w.imaginary_part());
    let mut point = SweepPoint {
        phi,
        abs_lambda_1: None,
        abs_lambda_2: None,
        im_weak_value,
        tau: None,
        samples: Vec::with_capacity(ns.len()),
        error: None,
    };
    let k = match config.kraus_at(phi, tol) {
        Ok(k) => k,
        Err(e) => {
            point.error = Some(e.to_string());
            point.samples = ns
                .iter()
                .map(|&n| SweepSample {
                    n,
                    expectations: vec![None; observables.len()],
                    error: Some(e.to_string()),
                })
                .collect();
            return point;
        }
    };
    match k.spectrum(tol) {
        Ok(s) => {
            let moduli = s.moduli();
            point.abs_lambda_1 = moduli.first().copied();
            point.abs_lambda_2 = moduli.get(1).copied();
        }
        Err(e) => point.error = Some(e.to_string()),
    }
    point.tau = relaxation_time(&k, tol).ok();
    for &n in ns {
        let sample = match dynamics::propagate(&k, initial, n, tol) {
            Ok(state) => SweepSample {
                n,
                expectations: observables
                    .iter()
                    .map(|o| dynamics::expectation(o, &state, tol).ok())
                    .collect(),
                error: None,
            },
            Err(e) => SweepSample {
                n,
                expectations: vec![None; observables.len()],
                error: Some(e.to_string()),
            },
        };
        point.samples.push(sample);
    }
    point
}

/// Sequential sweep over `grid`; see [`sweep_point`] for a single row.
pub fn sweep_phi(
    config: &ProtocolConfig,
    grid: &[f64],
    ns: &[usize],
    observables: &[ComplexMatrix],
    initial: &MeterState,
    tol: &Tolerances,
) -> Result<SweepResult> {
    validate_phi_grid(grid)?;
    if initial.dimension() != config.meter_dim() {
        return Err(Error::DimensionMismatch {
            expected: config.meter_dim(),
            found: initial.dimension(),
        });
    }
    Ok(SweepResult {
        ns: ns.to_vec(),
        points: grid
            .iter()
            .map(|&phi| sweep_point(config, phi, ns, observables, initial, tol))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Below => -1.0,
            Side::Above => 1.0,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Below => "below",
            Side::Above => "above",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub phi_c: f64,
    pub side: Side,
    pub offsets: Vec<f64>,
    pub taus: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub nu: f64,
}

/// Ordinary least squares `y = slope·x + intercept`; returns
/// `(slope, intercept, r²)`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidArgument(
            "regression needs at least three paired points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("regression abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok((slope, intercept, r_squared))
}

/// Fits `ln τ` against `ln|φ − φ_c|` on one side of a critical angle.
///
/// `kraus_at` builds the Kraus operator at a given angle, so any family of
/// operators can be fitted, not only those a [`ProtocolConfig`] describes.
pub fn fit_exponent_with<F>(
    kraus_at: F,
    phi_c: f64,
    side: Side,
    offsets: &[f64],
    tol: &Tolerances,
) -> Result<ExponentFit>
where
    F: Fn(f64) -> Result<KrausOperator>,
{
    if offsets.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::InvalidArgument("fit offsets must be positive".into()));
    }
    let mut taus = Vec::with_capacity(offsets.len());
    for &d in offsets {
        let phi = phi_c + side.sign() * d;
        match relaxation_time(&kraus_at(phi)?, tol)? {
            Tau::Finite(t) => taus.push(t),
            Tau::Infinite => return Err(Error::WindowContainsCriticalPoint { phi }),
        }
    }
    if taus.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidArgument(
            "relaxation time vanished inside the fit window".into(),
        ));
    }
    let x: Vec<f64> = offsets.iter().map(|d| d.ln()).collect();
    let y: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let (slope, intercept, r_squared) = linear_regression(&x, &y)?;
    if r_squared < tol.fit_r_squared {
        return Err(Error::PoorFit {
            r_squared,
            threshold: tol.fit_r_squared,
            slope,
        });
    }
    Ok(ExponentFit {
        phi_c,
        side,
        offsets: offsets.to_vec(),
        taus,
        slope,
        intercept,
        r_squared,
        nu: -slope,
    })
}

pub fn fit_exponent(
    config: &ProtocolConfig,
    phi_c: f64,
    side: Side,
    offsets: &[f64],
    tol: &Tolerances,
) -> Result<ExponentFit> {
    fit_exponent_with(|phi| config.kraus_at(phi, tol), phi_c, side, offsets, tol)
}

/// Sides of `phi_c` on which a window of half-width `reach` stays inside
/// `[0, π]`.
pub fn available_sides(phi_c: f64, reach: f64) -> Vec<Side> {
    let mut sides = Vec::with_capacity(2);
    if phi_c - reach >= 0.0 {
        sides.push(Side::Below);
    }
    if phi_c + reach <= std::f64::consts::PI {
        sides.push(Side::Above);
    }
    sides
}

/// Slope `A` of `Im(O_w)(φ) ≈ A·(φ − φ_c)` by finite differences.
///
/// Uses a central difference when both neighbours lie in `[0, π]` and a
/// one-sided difference otherwise.
pub fn weak_value_slope(
    config: &ProtocolConfig,
    phi_c: f64,
    h: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let im = |phi: f64| config.weak_value_at(phi, tol).map(|w| w.imaginary_part());
    let pi = std::f64::consts::PI;
    if phi_c - h >= 0.0 && phi_c + h <= pi {
        Ok((im(phi_c + h)? - im(phi_c - h)?) / (2.0 * h))
    } else if phi_c + h <= pi {
        Ok((im(phi_c + h)? - im(phi_c)?) / h)
    } else {
        Ok((im(phi_c)? - im(phi_c - h)?) / h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub left_phi: f64,
    pub right_phi: f64,
    pub magnitude: f64,
}

/// Jumps larger than `threshold` between neighbouring defined samples.
///
/// Samples lying within `exclusion` of an angle in `skip` are dropped first:
/// at a critical angle the map is unitary and the curve has no long-time
/// value there. With `period = Some(p)` each end of the range also gets a
/// ghost neighbour, the periodic image of the sample at the other end, so a
/// discontinuity sitting on the boundary shows up at both ends of the range.
pub fn detect_jumps(
    samples: &[(f64, Option<f64>)],
    threshold: f64,
    skip: &[f64],
    exclusion: f64,
    period: Option<f64>,
) -> Vec<Jump> {
    let kept: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|&(phi, v)| v.map(|v| (phi, v)))
        .filter(|(phi, _)| skip.iter().all(|c| (phi - c).abs() > exclusion))
        .collect();
    let mut jumps: Vec<Jump> = kept
        .windows(2)
        .filter_map(|w| {
            let magnitude = (w[1].1 - w[0].1).abs();
            (magnitude > threshold).then_some(Jump {
                left_phi: w[0].0,
                right_phi: w[1].0,
                magnitude,
            })
        })
        .collect();
    if let (Some(p), Some(first), Some(last)) = (period, kept.first(), kept.last()) {
        let magnitude = (first.1 - last.1).abs();
        if kept.len() > 1 && magnitude > threshold {
            // the periodic image of the last sample precedes the first one,
            // and the image of the first sample follows the last one
            jumps.insert(
                0,
                Jump {
                    left_phi: last.0 - p,
                    right_phi: first.0,
                    magnitude,
                },
            );
            jumps.push(Jump {
                left_phi: last.0,
                right_phi: first.0 + p,
                magnitude,
            });
        }
    }
    jumps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, ComplexMatrix};
    use crate::protocol::{Interaction, MeterObservable};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag_kraus(a: f64, b: f64) -> KrausOperator {
        KrausOperator::synthetic(ComplexMatrix::from_real_diagonal(&[a, b])).unwrap()
    }

    #[test]
    fn tau_reference_values() {
        let k = diag_kraus(std::f64::consts::E.sqrt(), 1.0);
        assert!((relaxation_time(&k, &tol()).unwrap().finite().unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(relaxation_time(&diag_kraus(0.7, -0.7), &tol()).unwrap(), Tau::Infinite);
        let k = diag_kraus(1.01f64.sqrt(), 1.0);
        let t = relaxation_time(&k, &tol()).unwrap().finite().unwrap();
        assert!((t - 1.0 / 1.01f64.ln()).abs() < 1e-9);
        assert!((t - 100.499).abs() < 1e-3);
    }

    #[test]
    fn tau_needs_two_eigenvalues() {
        let k = KrausOperator::synthetic(ComplexMatrix::identity(1)).unwrap();
        assert!(matches!(
            relaxation_time(&k, &tol()),
            Err(Error::DimensionTooSmall { found: 1 })
        ));
    }

    #[test]
    fn tau_is_scale_free() {
        let k = diag_kraus(1.3, 0.4);
        let scaled =
            KrausOperator::synthetic(k.matrix().scale(c64(-0.02, 0.7))).unwrap();
        let a = relaxation_time(&k, &tol()).unwrap().finite().unwrap();
        let b = relaxation_time(&scaled, &tol()).unwrap().finite().unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn analytic_tau_values() {
        let c = CouplingSpec::from_product(0.01).unwrap();
        assert_eq!(
            analytic_tau_first_order(WeakValue::new(c64(3.0, 0.0)), &c, 1.0, -1.0).unwrap(),
            Tau::Infinite
        );
        let t = analytic_tau_first_order(WeakValue::new(c64(0.2, 0.5)), &c, 1.0, -1.0).unwrap();
        assert!((t.finite().unwrap() - 50.0).abs() < 1e-12);
        assert!(matches!(
            analytic_tau_first_order(WeakValue::new(c64(0.2, 0.5)), &c, 1.0, 1.0),
            Err(Error::DegenerateMeterObservable)
        ));
    }

    #[test]
    fn grids() {
        let g = uniform_grid(0.0, PI, 2001).unwrap();
        assert_eq!(g.len(), 2001);
        assert_eq!(g[1000], FRAC_PI_2);
        assert_eq!(g[2000], PI);
        assert!(uniform_grid(0.0, 1.0, 0).is_err());
        assert_eq!(uniform_grid(FRAC_PI_4, FRAC_PI_4, 1).unwrap(), vec![FRAC_PI_4]);

        let o = log_spaced_offsets(1e-4, 1e-2, 20).unwrap();
        assert_eq!(o.len(), 41);
        assert_eq!(o[0], 1e-4);
        assert_eq!(o[40], 1e-2);
        assert!((o[20] - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn regression_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| -1.5 * v + 0.25).collect();
        let (s, i, r2) = linear_regression(&x, &y).unwrap();
        assert!((s + 1.5).abs() < 1e-14 && (i - 0.25).abs() < 1e-14);
        assert!((r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn synthetic_quadratic_fit_has_exponent_two() {
        let config = ProtocolConfig {
            interaction: Interaction::SyntheticQuadratic { phi_c: 1.0 },
            ..ProtocolConfig::exact_qubit(FRAC_PI_4, PI / 7.0, 0.01).unwrap()
        };
        let offsets = log_spaced_offsets(1e-4, 1e-2, 20).unwrap();
        for side in [Side::Below, Side::Above] {
            let fit = fit_exponent(&config, 1.0, side, &offsets, &tol()).unwrap();
            assert!((fit.nu - 2.0).abs() < 0.02, "{fit:?}");
        }
    }

    #[test]
    fn window_through_critical_point_is_rejected() {
        let config = ProtocolConfig::exact_qubit(FRAC_PI_4, PI / 7.0, 0.01).unwrap();
        let offsets = [0.1, 0.2, FRAC_PI_2, 1.0];
        assert!(matches!(
            fit_exponent(&config, 0.0, Side::Above, &offsets, &tol()),
            Err(Error::WindowContainsCriticalPoint { .. })
        ));
    }

    #[test]
    fn poor_fit_is_reported() {
        // τ(δ) = 1/ln(1 + δ² + δ⁶·10¹²) bends sharply inside the window
        let offsets = log_spaced_offsets(1e-4, 1e-2, 10).unwrap();
        let family = |phi: f64| {
            let d: f64 = phi - 1.0;
            let r = 1.0 + d * d + 1e12 * d.powi(6);
            Ok(diag_kraus(r.sqrt(), 1.0))
        };
        assert!(matches!(
            fit_exponent_with(family, 1.0, Side::Above, &offsets, &tol()),
            Err(Error::PoorFit { .. })
        ));
    }

    #[test]
    fn sweep_records_failures_in_row() {
        // the overlap vanishes at φ = 3π/4 for θ = π/4, α = 0
        let config = ProtocolConfig::first_order(FRAC_PI_4, 0.0, 0.01, MeterObservable::sigma_x())
            .unwrap();
        let grid = [0.5, 3.0 * FRAC_PI_4, 2.9];
        let initial = MeterState::maximally_mixed(2);
        let r = sweep_phi(&config, &grid, &[1, 10], &[ComplexMatrix::pauli_x()], &initial, &tol())
            .unwrap();
        assert_eq!(r.points.len(), 3);
        assert!(r.points[1].error.is_some());
        assert!(r.points[1].samples.iter().all(|s| s.expectations == vec![None]));
        assert!(r.points[0].error.is_none() && r.points[2].error.is_none());
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let config = ProtocolConfig::exact_qubit(FRAC_PI_4, PI / 7.0, 0.001).unwrap();
        let s = MeterState::maximally_mixed(2);
        let x = [ComplexMatrix::pauli_x()];
        assert!(sweep_phi(&config, &[], &[1], &x, &s, &tol()).is_err());
        assert!(sweep_phi(&config, &[1.0, 0.5], &[1], &x, &s, &tol()).is_err());
        assert!(sweep_phi(&config, &[0.0, 4.0], &[1], &x, &s, &tol()).is_err());
    }

    #[test]
    fn jump_detection_with_exclusions_and_wraparound() {
        let samples = vec![
            (0.0, Some(0.0)),
            (1.0, Some(1.0)),
            (2.0, Some(0.0)),
            (3.0, Some(-1.0)),
            (4.0, Some(0.0)),
        ];
        let raw = detect_jumps(&samples, 0.5, &[], 0.1, None);
        assert_eq!(raw.len(), 4);
        let j = detect_jumps(&samples, 1.5, &[0.0, 2.0, 4.0], 0.1, Some(4.0));
        assert_eq!(j.len(), 3);
        assert_eq!((j[0].left_phi, j[0].right_phi), (-1.0, 1.0));
        assert_eq!((j[1].left_phi, j[1].right_phi), (1.0, 3.0));
        assert_eq!((j[2].left_phi, j[2].right_phi), (3.0, 5.0));
    }

    #[test]
    fn weak_value_slope_is_linear_coefficient() {
        let config = ProtocolConfig::exact_qubit(FRAC_PI_4, PI / 7.0, 0.01).unwrap();
        // near φ = 0: Im(O_w) ≈ 2·sin(α)·φ for θ = π/4
        let a = weak_value_slope(&config, 0.0, 1e-6, &tol()).unwrap();
        assert!((a - 2.0 * (PI / 7.0).sin()).abs() < 1e-5, "{a}");
    }
}
