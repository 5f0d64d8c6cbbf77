//! Weak values, Kraus operators and critical post-selection angles.
//!
//! The system observable is always `σz` on the qubit system. Two Kraus
//! operators are available:
//!
//! - the first-order form `K = <ψ_f|ψ_S>·(I − i·gt·O_w·Ô_A)` for an arbitrary
//!   Hermitian meter observable, valid while `gt` is small;
//! - the exact qubit–qubit form `K = c·I + d·σx` obtained from
//!   `U = cos(gt)·I⊗I − i·sin(gt)·σz⊗σx`, valid for any coupling.
//!
//! For the exact form `c = cos(gt)·<ψ_f|ψ_S>` and
//! `d = −i·sin(gt)·<ψ_f|σz|ψ_S>`, read directly off `<ψ_f|U|ψ_S>`.
//! [`DSign::Flipped`] reverses the sign of `d`; it exists only as a negative
//! control for the oracle comparison.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, SpectralDecomposition, C64};
use crate::params::{CouplingSpec, PostSelection, SystemPreparation};
use crate::tolerance::Tolerances;

/// Weak value `<ψ_f|Ô_S|ψ_S> / <ψ_f|ψ_S>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    pub value: C64,
}

impl WeakValue {
    pub fn new(value: C64) -> Self {
        Self { value }
    }

    pub fn real_part(&self) -> f64 {
        self.value.re
    }

    pub fn imaginary_part(&self) -> f64 {
        self.value.im
    }
}

/// `<ψ_f|ψ_S>`.
pub fn overlap(prep: &SystemPreparation, post: &PostSelection) -> C64 {
    linalg::inner(&post.ket(), &prep.ket())
}

pub fn weak_value(
    prep: &SystemPreparation,
    post: &PostSelection,
    observable: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<WeakValue> {
    if observable.rows() != 2 || observable.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: observable.rows().max(observable.cols()),
        });
    }
    if !observable.is_hermitian(tol.hermiticity) {
        return Err(Error::NotHermitian {
            deviation: observable.hermiticity_deviation(),
        });
    }
    let ov = overlap(prep, post);
    if ov.norm() <= tol.overlap_floor {
        return Err(Error::VanishingOverlap { overlap: ov.norm() });
    }
    let numerator = linalg::inner(&post.ket(), &observable.mul_vec(&prep.ket()));
    Ok(WeakValue::new(numerator / ov))
}

/// Weak value of `σz`, the system observable used throughout.
pub fn sigma_z_weak_value(
    prep: &SystemPreparation,
    post: &PostSelection,
    tol: &Tolerances,
) -> Result<WeakValue> {
    weak_value(prep, post, &ComplexMatrix::pauli_z(), tol)
}

/// Hermitian meter observable `Ô_A` together with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MeterObservable {
    pub matrix: ComplexMatrix,
    pub spectrum: SpectralDecomposition,
    pub nondegenerate: bool,
}

impl MeterObservable {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let spectrum = linalg::hermitian_eig(&matrix, tol)?;
        let values = spectrum.eigenvalues.iter().map(|l| l.re).collect::<Vec<_>>();
        let nondegenerate = values.iter().enumerate().all(|(i, a)| {
            values[i + 1..]
                .iter()
                .all(|b| (a - b).abs() > tol.verification)
        });
        Ok(Self {
            matrix,
            spectrum,
            nondegenerate,
        })
    }

    pub fn sigma_x() -> Self {
        Self::new(ComplexMatrix::pauli_x(), &Tolerances::default())
            .expect("sigma_x is Hermitian")
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty meter observable".into()));
        }
        Self::new(ComplexMatrix::from_real_diagonal(values), &Tolerances::default())
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    /// Real eigenvalues `o_j`, in the order of `spectrum.eigenvectors`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum.eigenvalues.iter().map(|l| l.re).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrausForm {
    FirstOrderGeneral,
    ExactQubit,
    /// Hand-built matrix used to exercise the fitting machinery.
    Synthetic,
}

/// Sign convention for the `d` coefficient of the exact qubit Kraus operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DSign {
    /// `d = −i·sin(gt)·<ψ_f|σz|ψ_S>`, as produced by the interaction unitary.
    #[default]
    Consistent,
    /// Opposite sign; negative control only.
    Flipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    matrix: ComplexMatrix,
    form: KrausForm,
    coefficients: Option<(C64, C64)>,
    overlap: C64,
    coupling_product: f64,
    weak_value: Option<WeakValue>,
    meter_observable: Option<MeterObservable>,
}

impl KrausOperator {
    /// Wraps an arbitrary square matrix.
    pub fn synthetic(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        Ok(Self {
            matrix,
            form: KrausForm::Synthetic,
            coefficients: None,
            overlap: c64(1.0, 0.0),
            coupling_product: 0.0,
            weak_value: None,
            meter_observable: None,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn form(&self) -> KrausForm {
        self.form
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    /// `(c, d)` of the exact qubit form.
    pub fn coefficients(&self) -> Option<(C64, C64)> {
        self.coefficients
    }

    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    pub fn coupling_product(&self) -> f64 {
        self.coupling_product
    }

    pub fn weak_value(&self) -> Option<WeakValue> {
        self.weak_value
    }

    pub fn meter_observable(&self) -> Option<&MeterObservable> {
        self.meter_observable.as_ref()
    }

    pub fn spectrum(&self, tol: &Tolerances) -> Result<SpectralDecomposition> {
        linalg::eig(&self.matrix, tol)
    }

    /// `(c, d)` such that the matrix equals `c·I + d·σx`, for any qubit
    /// Kraus operator of that shape.
    pub fn qubit_coefficients(&self, tol: &Tolerances) -> Result<(C64, C64)> {
        if let Some(cd) = self.coefficients {
            return Ok(cd);
        }
        let m = &self.matrix;
        if m.rows() != 2 {
            return Err(Error::NotQubitForm);
        }
        let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
        if (m[(0, 0)] - m[(1, 1)]).norm() > tol.verification * scale
            || (m[(0, 1)] - m[(1, 0)]).norm() > tol.verification * scale
        {
            return Err(Error::NotQubitForm);
        }
        Ok((
            (m[(0, 0)] + m[(1, 1)]) * 0.5,
            (m[(0, 1)] + m[(1, 0)]) * 0.5,
        ))
    }

    /// Width below which the two leading eigenvalue moduli count as equal.
    ///
    /// For the first-order form every spectral statement holds only up to
    /// `(gt)²`, so the band is `marginal_factor·(gt)²·|λ1|`. The exact and
    /// synthetic forms have no truncation error and use the verification
    /// tolerance relative to `|λ1|`.
    pub fn marginal_band(&self, leading_modulus: f64, tol: &Tolerances) -> f64 {
        match self.form {
            KrausForm::FirstOrderGeneral => {
                tol.marginal_factor * self.coupling_product.powi(2) * leading_modulus
            }
            KrausForm::ExactQubit | KrausForm::Synthetic => tol.verification * leading_modulus,
        }
    }
}

/// `overlap·(I − i·gt·O_w·Ô_A)`.
pub fn kraus_first_order(
    overlap: C64,
    wv: WeakValue,
    coupling: &CouplingSpec,
    meter_obs: &MeterObservable,
    tol: &Tolerances,
) -> Result<KrausOperator> {
    let gt = coupling.product();
    if gt > tol.weakness_bound {
        return Err(Error::CouplingTooStrong {
            gt,
            bound: tol.weakness_bound,
        });
    }
    let n = meter_obs.dimension();
    let generator = meter_obs.matrix.scale(c64(0.0, -gt) * wv.value);
    let matrix = (&ComplexMatrix::identity(n) + &generator).scale(overlap);
    Ok(KrausOperator {
        matrix,
        form: KrausForm::FirstOrderGeneral,
        coefficients: None,
        overlap,
        coupling_product: gt,
        weak_value: Some(wv),
        meter_observable: Some(meter_obs.clone()),
    })
}

/// First-order Kraus operator with the `σz` weak value computed from the
/// pre- and post-selected states.
pub fn kraus_first_order_for(
    prep: &SystemPreparation,
    post: &PostSelection,
    coupling: &CouplingSpec,
    meter_obs: &MeterObservable,
    tol: &Tolerances,
) -> Result<KrausOperator> {
    let wv = sigma_z_weak_value(prep, post, tol)?;
    kraus_first_order(overlap(prep, post), wv, coupling, meter_obs, tol)
}

pub fn kraus_exact_qubit(
    prep: &SystemPreparation,
    post: &PostSelection,
    coupling: &CouplingSpec,
) -> KrausOperator {
    kraus_exact_qubit_signed(prep, post, coupling, DSign::Consistent)
}

pub fn kraus_exact_qubit_signed(
    prep: &SystemPreparation,
    post: &PostSelection,
    coupling: &CouplingSpec,
    sign: DSign,
) -> KrausOperator {
    let gt = coupling.product();
    let ov = overlap(prep, post);
    let z_element = linalg::inner(&post.ket(), &ComplexMatrix::pauli_z().mul_vec(&prep.ket()));
    let c = ov * gt.cos();
    let mut d = c64(0.0, -gt.sin()) * z_element;
    if sign == DSign::Flipped {
        d = -d;
    }
    let matrix = &ComplexMatrix::identity(2).scale(c) + &ComplexMatrix::pauli_x().scale(d);
    let wv = (ov.norm() > crate::tolerance::OVERLAP_FLOOR).then(|| WeakValue::new(z_element / ov));
    KrausOperator {
        matrix,
        form: KrausForm::ExactQubit,
        coefficients: Some((c, d)),
        overlap: ov,
        coupling_product: gt,
        weak_value: wv,
        meter_observable: Some(MeterObservable::sigma_x()),
    }
}

/// `|λ1| − |λ2|` of the sorted Kraus spectrum.
pub fn eigenvalue_moduli_gap(k: &KrausOperator, tol: &Tolerances) -> Result<f64> {
    Ok(k.spectrum(tol)?.moduli_gap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalAngles {
    /// Ascending angles in `[0, π]` where `Im(O_w)` vanishes.
    Angles(Vec<f64>),
    /// The weak value is real on the whole scan.
    AllCritical,
}

/// Locates every `φ ∈ [0, π]` where `Im(O_w)` crosses or touches zero.
///
/// A uniform scan marks grid points with a vanishing imaginary part and
/// brackets sign changes, which are then refined by bisection. Points where
/// the post-selection is orthogonal to the preparation are skipped; a
/// bracket that straddles such a pole is discarded after refinement since
/// `Im(O_w)` grows there instead of vanishing.
pub fn find_critical_angles(
    prep: &SystemPreparation,
    alpha: f64,
    grid_size: usize,
    tol: &Tolerances,
) -> Result<CriticalAngles> {
    if grid_size < 16 {
        return Err(Error::InvalidArgument(format!(
            "critical-angle scan needs at least 16 grid points, got {grid_size}"
        )));
    }
    let im_at = |phi: f64| -> Result<Option<f64>> {
        let post = PostSelection::new(phi.clamp(0.0, PI), alpha)?;
        match sigma_z_weak_value(prep, &post, tol) {
            Ok(w) => Ok(Some(w.imaginary_part())),
            Err(Error::VanishingOverlap { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let step = PI / (grid_size - 1) as f64;
    let mut samples = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let phi = if i + 1 == grid_size { PI } else { i as f64 * step };
        samples.push((phi, im_at(phi)?));
    }
    let defined: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|&(phi, im)| im.map(|v| (phi, v)))
        .collect();
    if defined.is_empty() {
        return Err(Error::VanishingOverlap { overlap: 0.0 });
    }
    if defined.iter().all(|(_, v)| v.abs() <= tol.zero_imaginary) {
        return Ok(CriticalAngles::AllCritical);
    }

    let mut roots: Vec<f64> = defined
        .iter()
        .filter(|(_, v)| v.abs() <= tol.zero_imaginary)
        .map(|&(phi, _)| phi)
        .collect();

    let nonzero: Vec<(f64, f64)> = defined
        .iter()
        .copied()
        .filter(|(_, v)| v.abs() > tol.zero_imaginary)
        .collect();
    for pair in nonzero.windows(2) {
        let ((a, fa), (b, fb)) = (pair[0], pair[1]);
        if fa.signum() == fb.signum() {
            continue;
        }
        if let Some(root) = bisect(&im_at, a, fa, b, tol.bisection)? {
            if im_at(root)?.is_some_and(|v| v.abs() < fa.abs().min(fb.abs())) {
                roots.push(root);
            }
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() < 1e-9);
    Ok(CriticalAngles::Angles(roots))
}

fn bisect<F>(f: &F, mut a: f64, mut fa: f64, mut b: f64, width: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<Option<f64>>,
{
    while b - a > width {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let Some(fm) = f(mid)? else {
            return Ok(None);
        };
        if fm == 0.0 {
            return Ok(Some(mid));
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// How the meter couples to the system in a [`ProtocolConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum Interaction {
    ExactQubit,
    FirstOrder(MeterObservable),
    /// `K(φ) = diag(sqrt(1 + (φ − φc)²), 1)`: a fixture whose relaxation time
    /// diverges with exponent 2 at `phi_c`.
    SyntheticQuadratic { phi_c: f64 },
}

/// Everything needed to build the Kraus operator at any post-selection angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub prep: SystemPreparation,
    pub alpha: f64,
    pub coupling: CouplingSpec,
    pub interaction: Interaction,
    pub d_sign: DSign,
}

impl ProtocolConfig {
    pub fn exact_qubit(theta: f64, alpha: f64, gt: f64) -> Result<Self> {
        Ok(Self {
            prep: SystemPreparation::new(theta)?,
            alpha,
            coupling: CouplingSpec::from_product(gt)?,
            interaction: Interaction::ExactQubit,
            d_sign: DSign::Consistent,
        })
    }

    pub fn first_order(theta: f64, alpha: f64, gt: f64, meter_obs: MeterObservable) -> Result<Self> {
        Ok(Self {
            prep: SystemPreparation::new(theta)?,
            alpha,
            coupling: CouplingSpec::from_product(gt)?,
            interaction: Interaction::FirstOrder(meter_obs),
            d_sign: DSign::Consistent,
        })
    }

    pub fn meter_dim(&self) -> usize {
        match &self.interaction {
            Interaction::ExactQubit | Interaction::SyntheticQuadratic { .. } => 2,
            Interaction::FirstOrder(obs) => obs.dimension(),
        }
    }

    pub fn post(&self, phi: f64) -> Result<PostSelection> {
        PostSelection::new(phi, self.alpha)
    }

    pub fn weak_value_at(&self, phi: f64, tol: &Tolerances) -> Result<WeakValue> {
        sigma_z_weak_value(&self.prep, &self.post(phi)?, tol)
    }

    pub fn kraus_at(&self, phi: f64, tol: &Tolerances) -> Result<KrausOperator> {
        match &self.interaction {
            Interaction::ExactQubit => Ok(kraus_exact_qubit_signed(
                &self.prep,
                &self.post(phi)?,
                &self.coupling,
                self.d_sign,
            )),
            Interaction::FirstOrder(obs) => {
                kraus_first_order_for(&self.prep, &self.post(phi)?, &self.coupling, obs, tol)
            }
            Interaction::SyntheticQuadratic { phi_c } => {
                let r = 1.0 + (phi - phi_c).powi(2);
                KrausOperator::synthetic(ComplexMatrix::from_real_diagonal(&[r.sqrt(), 1.0]))
            }
        }
    }

    pub fn critical_angles(&self, grid_size: usize, tol: &Tolerances) -> Result<CriticalAngles> {
        match &self.interaction {
            Interaction::SyntheticQuadratic { phi_c } => Ok(CriticalAngles::Angles(vec![*phi_c])),
            _ => find_critical_angles(&self.prep, self.alpha, grid_size, tol),
        }
    }
}
