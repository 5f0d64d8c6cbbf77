use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;
use weakcrit_core::criticality::{self, Tau};
use weakcrit_core::dynamics;
use weakcrit_core::linalg::{c64, eig2x2, hermitian_eig, trace_distance};
use weakcrit_core::protocol::{self, sigma_z_weak_value};
use weakcrit_core::{
    BlochVector, ComplexMatrix, C64, CouplingSpec, MeterObservable, MeterState, PostSelection,
    SystemPreparation, Tolerances,
};

fn bloch() -> impl Strategy<Value = BlochVector> {
    (-1.0f64..=1.0, 0.0..TAU, 0.0f64..=1.0).prop_map(|(z, a, len)| {
        let r = (1.0 - z * z).max(0.0).sqrt();
        BlochVector::new(len * r * a.cos(), len * r * a.sin(), len * z)
    })
}

fn state(b: BlochVector) -> MeterState {
    MeterState::from_bloch(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trace_distance_is_a_metric(a in bloch(), b in bloch(), c in bloch()) {
        let (a, b, c) = (state(a), state(b), state(c));
        let ab = trace_distance(&a, &b).unwrap();
        let bc = trace_distance(&b, &c).unwrap();
        let ac = trace_distance(&a, &c).unwrap();
        prop_assert!(ab >= 0.0 && ab <= 1.0 + 1e-12);
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn qubit_trace_distance_is_half_bloch_distance(a in bloch(), b in bloch()) {
        let d = trace_distance(&state(a), &state(b)).unwrap();
        prop_assert!((d - 0.5 * a.distance(&b)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_and_jacobi_agree_on_hermitian_2x2(
        a in -5.0f64..5.0, d in -5.0f64..5.0, re in -5.0f64..5.0, im in -5.0f64..5.0,
    ) {
        let tol = Tolerances::default();
        let m = ComplexMatrix::from_rows(&[
            &[c64(a, 0.0), c64(re, im)],
            &[c64(re, -im), c64(d, 0.0)],
        ]);
        let sorted = |s: weakcrit_core::SpectralDecomposition| {
            let mut v: Vec<f64> = s.eigenvalues.iter().map(|l| l.re).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let closed = sorted(eig2x2(&m, &tol).unwrap());
        let jacobi = sorted(hermitian_eig(&m, &tol).unwrap());
        for (x, y) in closed.iter().zip(&jacobi) {
            prop_assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn weak_value_is_conjugated_by_reversing_the_relative_phase(
        theta in 0.05..FRAC_PI_2 - 0.05, phi in 0.0..PI, alpha in 0.0..TAU,
    ) {
        let tol = Tolerances::default();
        let prep = SystemPreparation::new(theta).unwrap();
        let w = |a: f64| sigma_z_weak_value(&prep, &PostSelection::new(phi, a).unwrap(), &tol);
        if let (Ok(w1), Ok(w2), Ok(w3)) = (w(alpha), w(-alpha), w(alpha + TAU)) {
            let scale = 1.0 + w1.value.norm();
            prop_assert!((w1.value - w2.value.conj()).norm() < 1e-9 * scale);
            prop_assert!((w1.value - w3.value).norm() < 1e-9 * scale);
        }
    }

    #[test]
    fn tau_is_invariant_under_rescaling_the_kraus_operator(
        re in -1.0f64..1.0, im in -1.0f64..1.0, d in 0.01f64..1.0, s in 0.1f64..10.0, phase in 0.0..TAU,
    ) {
        let tol = Tolerances::default();
        let m = &ComplexMatrix::identity(2).scale(c64(re, im))
            + &ComplexMatrix::pauli_x().scale(c64(0.0, d));
        let scaled = m.scale(C64::from_polar(s, phase));
        let k1 = weakcrit_core::KrausOperator::synthetic(m).unwrap();
        let k2 = weakcrit_core::KrausOperator::synthetic(scaled).unwrap();
        let t1 = criticality::relaxation_time(&k1, &tol).unwrap();
        let t2 = criticality::relaxation_time(&k2, &tol).unwrap();
        match (t1, t2) {
            (Tau::Finite(a), Tau::Finite(b)) => prop_assert!((a - b).abs() <= 1e-8 * a.max(1.0)),
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn pure_states_stay_pure(
        r in bloch(), theta in 0.05..FRAC_PI_2 - 0.05, phi in 0.0..PI, alpha in 0.0..TAU, gt in 0.0..1.5,
    ) {
        let tol = Tolerances::default();
        let len = r.norm();
        prop_assume!(len > 1e-3);
        let r = BlochVector::new(r.rx / len, r.ry / len, r.rz / len);
        let k = protocol::kraus_exact_qubit(
            &SystemPreparation::new(theta).unwrap(),
            &PostSelection::new(phi, alpha).unwrap(),
            &CouplingSpec::from_product(gt).unwrap(),
        );
        if let Ok(traj) = dynamics::iterate_matrix(&k, &state(r), 40, &tol) {
            for s in &traj.states {
                prop_assert!((s.purity() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn first_order_kraus_shares_eigenvectors_with_the_meter_observable(
        theta in 0.05..FRAC_PI_2 - 0.05, phi in 0.0..PI, alpha in 0.0..TAU, gt in 1e-4..1e-2,
        o in prop::collection::vec(-3.0f64..3.0, 3..5),
    ) {
        let tol = Tolerances::default();
        let mut o = o;
        o.sort_by(f64::total_cmp);
        prop_assume!(o.windows(2).all(|w| w[1] - w[0] > 0.05));
        let obs = MeterObservable::diagonal(&o).unwrap();
        let prep = SystemPreparation::new(theta).unwrap();
        let post = PostSelection::new(phi, alpha).unwrap();
        let Ok(k) = protocol::kraus_first_order_for(&prep, &post, &CouplingSpec::from_product(gt).unwrap(), &obs, &tol) else {
            return Ok(());
        };
        let wv = k.weak_value().unwrap();
        prop_assume!((gt * wv.value.norm() * 6.0) > 1e-9 && wv.imaginary_part().abs() > 1e-6);
        for v in &k.spectrum(&tol).unwrap().eigenvectors {
            let ov = obs.matrix.mul_vec(v);
            let o_v = weakcrit_core::linalg::inner(v, &ov);
            let residual: f64 = ov.iter().zip(v).map(|(a, b)| (a - o_v * b).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(residual < 1e-8, "residual {residual}");
        }
    }

    #[test]
    fn exact_qubit_eigenvectors_are_sigma_x_eigenstates(
        theta in 0.05..FRAC_PI_2 - 0.05, phi in 0.0..PI, alpha in 0.0..TAU, gt in 0.01..1.5,
    ) {
        let tol = Tolerances::default();
        let k = protocol::kraus_exact_qubit(
            &SystemPreparation::new(theta).unwrap(),
            &PostSelection::new(phi, alpha).unwrap(),
            &CouplingSpec::from_product(gt).unwrap(),
        );
        let (c, d) = k.coefficients().unwrap();
        prop_assume!(d.norm() > 1e-6 * (1.0 + c.norm()));
        for v in &k.spectrum(&tol).unwrap().eigenvectors {
            let rx = 2.0 * (v[0].conj() * v[1]).re;
            prop_assert!((rx.abs() - 1.0).abs() < 1e-9, "rx {rx}");
        }
    }
}
