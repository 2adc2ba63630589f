use std::f64::consts::PI;

use galton_dirac::diagnostics::{asymmetry, histogram_pdf, ks_distance, BinScale};
use galton_dirac::field::{dealias_23, forward_transform, inverse_transform, project_23, shift, spectral_derivative};
use galton_dirac::nlde::{basis_change, conserved_quantities, BasisDirection};
use galton_dirac::walk::walk_step;
use galton_dirac::{GridSpec, NldeParams, ShiftMethod, Spinor, SpinorField, WalkParams, WalkState};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = SpinorField> {
    (2usize..=9).prop_flat_map(|p| {
        let n = 1 << p;
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |v| {
            let grid = GridSpec::new(n).unwrap();
            SpinorField::from_fn(grid, |m| {
                let (a, b, c, d) = v[m];
                Spinor::new(C64::new(a, b), C64::new(c, d))
            })
        })
    })
}

fn small_field() -> impl Strategy<Value = SpinorField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 32).prop_map(|v| {
        let grid = GridSpec::new(32).unwrap();
        SpinorField::from_fn(grid, |m| {
            let (a, b, c, d) = v[m];
            Spinor::new(C64::new(a, b), C64::new(c, d))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_and_parseval(field in field_strategy()) {
        let spec = forward_transform(&field);
        let back = inverse_transform(&spec);
        let scale = field.max_abs().max(1e-300);
        prop_assert!(back.max_abs_diff(&field) / scale < 1e-12);
        let n = field.len() as f64;
        let lhs = field.site_sum();
        prop_assert!((lhs - n * spec.power()).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn derivative_of_real_is_real(field in field_strategy()) {
        let mut real = field.clone();
        {
            let (a, b) = real.components_mut();
            for z in a.iter_mut().chain(b.iter_mut()) {
                *z = C64::from(z.re);
            }
        }
        let d = spectral_derivative(&real);
        prop_assert!(d.iter().all(|s| s.minus.im.abs() < 1e-12 && s.plus.im.abs() < 1e-12));
    }

    #[test]
    fn shifts_preserve_norm(field in field_strategy(), s in prop::sample::select(vec![1isize, -1])) {
        let total = field.site_sum();
        let mut before = field.density();
        let mut after = shift(&field, s, ShiftMethod::Index).density();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        prop_assert_eq!(before, after);
        prop_assert!((shift(&field, s, ShiftMethod::Spectral).site_sum() - total).abs() < 1e-12 * total);
    }

    #[test]
    fn dealias_is_a_projection_commuting_with_shift(field in field_strategy()) {
        let spec = forward_transform(&field);
        let once = dealias_23(&spec);
        prop_assert_eq!(dealias_23(&once), once);
        let a = shift(&project_23(&field), 1, ShiftMethod::Spectral);
        let b = project_23(&shift(&field, 1, ShiftMethod::Spectral));
        prop_assert!(a.max_abs_diff(&b) < 1e-12 * field.max_abs().max(1.0));
    }

    #[test]
    fn walk_step_is_unitary(field in small_field(), g in -40.0f64..40.0) {
        let params = WalkParams::new(field.grid(), g);
        let state = WalkState::new(field);
        let next = walk_step(&state, &params).unwrap();
        let (p0, p1) = (state.particle_number(), next.particle_number());
        prop_assert!((p0 - p1).abs() <= 1e-12 * p0);
    }

    #[test]
    fn basis_change_is_an_isometric_involution(field in small_field()) {
        let d = basis_change(&field, BasisDirection::WalkToDirac);
        let back = basis_change(&d, BasisDirection::DiracToWalk);
        prop_assert!(back.max_abs_diff(&field) < 1e-14);
        for m in 0..field.len() {
            prop_assert!((d.get(m).density() - field.get(m).density()).abs() < 1e-14);
        }
    }

    #[test]
    fn conserved_quantities_are_phase_invariant(field in small_field(), phi in 0.0f64..(2.0 * PI)) {
        let params = NldeParams::new(field.grid(), 10.0 * PI);
        let mut rotated = field.clone();
        rotated.scale(C64::cis(phi));
        let q0 = conserved_quantities(&field, &params).unwrap();
        let q1 = conserved_quantities(&rotated, &params).unwrap();
        let scale = q0.energy.abs().max(q0.particle_number).max(1.0);
        prop_assert!(q0.max_abs_diff(&q1) < 1e-13 * scale);
    }

    #[test]
    fn histogram_integrates_to_one(values in prop::collection::vec(0.0f64..10.0, 1..400), nbins in 1usize..80) {
        let h = histogram_pdf(&values, nbins, BinScale::Linear).unwrap();
        prop_assert!((h.integral() - 1.0).abs() < 1e-12);
        prop_assert!(h.bin_edges.windows(2).all(|e| e[1] > e[0]));
        let finer = histogram_pdf(&values, 2 * nbins, BinScale::Linear).unwrap();
        prop_assert!((finer.integral() - 1.0).abs() < 1e-12);
        if values.iter().any(|v| *v > 0.0) {
            let log = histogram_pdf(&values, nbins, BinScale::Log).unwrap();
            prop_assert!((log.integral() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetry_is_linear(
        x in prop::collection::vec(0.0f64..1.0, 16),
        y in prop::collection::vec(0.0f64..1.0, 16),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = asymmetry(&mix).unwrap();
        let rhs = a * asymmetry(&x).unwrap() + b * asymmetry(&y).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn ks_is_symmetric_and_bounded(
        x in prop::collection::vec(-5.0f64..5.0, 1..200),
        y in prop::collection::vec(-5.0f64..5.0, 1..200),
    ) {
        let d = ks_distance(&x, &y).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, ks_distance(&y, &x).unwrap());
    }
}
