use chainbound::nonlocality::{check_nonsignalling, i_n_of_table};
use chainbound::quantum::{
    born_table, chained_angle, chained_family, entangled_state, i_n_analytic, measurement_from_angle,
    ChainedMeasurementFamily, LabeledMeasurement,
};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn effects_are_complete() {
    for n in 1..=32 {
        let fam = chained_family::<f64>(n).unwrap();
        for m in fam.alice().iter().chain(fam.bob()) {
            assert!(m.measurement.defect() <= 1e-12, "N={n} label {}", m.label);
        }
    }
}

#[test]
fn tables_are_normalized() {
    for n in [1, 2, 5, 16, 32] {
        for v in [0.0, 0.5, 1.0] {
            let t = born_table(&entangled_state(v).unwrap(), &chained_family(n).unwrap()).unwrap();
            for i in 0..t.input_count() {
                let s = t.slice(i);
                assert!((s.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                assert!(s.iter().all(|p| (0.0..=1.0).contains(p)));
            }
        }
    }
}

#[test]
fn closed_form_matches_born_rule() {
    for n in 1..=32 {
        let fam = chained_family(n).unwrap();
        for v in [0.0f64, 0.25, 0.5, 0.9, 0.98, 1.0] {
            let t = born_table(&entangled_state(v).unwrap(), &fam).unwrap();
            let born = i_n_of_table(&t).unwrap();
            let closed = i_n_analytic(n, v).unwrap();
            assert!((born - closed).abs() <= 1e-10, "N={n} v={v}: {born} vs {closed}");
        }
    }
}

#[test]
fn chained_value_scales_as_one_over_n() {
    let t = born_table(&entangled_state(1.0).unwrap(), &chained_family(100).unwrap()).unwrap();
    let scaled = 100.0 * i_n_of_table(&t).unwrap();
    assert!((scaled - PI * PI / 8.0).abs() <= 0.02, "{scaled}");
}

#[test]
fn quantum_tables_do_not_signal() {
    for n in 1..=16 {
        for k in 0..=10 {
            let v = k as f64 / 10.0;
            let t = born_table(&entangled_state(v).unwrap(), &chained_family(n).unwrap()).unwrap();
            assert!(check_nonsignalling(&t, 1e-12).unwrap().max_violation <= 1e-12);
        }
    }
}

#[test]
fn single_precision_tracks_double() {
    for n in [2, 8, 16] {
        let t32 = born_table(&entangled_state(0.9f32).unwrap(), &chained_family::<f32>(n).unwrap()).unwrap();
        let t64 = born_table(&entangled_state(0.9f64).unwrap(), &chained_family::<f64>(n).unwrap()).unwrap();
        let d = (i_n_of_table(&t32).unwrap() as f64 - i_n_of_table(&t64).unwrap()).abs();
        assert!(d <= 1e-5, "N={n}: {d}");
    }
}

fn shifted_family(n: usize, offset: f64) -> ChainedMeasurementFamily<f64> {
    let side = |first: usize| -> Vec<LabeledMeasurement<f64>> {
        (0..n)
            .map(|k| {
                let label = first + 2 * k;
                LabeledMeasurement {
                    label: label as i64,
                    measurement: measurement_from_angle(chained_angle::<f64>(n, label) + offset).unwrap(),
                }
            })
            .collect()
    };
    ChainedMeasurementFamily::from_measurements(side(0), side(1)).unwrap()
}

proptest! {
    #[test]
    fn common_angle_shift_changes_nothing(n in 1usize..10, v in 0.0f64..=1.0, offset in -3.0f64..3.0) {
        let state = entangled_state(v).unwrap();
        let base = born_table(&state, &chained_family(n).unwrap()).unwrap();
        let moved = born_table(&state, &shifted_family(n, offset)).unwrap();
        for (p, q) in base.probabilities().iter().zip(moved.probabilities()) {
            prop_assert!((p - q).abs() <= 1e-12);
        }
    }
}
