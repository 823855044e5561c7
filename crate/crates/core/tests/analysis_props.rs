use chainbound::analysis::{optimal_n, steps_for, visibility_scan, DEFAULT_N_MAX, DEFAULT_STEP};
use chainbound::nonlocality::i_n_of_table;
use chainbound::quantum::{born_table, chained_family, entangled_state};
use chainbound::Error;

fn born_i_n(n: usize, v: f64) -> f64 {
    i_n_of_table(&born_table(&entangled_state(v).unwrap(), &chained_family(n).unwrap()).unwrap()).unwrap()
}

#[test]
fn rows_agree_with_born_tables() {
    let rows = visibility_scan(0.9, 0.995, 20, DEFAULT_N_MAX).unwrap();
    for r in &rows {
        assert!((r.min_i - born_i_n(r.optimal_n, r.visibility)).abs() <= 1e-10);
        assert!((r.i_at_n2 - born_i_n(2, r.visibility)).abs() <= 1e-10);
        assert!((r.i_at_n8 - born_i_n(8, r.visibility)).abs() <= 1e-10);
        assert!((r.i_at_n2 - (2.0 - 2f64.sqrt() * r.visibility)).abs() <= 1e-12);
        assert!(r.min_i <= r.i_at_n2 + 1e-12 && r.min_i <= r.i_at_n8 + 1e-12);
    }
}

#[test]
fn min_i_is_the_smallest_bound_over_all_chain_lengths() {
    // Exhaustive minimum over Born-rule values for every N up to the cap.
    for v in [0.75, 0.9, 0.95, 0.98] {
        let brute = (1..=64).map(|n| born_i_n(n, v)).fold(f64::INFINITY, f64::min);
        let (_, min_i) = optimal_n(v, 64).unwrap();
        assert!((min_i - brute).abs() <= 1e-10, "v={v}");
    }
}

#[test]
fn known_anchor() {
    assert_eq!(optimal_n(0.98, 256).unwrap().0, 8);
    let (n7, n8, n9) = (born_i_n(7, 0.98), born_i_n(8, 0.98), born_i_n(9, 0.98));
    assert!(n8 < n7 && n8 < n9);
}

#[test]
fn optimal_n_never_decreases_over_default_grid() {
    let vmax = 0.999;
    let rows = visibility_scan(0.0, vmax, steps_for(0.0, vmax, DEFAULT_STEP), DEFAULT_N_MAX).unwrap();
    assert!(rows.windows(2).all(|w| w[0].optimal_n <= w[1].optimal_n));
    assert!(rows.iter().filter(|r| r.visibility <= 0.5).all(|r| r.optimal_n == 1));
}

#[test]
fn cap_errors() {
    assert_eq!(optimal_n(1.0, 64), Err(Error::NeedsLargerCap { n_max: 64 }));
    // Near v = 1 the minimiser grows like (1-v)^(-1/2); a small cap is not enough.
    assert!(matches!(optimal_n(0.99999, 64), Err(Error::NeedsLargerCap { .. })));
    assert!(optimal_n(0.99999, 4096).is_ok());
}
