//! Right-edge simulator against hand-enumerated one- and two-level systems.

use fpp_core::rng::mix64;
use fpp_core::{estimate_alpha, simulate_right_edge, InitialSet, OrientedField};

#[test]
fn conditioned_first_level_matches_four_configuration_enumeration() {
    let p = 0.6;
    let (p_plus, p_minus) = fpp_oracle::origin_r1_conditional(p);
    assert!((p_plus + p_minus - 1.0).abs() < 1e-12);

    let draws = 4000;
    let mut plus = 0usize;
    for k in 0..draws {
        // independent seeds per draw: conditioning retries consume replicate
        // ids, so consecutive replicate bases would overlap
        let field = OrientedField::new(p, mix64(0x51ee << 8 | k as u64), 0).unwrap();
        let trace = simulate_right_edge(&field, 1, InitialSet::OriginConditioned).unwrap();
        match trace.values[1] {
            1 => plus += 1,
            -1 => {}
            other => panic!("conditioned r_1 = {other}"),
        }
    }
    let freq = plus as f64 / draws as f64;
    let stderr = (p_plus * (1.0 - p_plus) / draws as f64).sqrt();
    assert!(
        (freq - p_plus).abs() <= 4.0 * stderr,
        "freq {freq} vs exact {p_plus} (stderr {stderr})"
    );
}

#[test]
fn halfline_two_level_mean_matches_exact_enumeration() {
    let p = 0.5;
    let exact_r2 = fpp_oracle::halfline_r2_expectation(p);
    let est = estimate_alpha(p, 2, 20_000, 777).unwrap();
    // estimate_alpha reports mean r_N / N
    let exact_speed = exact_r2 / 2.0;
    assert!(est.stderr > 0.0);
    assert!(
        (est.alpha_hat - exact_speed).abs() <= 3.0 * est.stderr,
        "mc {} vs exact {exact_speed} (stderr {})",
        est.alpha_hat,
        est.stderr
    );
}
