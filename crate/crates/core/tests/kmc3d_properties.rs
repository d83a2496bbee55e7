use std::f64::consts::PI;

use patchy_core::kmc3d::{lens_capacitance, lens_hit_fraction, lens_integral, LensConfig, LensSpec};
use patchy_core::stats::pooled_z;

fn cfg(trials: u64, seed: u64) -> LensConfig {
    LensConfig {
        trials,
        seed,
        ..LensConfig::default()
    }
}

#[test]
fn unit_disk_is_two_over_pi() {
    let c = lens_capacitance(&LensSpec::new(0.0).unwrap(), &cfg(1_000_000, 1)).unwrap();
    assert!((c.point - 2.0 / PI).abs() < 3.0 * c.std_error(), "{c:?}");
}

#[test]
fn far_field_decays_like_one_over_rho() {
    let lens = LensSpec::new(0.8).unwrap();
    let c = cfg(300_000, 2);
    let scaled: Vec<_> = [2.0, 4.0, 8.0]
        .iter()
        .map(|&rho| lens_hit_fraction(&lens, rho, &c).unwrap().scale(rho))
        .collect();
    assert!(pooled_z(&scaled[0], &scaled[1]) < 3.0, "{scaled:?}");
    assert!(pooled_z(&scaled[1], &scaled[2]) < 3.0, "{scaled:?}");
}

#[test]
fn capacitance_decreases_with_separation() {
    let values: Vec<f64> = [0.0, 0.5, 1.0, 1.5, 1.9, 1.999]
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            lens_capacitance(&LensSpec::new(s).unwrap(), &cfg(100_000, 10 + k as u64))
                .unwrap()
                .point
        })
        .collect();
    for w in values.windows(2) {
        assert!(w[1] < w[0], "{values:?}");
    }
    assert!(values[5] < 0.05);
}

#[test]
fn coarse_integral_near_reference() {
    let r = lens_integral(20, &cfg(20_000, 3)).unwrap();
    assert_eq!(r.rows.len(), 20);
    assert_eq!(r.rows[0].s, 0.0);
    assert!((r.integral - 0.5806).abs() < 0.03, "{}", r.integral);
    assert!(r.std_error > 0.0 && r.std_error < 0.01);
}
