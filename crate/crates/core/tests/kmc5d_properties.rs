use patchy_core::kmc5d::{
    estimate_chi, estimate_chi_for, sample_uniform_sphere5, stage1_project, KmcConfig, StartRadius,
};
use patchy_core::model::{stokes_einstein_params, DerivedConstants, Point5};
use patchy_core::rates::chi_qc;
use patchy_core::rng::trial_rng;
use patchy_core::stats::{ks_statistic, pooled_z};

fn cfg(trials: u64, seed: u64) -> KmcConfig {
    KmcConfig::default().with_trials(trials).with_seed(seed)
}

#[test]
fn sphere_sample_moments() {
    let n = 1_000_000;
    let r = 2.0;
    let mut rng = trial_rng(17, 0);
    let mut sum = [0.0; 5];
    let mut sq = [0.0; 5];
    for _ in 0..n {
        let p = sample_uniform_sphere5(r, &mut rng).unwrap().to_array();
        for k in 0..5 {
            sum[k] += p[k];
            sq[k] += p[k] * p[k];
        }
    }
    let sd = r / 5f64.sqrt() / (n as f64).sqrt();
    for k in 0..5 {
        assert!((sum[k] / n as f64).abs() < 5.0 * sd, "mean[{k}]");
        assert!(((sq[k] / n as f64) / (r * r / 5.0) - 1.0).abs() < 0.01, "second moment[{k}]");
    }
}

#[test]
fn stage1_lateral_law_is_planar_cauchy() {
    let z = 0.7;
    let n = 200_000;
    let mut rng = trial_rng(23, 0);
    let start = Point5::new(z, 0.3, -0.2, 1.0, 4.0);
    let mut ra = Vec::with_capacity(n);
    let mut rb = Vec::with_capacity(n);
    for _ in 0..n {
        let q = stage1_project(&start, &mut rng);
        assert_eq!(q.z, 0.0);
        ra.push((q.xa - start.xa).hypot(q.ya - start.ya));
        rb.push((q.xb - start.xb).hypot(q.yb - start.yb));
    }
    let cdf = |r: f64| 1.0 - z / (r * r + z * z).sqrt();
    // 1% critical value 1.63/sqrt(n).
    let crit = 1.63 / (n as f64).sqrt();
    assert!(ks_statistic(&mut ra, cdf) < crit);
    assert!(ks_statistic(&mut rb, cdf) < crit);
}

#[test]
fn upper_corner_and_equal_radii() {
    let r = estimate_chi_for(10.0, 10.0, 1.0, 1.0, &cfg(200_000, 1)).unwrap();
    assert!((r.chi - 0.63).abs() < 0.015, "{r:?}");
    let (da, db) = stokes_einstein_params(1.0).unwrap();
    let r = estimate_chi_for(da, db, 1.0, 1.0, &cfg(200_000, 2)).unwrap();
    assert!((r.chi - 0.29).abs() < 0.02, "{r:?}");
    assert_eq!(r.c0, r.rho_start.powi(3) * r.p_kmc);
}

#[test]
fn start_radius_does_not_matter() {
    let d = DerivedConstants::from_groups(1.0, 1.0, 1.0, 1.0).unwrap();
    let run = |k: f64, seed| {
        let c = KmcConfig {
            rho_start: StartRadius::RelativeToRho0(k),
            ..cfg(400_000, seed)
        };
        estimate_chi(&d, &c).unwrap().chi_estimate()
    };
    let near = run(1.1, 3);
    let two = run(2.0, 4);
    let four = run(4.0, 5);
    assert!(pooled_z(&near, &two) < 3.0);
    assert!(pooled_z(&two, &four) < 3.0);
}

#[test]
fn escape_radius_bias_is_small() {
    let d = DerivedConstants::from_groups(0.1, 1.0, 1.0, 1.0).unwrap();
    let run = |rho_inf: f64, seed| {
        let c = KmcConfig { rho_inf, ..cfg(300_000, seed) };
        estimate_chi(&d, &c).unwrap().chi_estimate()
    };
    assert!(pooled_z(&run(1e3, 6), &run(1e5, 7)) < 3.0);
}

#[test]
fn swap_symmetry() {
    let a = estimate_chi_for(0.1, 10.0, 1.0, 1.0, &cfg(300_000, 8)).unwrap();
    let b = estimate_chi_for(10.0, 0.1, 1.0, 1.0, &cfg(300_000, 9)).unwrap();
    assert!(pooled_z(&a.chi_estimate(), &b.chi_estimate()) < 3.0, "{a:?} {b:?}");
}

#[test]
fn quasi_chemical_within_sixteen_percent() {
    for (da, db) in [(0.01, 0.01), (1.0, 1.0), (0.1, 10.0)] {
        let r = estimate_chi_for(da, db, 1.0, 1.0, &cfg(200_000, 10)).unwrap();
        let qc = chi_qc((1.0 + da).sqrt(), (1.0 + db).sqrt(), 1.0, 1.0);
        assert!(((r.chi - qc) / r.chi).abs() < 0.16, "D = ({da}, {db}): {} vs {qc}", r.chi);
    }
}

#[test]
fn thread_count_invariance() {
    let d = DerivedConstants::from_groups(0.5, 2.0, 1.0, 0.8).unwrap();
    let one = estimate_chi(&d, &KmcConfig { threads: 1, ..cfg(30_000, 11) }).unwrap();
    let three = estimate_chi(&d, &KmcConfig { threads: 3, ..cfg(30_000, 11) }).unwrap();
    assert_eq!(one, three);
    let other_seed = estimate_chi(&d, &KmcConfig { threads: 1, ..cfg(30_000, 12) }).unwrap();
    assert_ne!(one.hits, other_seed.hits);
}
