use ffsc_core::analysis::{extrapolate_f, verify_bounds};
use ffsc_core::spin_chain::{config_energy, free_energy_sequence};
use ffsc_core::summation::log_sum_exp;
use ffsc_core::{EnsembleParams, Enumerator, SpinConfiguration};

fn params(n: usize, beta: f64, h: f64) -> EnsembleParams {
    EnsembleParams::new(n, beta, h).unwrap()
}

/// `ln Z` from explicit configuration energies.
fn brute_log_z(n: usize, beta: f64, h: f64) -> f64 {
    let terms: Vec<f64> = (0..1u64 << n)
        .map(|w| -beta * config_energy(&SpinConfiguration::from_word(w, n).unwrap(), h).unwrap())
        .collect();
    log_sum_exp(&terms)
}

#[test]
fn enumeration_matches_brute_force() {
    let e = Enumerator::default();
    for n in 1..=12 {
        for (beta, h) in [(0.3, 0.0), (2.0, 0.1), (3.5, -0.7)] {
            let lz = e.log_partition(&params(n, beta, h)).unwrap().log_z;
            assert!((lz - brute_log_z(n, beta, h)).abs() <= 1e-12, "n={n}");
        }
    }
}

#[test]
fn farey_reconstruction_matches_enumeration() {
    let e = Enumerator::default();
    for n in 1..=16 {
        for beta in [0.5, 2.0, 3.5] {
            for h in [0.0, 0.5] {
                let p = params(n, beta, h);
                let direct = e.log_partition(&p).unwrap().log_z;
                assert!((direct - e.log_partition_via_farey(&p).unwrap()).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let e = Enumerator::default();
    let (n, beta, h) = (10, 1.7, 0.23);
    let delta = 1e-4;
    let lz = |b: f64, hh: f64| e.log_partition(&params(n, b, hh)).unwrap().log_z;
    let t = e.thermo_point(&params(n, beta, h)).unwrap();
    let nf = n as f64;
    // u = -d ln Z / d beta / N
    let u = -(lz(beta + delta, h) - lz(beta - delta, h)) / (2.0 * delta) / nf;
    assert!((u - t.u).abs() <= 1e-6, "{u} vs {}", t.u);
    // m = (1 / beta N) d ln Z / dh
    let m = (lz(beta, h + delta) - lz(beta, h - delta)) / (2.0 * delta) / (beta * nf);
    assert!((m - t.m).abs() <= 1e-6);
    // chi = dm/dh
    let mp = e.thermo_point(&params(n, beta, h + delta)).unwrap().m;
    let mm = e.thermo_point(&params(n, beta, h - delta)).unwrap().m;
    assert!(((mp - mm) / (2.0 * delta) - t.chi).abs() <= 1e-6);
    // s = beta (u - f)
    assert!((t.s - beta * (t.u - t.f.unwrap())).abs() <= 1e-12);
}

#[test]
fn sandwich_and_ratio_bounds_to_twenty() {
    let report = verify_bounds(20, &[0.7, 2.0, 3.0], &[0.0, 0.25, -1.0]).unwrap();
    assert!(report.passed(), "{:?}", report.violations);
}

#[test]
fn ground_states_and_excited_gap() {
    let e = Enumerator::default();
    for n in 2..=18 {
        let s = e.spectrum_summary(n).unwrap();
        assert_eq!(s.ground_count, 2);
        // A^{N-1} B has trace N + 1
        assert_eq!(s.min_excited_trace, Some(n as u64 + 1));
    }
}

#[test]
fn correlations_are_nonnegative_and_start_at_one() {
    let e = Enumerator::default();
    for n in 2..=12 {
        for beta in [0.5, 1.0, 2.0, 3.0] {
            let c = e.correlations(&params(n, beta, 0.0)).unwrap();
            assert!((c[0] - 1.0).abs() <= 1e-14);
            assert!(c.iter().all(|&x| x >= -1e-12), "n={n} beta={beta}: {c:?}");
        }
    }
}

#[test]
fn zero_field_free_energy_vanishes_at_low_temperature() {
    let seq: Vec<_> = free_energy_sequence(24, 3.0, 0.0).unwrap().into_iter().skip(7).collect();
    let e = extrapolate_f(&seq).unwrap();
    assert!(e.f_infinity.abs() <= 0.02, "{e:?}");
}

#[test]
fn field_free_energy_is_minus_abs_h_at_low_temperature() {
    let seq: Vec<_> = free_energy_sequence(24, 3.0, 0.5).unwrap().into_iter().skip(7).collect();
    let e = extrapolate_f(&seq).unwrap();
    assert!((e.f_infinity + 0.5).abs() <= 0.02, "{e:?}");
}

#[test]
fn critical_log_partition_is_subextensive() {
    let e = Enumerator::default();
    let per_site: Vec<f64> = (8..=22)
        .map(|n| e.log_partition(&params(n, 2.0, 0.0)).unwrap().log_z / n as f64)
        .collect();
    assert!(per_site.windows(2).all(|w| w[1] < w[0]), "{per_site:?}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let p = params(22, 2.5, 0.01);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| Enumerator::default().thermo_point(&p).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(2));
    assert_eq!(one, run(8));
}

#[test]
fn cap_refuses_long_chains() {
    let e = Enumerator::with_cap(10).unwrap();
    assert!(e.log_partition(&params(11, 1.0, 0.0)).is_err());
    assert!(e.log_partition(&params(10, 1.0, 0.0)).is_ok());
}
