//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails.

use std::f64::consts::LN_2;
use std::process::Command;
use std::time::{Duration, Instant};

use ffsc_core::analysis::suites::{run_suite_with, Suite};
use ffsc_core::analysis::{extrapolate_f, farey_moments, moment_scaling_report};
use ffsc_core::kdp::{kdp_discontinuities, kdp_free_energy, kdp_log_partition, kdp_phase_boundary};
use ffsc_core::rg::{
    discontinuities_ffsc, flow_closed_form, flow_integrate, mean_field_gradient, minimize_mean_field,
    phase_boundary_ffsc, singular_f_high, susceptibility_high,
};
use ffsc_core::{EnsembleParams, Enumerator, FieldVariant, KdpParams, MeanFieldConstants, RgConstants, RgState};

type Outcome = Result<String, String>;

/// Id, name, body and optional runtime budget.
type Criterion = (&'static str, &'static str, fn() -> Outcome, Option<Duration>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn oracle_equivalence() -> Outcome {
    let e = Enumerator::default();
    let mut worst = 0.0f64;
    for n in 1..=18 {
        for beta in [0.5, 2.0, 3.5] {
            for h in [0.0, 0.5] {
                let p = EnsembleParams::new(n, beta, h).map_err(|e| e.to_string())?;
                let direct = e.log_partition(&p).map_err(|e| e.to_string())?.log_z;
                let farey = e.log_partition_via_farey(&p).map_err(|e| e.to_string())?;
                // |Z1 / Z2 - 1| = |exp(ln Z1 - ln Z2) - 1|
                worst = worst.max((direct - farey).exp_m1().abs());
            }
        }
    }
    check(worst <= 1e-12, format!("max relative difference of Z over N<=18: {worst:.3e}"))
}

fn theorem_suites() -> Outcome {
    let e = Enumerator::default();
    let mut failed = Vec::new();
    let mut count = 0;
    for suite in [Suite::Bounds, Suite::Symmetry, Suite::Spectrum] {
        let report = run_suite_with(suite, &e, 16).map_err(|e| e.to_string())?;
        count += report.checks.len();
        failed.extend(
            report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{suite}/{}: {}", c.name, c.detail)),
        );
    }
    check(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{count} checks over N<=16, zero violations")
        } else {
            failed.join("; ")
        },
    )
}

fn low_temperature_free_energy() -> Outcome {
    let e = Enumerator::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (h, target) in [(0.5, -0.5), (0.0, 0.0)] {
        let seq: Vec<_> = e
            .free_energy_sequence(24, 3.0, h)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|&(n, _)| n >= 8)
            .collect();
        let fit = extrapolate_f(&seq).map_err(|e| e.to_string())?;
        ok &= (fit.f_infinity - target).abs() <= 0.02;
        parts.push(format!("h={h}: f_inf={:.5}", fit.f_infinity));
    }
    check(ok, format!("beta=3, N=8..24, {}", parts.join(", ")))
}

fn kdp_closed_forms() -> Outcome {
    let mut problems = Vec::new();
    for variant in [FieldVariant::EndpointField, FieldVariant::SiteField] {
        let p = KdpParams::new(1.0, variant).map_err(|e| e.to_string())?;
        // beta eps > ln 2 at h = 0
        for beta in [0.7, 1.0, 3.0] {
            let f = kdp_free_energy(beta, 0.0, &p).map_err(|e| e.to_string())?.f;
            if f != 0.0 {
                problems.push(format!("{variant:?}: f={f} at beta={beta}"));
            }
        }
        if kdp_discontinuities(0.0, &p).map_err(|e| e.to_string())? != (1.0, LN_2) {
            problems.push(format!("{variant:?}: jumps at t=0"));
        }
        for (beta, h) in [(0.5, 0.0), (0.5, 0.4), (1.0, 0.1), (2.0, -0.3)] {
            let f = kdp_free_energy(beta, h, &p).map_err(|e| e.to_string())?.f;
            for n in [1, 2, 4, 8, 16, 64, 256, 1024] {
                let lz = kdp_log_partition(n, beta, h, &p).map_err(|e| e.to_string())?;
                let fn_ = -lz / (beta * n as f64);
                if (fn_ - f).abs() > 10.0 / n as f64 {
                    problems.push(format!("{variant:?}: |f_N - f| at N={n}"));
                }
            }
        }
    }
    let site = KdpParams::new(1.0, FieldVariant::SiteField).map_err(|e| e.to_string())?;
    let t = 0.05;
    let series = t + LN_2 / 2.0 * t * t;
    let h = kdp_phase_boundary(t, &site).map_err(|e| e.to_string())?;
    let diff = (h - series).abs();
    if diff > 5e-4 {
        problems.push(format!("site boundary off series by {diff:.3e}"));
    }
    check(
        problems.is_empty(),
        if problems.is_empty() {
            format!("site boundary vs series at t=0.05: {diff:.3e}; finite-N within 10/N")
        } else {
            problems.join("; ")
        },
    )
}

fn rg_engine() -> Outcome {
    let (mf, rg) = (MeanFieldConstants::default(), RgConstants::default());
    let s0 = RgState::new(1e-4, 3e-5, 0.5);
    let exact = flow_closed_form(&s0, 10.0, &rg).map_err(|e| e.to_string())?;
    let num = flow_integrate(&s0, 10.0, 1e-3, &rg).map_err(|e| e.to_string())?;
    let flow = [rel(num.t, exact.t), rel(num.h, exact.h), rel(num.u, exact.u)]
        .into_iter()
        .fold(0.0, f64::max);

    let product = |t: f64| -> Result<f64, String> {
        let chi = susceptibility_high(t, &mf, &rg).map_err(|e| e.to_string())?;
        Ok(chi * singular_f_high(t, 0.0, &mf, &rg).map_err(|e| e.to_string())?)
    };
    let reference = product(1e-6)?;
    let mut spread = 0.0f64;
    for i in 0..=40 {
        let t = 10f64.powf(-6.0 + 0.1 * i as f64);
        spread = spread.max(rel(product(t)?, reference));
    }

    let degenerate = MeanFieldConstants::new(-1.0, 3.0, 0.5, 2.0).map_err(|e| e.to_string())?;
    let d = discontinuities_ffsc(1e-4, &degenerate, &rg).map_err(|e| e.to_string())?;

    let b = phase_boundary_ffsc(1e-4, &mf, &rg).map_err(|e| e.to_string())?;
    let ratio = b.h_star / b.asymptote;

    check(
        flow <= 1e-8
            && spread <= 1e-10
            && d.delta_m.abs() <= 1e-10
            && d.delta_s.abs() <= 1e-10
            && (ratio - 1.0).abs() <= 0.02,
        format!(
            "RK4 rel {flow:.2e}; chi*f spread {spread:.2e}; degenerate dm={:.1e} ds={:.1e}; h*/asymptote at 1e-4 = {ratio:.6}",
            d.delta_m.abs(),
            d.delta_s.abs()
        ),
    )
}

fn mean_field() -> Outcome {
    let c = MeanFieldConstants::default();
    let mut worst = 0.0f64;
    for t in [-1.0, -0.1, 0.0, 0.1, 1.0] {
        for h in [-0.5, -1e-3, 0.0, 1e-3, 0.5] {
            let m = minimize_mean_field(t, h, &c);
            worst = worst.max(mean_field_gradient(m, t, h, &c).abs());
        }
    }
    let hs: Vec<f64> = (0..13).map(|i| 10f64.powf(-6.0 + 0.5 * i as f64)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = hs.iter().map(|&h| (h.ln(), minimize_mean_field(0.0, h, &c).ln())).unzip();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    check(
        worst <= 1e-8 && (slope - 1.0 / 3.0).abs() <= 0.01,
        format!("max gradient {worst:.2e}; slope of ln M0 vs ln h at t=0: {slope:.6}"),
    )
}

fn correlation_positivity() -> Outcome {
    let e = Enumerator::default();
    let mut min = f64::INFINITY;
    let mut at = (0, 0.0, 0);
    for n in 1..=14 {
        for beta in [0.5, 1.0, 2.0, 3.0] {
            let p = EnsembleParams::new(n, beta, 0.0).map_err(|e| e.to_string())?;
            for (j, c) in e.correlations(&p).map_err(|e| e.to_string())?.into_iter().enumerate() {
                if c < min {
                    min = c;
                    at = (n, beta, j + 1);
                }
            }
        }
    }
    check(
        min >= -1e-12,
        format!("min <s_1 s_j> = {min:.3e} at N={}, beta={}, j={}", at.0, at.1, at.2),
    )
}

fn farey_moment_sums() -> Outcome {
    let mut ok = true;
    for level in 0..=20 {
        ok &= farey_moments(level, 1).map_err(|e| e.to_string())?.sum == 1.0;
    }
    let m21 = farey_moments(1, 2).map_err(|e| e.to_string())?.sum;
    let m22 = farey_moments(2, 2).map_err(|e| e.to_string())?.sum;
    let hand = (1.0 / 3.0f64).powi(2) + (1.0 / 6.0f64).powi(2) + (1.0 / 6.0f64).powi(2) + (1.0 / 3.0f64).powi(2);
    ok &= m21 == 0.5 && (m22 - hand).abs() <= 1e-15;
    let rows = moment_scaling_report(20, &[2, 3, 4, 5, 6]).map_err(|e| e.to_string())?;
    let powers: Vec<String> = rows
        .iter()
        .map(|r| format!("m={}: {:.3} (level axis {:.3})", r.order, r.power_vs_fraction_count, r.power_vs_level))
        .collect();
    check(
        ok && rows.len() == 5,
        format!("m=1 sums exact for levels 0..=20; m=2 hand values match; powers vs 2^N+1 {}", powers.join(", ")),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ffsc");
    let run = |threads: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(bin)
            .args(["thermo", "--n", "20", "--beta-range", "1:4:0.25", "--h-range", "-0.01:0.01:0.01"])
            .args(["--threads", threads])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok(out.stdout)
    };
    let one = run("1")?;
    let two = run("2")?;
    let eight = run("8")?;
    let rows = one.iter().filter(|&&b| b == b'\n').count().saturating_sub(1);
    check(
        one == two && one == eight && rows == 39,
        format!("{rows} rows, {} bytes; identical for 1, 2, 8 threads: {}", one.len(), one == two && one == eight),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1", "oracle equivalence", oracle_equivalence, Some(Duration::from_secs(120))),
        ("2", "theorem suites", theorem_suites, None),
        ("3", "low-temperature free energy", low_temperature_free_energy, Some(Duration::from_secs(600))),
        ("4", "KDP closed forms", kdp_closed_forms, None),
        ("5", "RG engine", rg_engine, None),
        ("6", "mean field", mean_field, None),
        ("7", "correlation positivity", correlation_positivity, None),
        ("8", "Farey moments", farey_moment_sums, None),
        ("9", "determinism", determinism, None),
    ];
    let mut failures = 0;
    for (id, name, f, budget) in criteria {
        let start = Instant::now();
        let mut result = f();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&result, budget) {
            if elapsed > limit {
                result = Err(format!("{detail}; exceeded {}s budget", limit.as_secs()));
            }
        }
        let (status, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{status} criterion {id} ({name}) [{:.2}s]: {detail}", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
