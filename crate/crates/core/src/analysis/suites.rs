//! Named property suites shared by the command line and the acceptance run.
//! Each suite is a list of independent checks; a suite passes when every
//! check does.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bounds::verify_bounds_with;
use crate::error::{invalid, Error, Result};
use crate::farey::{chain_traces_via_farey, tilde, word_matrix, ChainTrace, SpinConfiguration};
use crate::rg::{
    discontinuities_ffsc, flow_closed_form, flow_integrate, mean_field_gradient, minimize_mean_field,
    phase_boundary_ffsc, singular_f_high, susceptibility_high, MeanFieldConstants, RgConstants, RgState,
};
use crate::spin_chain::{EnsembleParams, Enumerator};
use crate::summation::log_sum_exp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bounds,
    Symmetry,
    Spectrum,
    Oracle,
    Rg,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Bounds, Suite::Symmetry, Suite::Spectrum, Suite::Oracle, Suite::Rg];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bounds => "bounds",
            Suite::Symmetry => "symmetry",
            Suite::Spectrum => "spectrum",
            Suite::Oracle => "oracle",
            Suite::Rg => "rg",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| invalid(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Largest chain length of the default grids.
pub const DEFAULT_SUITE_N_MAX: usize = 16;

/// Runs a suite on its default grid.
pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    run_suite_with(suite, &Enumerator::default(), DEFAULT_SUITE_N_MAX)
}

/// Runs a suite with chain lengths `1..=n_max` (ignored by the RG suite).
pub fn run_suite_with(suite: Suite, enumerator: &Enumerator, n_max: usize) -> Result<SuiteReport> {
    if n_max == 0 {
        return Err(invalid("n_max must be >= 1"));
    }
    if suite != Suite::Rg && n_max > enumerator.cap() {
        return Err(Error::CapExceeded {
            n: n_max,
            cap: enumerator.cap(),
        });
    }
    let checks = match suite {
        Suite::Bounds => bounds_suite(enumerator, n_max)?,
        Suite::Symmetry => symmetry_suite(enumerator, n_max)?,
        Suite::Spectrum => spectrum_suite(enumerator, n_max)?,
        Suite::Oracle => oracle_suite(enumerator, n_max)?,
        Suite::Rg => rg_suite()?,
    };
    Ok(SuiteReport { suite, checks })
}

const BETAS: [f64; 5] = [0.5, 1.0, 2.0, 3.0, 3.5];
const FIELDS: [f64; 5] = [0.0, 0.5, -0.5, 1.5, -1.5];

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn bounds_suite(enumerator: &Enumerator, n_max: usize) -> Result<Vec<Check>> {
    let report = verify_bounds_with(enumerator, n_max, &BETAS, &FIELDS)?;
    let mut checks: Vec<Check> = report
        .tightest
        .iter()
        .map(|&(kind, margin)| {
            let failures: Vec<_> = report.violations.iter().filter(|v| v.kind == kind).collect();
            let detail = match failures.first() {
                None => format!("tightest ln-margin {margin:.3e}"),
                Some(v) => format!(
                    "{} violations, first at N={} beta={} h={} margin {:.3e}",
                    failures.len(),
                    v.n,
                    v.beta,
                    v.h,
                    v.margin
                ),
            };
            let name = match kind {
                super::BoundKind::SandwichLower => "sandwich-lower",
                super::BoundKind::SandwichUpper => "sandwich-upper",
                super::BoundKind::RatioLower => "ratio-lower",
                super::BoundKind::RatioUpper => "ratio-upper",
            };
            Check::new(format!("{name} N<={n_max}"), failures.is_empty(), detail)
        })
        .collect();
    checks.push(Check::new(
        "bounds-grid",
        report.checks > 0,
        format!("{} inequalities evaluated", report.checks),
    ));
    Ok(checks)
}

/// Trace and field data of every configuration of length `n`, computed by
/// explicit `u128` matrix products.
struct DirectSpectrum {
    /// `(trace, b_count, starts_with_b)`
    words: Vec<(u128, usize, bool)>,
    n: usize,
}

impl DirectSpectrum {
    fn new(n: usize) -> Result<Self> {
        let words = (0..1u64 << n)
            .map(|w| {
                let config = SpinConfiguration::from_word(w, n)?;
                let trace = word_matrix(&config)?.trace()?;
                Ok((trace, config.b_count(), config.bits()[0]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { words, n })
    }

    fn log_weights(&self, beta: f64, h: f64, filter: impl Fn(bool) -> bool) -> Vec<f64> {
        self.words
            .iter()
            .filter(|w| filter(w.2))
            .map(|&(trace, b, _)| -beta * ((trace as f64).ln() + h * (2.0 * b as f64 - self.n as f64)))
            .collect()
    }

    fn log_z(&self, beta: f64, h: f64) -> f64 {
        log_sum_exp(&self.log_weights(beta, h, |_| true))
    }
}

fn symmetry_suite(enumerator: &Enumerator, n_max: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    // tilde(M(sigma)) == M(flipped sigma), exhaustively
    let tilde_max = n_max.min(14);
    let mut mismatches = 0usize;
    let mut words = 0usize;
    for n in 1..=tilde_max {
        for w in 0..1u64 << n {
            let config = SpinConfiguration::from_word(w, n)?;
            words += 1;
            if tilde(&word_matrix(&config)?) != word_matrix(&config.flipped())? {
                mismatches += 1;
            }
        }
    }
    checks.push(Check::new(
        format!("tilde-involution N<={tilde_max}"),
        mismatches == 0,
        format!("{mismatches} mismatches over {words} words"),
    ));

    // Z^B(beta, h) = Z^A(beta, -h) from explicit word sums
    let mut worst_ab = 0.0f64;
    let mut worst_parity = 0.0f64;
    let mut worst_m = 0.0f64;
    let mut worst_split = 0.0f64;
    for n in 1..=n_max {
        let direct = DirectSpectrum::new(n)?;
        for &beta in &BETAS {
            for &h in &FIELDS {
                let z_b = log_sum_exp(&direct.log_weights(beta, h, |b| b));
                let z_a_flip = log_sum_exp(&direct.log_weights(beta, -h, |b| !b));
                worst_ab = worst_ab.max(rel_diff(z_b, z_a_flip).min((z_b - z_a_flip).abs()));

                let p = enumerator.log_partition(&EnsembleParams::new(n, beta, h)?)?;
                let q = enumerator.log_partition(&EnsembleParams::new(n, beta, -h)?)?;
                worst_parity = worst_parity.max((p.log_z - q.log_z).abs());
                let z_a = log_sum_exp(&direct.log_weights(beta, h, |b| !b));
                worst_split = worst_split
                    .max((p.log_z_a - z_a).abs())
                    .max((p.log_z_b - z_b).abs());

                let tp = enumerator.thermo_point(&EnsembleParams::new(n, beta, h)?)?;
                let tq = enumerator.thermo_point(&EnsembleParams::new(n, beta, -h)?)?;
                worst_m = worst_m.max((tp.m + tq.m).abs());
            }
        }
    }
    checks.push(Check::new(
        format!("ZB(h)=ZA(-h) direct N<={n_max}"),
        worst_ab <= 1e-12,
        format!("max |ln ZB(h) - ln ZA(-h)| {worst_ab:.3e}"),
    ));
    checks.push(Check::new(
        format!("A/B parts vs direct N<={n_max}"),
        worst_split <= 1e-12,
        format!("max abs ln difference {worst_split:.3e}"),
    ));
    checks.push(Check::new(
        format!("Z(h)=Z(-h) N<={n_max}"),
        worst_parity <= 1e-13,
        format!("max |ln Z(h) - ln Z(-h)| {worst_parity:.3e}"),
    ));
    checks.push(Check::new(
        format!("m(h)=-m(-h) N<={n_max}"),
        worst_m <= 1e-13,
        format!("max |m(h) + m(-h)| {worst_m:.3e}"),
    ));
    Ok(checks)
}

fn lucas(n: usize) -> u128 {
    let (mut a, mut b) = (2u128, 1u128);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

fn spectrum_suite(enumerator: &Enumerator, n_max: usize) -> Result<Vec<Check>> {
    let mut ground_failures = Vec::new();
    let mut excited_failures = Vec::new();
    let mut max_failures = Vec::new();
    let mut summary_failures = Vec::new();
    let ln_phi2 = 2.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let mut tightest_excited = f64::INFINITY;
    for n in 1..=n_max {
        let direct = DirectSpectrum::new(n)?;
        let ground: Vec<_> = direct.words.iter().filter(|w| w.0 == 2).collect();
        // the two ground states are the uniform chains
        let uniform_ok = ground.len() == 2 && ground.iter().all(|w| w.1 == 0 || w.1 == n);
        if !uniform_ok {
            ground_failures.push(n);
        }
        let min_excited = direct.words.iter().map(|w| w.0).filter(|&t| t != 2).min();
        if let Some(t) = min_excited {
            let margin = (t as f64).ln() - (n as f64).ln();
            tightest_excited = tightest_excited.min(margin);
            if margin < 0.0 {
                excited_failures.push(n);
            }
        }
        let max = direct.words.iter().map(|w| w.0).max().unwrap_or(0);
        let lucas_ok = n % 2 == 1 || max == lucas(n);
        if !lucas_ok || (max as f64).ln() > n as f64 * ln_phi2 + 1e-12 {
            max_failures.push(n);
        }
        let summary = enumerator.spectrum_summary(n)?;
        let agrees = summary.ground_count == ground.len() as u64
            && summary.min_excited_trace.map(u128::from) == min_excited
            && u128::from(summary.max_trace) == max;
        if !agrees {
            summary_failures.push(n);
        }
    }
    let detail = |v: &Vec<usize>, ok: String| {
        if v.is_empty() {
            ok
        } else {
            format!("fails at N = {v:?}")
        }
    };
    Ok(vec![
        Check::new(
            format!("two ground states at E=ln2 N<={n_max}"),
            ground_failures.is_empty(),
            detail(&ground_failures, "all-A and all-B only".into()),
        ),
        Check::new(
            format!("excited E>=ln N N<={n_max}"),
            excited_failures.is_empty(),
            detail(&excited_failures, format!("tightest margin {tightest_excited:.3e}")),
        ),
        Check::new(
            format!("max trace (L_N at even N), E<=N ln phi^2 N<={n_max}"),
            max_failures.is_empty(),
            detail(&max_failures, "ok".into()),
        ),
        Check::new(
            format!("streaming spectrum vs direct N<={n_max}"),
            summary_failures.is_empty(),
            detail(&summary_failures, "ok".into()),
        ),
    ])
}

fn oracle_suite(enumerator: &Enumerator, n_max: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for n in 1..=n_max {
        for beta in [0.5, 2.0, 3.5] {
            for h in [0.0, 0.5] {
                let params = EnsembleParams::new(n, beta, h)?;
                let direct = enumerator.log_partition(&params)?.log_z;
                let farey = enumerator.log_partition_via_farey(&params)?;
                // relative error of Z is the absolute error of ln Z
                worst = worst.max((direct - farey).abs());
            }
        }
    }
    checks.push(Check::new(
        format!("Z enumeration vs Farey recursion N<={n_max}"),
        worst <= 1e-12,
        format!("max relative difference {worst:.3e}"),
    ));

    let multiset_max = n_max.min(14);
    let mut bad = Vec::new();
    for n in 1..=multiset_max {
        let mut from_tree: BTreeMap<ChainTrace, usize> = BTreeMap::new();
        for c in chain_traces_via_farey(n)? {
            *from_tree.entry(c).or_default() += 1;
        }
        let direct = DirectSpectrum::new(n)?;
        let mut from_words: BTreeMap<ChainTrace, usize> = BTreeMap::new();
        for &(trace, b, starts_b) in &direct.words {
            if !starts_b {
                *from_words
                    .entry(ChainTrace {
                        trace,
                        b_count: b as u32,
                    })
                    .or_default() += 1;
            }
        }
        if from_tree != from_words {
            bad.push(n);
        }
    }
    checks.push(Check::new(
        format!("Farey trace multiset vs A-words N<={multiset_max}"),
        bad.is_empty(),
        if bad.is_empty() { "identical".into() } else { format!("differs at N = {bad:?}") },
    ));

    let mut worst_direct = 0.0f64;
    for n in 1..=n_max.min(12) {
        let direct = DirectSpectrum::new(n)?;
        for &beta in &BETAS {
            for &h in &FIELDS {
                let lz = enumerator.log_partition(&EnsembleParams::new(n, beta, h)?)?.log_z;
                worst_direct = worst_direct.max((lz - direct.log_z(beta, h)).abs());
            }
        }
    }
    checks.push(Check::new(
        format!("Z vs explicit matrix products N<={}", n_max.min(12)),
        worst_direct <= 1e-12,
        format!("max relative difference {worst_direct:.3e}"),
    ));

    // Z_1 = 2 * 2^-beta cosh(beta h) and Z_2(2, 0) = 13/18
    let z1 = enumerator.log_partition(&EnsembleParams::new(1, 1.5, 0.3)?)?.log_z;
    let z1_exact = (2.0 * 2f64.powf(-1.5) * (1.5f64 * 0.3).cosh()).ln();
    let z2 = enumerator.log_partition(&EnsembleParams::new(2, 2.0, 0.0)?)?.log_z;
    let z2_exact = (13.0f64 / 18.0).ln();
    let err = (z1 - z1_exact).abs().max((z2 - z2_exact).abs());
    checks.push(Check::new(
        "closed-form small chains",
        err <= 1e-14,
        format!("max abs ln difference {err:.3e}"),
    ));
    Ok(checks)
}

fn rg_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mf = MeanFieldConstants::default();
    let rg = RgConstants::default();

    let s0 = RgState::new(1e-4, 3e-5, 0.5);
    let exact = flow_closed_form(&s0, 10.0, &rg)?;
    let num = flow_integrate(&s0, 10.0, 1e-3, &rg)?;
    let err = [(num.t, exact.t), (num.h, exact.h), (num.u, exact.u)]
        .iter()
        .map(|&(a, b)| rel_diff(a, b))
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "RK4 flow vs closed form at l=10",
        err <= 1e-8,
        format!("max relative difference {err:.3e}"),
    ));

    let products = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2]
        .iter()
        .map(|&t| Ok(susceptibility_high(t, &mf, &rg)? * singular_f_high(t, 0.0, &mf, &rg)?))
        .collect::<Result<Vec<f64>>>()?;
    let spread = products.iter().map(|p| rel_diff(*p, products[0])).fold(0.0, f64::max);
    checks.push(Check::new(
        "chi * f_s constant in t",
        spread <= 1e-10,
        format!("max relative spread {spread:.3e}"),
    ));

    let degenerate = MeanFieldConstants::new(-1.0, 3.0, 0.5, 2.0)?;
    let d = discontinuities_ffsc(1e-3, &degenerate, &rg)?;
    checks.push(Check::new(
        "degenerate limit dm = ds = 0",
        d.delta_m.abs() <= 1e-10 && d.delta_s.abs() <= 1e-10,
        format!("dm {:.3e}, ds {:.3e}", d.delta_m, d.delta_s),
    ));

    let b = phase_boundary_ffsc(1e-4, &mf, &rg)?;
    let ratio = b.h_star / b.asymptote;
    checks.push(Check::new(
        "boundary vs asymptote at t=1e-4",
        (ratio - 1.0).abs() <= 0.02,
        format!("h*/asymptote {ratio:.12}"),
    ));

    let d = discontinuities_ffsc(1e-3, &mf, &rg)?;
    let agree = (d.delta_m - d.delta_m_via_magnetization).abs();
    checks.push(Check::new(
        "dm from closed form vs magnetization",
        agree <= 1e-8 && d.delta_s >= 0.0,
        format!("difference {agree:.3e}, ds {:.6e}", d.delta_s),
    ));

    let mut worst_gradient = 0.0f64;
    for (t, h) in [(1.0, 0.01), (0.0, 0.3), (-0.5, 0.05), (0.2, -1.5)] {
        let m = minimize_mean_field(t, h, &mf);
        worst_gradient = worst_gradient.max(mean_field_gradient(m, t, h, &mf).abs());
    }
    checks.push(Check::new(
        "mean-field gradient at minimizer",
        worst_gradient <= 1e-8,
        format!("max |df/dM| {worst_gradient:.3e}"),
    ));

    let slope = mean_field_slope(&mf);
    checks.push(Check::new(
        "M0 ~ h^(1/3) at t=0",
        (slope - 1.0 / 3.0).abs() <= 0.01,
        format!("log-log slope {slope:.12}"),
    ));
    Ok(checks)
}

/// Least-squares slope of `ln M0` against `ln h` at `t = 0`.
pub(crate) fn mean_field_slope(mf: &MeanFieldConstants) -> f64 {
    let hs: Vec<f64> = (0..9).map(|i| 10f64.powf(-6.0 + 0.5 * i as f64)).collect();
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = hs.iter().map(|&h| minimize_mean_field(0.0, h, mf).ln()).collect();
    let ones = vec![1.0; xs.len()];
    super::fit::weighted_line(&xs, &ys, &ones).map(|r| r.1).unwrap_or(f64::NAN)
}
