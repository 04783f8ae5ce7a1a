//! Exact finite-N thermodynamics of the Farey fraction spin chain by full
//! enumeration of the `2^N` configurations.
//!
//! The configuration space is split into the `A`-initial and `B`-initial
//! halves, and each half into `2^k` subtrees by a fixed-length prefix. The
//! `B` half is walked as the mirror image of the `A` half (child order
//! reversed), so leaf `i` of one half is the bitwise complement of leaf `i`
//! of the other and carries the same trace. Subtree partial sums are reduced
//! in ascending prefix order; `k` does not depend on the number of worker
//! threads, so every result is bit-identical for any thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::farey::{self, word_matrix, SpinConfiguration};
use crate::summation::NeumaierSum;

/// Default largest chain length accepted for enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 34;
/// Hard upper limit on the cap; traces of length-62 words fit in `u64`.
pub const MAX_ENUMERATION_CAP: usize = 62;
/// Environment variable overriding the default cap.
pub const ENUMERATION_CAP_ENV: &str = "FFSC_ENUMERATION_CAP";
/// Inverse critical temperature of the chain at zero field.
pub const BETA_C: f64 = 2.0;

const SPLIT_DEPTH: usize = 10;

/// Chain length, inverse temperature and field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n: usize,
    pub beta: f64,
    pub h: f64,
}

impl EnsembleParams {
    pub fn new(n: usize, beta: f64, h: f64) -> Result<Self> {
        let p = Self { n, beta, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("chain length N must be >= 1"));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(invalid(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        if !self.h.is_finite() {
            return Err(invalid(format!("field h must be finite, got {}", self.h)));
        }
        Ok(())
    }

    /// Reduced temperature `beta_c / beta - 1`.
    pub fn reduced_temperature(&self) -> f64 {
        BETA_C / self.beta - 1.0
    }

    /// Lowest configuration energy, `ln 2 - |h| N`, attained by a ground state.
    fn min_energy(&self) -> f64 {
        std::f64::consts::LN_2 - self.h.abs() * self.n as f64
    }
}

/// Natural logarithms of the full partition function and of its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub params: EnsembleParams,
    pub log_z: f64,
    /// Chains beginning with `A`.
    pub log_z_a: f64,
    /// Chains beginning with `B`.
    pub log_z_b: f64,
    /// Everything except the all-`A` and all-`B` ground states; `-inf` at `N = 1`.
    pub log_z_excited: f64,
}

/// Per-site observables of a finite chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoPoint {
    pub params: EnsembleParams,
    /// Free energy per site; `None` at `beta = 0`.
    pub f: Option<f64>,
    /// Mean energy per site.
    pub u: f64,
    /// Magnetization per site, `<N - 2 sum sigma> / N`.
    pub m: f64,
    /// Entropy per site.
    pub s: f64,
    /// Susceptibility `(beta / N) Var(2 sum sigma - N)`.
    pub chi: f64,
    /// Heat capacity per site `(beta^2 / N) Var(E)`.
    pub heat_capacity: f64,
}

impl ThermoPoint {
    pub fn free_energy(&self) -> Result<f64> {
        self.f.ok_or(Error::UndefinedAtZeroBeta)
    }
}

/// Counts over the zero-field energy spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub n: usize,
    /// Configurations with trace 2.
    pub ground_count: u64,
    /// Smallest trace among the other `2^N - 2` configurations.
    pub min_excited_trace: Option<u64>,
    pub max_trace: u64,
}

/// Configuration-space enumerator with a length cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enumerator {
    cap: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl Enumerator {
    pub fn with_cap(cap: usize) -> Result<Self> {
        if cap == 0 || cap > MAX_ENUMERATION_CAP {
            return Err(invalid(format!(
                "enumeration cap must be in 1..={MAX_ENUMERATION_CAP}, got {cap}"
            )));
        }
        Ok(Self { cap })
    }

    /// Reads the cap from [`ENUMERATION_CAP_ENV`], falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENUMERATION_CAP_ENV) {
            Ok(v) => {
                let cap = v.trim().parse::<usize>().map_err(|_| {
                    invalid(format!("{ENUMERATION_CAP_ENV}={v:?} is not a positive integer"))
                })?;
                Self::with_cap(cap)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn check(&self, params: &EnsembleParams) -> Result<()> {
        params.validate()?;
        if params.n > self.cap {
            return Err(Error::CapExceeded {
                n: params.n,
                cap: self.cap,
            });
        }
        Ok(())
    }

    pub fn log_partition(&self, params: &EnsembleParams) -> Result<PartitionResult> {
        self.check(params)?;
        let table = WeightTable::new(params);
        let [a, b] = enumerate_halves(params.n, || MomentLeaf::new(&table));
        let shift = -params.beta * table.e_min;
        let mut excited = a.excited;
        excited += b.excited;
        Ok(PartitionResult {
            params: *params,
            log_z: shift + (a.z + b.z).value().ln(),
            log_z_a: shift + a.z.value().ln(),
            log_z_b: shift + b.z.value().ln(),
            log_z_excited: shift + excited.value().ln(),
        })
    }

    /// All observables from a single enumeration pass.
    pub fn thermo_point(&self, params: &EnsembleParams) -> Result<ThermoPoint> {
        self.check(params)?;
        let table = WeightTable::new(params);
        let [mut acc, b] = enumerate_halves(params.n, || MomentLeaf::new(&table));
        acc.merge(b);

        let n = params.n as f64;
        let beta = params.beta;
        let z = acc.z.value();
        let mean_delta = acc.delta.value() / z;
        let var_delta = (acc.delta2.value() / z - mean_delta * mean_delta).max(0.0);
        let mean_mag = acc.mag.value() / z;
        let var_mag = (acc.mag2.value() / z - mean_mag * mean_mag).max(0.0);
        // ln(sum w) >= 0 because the ground state has unit shifted weight.
        let log_w = z.ln();
        let log_z = log_w - beta * table.e_min;

        Ok(ThermoPoint {
            params: *params,
            f: (beta > 0.0).then(|| -log_z / (beta * n)),
            u: (table.e_min + mean_delta) / n,
            m: (mean_mag / n).clamp(-1.0, 1.0),
            s: ((log_w + beta * mean_delta) / n).max(0.0),
            chi: beta * var_mag / n,
            heat_capacity: beta * beta * var_delta / n,
        })
    }

    /// `<s_1 s_j>` for `j = 1..=N` (index `j - 1`), with `s_i = 2 sigma_i - 1`.
    pub fn correlations(&self, params: &EnsembleParams) -> Result<Vec<f64>> {
        self.check(params)?;
        let table = WeightTable::new(params);
        let [mut acc, b] = enumerate_halves(params.n, || CorrelationLeaf::new(&table));
        acc.merge(b);
        let z = acc.z.value();
        Ok(acc.s1sj.iter().map(|s| s.value() / z).collect())
    }

    pub fn correlation(&self, params: &EnsembleParams, j: usize) -> Result<f64> {
        if j == 0 || j > params.n {
            return Err(invalid(format!("site index j={j} outside 1..={}", params.n)));
        }
        Ok(self.correlations(params)?[j - 1])
    }

    /// `(N, f_N)` for `N = 1..=n_max`.
    pub fn free_energy_sequence(&self, n_max: usize, beta: f64, h: f64) -> Result<Vec<(usize, f64)>> {
        if beta == 0.0 {
            return Err(Error::UndefinedAtZeroBeta);
        }
        (1..=n_max)
            .map(|n| {
                let p = EnsembleParams::new(n, beta, h)?;
                let r = self.log_partition(&p)?;
                Ok((n, -r.log_z / (beta * n as f64)))
            })
            .collect()
    }

    /// Rebuilds `ln Z_N` from the Farey-pair recursion for `A`-initial
    /// chains plus their tilde images (same trace, complementary `B` count).
    pub fn log_partition_via_farey(&self, params: &EnsembleParams) -> Result<f64> {
        self.check(params)?;
        let n = params.n;
        let (beta, h) = (params.beta, params.h);
        // log-weight of a chain: -beta ln T - beta h (2b - N)
        let log_weight = |trace: u128, b: u32| {
            let field = 2.0 * b as f64 - n as f64;
            -beta * (trace as f64).ln() - beta * h * field
        };
        let shift = -beta * params.min_energy();
        let mut sum = NeumaierSum::new();
        farey::for_each_chain_trace(n, |c| {
            let mirrored = n as u32 - c.b_count;
            sum += (log_weight(c.trace, c.b_count) - shift).exp();
            sum += (log_weight(c.trace, mirrored) - shift).exp();
        })?;
        Ok(shift + sum.value().ln())
    }

    /// Ground-state count and trace range of the zero-field spectrum.
    pub fn spectrum_summary(&self, n: usize) -> Result<SpectrumSummary> {
        self.check(&EnsembleParams::new(n, 0.0, 0.0)?)?;
        let [mut acc, b] = enumerate_halves(n, SpectrumLeaf::default);
        acc.merge(b);
        Ok(SpectrumSummary {
            n,
            ground_count: acc.ground,
            min_excited_trace: (acc.min_excited != u64::MAX).then_some(acc.min_excited),
            max_trace: acc.max_trace,
        })
    }
}

/// [`Enumerator::log_partition`] with the default cap.
pub fn log_partition(params: &EnsembleParams) -> Result<PartitionResult> {
    Enumerator::default().log_partition(params)
}

/// [`Enumerator::thermo_point`] with the default cap.
pub fn thermo_point(params: &EnsembleParams) -> Result<ThermoPoint> {
    Enumerator::default().thermo_point(params)
}

/// [`Enumerator::correlation`] with the default cap.
pub fn correlation(params: &EnsembleParams, j: usize) -> Result<f64> {
    Enumerator::default().correlation(params, j)
}

/// [`Enumerator::free_energy_sequence`] with the default cap.
pub fn free_energy_sequence(n_max: usize, beta: f64, h: f64) -> Result<Vec<(usize, f64)>> {
    Enumerator::default().free_energy_sequence(n_max, beta, h)
}

/// `ln Tr M_N + h (2 sum sigma - N)`.
pub fn config_energy(config: &SpinConfiguration, h: f64) -> Result<f64> {
    let trace = word_matrix(config)?.trace()?;
    let field = 2.0 * config.b_count() as f64 - config.len() as f64;
    Ok((trace as f64).ln() + h * field)
}

// ---------------------------------------------------------------------------
// enumeration engine

trait Leaf: Send {
    /// `sigma` holds the word with `sigma_1` in bit `N - 1`.
    fn visit(&mut self, trace: u64, sigma: u64);
    fn merge(&mut self, other: Self);
}

type Mat = (u64, u64, u64, u64);

#[inline(always)]
fn times(m: Mat, b: bool) -> Mat {
    let (m1, m2, m3, m4) = m;
    if b {
        (m1, m1 + m2, m3, m3 + m4)
    } else {
        (m1 + m2, m2, m3 + m4, m4)
    }
}

/// Returns the partial results of the `A`-initial and `B`-initial halves.
fn enumerate_halves<L, F>(n: usize, make: F) -> [L; 2]
where
    L: Leaf,
    F: Fn() -> L + Sync,
{
    [enumerate_half(n, false, &make), enumerate_half(n, true, &make)]
}

fn enumerate_half<L, F>(n: usize, first_is_b: bool, make: &F) -> L
where
    L: Leaf,
    F: Fn() -> L + Sync,
{
    let split = (n - 1).min(SPLIT_DEPTH);
    let rest = n - 1 - split;
    let partials: Vec<L> = (0..1u64 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut m = times((1, 0, 0, 1), first_is_b);
            let mut sigma = first_is_b as u64;
            for i in (0..split).rev() {
                let letter = first_is_b ^ ((prefix >> i) & 1 == 1);
                m = times(m, letter);
                sigma = (sigma << 1) | letter as u64;
            }
            let mut leaf = make();
            walk(m, sigma, rest, first_is_b, &mut leaf);
            leaf
        })
        .collect();
    let mut iter = partials.into_iter();
    let mut acc = iter.next().expect("at least one subtree");
    for p in iter {
        acc.merge(p);
    }
    acc
}

fn walk<L: Leaf>(m: Mat, sigma: u64, rest: usize, first_is_b: bool, leaf: &mut L) {
    if rest == 0 {
        leaf.visit(m.0 + m.3, sigma);
        return;
    }
    for letter in [first_is_b, !first_is_b] {
        walk(times(m, letter), (sigma << 1) | letter as u64, rest - 1, first_is_b, leaf);
    }
}

struct WeightTable {
    n: usize,
    beta: f64,
    e_min: f64,
    /// `h (2b - N)` indexed by the `B` count.
    field: Vec<f64>,
}

impl WeightTable {
    fn new(p: &EnsembleParams) -> Self {
        let n = p.n;
        Self {
            n,
            beta: p.beta,
            e_min: p.min_energy(),
            field: (0..=n).map(|b| p.h * (2 * b as i64 - n as i64) as f64).collect(),
        }
    }

    /// Energy above the minimum and its shifted Boltzmann weight.
    #[inline(always)]
    fn delta_and_weight(&self, trace: u64, b: usize) -> (f64, f64) {
        let delta = (trace as f64).ln() + self.field[b] - self.e_min;
        (delta, (-self.beta * delta).exp())
    }
}

struct MomentLeaf<'a> {
    table: &'a WeightTable,
    z: NeumaierSum,
    delta: NeumaierSum,
    delta2: NeumaierSum,
    mag: NeumaierSum,
    mag2: NeumaierSum,
    excited: NeumaierSum,
}

impl<'a> MomentLeaf<'a> {
    fn new(table: &'a WeightTable) -> Self {
        Self {
            table,
            z: NeumaierSum::new(),
            delta: NeumaierSum::new(),
            delta2: NeumaierSum::new(),
            mag: NeumaierSum::new(),
            mag2: NeumaierSum::new(),
            excited: NeumaierSum::new(),
        }
    }
}

impl Leaf for MomentLeaf<'_> {
    #[inline(always)]
    fn visit(&mut self, trace: u64, sigma: u64) {
        let n = self.table.n;
        let b = sigma.count_ones() as usize;
        let (delta, w) = self.table.delta_and_weight(trace, b);
        let mag = (n as i64 - 2 * b as i64) as f64;
        self.z += w;
        self.delta += w * delta;
        self.delta2 += w * delta * delta;
        self.mag += w * mag;
        self.mag2 += w * mag * mag;
        if b != 0 && b != n {
            self.excited += w;
        }
    }

    fn merge(&mut self, o: Self) {
        self.z += o.z;
        self.delta += o.delta;
        self.delta2 += o.delta2;
        self.mag += o.mag;
        self.mag2 += o.mag2;
        self.excited += o.excited;
    }
}

struct CorrelationLeaf<'a> {
    table: &'a WeightTable,
    z: NeumaierSum,
    s1sj: Vec<NeumaierSum>,
}

impl<'a> CorrelationLeaf<'a> {
    fn new(table: &'a WeightTable) -> Self {
        Self {
            table,
            z: NeumaierSum::new(),
            s1sj: vec![NeumaierSum::new(); table.n],
        }
    }
}

impl Leaf for CorrelationLeaf<'_> {
    fn visit(&mut self, trace: u64, sigma: u64) {
        let n = self.table.n;
        let (_, w) = self.table.delta_and_weight(trace, sigma.count_ones() as usize);
        self.z += w;
        let first = (sigma >> (n - 1)) & 1;
        for (j, acc) in self.s1sj.iter_mut().enumerate() {
            let bit = (sigma >> (n - 1 - j)) & 1;
            *acc += if bit == first { w } else { -w };
        }
    }

    fn merge(&mut self, o: Self) {
        self.z += o.z;
        for (a, b) in self.s1sj.iter_mut().zip(o.s1sj) {
            *a += b;
        }
    }
}

struct SpectrumLeaf {
    ground: u64,
    min_excited: u64,
    max_trace: u64,
}

impl Default for SpectrumLeaf {
    fn default() -> Self {
        Self {
            ground: 0,
            min_excited: u64::MAX,
            max_trace: 0,
        }
    }
}

impl Leaf for SpectrumLeaf {
    fn visit(&mut self, trace: u64, _sigma: u64) {
        if trace == 2 {
            self.ground += 1;
        } else {
            self.min_excited = self.min_excited.min(trace);
        }
        self.max_trace = self.max_trace.max(trace);
    }

    fn merge(&mut self, o: Self) {
        self.ground += o.ground;
        self.min_excited = self.min_excited.min(o.min_excited);
        self.max_trace = self.max_trace.max(o.max_trace);
    }
}
