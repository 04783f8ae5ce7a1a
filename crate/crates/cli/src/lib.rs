//! Command-line front end: argument definitions, command execution and
//! table output. `main` only maps the outcome to an exit code.

pub mod output;
mod range;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffsc_core::analysis::suites::{run_suite_with, Suite, DEFAULT_SUITE_N_MAX};
use ffsc_core::analysis::{extrapolate_f, farey_moments, fss_fit, moment_scaling_report};
use ffsc_core::kdp::{kdp_discontinuities_at_boundary, kdp_phase_boundary};
use ffsc_core::rg::{discontinuities_ffsc, phase_boundary_ffsc};
use ffsc_core::{
    EnsembleParams, Enumerator, Error, FieldVariant, KdpParams, MeanFieldConstants, RgConstants,
};

pub use output::{Cell, Format, Table, SCHEMA_VERSION};
pub use range::{parse_range, Grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ffsc", version, about = "Farey fraction spin chain thermodynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for the enumeration (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Largest chain length to enumerate; overrides FFSC_ENUMERATION_CAP.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-chain thermodynamics over a grid of beta and h.
    Thermo(ThermoArgs),
    /// Phase-boundary curves h*(t) with the jumps across them.
    PhaseDiagram(PhaseArgs),
    /// Run a named property suite; exit code 1 on any failed check.
    Verify(VerifyArgs),
    /// Fit ln Z_N = A (ln N)^-p at the critical point (beta = 2, h = 0).
    Fss(FssArgs),
    /// Extrapolate f_N = f_inf + c1 / N.
    Extrapolate(ExtrapolateArgs),
    /// Moments of neighbouring Farey differences.
    Moments(MomentsArgs),
}

#[derive(Debug, Args)]
pub struct ThermoArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with = "beta_range", required_unless_present = "beta_range")]
    pub beta: Option<f64>,
    /// min:max:step
    #[arg(long, value_parser = parse_range)]
    pub beta_range: Option<Grid>,
    #[arg(long, conflicts_with = "h_range", allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// min:max:step
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub h_range: Option<Grid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    FfscRg,
    KdpEndpoint,
    KdpSite,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long, conflicts_with = "t_range", required_unless_present = "t_range")]
    pub t: Option<f64>,
    /// min:max:step
    #[arg(long, value_parser = parse_range)]
    pub t_range: Option<Grid>,
    /// KDP cell energy.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = MeanFieldConstants::default().a, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = MeanFieldConstants::default().b)]
    pub b: f64,
    #[arg(long, default_value_t = MeanFieldConstants::default().u)]
    pub u: f64,
    #[arg(long, default_value_t = MeanFieldConstants::default().g)]
    pub g: f64,
    /// Marginal-coupling coefficient of the flow.
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub h0: f64,
    /// Spatial dimension.
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_parser = parse_suite)]
    pub suite: Suite,
    /// Largest chain length checked.
    #[arg(long, default_value_t = DEFAULT_SUITE_N_MAX)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct FssArgs {
    #[arg(long, default_value_t = 8)]
    pub n_min: usize,
    #[arg(long, default_value_t = 24)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct ExtrapolateArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub h: f64,
    #[arg(long, default_value_t = 8)]
    pub n_min: usize,
    #[arg(long, default_value_t = 24)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Moment order.
    #[arg(long, required_unless_present = "scaling")]
    pub m: Option<u32>,
    #[arg(long, required_unless_present = "scaling")]
    pub level: Option<usize>,
    /// Print the power-law scaling table instead of a single sum.
    #[arg(long, conflicts_with_all = ["m", "level"])]
    pub scaling: bool,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4, 5, 6])]
    pub orders: Vec<u32>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failed run with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn bad_args(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_BAD_ARGS,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } | Error::Overflow { .. } => EXIT_RESOURCE,
            _ => EXIT_BAD_ARGS,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self {
            code: EXIT_BAD_ARGS,
            message: format!("I/O error: {e}"),
        }
    }
}

/// Result of a successful run: the table plus whether every check passed.
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Self {
            table,
            passed: true,
            warnings: Vec::new(),
        }
    }
}

/// Runs `cli`, writes its output and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli).and_then(|outcome| {
        write_output(cli, &outcome.table)?;
        Ok(outcome)
    }) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn write_output(cli: &Cli, table: &Table) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure {
                code: EXIT_BAD_ARGS,
                message: format!("cannot create {}: {e}", path.display()),
            })?;
            table.write(cli.format, BufWriter::new(file))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(cli.format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn enumerator(cli: &Cli) -> Result<Enumerator, Failure> {
    Ok(match cli.cap {
        Some(cap) => Enumerator::with_cap(cap)?,
        None => Enumerator::from_env()?,
    })
}

/// Runs the command, inside a dedicated thread pool when `--threads` is set.
pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    match cli.threads {
        None => dispatch(cli),
        Some(0) => Err(Failure::bad_args("--threads must be >= 1")),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Failure::bad_args(e.to_string()))?
            .install(|| dispatch(cli)),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Thermo(args) => thermo(&enumerator(cli)?, args).map(Outcome::table),
        Command::PhaseDiagram(args) => phase_diagram(args).map(Outcome::table),
        Command::Verify(args) => verify(&enumerator(cli)?, args),
        Command::Fss(args) => fss(&enumerator(cli)?, args),
        Command::Extrapolate(args) => extrapolate(&enumerator(cli)?, args).map(Outcome::table),
        Command::Moments(args) => moments(args).map(Outcome::table),
    }
}

fn thermo(e: &Enumerator, args: &ThermoArgs) -> Result<Table, Failure> {
    let betas = match (&args.beta_range, args.beta) {
        (Some(r), _) => r.0.clone(),
        (None, Some(b)) => vec![b],
        (None, None) => return Err(Failure::bad_args("one of --beta, --beta-range is required")),
    };
    let hs = match (&args.h_range, args.h) {
        (Some(r), _) => r.0.clone(),
        (None, h) => vec![h.unwrap_or(0.0)],
    };
    // validate the whole grid before any enumeration
    for &beta in &betas {
        for &h in &hs {
            let p = EnsembleParams::new(args.n, beta, h)?;
            if p.n > e.cap() {
                return Err(Error::CapExceeded { n: p.n, cap: e.cap() }.into());
            }
        }
    }
    let mut table = Table::new(vec!["n", "beta", "t", "h", "f", "u", "m", "s", "chi"]);
    for &beta in &betas {
        for &h in &hs {
            let params = EnsembleParams::new(args.n, beta, h)?;
            let p = e.thermo_point(&params)?;
            table.push(vec![
                args.n.into(),
                beta.into(),
                params.reduced_temperature().into(),
                h.into(),
                p.f.into(),
                p.u.into(),
                p.m.into(),
                p.s.into(),
                p.chi.into(),
            ]);
        }
    }
    Ok(table)
}

fn phase_diagram(args: &PhaseArgs) -> Result<Table, Failure> {
    let ts = match (&args.t_range, args.t) {
        (Some(r), _) => r.0.clone(),
        (None, Some(t)) => vec![t],
        (None, None) => return Err(Failure::bad_args("one of --t, --t-range is required")),
    };
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0)) {
        return Err(Failure::bad_args(format!("t must be > 0, got {t}")));
    }
    let mut table = Table::new(vec!["model", "t", "h_star", "delta_m", "delta_s", "status"]);
    let model_name = args.model.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let row = |t: f64, r: Result<(f64, f64, f64), Error>| match r {
        Ok((h, dm, ds)) => vec![model_name.as_str().into(), t.into(), h.into(), dm.into(), ds.into(), "ok".into()],
        Err(e) => vec![
            model_name.as_str().into(),
            t.into(),
            Cell::Missing,
            Cell::Missing,
            Cell::Missing,
            format!("no-root: {e}").into(),
        ],
    };
    match args.model {
        Model::FfscRg => {
            let mf = MeanFieldConstants::new(args.a, args.b, args.u, args.g)?;
            let rg = RgConstants::new(args.d, args.x, args.t0, args.h0)?;
            for &t in &ts {
                let r = phase_boundary_ffsc(t, &mf, &rg)
                    .and_then(|b| discontinuities_ffsc(t, &mf, &rg).map(|d| (b.h_star, d.delta_m, d.delta_s)));
                table.push(row(t, r));
            }
        }
        Model::KdpEndpoint | Model::KdpSite => {
            let variant = if args.model == Model::KdpSite {
                FieldVariant::SiteField
            } else {
                FieldVariant::EndpointField
            };
            let p = KdpParams::new(args.epsilon, variant)?;
            for &t in &ts {
                let r = kdp_phase_boundary(t, &p)
                    .and_then(|h| kdp_discontinuities_at_boundary(t, &p).map(|(dm, ds)| (h, dm, ds)));
                table.push(row(t, r));
            }
        }
    }
    Ok(table)
}

fn verify(e: &Enumerator, args: &VerifyArgs) -> Result<Outcome, Failure> {
    let report = run_suite_with(args.suite, e, args.n_max)?;
    let mut table = Table::new(vec!["suite", "check", "status", "detail"]);
    for c in &report.checks {
        table.push(vec![
            args.suite.name().into(),
            c.name.clone().into(),
            (if c.passed { "PASS" } else { "FAIL" }).into(),
            c.detail.clone().into(),
        ]);
    }
    Ok(Outcome {
        table,
        passed: report.passed(),
        warnings: Vec::new(),
    })
}

fn critical_sequence(e: &Enumerator, n_min: usize, n_max: usize, beta: f64, h: f64) -> Result<Vec<(usize, f64)>, Failure> {
    if n_min == 0 || n_min > n_max {
        return Err(Failure::bad_args(format!("need 1 <= n-min <= n-max, got {n_min}..{n_max}")));
    }
    if n_max > e.cap() {
        return Err(Error::CapExceeded { n: n_max, cap: e.cap() }.into());
    }
    (n_min..=n_max)
        .map(|n| Ok((n, e.log_partition(&EnsembleParams::new(n, beta, h)?)?.log_z)))
        .collect()
}

fn fss(e: &Enumerator, args: &FssArgs) -> Result<Outcome, Failure> {
    let seq = critical_sequence(e, args.n_min, args.n_max, 2.0, 0.0)?;
    let fit = fss_fit(&seq)?;
    let mut table = Table::new(vec!["exponent_p", "amplitude", "residual", "n_points", "n_min", "n_max", "warnings"]);
    table.push(vec![
        fit.exponent_p.into(),
        fit.amplitude.into(),
        fit.residual.into(),
        fit.n_points.into(),
        args.n_min.into(),
        args.n_max.into(),
        fit.warnings.join("; ").into(),
    ]);
    Ok(Outcome {
        table,
        passed: true,
        warnings: fit.warnings,
    })
}

fn extrapolate(e: &Enumerator, args: &ExtrapolateArgs) -> Result<Table, Failure> {
    if args.beta == 0.0 {
        return Err(Error::UndefinedAtZeroBeta.into());
    }
    let seq: Vec<_> = critical_sequence(e, args.n_min, args.n_max, args.beta, args.h)?
        .into_iter()
        .map(|(n, lz)| (n, -lz / (args.beta * n as f64)))
        .collect();
    let ex = extrapolate_f(&seq)?;
    let mut table = Table::new(vec!["beta", "h", "f_infinity", "c1", "residual", "n_points"]);
    table.push(vec![
        args.beta.into(),
        args.h.into(),
        ex.f_infinity.into(),
        ex.c1.into(),
        ex.residual.into(),
        ex.n_points.into(),
    ]);
    Ok(table)
}

fn moments(args: &MomentsArgs) -> Result<Table, Failure> {
    if args.scaling {
        let rows = moment_scaling_report(args.n_max, &args.orders)?;
        let mut table = Table::new(vec![
            "order",
            "power_vs_fraction_count",
            "residual_vs_fraction_count",
            "power_vs_fraction_count_log_corrected",
            "residual_log_corrected",
            "power_vs_level",
            "residual_vs_level",
            "n_max",
        ]);
        for r in rows {
            table.push(vec![
                r.order.into(),
                r.power_vs_fraction_count.into(),
                r.residual_vs_fraction_count.into(),
                r.power_vs_fraction_count_log_corrected.into(),
                r.residual_log_corrected.into(),
                r.power_vs_level.into(),
                r.residual_vs_level.into(),
                args.n_max.into(),
            ]);
        }
        return Ok(table);
    }
    let (Some(m), Some(level)) = (args.m, args.level) else {
        return Err(Failure::bad_args("--m and --level are required without --scaling"));
    };
    let r = farey_moments(level, m)?;
    let mut table = Table::new(vec!["level", "order", "sum"]);
    table.push(vec![r.level.into(), r.order.into(), r.sum.into()]);
    Ok(table)
}
