use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use stefan_hbim::analysis::{
    default_bi_grid, linear_grid, log_grid, sweep_all, table1_positions, table2_positions,
    temperature_error_table_with,
};
use stefan_hbim::exact::exact_equation_residual;
use stefan_hbim::hbim::polynomial_residual;
use stefan_hbim::verify::{self, VerifyOptions};
use stefan_hbim::{
    dimensionless_from_physical, solve_with, Case, CoefficientConvention, PhysicalParams, Scheme, SolveSettings,
};

mod config;
mod output;

use config::ConfigFile;

/// Bad flags or inputs; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Verification ran and found failures; exits with status 1.
#[derive(Debug)]
struct ChecksFailed;

impl fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("one or more checks failed")
    }
}

impl std::error::Error for ChecksFailed {}

#[derive(Parser)]
#[command(name = "stefan-hbim", version, about = "One-phase Stefan problem with a convective boundary: exact and heat-balance-integral solutions")]
struct Cli {
    /// JSON file of default flag values; flags given on the command line win
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one (method, Ste, Bi) instance
    Solve(SolveArgs),
    /// Absolute temperature errors of P1-P4 at fixed positions
    Table(TableArgs),
    /// Free-boundary relative errors of P1-P4 over a Biot grid
    Sweep(SweepArgs),
    /// Run the invariant suite over a (Ste, Bi) grid
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// Ice constants with Bi = 80
    Ice,
    /// Ice constants with h = 1.65e5 verbatim
    IceNominal,
    /// Ice, t = 10 s, x = 0..0.001 step 1e-4
    IceTable1,
    /// Ice, t = 10 s, x = 0.000820..0.000830 step 1e-6
    IceTable2,
}

impl Preset {
    fn physical(self) -> PhysicalParams {
        match self {
            Preset::IceNominal => PhysicalParams::ice_nominal(),
            _ => PhysicalParams::ice(),
        }
    }

    fn positions(self) -> Option<Vec<f64>> {
        match self {
            Preset::IceTable1 => Some(table1_positions()),
            Preset::IceTable2 => Some(table2_positions()),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Coefficients {
    /// A1/A2 satisfying the convective condition
    Consistent,
    /// A1/A2 numerator with (6+Ste)xi^2, as in historical tables
    Published,
}

impl From<Coefficients> for CoefficientConvention {
    fn from(c: Coefficients) -> Self {
        match c {
            Coefficients::Consistent => CoefficientConvention::Consistent,
            Coefficients::Published => CoefficientConvention::PublishedTables,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PhysicalArgs {
    /// Thermal conductivity k
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Density rho
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Specific heat c
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Latent heat lambda
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Heat transfer coefficient h
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    /// Neighbourhood temperature magnitude
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
}

impl PhysicalArgs {
    fn values(&self) -> [Option<f64>; 6] {
        [self.k, self.rho, self.c, self.lambda, self.h, self.theta]
    }

    fn from_config(cfg: &ConfigFile) -> Self {
        Self {
            k: cfg.k,
            rho: cfg.rho,
            c: cfg.c,
            lambda: cfg.lambda,
            h: cfg.h,
            theta: cfg.theta,
        }
    }

    fn any(&self) -> bool {
        self.values().iter().any(Option::is_some)
    }

    fn build(&self) -> Result<Option<PhysicalParams>> {
        if !self.any() {
            return Ok(None);
        }
        const NAMES: [&str; 6] = ["k", "rho", "c", "lambda", "h", "theta"];
        let missing: Vec<_> = NAMES
            .iter()
            .zip(self.values())
            .filter(|(_, v)| v.is_none())
            .map(|(n, _)| format!("--{n}"))
            .collect();
        if !missing.is_empty() {
            return Err(usage(format!("physical parameters incomplete, missing {}", missing.join(", "))));
        }
        let [k, rho, c, lambda, h, theta] = self.values().map(Option::unwrap);
        Ok(Some(PhysicalParams::new(k, rho, c, lambda, h, theta)?))
    }
}

#[derive(Args)]
struct SolveArgs {
    /// exact, p1, p2, p3 or p4
    #[arg(long)]
    method: Option<String>,
    /// Stefan number
    #[arg(long, allow_negative_numbers = true)]
    ste: Option<f64>,
    /// Generalized Biot number
    #[arg(long, allow_negative_numbers = true, conflicts_with = "limit")]
    bi: Option<f64>,
    /// Use the Dirichlet limit Bi -> infinity
    #[arg(long)]
    limit: bool,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[command(flatten)]
    physical: PhysicalArgs,
    #[arg(long, value_enum)]
    coefficients: Option<Coefficients>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[command(flatten)]
    physical: PhysicalArgs,
    /// Probe time in seconds
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Comma-separated positions in metres
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    positions: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    coefficients: Option<Coefficients>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Stefan number
    #[arg(long, allow_negative_numbers = true)]
    ste: Option<f64>,
    /// Smallest Biot number (default 0.1)
    #[arg(long, allow_negative_numbers = true)]
    bi_min: Option<f64>,
    /// Largest Biot number (default 1e6)
    #[arg(long, allow_negative_numbers = true)]
    bi_max: Option<f64>,
    /// Number of grid points (default 63)
    #[arg(long)]
    points: Option<usize>,
    /// Logarithmic spacing (linear otherwise)
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced (Ste, Bi) grid
    #[arg(long)]
    quick: bool,
    /// Negate the constant term of this method's polynomial
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_enum<T: ValueEnum>(value: &str, what: &str) -> Result<T> {
    T::from_str(value, true).map_err(|_| usage(format!("unknown {what} `{value}`")))
}

fn parse_method(value: &str) -> Result<Scheme> {
    value.parse().map_err(|e: stefan_hbim::Error| usage(e.to_string()))
}

struct Emit {
    format: Format,
    out: Option<PathBuf>,
}

impl Emit {
    fn new(args: &OutputArgs, cfg: &ConfigFile, default: Format) -> Result<Self> {
        let format = match (args.format, &cfg.format) {
            (Some(f), _) => f,
            (None, Some(s)) => parse_enum(s, "format")?,
            (None, None) => default,
        };
        Ok(Self {
            format,
            out: args.out.clone().or_else(|| cfg.out.clone()),
        })
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }

    fn json(&self, value: &serde_json::Value) -> Result<()> {
        self.write(&(serde_json::to_string_pretty(value)? + "\n"))
    }
}

fn coefficients(flag: Option<Coefficients>, cfg: &ConfigFile) -> Result<CoefficientConvention> {
    Ok(match (flag, &cfg.coefficients) {
        (Some(c), _) => c.into(),
        (None, Some(s)) => parse_enum::<Coefficients>(s, "coefficient convention")?.into(),
        (None, None) => CoefficientConvention::Consistent,
    })
}

struct CaseSource {
    preset: Option<Preset>,
    ste: Option<f64>,
    bi: Option<f64>,
    limit: bool,
    physical: PhysicalArgs,
}

impl CaseSource {
    fn is_empty(&self) -> bool {
        self.preset.is_none() && self.ste.is_none() && self.bi.is_none() && !self.limit && !self.physical.any()
    }

    fn resolve(self) -> Result<Case> {
        let physical = self.physical.build()?;
        let from_physical = |p: &PhysicalParams| -> Result<Case> {
            let (params, _) = dimensionless_from_physical(p)?;
            Ok(if self.limit {
                Case::dirichlet(params.ste)?
            } else {
                Case::Convective(params)
            })
        };
        if self.bi.is_some() && self.limit {
            return Err(usage("--bi and --limit are mutually exclusive"));
        }
        match (self.preset, physical) {
            (Some(_), Some(_)) => Err(usage("--preset cannot be combined with physical parameters")),
            (Some(_), None) | (None, Some(_)) if self.ste.is_some() || self.bi.is_some() => {
                Err(usage("--ste/--bi cannot be combined with --preset or physical parameters"))
            }
            (Some(preset), None) => from_physical(&preset.physical()),
            (None, Some(p)) => from_physical(&p),
            (None, None) => {
                let ste = self.ste.ok_or_else(|| usage("missing --ste (or --preset / physical parameters)"))?;
                match (self.bi, self.limit) {
                    (Some(bi), false) => Ok(Case::convective(ste, bi)?),
                    (None, true) => Ok(Case::dirichlet(ste)?),
                    _ => Err(usage("give either --bi or --limit")),
                }
            }
        }
    }
}

fn cmd_solve(args: SolveArgs, cfg: &ConfigFile) -> Result<()> {
    let emit = Emit::new(&args.output, cfg, Format::Json)?;
    let method = match (&args.method, &cfg.method) {
        (Some(m), _) | (None, Some(m)) => parse_method(m)?,
        (None, None) => return Err(usage("missing --method")),
    };
    let flags = CaseSource {
        preset: args.preset,
        ste: args.ste,
        bi: args.bi,
        limit: args.limit,
        physical: args.physical,
    };
    let source = if flags.is_empty() {
        CaseSource {
            preset: cfg.preset.as_deref().map(|p| parse_enum(p, "preset")).transpose()?,
            ste: cfg.ste,
            bi: cfg.bi,
            limit: cfg.limit.unwrap_or(false),
            physical: PhysicalArgs::from_config(cfg),
        }
    } else {
        flags
    };
    let case = source.resolve()?;
    let convention = coefficients(args.coefficients, cfg)?;

    let sol = solve_with(method, case, &SolveSettings::default(), convention)?;
    let residual = match method {
        Scheme::Exact => exact_equation_residual(sol.xi, sol.ste, sol.biot),
        _ => polynomial_residual(&sol)?,
    };
    match emit.format {
        Format::Json => emit.json(&output::solution_json(&sol, residual)),
        Format::Csv => emit.write(&output::solution_csv(&sol, residual)),
    }
}

fn cmd_table(args: TableArgs, cfg: &ConfigFile) -> Result<()> {
    let emit = Emit::new(&args.output, cfg, Format::Csv)?;
    let (preset, physical) = if args.preset.is_some() || args.physical.any() {
        (args.preset, args.physical)
    } else {
        (
            cfg.preset.as_deref().map(|p| parse_enum(p, "preset")).transpose()?,
            PhysicalArgs::from_config(cfg),
        )
    };
    let params = match (preset, physical.build()?) {
        (Some(_), Some(_)) => return Err(usage("--preset cannot be combined with physical parameters")),
        (Some(p), None) => p.physical(),
        (None, Some(p)) => p,
        (None, None) => return Err(usage("give --preset or all physical parameters")),
    };
    let positions = args
        .positions
        .or_else(|| cfg.positions.clone())
        .or_else(|| preset.and_then(Preset::positions))
        .ok_or_else(|| usage("missing --positions"))?;
    let t = args.t.or(cfg.t).unwrap_or(10.0);
    let convention = coefficients(args.coefficients, cfg)?;

    let table = temperature_error_table_with(t, &positions, &params, &SolveSettings::default(), convention)?;
    match emit.format {
        Format::Csv => emit.write(&output::table_csv(&table)),
        Format::Json => emit.json(&output::table_json(&table)),
    }
}

fn cmd_sweep(args: SweepArgs, cfg: &ConfigFile) -> Result<()> {
    let emit = Emit::new(&args.output, cfg, Format::Csv)?;
    let ste = args.ste.or(cfg.ste).ok_or_else(|| usage("missing --ste"))?;
    let bi_min = args.bi_min.or(cfg.bi_min);
    let bi_max = args.bi_max.or(cfg.bi_max);
    let points = args.points.or(cfg.points);
    let log = args.log || cfg.log.unwrap_or(false);
    let grid = if bi_min.is_none() && bi_max.is_none() && points.is_none() {
        default_bi_grid()
    } else {
        let (lo, hi, n) = (bi_min.unwrap_or(0.1), bi_max.unwrap_or(1e6), points.unwrap_or(63));
        if !(lo > 0.0) {
            return Err(usage(format!("--bi-min must be positive, got {lo}")));
        }
        let grid = if log { log_grid(lo, hi, n) } else { linear_grid(lo, hi, n) };
        grid.map_err(|e| usage(e.to_string()))?
    };
    let series = sweep_all(ste, &grid, &SolveSettings::default())?;
    match emit.format {
        Format::Csv => emit.write(&output::sweep_csv(&series)),
        Format::Json => emit.json(&output::sweep_json(&series)),
    }
}

fn cmd_verify(args: VerifyArgs, cfg: &ConfigFile) -> Result<()> {
    let emit = Emit::new(&args.output, cfg, Format::Csv)?;
    let options = VerifyOptions {
        quick: args.quick || cfg.quick.unwrap_or(false),
        fault: args.inject_fault.as_deref().map(parse_method).transpose()?,
    };
    let report = verify::run(options, &SolveSettings::default())?;
    match emit.format {
        Format::Csv => emit.write(&output::verify_text(&report))?,
        Format::Json => emit.json(&output::verify_json(&report))?,
    }
    if report.passed() {
        Ok(())
    } else {
        Err(ChecksFailed.into())
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<stefan_hbim::Error>() {
        Some(
            stefan_hbim::Error::Validation { .. } | stefan_hbim::Error::Argument(_) | stefan_hbim::Error::Domain { .. },
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ConfigFile::load(cli.config.as_deref()).and_then(|cfg| match cli.command {
        Command::Solve(a) => cmd_solve(a, &cfg),
        Command::Table(a) => cmd_table(a, &cfg),
        Command::Sweep(a) => cmd_sweep(a, &cfg),
        Command::Verify(a) => cmd_verify(a, &cfg),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
