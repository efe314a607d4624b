//! Command-line front end: file formats, certificates, figures.

pub mod io;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use watchtower_core::geom::{format_decimal, format_scalar, parse_scalar, Scalar};
use watchtower_core::oracle::{oracle_1d, oracle_2_5d_height, oracle_2_5d_zero, GridSpec, Mode1D, DEFAULT_BUDGET};
use watchtower_core::random::{random_terrain_1d, rng, TerrainParams};
use watchtower_core::watchtower1d::{solve_continuous_1d, solve_discrete_1d};
use watchtower_core::watchtower25d::{approx_watchtower_with, zero_watchtower, HeightScan};

use crate::io::{parse_instance, parse_mesh, parse_terrain_1d, read_text, Instance};
use crate::report::{check_certificate, Problem, SolveReport, DECIMAL_DIGITS};

pub const BUDGET_ENV: &str = "WATCHTOWER_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "watchtower", version, about = "Shortest watchtowers over imprecise terrains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scan {
    Linear,
    Bisect,
}

#[derive(Debug, Args)]
struct Output {
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
    /// Write the report (a re-checkable certificate) to this file.
    #[arg(long, value_name = "OUT")]
    cert: Option<PathBuf>,
    /// Include wall-clock time in the output.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shortest watchtower over all realizations of a 1.5D terrain.
    Solve1d {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_name = "OUT")]
        svg: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Decide whether some realization of a mesh is seen whole from one of its vertices.
    Solve25dZero {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Tower height within epsilon of the best the greedy reaches.
    Solve25dApprox {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = scalar_arg)]
        epsilon: Scalar,
        #[arg(long, value_enum, default_value = "linear")]
        scan: Scan,
        #[command(flatten)]
        out: Output,
    },
    /// Brute force over a grid of heights per interval.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        /// Samples per interval, endpoints included.
        #[arg(long)]
        grid: usize,
        #[arg(long, value_enum, default_value = "discrete")]
        mode: Mode,
        /// Mesh only: smallest guarding height on this step instead of the zero decision.
        #[arg(long, value_parser = scalar_arg)]
        epsilon: Option<Scalar>,
    },
    /// Re-check a certificate against its instance.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Time the 1.5D solver on seeded random terrains.
    Bench {
        /// Comma-separated vertex counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "continuous")]
        mode: Mode,
    },
}

fn scalar_arg(s: &str) -> Result<Scalar, String> {
    parse_scalar(s).map_err(|e| e.to_string())
}

/// Solved or validated.
const EXIT_OK: i32 = 0;
/// Certified negative answer, or a certificate that does not check.
const EXIT_NO: i32 = 1;
/// Bad arguments or input files.
const EXIT_INPUT: i32 = 2;

/// Parses `argv` (program name first) and runs it with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_INPUT
        }
    }
}

fn emit(report: &mut SolveReport, out: &Output, started: Instant, sink: &mut dyn Write) -> Result<()> {
    if out.timing {
        report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    if let Some(path) = &out.cert {
        std::fs::write(path, report.to_json() + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    if out.json {
        writeln!(sink, "{}", report.to_json())?;
    } else {
        write!(sink, "{}", report.to_text())?;
    }
    Ok(())
}

fn budget() -> Result<u64> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{BUDGET_ENV} must be a positive integer")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn dispatch(command: Command, sink: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Solve1d { mode, input, svg, out } => {
            let terrain = parse_terrain_1d(&input)?;
            let started = Instant::now();
            let (problem, solution) = match mode {
                Mode::Discrete => (Problem::Discrete1d, solve_discrete_1d(&terrain)?),
                Mode::Continuous => (Problem::Continuous1d, solve_continuous_1d(&terrain)?),
            };
            let mut report = SolveReport::from_1d(problem, &solution);
            emit(&mut report, &out, started, sink)?;
            if let Some(path) = svg {
                svg::render_svg(&terrain, &solution, &path).with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(EXIT_OK)
        }
        Command::Solve25dZero { input, out } => {
            let mesh = parse_mesh(&input)?;
            let started = Instant::now();
            match zero_watchtower(&mesh)? {
                Some(found) => {
                    emit(&mut SolveReport::from_2_5d(Problem::Zero2_5d, &found, None), &out, started, sink)?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(sink, "none")?;
                    Ok(EXIT_NO)
                }
            }
        }
        Command::Solve25dApprox { input, epsilon, scan, out } => {
            let mesh = parse_mesh(&input)?;
            let started = Instant::now();
            let scan = match scan {
                Scan::Linear => HeightScan::Linear,
                Scan::Bisect => HeightScan::Bisect,
            };
            let found = approx_watchtower_with(&mesh, &epsilon, scan)?;
            emit(&mut SolveReport::from_2_5d(Problem::Approx2_5d, &found, Some(&epsilon)), &out, started, sink)?;
            Ok(EXIT_OK)
        }
        Command::Oracle { input, grid, mode, epsilon } => {
            let grid = GridSpec::new(grid)?.with_budget(budget()?);
            match parse_instance(&input)? {
                Instance::Terrain(t) => {
                    let mode = match mode {
                        Mode::Discrete => Mode1D::Discrete,
                        Mode::Continuous => Mode1D::Continuous,
                    };
                    print_value(sink, &oracle_1d(&t, &grid, mode)?)?;
                }
                Instance::Mesh(m) => match epsilon {
                    Some(eps) => print_value(sink, &oracle_2_5d_height(&m, &grid, &eps)?)?,
                    None => writeln!(sink, "{}", oracle_2_5d_zero(&m, &grid)?)?,
                },
            }
            Ok(EXIT_OK)
        }
        Command::Validate { input, cert } => validate(&input, &cert, sink),
        Command::Bench { sizes, seed, mode } => bench(&sizes, seed, mode, sink),
    }
}

fn print_value(sink: &mut dyn Write, v: &Scalar) -> Result<()> {
    writeln!(sink, "{}\n{}", format_scalar(v), format_decimal(v, DECIMAL_DIGITS))?;
    Ok(())
}

fn validate(input: &Path, cert: &Path, sink: &mut dyn Write) -> Result<i32> {
    let instance = parse_instance(input)?;
    let report = SolveReport::from_json(&read_text(cert)?).with_context(|| format!("malformed certificate {}", cert.display()))?;
    match check_certificate(&instance, &report) {
        Ok(()) => {
            writeln!(sink, "valid")?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(sink, "invalid: {e:#}")?;
            Ok(EXIT_NO)
        }
    }
}

fn bench(sizes: &[usize], seed: u64, mode: Mode, sink: &mut dyn Write) -> Result<i32> {
    if sizes.iter().any(|&n| n < 2) {
        bail!("sizes must be at least 2");
    }
    let mut previous: Option<f64> = None;
    for &n in sizes {
        let terrain = random_terrain_1d(&mut rng(seed), &TerrainParams::bench(n));
        let started = Instant::now();
        let solution = match mode {
            Mode::Discrete => solve_discrete_1d(&terrain)?,
            Mode::Continuous => solve_continuous_1d(&terrain)?,
        };
        let secs = started.elapsed().as_secs_f64();
        write!(sink, "n={n} height={} seconds={secs:.4}", format_scalar(&solution.height))?;
        if let Some(p) = previous {
            write!(sink, " ratio={:.2}", secs / p)?;
        }
        writeln!(sink)?;
        previous = Some(secs);
    }
    Ok(EXIT_OK)
}
