//! Command-line front end.
//!
//! `gen` writes body files, `classify` compares two bodies over a sphere
//! grid, and `radon`, `quartic` and `orbit` expose the numerical utilities.
//! Human-readable summaries go to stdout; machine-readable artifacts are
//! only written to the `--output` path.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::solve_width_tau_system;
use crate::body::ConvexBody;
use crate::congruence::{MatchParams, DEFAULT_CIRCLE_SAMPLES, DEFAULT_MATCH_TOL};
use crate::fixtures;
use crate::geom::{fibonacci_grid, AxisRotation, SphereGrid, UnitVector3};
use crate::radon::{radon_transform, tau_difference_check, TestFunction, DEFAULT_QUADRATURE};
use crate::report;
use crate::sphere::{decompose_sphere, orbit_covering_radius, AnalysisParams, DEFAULT_SPREAD_TOL};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "PROJCONG_THREADS";

pub const DEFAULT_GRID: usize = 812;
pub const MIN_GRID: usize = 50;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "projcong",
    version,
    about = "Rotation-congruent projections of convex bodies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a body file.
    Gen(GenArgs),
    /// Compare two bodies projection by projection.
    Classify(RunConfig),
    /// Spherical Radon transform of a test function, or the τ check of two bodies.
    Radon(RadonArgs),
    /// Solve x + y = a, x⁻² + y⁻² = b.
    Quartic(QuarticArgs),
    /// Largest gap of the orbit k·rπ on the circle.
    Orbit(OrbitArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,
    /// Destination body file.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Hull of seeded random points, centred on their centroid.
    Polytope {
        #[arg(long, default_value_t = 30)]
        vertices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Ball centred at the origin.
    Ball {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Constant-width body with support 1 + eps·P₃(u_z).
    CwHarmonic {
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Point reflection of a body file.
    Reflected {
        #[arg(long)]
        of: PathBuf,
    },
    /// Rotation of a body file by fraction·π about an axis.
    Rotated {
        #[arg(long)]
        of: PathBuf,
        /// Comma-separated, e.g. `0,0,1`.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        axis: [f64; 3],
        #[arg(long, allow_hyphen_values = true)]
        fraction: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long)]
    pub body_k: PathBuf,
    #[arg(long)]
    pub body_l: PathBuf,
    /// Total number of grid directions (antipodal pairs count twice).
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_CIRCLE_SAMPLES)]
    pub circle_samples: usize,
    #[arg(long, default_value_t = DEFAULT_MATCH_TOL)]
    pub match_tol: f64,
    #[arg(long, default_value_t = DEFAULT_SPREAD_TOL)]
    pub spread_tol: f64,
    /// Accepted for a uniform flag set; classification draws no random numbers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl RunConfig {
    pub fn params(&self) -> AnalysisParams {
        AnalysisParams {
            matching: MatchParams {
                circle_samples: self.circle_samples,
                match_tol: self.match_tol,
            },
            spread_tol: self.spread_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RadonFunction {
    Constant,
    Uz,
    Legendre2,
}

impl From<RadonFunction> for TestFunction {
    fn from(f: RadonFunction) -> Self {
        match f {
            RadonFunction::Constant => TestFunction::Constant,
            RadonFunction::Uz => TestFunction::OddZ,
            RadonFunction::Legendre2 => TestFunction::Legendre2,
        }
    }
}

#[derive(Debug, Args)]
pub struct RadonArgs {
    #[arg(long = "f", value_enum, default_value_t = RadonFunction::Legendre2)]
    pub function: RadonFunction,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_QUADRATURE)]
    pub nquad: usize,
    /// With --body-l, run the τ difference check instead.
    #[arg(long, requires = "body_l")]
    pub body_k: Option<PathBuf>,
    #[arg(long, requires = "body_k")]
    pub body_l: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct QuarticArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z] = parts.as_slice() else {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    };
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([num(x)?, num(y)?, num(z)?])
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Classify(cfg) => cmd_classify(&cfg),
        Command::Radon(args) => cmd_radon(args),
        Command::Quartic(args) => cmd_quartic(args),
        Command::Orbit(args) => cmd_orbit(args),
    }
}

/// Thread cap from [`THREADS_ENV`], if set.
pub fn thread_cap() -> anyhow::Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
            if n == 0 {
                bail!("{THREADS_ENV} must be a positive integer, got 0");
            }
            Ok(Some(n))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context(THREADS_ENV),
    }
}

pub fn load_body(path: &Path) -> anyhow::Result<ConvexBody> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ConvexBody::from_json(&text).with_context(|| format!("loading body from {}", path.display()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Antipodal Fibonacci grid with `total` directions.
pub fn grid_of_size(total: usize) -> anyhow::Result<SphereGrid> {
    if total < MIN_GRID || !total.is_multiple_of(2) {
        bail!("--grid must be an even number of directions, at least {MIN_GRID}; got {total}");
    }
    Ok(fibonacci_grid(total / 2, true)?)
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<u8> {
    let Some(output) = args.output else {
        bail!("gen needs --output");
    };
    let body = match &args.kind {
        GenKind::Polytope {
            vertices,
            seed,
            radius,
        } => fixtures::random_polytope(*vertices, *radius, *seed)?,
        GenKind::Ball { radius } => ConvexBody::ball(*radius)?,
        GenKind::CwHarmonic { eps } => fixtures::cw_harmonic(*eps)?,
        GenKind::Reflected { of } => load_body(of)?.reflect(),
        GenKind::Rotated { of, axis, fraction } => {
            let axis = UnitVector3::normalize((*axis).into())?;
            load_body(of)?.rotated(AxisRotation::new(axis, *fraction)?)
        }
    };
    let mut w = create(&output)?;
    w.write_all(body.to_json()?.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    println!("wrote {}", output.display());
    Ok(EXIT_OK)
}

pub fn cmd_classify(cfg: &RunConfig) -> anyhow::Result<u8> {
    let params = cfg.params();
    params.validate()?;
    let grid = grid_of_size(cfg.grid)?;
    let k = load_body(&cfg.body_k)?;
    let l = load_body(&cfg.body_l)?;
    let rep = decompose_sphere(&k, &l, &grid, &params)?;

    if let Some(path) = &cfg.output {
        let mut w = create(path)?;
        match cfg.format {
            Format::Json => report::write_json(&rep, &mut w)?,
            Format::Csv => report::write_csv(&rep, &mut w)?,
        }
        w.flush()?;
    }
    print!("{}", report::summary(&rep));
    Ok(if rep.verdict.is_consistent() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

#[derive(Serialize)]
struct RadonRow {
    pole_x: f64,
    pole_y: f64,
    pole_z: f64,
    value: f64,
}

fn cmd_radon(args: RadonArgs) -> anyhow::Result<u8> {
    let grid = grid_of_size(args.grid)?;
    if let (Some(pk), Some(pl)) = (&args.body_k, &args.body_l) {
        let k = load_body(pk)?;
        let l = load_body(pl)?;
        let (max_radon, max_tau) = tau_difference_check(&k, &l, &grid, args.nquad)?;
        println!("max |R(tau_K* - tau_L*)|: {max_radon:.3e}");
        println!("max |tau_K* - tau_L*|: {max_tau:.3e}");
        if let Some(path) = &args.output {
            #[derive(Serialize)]
            struct TauCheck {
                max_radon_residual: f64,
                max_tau_diff: f64,
                quadrature_points: usize,
                grid_size: usize,
            }
            write_json_file(
                path,
                &TauCheck {
                    max_radon_residual: max_radon,
                    max_tau_diff: max_tau,
                    quadrature_points: args.nquad,
                    grid_size: grid.len(),
                },
            )?;
        }
        return Ok(EXIT_OK);
    }

    let f = TestFunction::from(args.function);
    let result = radon_transform(|u| f.eval(u), &grid, args.nquad)?;
    let max_err = grid
        .iter()
        .zip(&result.values)
        .map(|(u, v)| (v - f.expected_transform(u)).abs())
        .fold(0.0f64, f64::max);
    println!("function: {:?}", args.function);
    println!(
        "directions: {}  quadrature points: {}",
        grid.len(),
        args.nquad
    );
    println!("max |Rf - exact|: {max_err:.3e}");

    if let Some(path) = &args.output {
        match args.format {
            Format::Csv => {
                let mut w = create(path)?;
                result.write_csv(&mut w)?;
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<RadonRow> = grid
                    .iter()
                    .zip(&result.values)
                    .map(|(u, &value)| RadonRow {
                        pole_x: u.x(),
                        pole_y: u.y(),
                        pole_z: u.z(),
                        value,
                    })
                    .collect();
                write_json_file(path, &rows)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_quartic(args: QuarticArgs) -> anyhow::Result<u8> {
    let s = solve_width_tau_system(args.a, args.b)?;
    println!("a = {}, b = {}: {} pair(s)", s.a, s.b, s.pairs.len());
    for ((x, y), r) in s.pairs.iter().zip(&s.residuals) {
        println!("  ({x:.15}, {y:.15})  residual {r:.2e}");
    }
    if let Some(path) = &args.output {
        #[derive(Serialize)]
        struct Out<'a> {
            a: f64,
            b: f64,
            pairs: &'a [(f64, f64)],
            residuals: &'a [f64],
        }
        write_json_file(
            path,
            &Out {
                a: s.a,
                b: s.b,
                pairs: &s.pairs,
                residuals: &s.residuals,
            },
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_orbit(args: OrbitArgs) -> anyhow::Result<u8> {
    let rep = orbit_covering_radius(args.r, args.n)?;
    println!(
        "r = {}, n = {}: covering radius {:.15} ({:.6}·π)",
        rep.fraction,
        rep.steps,
        rep.covering_radius,
        rep.covering_radius / std::f64::consts::PI
    );
    if let Some(path) = &args.output {
        #[derive(Serialize)]
        struct Out {
            fraction: f64,
            steps: usize,
            covering_radius: f64,
        }
        write_json_file(
            path,
            &Out {
                fraction: rep.fraction,
                steps: rep.steps,
                covering_radius: rep.covering_radius,
            },
        )?;
    }
    Ok(EXIT_OK)
}
