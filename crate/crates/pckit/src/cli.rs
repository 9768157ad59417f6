//! Command-line front end for reproducible batch runs.
//!
//! Three subcommands tie the library together: `solve` runs the
//! ingestion → unwrap → region → minimize pipeline per mode, `sweep`
//! repeats it over a theta range in one phi-plane, and `generate` writes
//! synthetic point-source fixtures. Angles are degrees everywhere.
//! Identical config and inputs produce byte-identical outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::farfield::{self, FarFieldError, Manifest, ModeSet};
use crate::geometry::{Direction, Displacement, GeometryError, ZTermConvention};
use crate::optimizer::OptimizerError;
use crate::oracle::{self, AmplitudeTaper, SyntheticSpec};
use crate::phase::PhaseError;
use crate::solver::{self, PhaseCenterResult, SolveSettings, SolverError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "PCKIT_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    FarField(#[from] FarFieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CliError {
    /// Stable machine-readable error category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "InvalidConfig",
            CliError::Io(_) => "MalformedInput",
            CliError::FarField(e) => match e {
                FarFieldError::Io(_)
                | FarFieldError::MalformedRow { .. }
                | FarFieldError::MalformedManifest { .. } => "MalformedInput",
                _ => "GridInvariant",
            },
            CliError::Geometry(e) => match e {
                GeometryError::RegionTooSmall { .. } => "RegionTooSmall",
                GeometryError::InvalidDirection { .. } => "InvalidConfig",
            },
            CliError::Solver(e) => match e {
                SolverError::SearchRadiusExceeded { .. } => "SearchRadiusExceeded",
                SolverError::Optimizer(_) => "Optimizer",
                SolverError::Geometry(GeometryError::RegionTooSmall { .. }) => "RegionTooSmall",
                _ => "PhaseData",
            },
            CliError::Optimizer(_) => "Optimizer",
            CliError::Phase(_) => "PhaseData",
        }
    }

    /// Distinct process exit code per error category.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "InvalidConfig" => 2,
            "MalformedInput" => 10,
            "GridInvariant" => 11,
            "RegionTooSmall" => 12,
            "SearchRadiusExceeded" => 13,
            "Optimizer" => 14,
            _ => 15,
        }
    }
}

/// Phase-center determination for multi-mode antennas.
#[derive(Debug, Parser)]
#[command(name = "pckit", version = VERSION)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the phase center of each mode for one observation direction.
    Solve(SolveArgs),
    /// Solve along a theta sweep in a fixed phi-plane.
    Sweep(SweepArgs),
    /// Generate synthetic point-source fixture files.
    Generate(GenerateArgs),
}

/// Optimizer and model overrides shared by solve and sweep.
#[derive(Debug, Args, Clone)]
pub struct SolverOverrides {
    /// Reproduce the literal printed z·sinθ displacement term instead of
    /// the standard z·cosθ direction cosine.
    #[arg(long = "paper-z-sin-theta")]
    pub paper_z_sin_theta: bool,
    /// Maximum simplex iterations.
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Simplex diameter convergence tolerance, meters.
    #[arg(long = "x-tol")]
    pub x_tol: Option<f64>,
    /// Objective spread convergence tolerance, degrees².
    #[arg(long = "f-tol")]
    pub f_tol: Option<f64>,
    /// Reject solutions farther than this many wavelengths from origin.
    #[arg(long = "search-radius-lambda")]
    pub search_radius_lambda: Option<f64>,
}

impl SolverOverrides {
    fn settings(&self, wavelength: f64) -> SolveSettings {
        let mut s = SolveSettings::for_wavelength(wavelength);
        if self.paper_z_sin_theta {
            s.z_convention = ZTermConvention::SinTheta;
        }
        if let Some(v) = self.max_iter {
            s.simplex.max_iterations = v;
        }
        if let Some(v) = self.x_tol {
            s.simplex.x_tolerance = v;
        }
        if let Some(v) = self.f_tol {
            s.simplex.f_tolerance = v;
        }
        if let Some(v) = self.search_radius_lambda {
            s.search_radius_lambda = v;
        }
        s
    }

    fn echo(&self) -> String {
        format!(
            "z_convention={} max_iter={} x_tol={} f_tol={} search_radius_lambda={}",
            if self.paper_z_sin_theta { "sin_theta" } else { "cos_theta" },
            self.max_iter.map(|v| v.to_string()).unwrap_or_else(|| "default".into()),
            self.x_tol.map(|v| v.to_string()).unwrap_or_else(|| "default".into()),
            self.f_tol.map(|v| v.to_string()).unwrap_or_else(|| "default".into()),
            self.search_radius_lambda
                .map(|v| v.to_string())
                .unwrap_or_else(|| "default".into()),
        )
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Manifest file(s), one per mode.
    #[arg(long = "manifest", required = true, num_args = 1..)]
    pub manifests: Vec<PathBuf>,
    /// Region center azimuth φ₀ in degrees.
    #[arg(long = "center-phi")]
    pub center_phi: f64,
    /// Region center co-elevation θ₀ in degrees.
    #[arg(long = "center-theta")]
    pub center_theta: f64,
    /// Angular region diameter in degrees.
    #[arg(long, default_value_t = 20.0)]
    pub diameter: f64,
    /// Output results CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional residual equiphase pattern CSV path.
    #[arg(long = "residual-out")]
    pub residual_out: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: SolverOverrides,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Manifest file(s), one per mode.
    #[arg(long = "manifest", required = true, num_args = 1..)]
    pub manifests: Vec<PathBuf>,
    /// Fixed azimuth plane in degrees.
    #[arg(long = "plane-phi", default_value_t = 0.0)]
    pub plane_phi: f64,
    #[arg(long = "theta-start", default_value_t = 0.0)]
    pub theta_start: f64,
    #[arg(long = "theta-stop", default_value_t = 90.0)]
    pub theta_stop: f64,
    #[arg(long = "theta-step", default_value_t = 5.0)]
    pub theta_step: f64,
    /// Angular region diameter in degrees.
    #[arg(long, default_value_t = 20.0)]
    pub diameter: f64,
    /// Output sweep CSV path.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: SolverOverrides,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output directory for fixture files.
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    /// File name prefix; files become <prefix><mode_id>.csv/.manifest.
    #[arg(long, default_value = "mode")]
    pub prefix: String,
    /// Grid resolution in degrees.
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    /// Carrier frequency in Hz.
    #[arg(long = "frequency-hz", default_value_t = 7.25e9)]
    pub frequency_hz: f64,
    /// True displacement "x,y,z" in meters; repeat for multiple modes.
    #[arg(long, required = true, num_args = 1.., allow_hyphen_values = true)]
    pub displacement: Vec<String>,
    /// Amplitude taper: UNIFORM or COSINE_THETA.
    #[arg(long, default_value = "UNIFORM")]
    pub taper: String,
    /// Constant phase offset in degrees.
    #[arg(long = "constant-phase", default_value_t = 0.0)]
    pub constant_phase: f64,
    /// Additive Gaussian phase noise sigma in degrees.
    #[arg(long = "noise-sigma", default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generate with the z·sinθ displacement term.
    #[arg(long = "paper-z-sin-theta")]
    pub paper_z_sin_theta: bool,
}

fn parse_displacement(s: &str) -> Result<Displacement, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "displacement '{s}' must be x,y,z in meters"
        )));
    }
    let mut v = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p
            .trim()
            .parse()
            .map_err(|e| CliError::Config(format!("displacement '{s}': {e}")))?;
    }
    Ok(Displacement::new(v[0], v[1], v[2]))
}

fn load_mode_set(manifests: &[PathBuf]) -> Result<ModeSet, CliError> {
    let mut patterns = Vec::new();
    let mut frequency = None;
    for path in manifests {
        let manifest = Manifest::load(path)?;
        match frequency {
            None => frequency = Some(manifest.frequency_hz),
            Some(f) if f == manifest.frequency_hz => {}
            Some(f) => {
                return Err(CliError::Config(format!(
                    "manifests disagree on frequency: {f} vs {}",
                    manifest.frequency_hz
                )))
            }
        }
        patterns.push(manifest.load_pattern()?);
    }
    let frequency = frequency.ok_or_else(|| CliError::Config("no manifests given".into()))?;
    Ok(ModeSet::from_frequency(patterns, frequency)?)
}

fn config_comments(command: &str, config: String, inputs: &[PathBuf]) -> Vec<String> {
    let mut c = vec![
        format!("pckit {VERSION}"),
        format!("command: {command}"),
        format!("config: {config}"),
    ];
    for p in inputs {
        c.push(format!("input: {}", p.display()));
    }
    c
}

/// Run the solve pipeline and write the results CSV.
pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let modes = load_mode_set(&args.manifests)?;
    let center = Direction::validated(args.center_phi, args.center_theta)?;
    let settings = args.overrides.settings(modes.wavelength());
    let k = modes.wavenumber();

    let mut results: Vec<PhaseCenterResult> = Vec::new();
    for pattern in modes.modes() {
        results.push(solver::solve_mode(pattern, center, args.diameter, k, &settings)?);
    }

    let comments = config_comments(
        "solve",
        format!(
            "center_phi={} center_theta={} diameter={} {}",
            args.center_phi,
            args.center_theta,
            args.diameter,
            args.overrides.echo()
        ),
        &args.manifests,
    );
    let refs: Vec<&PhaseCenterResult> = results.iter().collect();
    let mut w = BufWriter::new(File::create(&args.out)?);
    solver::write_results_csv(&refs, &mut w, &comments)?;
    w.flush()?;

    if let Some(residual_path) = &args.residual_out {
        write_residuals(residual_path, &modes, &results, args.diameter, &settings, k, &comments)?;
    }
    for r in &results {
        if r.magnitude_warning {
            eprintln!(
                "pckit-warning: mode {} magnitude spread {:.2} dB exceeds {} dB",
                r.mode_id,
                r.magnitude_spread_db.unwrap_or(f64::NAN),
                settings.magnitude_threshold_db
            );
        }
    }
    Ok(())
}

fn write_residuals(
    path: &PathBuf,
    modes: &ModeSet,
    results: &[PhaseCenterResult],
    diameter: f64,
    settings: &SolveSettings,
    k: farfield::Wavenumber,
    comments: &[String],
) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "mode,phi_deg,theta_deg,psi_eq_deg")?;
    for (pattern, result) in modes.modes().iter().zip(results) {
        let phases = farfield::phase_of(pattern);
        let (unwrapped, _) = crate::phase::unwrap_theta(&phases)?;
        let region =
            crate::geometry::select_region(pattern.grid(), result.center, diameter)?;
        let residual = solver::residual_pattern(
            &unwrapped,
            result.displacement,
            &region,
            k,
            settings.z_convention,
        )?;
        for (&idx, value) in region.member_indices().iter().zip(&residual) {
            let dir = pattern.grid().direction(idx);
            writeln!(w, "{},{},{},{}", result.mode_id, dir.phi, dir.theta, value)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Run the sweep pipeline and write the sweep CSV.
pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    if args.theta_step <= 0.0 || args.theta_stop < args.theta_start {
        return Err(CliError::Config("invalid theta range".into()));
    }
    let modes = load_mode_set(&args.manifests)?;
    let settings = args.overrides.settings(modes.wavelength());

    let mut thetas = Vec::new();
    let mut t = args.theta_start;
    while t <= args.theta_stop + 1e-9 {
        thetas.push(t);
        t += args.theta_step;
    }

    let sweep = solver::sweep_theta(&modes, args.plane_phi, &thetas, args.diameter, &settings);

    let comments = config_comments(
        "sweep",
        format!(
            "plane_phi={} theta_start={} theta_stop={} theta_step={} diameter={} {}",
            args.plane_phi,
            args.theta_start,
            args.theta_stop,
            args.theta_step,
            args.diameter,
            args.overrides.echo()
        ),
        &args.manifests,
    );
    let mut w = BufWriter::new(File::create(&args.out)?);
    for c in &comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{}", solver::RESULTS_CSV_HEADER)?;
    for entry in &sweep.entries {
        match &entry.result {
            Ok(r) => {
                let dl = r.displacement_lambda();
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.mode_id,
                    sweep.plane_phi,
                    entry.theta,
                    r.displacement.x,
                    r.displacement.y,
                    r.displacement.z,
                    dl[0],
                    dl[1],
                    dl[2],
                    r.psi_c,
                    r.variance_before,
                    r.variance_after,
                    r.n_p,
                    r.magnitude_spread_db.map(|v| v.to_string()).unwrap_or_default(),
                    r.optimizer.converged,
                    entry.clipped,
                )?;
            }
            Err(e) => {
                writeln!(
                    w,
                    "# entry-error mode={} theta={} clipped={} msg={}",
                    entry.mode_id, entry.theta, entry.clipped, e
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Write synthetic fixture files (pattern CSV + manifest per mode).
pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let taper = AmplitudeTaper::parse(&args.taper)
        .ok_or_else(|| CliError::Config(format!("unknown taper '{}'", args.taper)))?;
    let grid = std::sync::Arc::new(farfield::SphericalGrid::new(args.resolution)?);
    let k = farfield::Wavenumber::from_frequency(args.frequency_hz)?;
    fs::create_dir_all(&args.out_dir)?;

    for (i, dstr) in args.displacement.iter().enumerate() {
        let mode_id = (i + 1) as u32;
        let d = parse_displacement(dstr)?;
        let spec = SyntheticSpec {
            true_displacement: d,
            amplitude_taper: taper,
            constant_phase: args.constant_phase,
            noise_sigma: args.noise_sigma,
            // decorrelate noise across modes while staying reproducible
            seed: args.seed.wrapping_add(i as u64),
            mode_id,
            polarization: farfield::Polarization::Rhcp,
            z_convention: if args.paper_z_sin_theta {
                ZTermConvention::SinTheta
            } else {
                ZTermConvention::CosTheta
            },
        };
        let pattern = oracle::generate(&spec, &grid, k);

        let csv_name = format!("{}{}.csv", args.prefix, mode_id);
        let comments = vec![
            format!("pckit {VERSION}"),
            "command: generate".to_string(),
            format!(
                "config: resolution={} frequency_hz={} displacement={},{},{} taper={} \
                 constant_phase={} noise_sigma={} seed={} z_convention={}",
                args.resolution,
                args.frequency_hz,
                d.x,
                d.y,
                d.z,
                args.taper.to_ascii_uppercase(),
                args.constant_phase,
                args.noise_sigma,
                spec.seed,
                if args.paper_z_sin_theta { "sin_theta" } else { "cos_theta" },
            ),
        ];
        let mut w = BufWriter::new(File::create(args.out_dir.join(&csv_name))?);
        farfield::write_pattern_csv(&pattern, &mut w, &comments)?;
        w.flush()?;

        let manifest = Manifest {
            frequency_hz: args.frequency_hz,
            mode_id,
            polarization: farfield::Polarization::Rhcp,
            pattern_file: args.out_dir.join(&csv_name),
        };
        let mut mw = BufWriter::new(File::create(
            args.out_dir.join(format!("{}{}.manifest", args.prefix, mode_id)),
        )?);
        manifest.write(&mut mw, &csv_name)?;
        mw.flush()?;
    }
    Ok(())
}

/// Configure the global worker pool from `PCKIT_THREADS`, if set.
pub fn init_threads() {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

/// Parse arguments, dispatch, and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Generate(args) => cmd_generate(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pckit-error: code={} kind={} msg={}", e.exit_code(), e.kind(), e);
            e.exit_code()
        }
    }
}
