//! Phase-center solving: variance objective assembly, per-mode
//! minimization, residual patterns, magnitude diagnostics and
//! observation-angle sweeps.
//!
//! The objective is the un-normalized variance of the equiphase pattern
//! ψ_eq = ψ − ψ_s(d) over an angular region; the displacement d that
//! minimizes it is the phase center for that region.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::farfield::{self, FieldPattern, MagnitudePattern, ModeSet, Wavenumber, DB_FLOOR};
use crate::geometry::{
    select_region, AngularRegion, Direction, Displacement, GeometryError, ZTermConvention,
};
use crate::optimizer::{minimize, OptimizeResult, OptimizerError, SimplexConfig};
use crate::phase::{mean_and_variance, unwrap_theta, PhaseError, PhasePattern};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("empty region")]
    EmptyRegion,
    #[error("invalid (zero-amplitude) sample at grid index {index} inside the region")]
    InvalidSampleInRegion { index: usize },
    #[error("phase pattern must be unwrapped before solving")]
    NotUnwrapped,
    #[error("solved displacement {norm} m exceeds the search radius {limit} m")]
    SearchRadiusExceeded { norm: f64, limit: f64 },
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// Solver-level settings wrapping the simplex configuration.
#[derive(Debug, Clone)]
pub struct SolveSettings {
    pub simplex: SimplexConfig,
    /// Reject minima farther than this many wavelengths from the origin.
    pub search_radius_lambda: f64,
    pub z_convention: ZTermConvention,
    /// Magnitude spread above this threshold attaches a warning.
    pub magnitude_threshold_db: f64,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            simplex: SimplexConfig::default(),
            search_radius_lambda: 10.0,
            z_convention: ZTermConvention::CosTheta,
            magnitude_threshold_db: 6.0,
        }
    }
}

impl SolveSettings {
    /// Defaults with the initial simplex step scaled to λ/20.
    pub fn for_wavelength(wavelength: f64) -> Self {
        let mut s = Self::default();
        s.simplex.initial_step = wavelength / 20.0;
        s
    }
}

/// Solved displacement and residual statistics for one mode and region.
#[derive(Debug, Clone)]
pub struct PhaseCenterResult {
    pub mode_id: u32,
    pub center: Direction,
    pub displacement: Displacement,
    pub wavelength: f64,
    /// Residual mean over the region; houses the constant phase term.
    pub psi_c: f64,
    pub variance_before: f64,
    pub variance_after: f64,
    pub n_p: usize,
    pub optimizer: OptimizeResult,
    pub magnitude_spread_db: Option<f64>,
    pub magnitude_warning: bool,
    pub clipped: bool,
}

impl PhaseCenterResult {
    /// Displacement in wavelength units.
    pub fn displacement_lambda(&self) -> [f64; 3] {
        [
            self.displacement.x / self.wavelength,
            self.displacement.y / self.wavelength,
            self.displacement.z / self.wavelength,
        ]
    }
}

/// Precomputed per-region arrays so the objective evaluates fast.
struct RegionData {
    psi: Vec<f64>,
    ax: Vec<f64>,
    ay: Vec<f64>,
    az: Vec<f64>,
    k_deg: f64,
}

impl RegionData {
    fn build(
        phases: &PhasePattern,
        region: &AngularRegion,
        k: Wavenumber,
        convention: ZTermConvention,
    ) -> Result<Self, SolverError> {
        if !phases.is_unwrapped() {
            return Err(SolverError::NotUnwrapped);
        }
        if region.n_p() == 0 {
            return Err(SolverError::EmptyRegion);
        }
        let grid = phases.grid();
        let n = region.n_p();
        let mut psi = Vec::with_capacity(n);
        let mut ax = Vec::with_capacity(n);
        let mut ay = Vec::with_capacity(n);
        let mut az = Vec::with_capacity(n);
        for &idx in region.member_indices() {
            if phases.invalid_mask()[idx] {
                return Err(SolverError::InvalidSampleInRegion { index: idx });
            }
            psi.push(phases.values()[idx]);
            let dir = grid.direction(idx);
            let phi = dir.phi.to_radians();
            let theta = dir.theta.to_radians();
            ax.push(phi.cos() * theta.sin());
            ay.push(phi.sin() * theta.sin());
            az.push(match convention {
                ZTermConvention::CosTheta => theta.cos(),
                ZTermConvention::SinTheta => theta.sin(),
            });
        }
        Ok(Self {
            psi,
            ax,
            ay,
            az,
            k_deg: k.radians_per_meter().to_degrees(),
        })
    }

    /// Residual ψ_eq per member for a candidate displacement.
    fn residual(&self, d: Displacement) -> Vec<f64> {
        let n = self.psi.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let shift = self.k_deg * (d.x * self.ax[i] + d.y * self.ay[i] + d.z * self.az[i]);
            out.push(self.psi[i] - shift);
        }
        out
    }

    fn variance(&self, d: Displacement) -> f64 {
        let r = self.residual(d);
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        r.iter().map(|v| (v - mean) * (v - mean)).sum()
    }
}

/// Un-normalized variance of ψ_eq = ψ − ψ_s(d) over the region members.
pub fn objective_variance(
    d: Displacement,
    phases: &PhasePattern,
    region: &AngularRegion,
    k: Wavenumber,
    convention: ZTermConvention,
) -> Result<f64, SolverError> {
    Ok(RegionData::build(phases, region, k, convention)?.variance(d))
}

/// Minimize the region variance over the displacement, starting from the
/// physical center (0, 0, 0).
pub fn solve_phase_center(
    phases: &PhasePattern,
    region: &AngularRegion,
    k: Wavenumber,
    settings: &SolveSettings,
) -> Result<PhaseCenterResult, SolverError> {
    let data = RegionData::build(phases, region, k, settings.z_convention)?;
    let variance_before = data.variance(Displacement::default());
    let result = minimize(
        |x| data.variance(Displacement::new(x[0], x[1], x[2])),
        &[0.0, 0.0, 0.0],
        &settings.simplex,
    )?;
    let displacement = Displacement::new(result.x_min[0], result.x_min[1], result.x_min[2]);
    let wavelength = k.wavelength();
    let limit = settings.search_radius_lambda * wavelength;
    if displacement.norm() > limit {
        return Err(SolverError::SearchRadiusExceeded {
            norm: displacement.norm(),
            limit,
        });
    }
    let residual = data.residual(displacement);
    let (psi_c, variance_after) = mean_and_variance(&residual)?;
    Ok(PhaseCenterResult {
        mode_id: 0,
        center: region.center(),
        displacement,
        wavelength,
        psi_c,
        variance_before,
        variance_after,
        n_p: region.n_p(),
        optimizer: result,
        magnitude_spread_db: None,
        magnitude_warning: false,
        clipped: region.is_clipped(),
    })
}

/// ψ_eq per region member at a given displacement, in region ordering.
/// Its variance equals [`objective_variance`] at the same displacement.
pub fn residual_pattern(
    phases: &PhasePattern,
    d: Displacement,
    region: &AngularRegion,
    k: Wavenumber,
    convention: ZTermConvention,
) -> Result<Vec<f64>, SolverError> {
    Ok(RegionData::build(phases, region, k, convention)?.residual(d))
}

/// Max − min magnitude over the region members, in dB.
pub fn magnitude_consistency(
    magnitudes: &MagnitudePattern,
    region: &AngularRegion,
) -> Result<f64, SolverError> {
    if region.n_p() == 0 {
        return Err(SolverError::EmptyRegion);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &idx in region.member_indices() {
        let v = magnitudes.values()[idx];
        min = min.min(v);
        max = max.max(v);
    }
    if magnitudes.is_db() {
        Ok(max - min)
    } else if max == 0.0 {
        Ok(0.0)
    } else if min == 0.0 {
        Ok(-DB_FLOOR)
    } else {
        Ok(20.0 * (max / min).log10())
    }
}

/// Full pipeline for one mode: phase, unwrap, region, solve, magnitude
/// diagnostic.
pub fn solve_mode(
    pattern: &FieldPattern,
    center: Direction,
    diameter: f64,
    k: Wavenumber,
    settings: &SolveSettings,
) -> Result<PhaseCenterResult, SolverError> {
    let phases = farfield::phase_of(pattern);
    let (unwrapped, _warnings) = unwrap_theta(&phases)?;
    let region = select_region(pattern.grid(), center, diameter)?;
    let mut result = solve_phase_center(&unwrapped, &region, k, settings)?;
    result.mode_id = pattern.mode_id();
    let mags = farfield::magnitude_of(pattern, true);
    let spread = magnitude_consistency(&mags, &region)?;
    result.magnitude_spread_db = Some(spread);
    result.magnitude_warning = spread > settings.magnitude_threshold_db;
    Ok(result)
}

/// One sweep entry: an independent solve at (plane_phi, theta).
#[derive(Debug)]
pub struct SweepEntry {
    pub theta: f64,
    pub mode_id: u32,
    pub clipped: bool,
    pub result: Result<PhaseCenterResult, SolverError>,
}

/// Per-mode phase-center coordinates as a function of theta in one
/// phi-plane.
#[derive(Debug)]
pub struct SweepResult {
    pub plane_phi: f64,
    pub diameter: f64,
    pub entries: Vec<SweepEntry>,
}

/// Solve every mode at every theta of the list, ordered by theta then
/// mode. Per-entry failures are carried as flagged entries; the sweep
/// never aborts.
pub fn sweep_theta(
    modes: &ModeSet,
    plane_phi: f64,
    theta_list: &[f64],
    diameter: f64,
    settings: &SolveSettings,
) -> SweepResult {
    let k = modes.wavenumber();
    // unwrap once per mode, reuse across sweep entries
    let prepared: Vec<(u32, PhasePattern)> = modes
        .modes()
        .iter()
        .map(|m| {
            let phases = farfield::phase_of(m);
            let unwrapped = unwrap_theta(&phases).map(|(u, _)| u);
            (m.mode_id(), phases, unwrapped)
        })
        .map(|(id, wrapped, unwrapped)| match unwrapped {
            Ok(u) => (id, u),
            Err(_) => (id, wrapped), // solve will report NotUnwrapped
        })
        .collect();

    let mut jobs: Vec<(f64, usize)> = Vec::new();
    for &theta in theta_list {
        for mi in 0..prepared.len() {
            jobs.push((theta, mi));
        }
    }
    let entries: Vec<SweepEntry> = jobs
        .par_iter()
        .map(|&(theta, mi)| {
            let (mode_id, phases) = &prepared[mi];
            let center = Direction::new(plane_phi, theta);
            let result = select_region(phases.grid(), center, diameter)
                .map_err(SolverError::from)
                .and_then(|region| {
                    solve_phase_center(phases, &region, k, settings).map(|mut r| {
                        r.mode_id = *mode_id;
                        r
                    })
                });
            let clipped = result
                .as_ref()
                .map(|r| r.clipped)
                .unwrap_or(theta + diameter / 2.0 > 90.0);
            SweepEntry {
                theta,
                mode_id: *mode_id,
                clipped,
                result,
            }
        })
        .collect();
    SweepResult {
        plane_phi,
        diameter,
        entries,
    }
}

/// Results CSV header used by both solve and sweep outputs.
pub const RESULTS_CSV_HEADER: &str = "mode,phi0_deg,theta0_deg,x_pc_m,y_pc_m,z_pc_m,\
x_pc_lambda,y_pc_lambda,z_pc_lambda,psi_c_deg,var_before,var_after,n_p,mag_spread_db,\
converged,clipped";

/// Serialize results as CSV, preceded by `#` comment lines.
pub fn write_results_csv(
    results: &[&PhaseCenterResult],
    mut w: impl Write,
    comments: &[String],
) -> io::Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "{RESULTS_CSV_HEADER}")?;
    for r in results {
        let dl = r.displacement_lambda();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.mode_id,
            r.center.phi,
            r.center.theta,
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
            r.magnitude_spread_db
                .map(|v| v.to_string())
                .unwrap_or_default(),
            r.optimizer.converged,
            r.clipped,
        )?;
    }
    Ok(())
}
