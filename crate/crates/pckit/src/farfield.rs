//! Data model and file ingestion for multi-mode far-field patterns.
//!
//! A [`FieldPattern`] holds complex far-field samples of one polarization
//! component for one mode on a [`SphericalGrid`] covering the upper
//! hemisphere. Patterns are read from self-describing CSV files
//! (`phi_deg,theta_deg,re,im`, `#` comments) with a key=value companion
//! manifest supplying `frequency_hz`, `mode_id` and `polarization`.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::Direction;
use crate::phase::PhasePattern;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Sentinel for zero magnitude in dB scale, keeps arithmetic finite.
pub const DB_FLOOR: f64 = -300.0;

const ANGLE_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FarFieldError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("non-uniform grid: {0}")]
    NonUniformGrid(String),
    #[error("missing sample at phi={phi}, theta={theta}")]
    MissingSample { phi: f64, theta: f64 },
    #[error("duplicate sample at phi={phi}, theta={theta}")]
    DuplicateSample { phi: f64, theta: f64 },
    #[error("patterns are defined on different grids")]
    GridMismatch,
    #[error("expected polarizations THETA and PHI, got {0:?} and {1:?}")]
    PolarizationMismatch(Polarization, Polarization),
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("mode ids differ: {0} vs {1}")]
    ModeIdMismatch(u32, u32),
    #[error("wavelength {wavelength} m inconsistent with frequency {frequency} Hz (>0.5%)")]
    WavelengthMismatch { wavelength: f64, frequency: f64 },
    #[error("invalid wavenumber: wavelength must be positive, got {0}")]
    InvalidWavelength(f64),
    #[error("malformed manifest {path}: {reason}")]
    MalformedManifest { path: PathBuf, reason: String },
}

/// Polarization component of a far-field sample set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Theta,
    Phi,
    Rhcp,
    Lhcp,
}

impl Polarization {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "THETA" => Some(Self::Theta),
            "PHI" => Some(Self::Phi),
            "RHCP" => Some(Self::Rhcp),
            "LHCP" => Some(Self::Lhcp),
            _ => None,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Theta => "THETA",
            Self::Phi => "PHI",
            Self::Rhcp => "RHCP",
            Self::Lhcp => "LHCP",
        };
        f.write_str(s)
    }
}

/// Handedness for circular polarization conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hand {
    Right,
    Left,
}

/// The (phi, theta) sample lattice of the upper hemisphere.
///
/// Samples are stored theta-major: index = theta_idx * n_phi + phi_idx,
/// so iterating indices in order walks theta rows, phi within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    phi_values: Vec<f64>,
    theta_values: Vec<f64>,
    resolution: f64,
}

impl SphericalGrid {
    /// Full upper-hemisphere lattice at the given resolution in degrees.
    /// phi covers [0, 360) and theta covers [0, 90], both at `resolution`.
    pub fn new(resolution: f64) -> Result<Self, FarFieldError> {
        if !resolution.is_finite() || resolution <= 0.0 || resolution > 90.0 {
            return Err(FarFieldError::NonUniformGrid(format!(
                "resolution {resolution} out of range"
            )));
        }
        let n_phi = (360.0 / resolution).round() as usize;
        let n_theta = (90.0 / resolution).round() as usize + 1;
        if (n_phi as f64 * resolution - 360.0).abs() > ANGLE_EPS
            || ((n_theta - 1) as f64 * resolution - 90.0).abs() > ANGLE_EPS
        {
            return Err(FarFieldError::NonUniformGrid(format!(
                "resolution {resolution} does not divide 360 and 90 evenly"
            )));
        }
        let phi_values = (0..n_phi).map(|i| i as f64 * resolution).collect();
        let theta_values = (0..n_theta).map(|i| i as f64 * resolution).collect();
        Ok(Self {
            phi_values,
            theta_values,
            resolution,
        })
    }

    /// Build from explicit axis values, validating the lattice invariants.
    pub fn from_axes(phi_values: Vec<f64>, theta_values: Vec<f64>) -> Result<Self, FarFieldError> {
        if phi_values.is_empty() || theta_values.len() < 2 {
            return Err(FarFieldError::MissingSample {
                phi: f64::NAN,
                theta: f64::NAN,
            });
        }
        let check_axis = |values: &[f64], name: &str| -> Result<f64, FarFieldError> {
            let step = values[1] - values[0];
            if step <= 0.0 {
                return Err(FarFieldError::NonUniformGrid(format!(
                    "{name} axis not strictly increasing"
                )));
            }
            for w in values.windows(2) {
                if ((w[1] - w[0]) - step).abs() > ANGLE_EPS {
                    return Err(FarFieldError::NonUniformGrid(format!(
                        "{name} axis spacing varies: {} vs {}",
                        w[1] - w[0],
                        step
                    )));
                }
            }
            Ok(step)
        };
        let phi_step = if phi_values.len() >= 2 {
            check_axis(&phi_values, "phi")?
        } else {
            0.0
        };
        let theta_step = check_axis(&theta_values, "theta")?;
        if phi_values.len() >= 2 && (phi_step - theta_step).abs() > ANGLE_EPS {
            return Err(FarFieldError::NonUniformGrid(format!(
                "phi step {phi_step} != theta step {theta_step}"
            )));
        }
        if phi_values[0].abs() > ANGLE_EPS {
            return Err(FarFieldError::NonUniformGrid(
                "phi axis must start at 0".into(),
            ));
        }
        if *phi_values.last().unwrap() >= 360.0 {
            return Err(FarFieldError::NonUniformGrid(
                "phi axis must stay below 360".into(),
            ));
        }
        if theta_values[0].abs() > ANGLE_EPS {
            return Err(FarFieldError::NonUniformGrid(
                "theta axis must start at 0".into(),
            ));
        }
        if (*theta_values.last().unwrap() - 90.0).abs() > ANGLE_EPS {
            return Err(FarFieldError::NonUniformGrid(
                "theta axis must end at 90".into(),
            ));
        }
        Ok(Self {
            phi_values,
            theta_values,
            resolution: theta_step,
        })
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi_values
    }

    pub fn theta_values(&self) -> &[f64] {
        &self.theta_values
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn n_phi(&self) -> usize {
        self.phi_values.len()
    }

    pub fn n_theta(&self) -> usize {
        self.theta_values.len()
    }

    pub fn len(&self) -> usize {
        self.n_phi() * self.n_theta()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat sample index for (phi_idx, theta_idx).
    pub fn index(&self, phi_idx: usize, theta_idx: usize) -> usize {
        theta_idx * self.n_phi() + phi_idx
    }

    /// Inverse of [`index`](Self::index).
    pub fn unravel(&self, index: usize) -> (usize, usize) {
        (index % self.n_phi(), index / self.n_phi())
    }

    /// Direction of the sample at a flat index.
    pub fn direction(&self, index: usize) -> Direction {
        let (pi, ti) = self.unravel(index);
        Direction::new(self.phi_values[pi], self.theta_values[ti])
    }

    /// Iterate all sample directions in index order (theta rows, phi within).
    pub fn directions(&self) -> impl Iterator<Item = Direction> + '_ {
        (0..self.len()).map(|i| self.direction(i))
    }
}

/// Wavenumber k = 2π/λ in radians per meter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    k: f64,
}

impl Wavenumber {
    pub fn from_wavelength(wavelength: f64) -> Result<Self, FarFieldError> {
        if !wavelength.is_finite() || wavelength <= 0.0 {
            return Err(FarFieldError::InvalidWavelength(wavelength));
        }
        Ok(Self {
            k: 2.0 * std::f64::consts::PI / wavelength,
        })
    }

    pub fn from_frequency(frequency_hz: f64) -> Result<Self, FarFieldError> {
        Self::from_wavelength(SPEED_OF_LIGHT / frequency_hz)
    }

    pub fn radians_per_meter(&self) -> f64 {
        self.k
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k
    }
}

/// Complex far-field samples of one polarization component for one mode.
#[derive(Debug, Clone)]
pub struct FieldPattern {
    grid: Arc<SphericalGrid>,
    mode_id: u32,
    polarization: Polarization,
    samples: Vec<Complex64>,
}

impl FieldPattern {
    pub fn new(
        grid: Arc<SphericalGrid>,
        mode_id: u32,
        polarization: Polarization,
        samples: Vec<Complex64>,
    ) -> Result<Self, FarFieldError> {
        if samples.len() != grid.len() {
            return Err(FarFieldError::MissingSample {
                phi: f64::NAN,
                theta: f64::NAN,
            });
        }
        if let Some(i) = samples.iter().position(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(FarFieldError::NonFiniteSample(i));
        }
        Ok(Self {
            grid,
            mode_id,
            polarization,
            samples,
        })
    }

    pub fn grid(&self) -> &Arc<SphericalGrid> {
        &self.grid
    }

    pub fn mode_id(&self) -> u32 {
        self.mode_id
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
}

/// A collection of per-mode patterns sharing one grid, with the carrier
/// frequency and wavelength.
#[derive(Debug, Clone)]
pub struct ModeSet {
    modes: Vec<FieldPattern>,
    wavelength: f64,
    frequency: f64,
}

impl ModeSet {
    pub fn new(
        modes: Vec<FieldPattern>,
        wavelength: f64,
        frequency: f64,
    ) -> Result<Self, FarFieldError> {
        let expected = SPEED_OF_LIGHT / frequency;
        if ((wavelength - expected) / expected).abs() > 0.005 {
            return Err(FarFieldError::WavelengthMismatch {
                wavelength,
                frequency,
            });
        }
        if let Some(first) = modes.first() {
            for m in &modes[1..] {
                if m.grid().as_ref() != first.grid().as_ref() {
                    return Err(FarFieldError::GridMismatch);
                }
            }
        }
        Ok(Self {
            modes,
            wavelength,
            frequency,
        })
    }

    /// Convenience constructor deriving the wavelength from the frequency.
    pub fn from_frequency(modes: Vec<FieldPattern>, frequency: f64) -> Result<Self, FarFieldError> {
        Self::new(modes, SPEED_OF_LIGHT / frequency, frequency)
    }

    pub fn modes(&self) -> &[FieldPattern] {
        &self.modes
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn wavenumber(&self) -> Wavenumber {
        Wavenumber::from_wavelength(self.wavelength).expect("validated on construction")
    }
}

/// Parse a pattern CSV file. The grid is inferred from the rows; rows may
/// appear in any order. Rows with theta > 90 (full-sphere exports) are
/// cropped on ingest.
pub fn parse_pattern_file(path: &Path, mode_id: u32) -> Result<FieldPattern, FarFieldError> {
    let text = fs::read_to_string(path)?;
    parse_pattern_str(&text, mode_id, Polarization::Rhcp)
}

/// Parse pattern CSV text with an explicit polarization tag.
pub fn parse_pattern_str(
    text: &str,
    mode_id: u32,
    polarization: Polarization,
) -> Result<FieldPattern, FarFieldError> {
    let mut rows: Vec<(f64, f64, Complex64)> = Vec::new();
    let mut header_seen = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            if line.replace(' ', "") == "phi_deg,theta_deg,re,im" {
                continue;
            }
            return Err(FarFieldError::MalformedRow {
                line: lineno + 1,
                reason: format!("expected header 'phi_deg,theta_deg,re,im', got '{line}'"),
            });
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(FarFieldError::MalformedRow {
                line: lineno + 1,
                reason: format!("expected 4 columns, got {}", fields.len()),
            });
        }
        let mut nums = [0.0f64; 4];
        for (i, f) in fields.iter().enumerate() {
            nums[i] = f.trim().parse().map_err(|e| FarFieldError::MalformedRow {
                line: lineno + 1,
                reason: format!("column {}: {e}", i + 1),
            })?;
        }
        let (phi, theta) = (nums[0], nums[1]);
        if theta > 90.0 + ANGLE_EPS {
            continue; // crop lower hemisphere
        }
        rows.push((phi, theta, Complex64::new(nums[2], nums[3])));
    }

    let phi_axis = unique_sorted(rows.iter().map(|r| r.0));
    let theta_axis = unique_sorted(rows.iter().map(|r| r.1));
    if theta_axis.len() < 2 {
        let (phi, theta) = rows
            .first()
            .map(|r| (r.0, r.1))
            .unwrap_or((f64::NAN, f64::NAN));
        return Err(FarFieldError::MissingSample { phi, theta });
    }
    let grid = SphericalGrid::from_axes(phi_axis, theta_axis)?;

    let mut samples = vec![None; grid.len()];
    for (phi, theta, value) in rows {
        let pi = nearest_index(grid.phi_values(), phi);
        let ti = nearest_index(grid.theta_values(), theta);
        let slot = &mut samples[grid.index(pi, ti)];
        if slot.is_some() {
            return Err(FarFieldError::DuplicateSample { phi, theta });
        }
        *slot = Some(value);
    }
    let mut out = Vec::with_capacity(grid.len());
    for (i, s) in samples.into_iter().enumerate() {
        match s {
            Some(v) => out.push(v),
            None => {
                let d = grid.direction(i);
                return Err(FarFieldError::MissingSample {
                    phi: d.phi,
                    theta: d.theta,
                });
            }
        }
    }
    FieldPattern::new(Arc::new(grid), mode_id, polarization, out)
}

fn unique_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_EPS);
    v
}

fn nearest_index(axis: &[f64], value: f64) -> usize {
    axis.iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (**a - value)
                .abs()
                .partial_cmp(&(**b - value).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap()
}

/// Write a pattern as CSV, preceded by the given `#` comment lines.
/// Floats are printed with shortest round-trip formatting, so a
/// parse -> serialize -> parse cycle reproduces samples bit-exactly.
pub fn write_pattern_csv(
    pattern: &FieldPattern,
    mut w: impl Write,
    comments: &[String],
) -> io::Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "phi_deg,theta_deg,re,im")?;
    let grid = pattern.grid();
    for (i, s) in pattern.samples().iter().enumerate() {
        let d = grid.direction(i);
        writeln!(w, "{},{},{},{}", d.phi, d.theta, s.re, s.im)?;
    }
    Ok(())
}

/// Companion manifest for a pattern file.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub frequency_hz: f64,
    pub mode_id: u32,
    pub polarization: Polarization,
    pub pattern_file: PathBuf,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, FarFieldError> {
        let text = fs::read_to_string(path)?;
        let mut kv = HashMap::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                FarFieldError::MalformedManifest {
                    path: path.to_owned(),
                    reason: format!("expected key=value, got '{line}'"),
                }
            })?;
            kv.insert(key.trim().to_string(), value.trim().to_string());
        }
        let get = |key: &str| {
            kv.get(key).ok_or_else(|| FarFieldError::MalformedManifest {
                path: path.to_owned(),
                reason: format!("missing key '{key}'"),
            })
        };
        let bad = |reason: String| FarFieldError::MalformedManifest {
            path: path.to_owned(),
            reason,
        };
        let frequency_hz: f64 = get("frequency_hz")?
            .parse()
            .map_err(|e| bad(format!("frequency_hz: {e}")))?;
        let mode_id: u32 = get("mode_id")?
            .parse()
            .map_err(|e| bad(format!("mode_id: {e}")))?;
        let polarization = Polarization::parse(get("polarization")?)
            .ok_or_else(|| bad(format!("unknown polarization '{}'", kv["polarization"])))?;
        // pattern_file defaults to the manifest path with a .csv extension
        let pattern_file = match kv.get("pattern_file") {
            Some(p) => {
                let p = PathBuf::from(p);
                if p.is_relative() {
                    path.parent().unwrap_or(Path::new(".")).join(p)
                } else {
                    p
                }
            }
            None => path.with_extension("csv"),
        };
        Ok(Self {
            frequency_hz,
            mode_id,
            polarization,
            pattern_file,
        })
    }

    pub fn write(&self, mut w: impl Write, pattern_file_name: &str) -> io::Result<()> {
        writeln!(w, "frequency_hz = {}", self.frequency_hz)?;
        writeln!(w, "mode_id = {}", self.mode_id)?;
        writeln!(w, "polarization = {}", self.polarization)?;
        writeln!(w, "pattern_file = {pattern_file_name}")?;
        Ok(())
    }

    /// Load the pattern this manifest describes.
    pub fn load_pattern(&self) -> Result<FieldPattern, FarFieldError> {
        let text = fs::read_to_string(&self.pattern_file)?;
        parse_pattern_str(&text, self.mode_id, self.polarization)
    }
}

/// Combine theta and phi components into a circular component.
///
/// IEEE convention with e^{+jωt} time dependence:
/// RIGHT -> (E_θ − j·E_φ)/√2, LEFT -> (E_θ + j·E_φ)/√2.
pub fn to_circular(
    e_theta: &FieldPattern,
    e_phi: &FieldPattern,
    hand: Hand,
) -> Result<FieldPattern, FarFieldError> {
    if e_theta.grid().as_ref() != e_phi.grid().as_ref() {
        return Err(FarFieldError::GridMismatch);
    }
    if e_theta.mode_id() != e_phi.mode_id() {
        return Err(FarFieldError::ModeIdMismatch(
            e_theta.mode_id(),
            e_phi.mode_id(),
        ));
    }
    if e_theta.polarization() != Polarization::Theta || e_phi.polarization() != Polarization::Phi {
        return Err(FarFieldError::PolarizationMismatch(
            e_theta.polarization(),
            e_phi.polarization(),
        ));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let j = Complex64::new(0.0, 1.0);
    let (sign, pol) = match hand {
        Hand::Right => (-1.0, Polarization::Rhcp),
        Hand::Left => (1.0, Polarization::Lhcp),
    };
    let samples = e_theta
        .samples()
        .iter()
        .zip(e_phi.samples())
        .map(|(et, ep)| (et + sign * j * ep) * inv_sqrt2)
        .collect();
    FieldPattern::new(e_theta.grid().clone(), e_theta.mode_id(), pol, samples)
}

/// Per-sample phase in degrees, in (−180°, 180°]. Zero-amplitude samples
/// are marked invalid rather than assigned a phase.
pub fn phase_of(pattern: &FieldPattern) -> PhasePattern {
    let mut values = Vec::with_capacity(pattern.samples().len());
    let mut invalid = vec![false; pattern.samples().len()];
    for (i, s) in pattern.samples().iter().enumerate() {
        if s.re == 0.0 && s.im == 0.0 {
            invalid[i] = true;
            values.push(f64::NAN);
        } else {
            let deg = s.im.atan2(s.re).to_degrees();
            // atan2 returns [-180, 180]; fold the lower boundary onto +180
            values.push(if deg <= -180.0 { 180.0 } else { deg });
        }
    }
    PhasePattern::wrapped(pattern.grid().clone(), values, invalid)
}

/// Real-valued magnitude samples, optionally peak-normalized in dB.
#[derive(Debug, Clone)]
pub struct MagnitudePattern {
    grid: Arc<SphericalGrid>,
    values: Vec<f64>,
    db: bool,
}

impl MagnitudePattern {
    pub fn grid(&self) -> &Arc<SphericalGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_db(&self) -> bool {
        self.db
    }
}

/// |sample| per point; if `normalize`, dB relative to the pattern maximum.
pub fn magnitude_of(pattern: &FieldPattern, normalize: bool) -> MagnitudePattern {
    let mags: Vec<f64> = pattern.samples().iter().map(|s| s.norm()).collect();
    if !normalize {
        return MagnitudePattern {
            grid: pattern.grid().clone(),
            values: mags,
            db: false,
        };
    }
    let peak = mags.iter().cloned().fold(0.0f64, f64::max);
    let values = mags
        .iter()
        .map(|&m| {
            if m == 0.0 || peak == 0.0 {
                DB_FLOOR
            } else {
                (20.0 * (m / peak).log10()).max(DB_FLOOR)
            }
        })
        .collect();
    MagnitudePattern {
        grid: pattern.grid().clone(),
        values,
        db: true,
    }
}
