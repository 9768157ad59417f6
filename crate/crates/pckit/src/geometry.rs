//! Spherical-cap region selection and the displacement phase model.
//!
//! The phase shift caused by moving the phase center to `r` is the
//! plane-wave product k·r, expanded along the propagation direction
//! (cosφ·sinθ, sinφ·sinθ, cosθ). The z-term uses cosθ by default; a
//! compatibility switch reproduces the sinθ variant printed in some
//! references (see [`ZTermConvention`]).

use thiserror::Error;

use crate::farfield::{SphericalGrid, Wavenumber};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("region too small: {n_p} samples inside cap, need at least 4")]
    RegionTooSmall { n_p: usize },
    #[error("direction out of range: phi={phi}, theta={theta}")]
    InvalidDirection { phi: f64, theta: f64 },
}

/// Observation direction: azimuth phi in [0°, 360°), co-elevation theta
/// in [0°, 90°] measured from broadside (+z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub phi: f64,
    pub theta: f64,
}

impl Direction {
    pub fn new(phi: f64, theta: f64) -> Self {
        Self { phi, theta }
    }

    pub fn validated(phi: f64, theta: f64) -> Result<Self, GeometryError> {
        if !(0.0..360.0).contains(&phi) || !(0.0..=90.0).contains(&theta) {
            return Err(GeometryError::InvalidDirection { phi, theta });
        }
        Ok(Self { phi, theta })
    }

    /// Cartesian unit propagation vector (cosφ·sinθ, sinφ·sinθ, cosθ).
    pub fn unit_vector(&self) -> [f64; 3] {
        let phi = self.phi.to_radians();
        let theta = self.theta.to_radians();
        [
            phi.cos() * theta.sin(),
            phi.sin() * theta.sin(),
            theta.cos(),
        ]
    }
}

/// Cartesian phase-center displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Displacement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Displacement {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Which direction-cosine factor multiplies the z displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZTermConvention {
    /// z·cosθ, the standard k·r expansion. Default.
    #[default]
    CosTheta,
    /// z·sinθ, literal reproduction of the printed formula this tool
    /// models; makes the z-term vanish at broadside (θ=0).
    SinTheta,
}

impl ZTermConvention {
    fn z_factor(&self, theta_rad: f64) -> f64 {
        match self {
            Self::CosTheta => theta_rad.cos(),
            Self::SinTheta => theta_rad.sin(),
        }
    }
}

/// Central angle between two directions in degrees, in [0°, 180°].
/// Uses the atan2 form for stability near 0°.
pub fn great_circle_distance(a: Direction, b: Direction) -> f64 {
    let u = a.unit_vector();
    let v = b.unit_vector();
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cx = u[1] * v[2] - u[2] * v[1];
    let cy = u[2] * v[0] - u[0] * v[2];
    let cz = u[0] * v[1] - u[1] * v[0];
    let cross = (cx * cx + cy * cy + cz * cz).sqrt();
    cross.atan2(dot).to_degrees()
}

/// Index set of grid samples inside a spherical cap.
#[derive(Debug, Clone)]
pub struct AngularRegion {
    center: Direction,
    diameter: f64,
    member_indices: Vec<usize>,
    clipped: bool,
}

impl AngularRegion {
    pub fn center(&self) -> Direction {
        self.center
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn member_indices(&self) -> &[usize] {
        &self.member_indices
    }

    pub fn n_p(&self) -> usize {
        self.member_indices.len()
    }

    /// True when the cap extends past the θ=90° hemisphere edge, so the
    /// region holds fewer samples than an interior cap of the same size.
    pub fn is_clipped(&self) -> bool {
        self.clipped
    }

    /// Member directions in region (row-major) ordering.
    pub fn directions<'a>(&'a self, grid: &'a SphericalGrid) -> impl Iterator<Item = Direction> + 'a {
        self.member_indices.iter().map(|&i| grid.direction(i))
    }
}

/// All grid points whose great-circle distance to `center` is at most
/// `diameter`/2 (closed ball, boundary ties included), in deterministic
/// row-major (theta-then-phi) order.
pub fn select_region(
    grid: &SphericalGrid,
    center: Direction,
    diameter: f64,
) -> Result<AngularRegion, GeometryError> {
    // closed ball; the epsilon keeps exact-boundary lattice points in
    // despite rounding in the distance computation
    let radius = diameter / 2.0 + 1e-9;
    let member_indices: Vec<usize> = (0..grid.len())
        .filter(|&i| great_circle_distance(grid.direction(i), center) <= radius)
        .collect();
    if member_indices.len() < 4 {
        return Err(GeometryError::RegionTooSmall {
            n_p: member_indices.len(),
        });
    }
    // nominal radius here: a cap touching θ=90 exactly is still complete
    let clipped = center.theta + diameter / 2.0 > 90.0;
    Ok(AngularRegion {
        center,
        diameter,
        member_indices,
        clipped,
    })
}

/// Displacement-induced phase shift ψ_s = k·r at one direction, degrees.
pub fn displacement_phase(d: Displacement, dir: Direction, k: Wavenumber) -> f64 {
    displacement_phase_with(d, dir, k, ZTermConvention::CosTheta)
}

/// As [`displacement_phase`], with an explicit z-term convention.
pub fn displacement_phase_with(
    d: Displacement,
    dir: Direction,
    k: Wavenumber,
    convention: ZTermConvention,
) -> f64 {
    let phi = dir.phi.to_radians();
    let theta = dir.theta.to_radians();
    let projection = d.x * phi.cos() * theta.sin()
        + d.y * phi.sin() * theta.sin()
        + d.z * convention.z_factor(theta);
    (k.radians_per_meter() * projection).to_degrees()
}

/// ψ_s evaluated at every region member, in region ordering.
pub fn phase_shift_vector(
    d: Displacement,
    region: &AngularRegion,
    grid: &SphericalGrid,
    k: Wavenumber,
) -> Vec<f64> {
    phase_shift_vector_with(d, region, grid, k, ZTermConvention::CosTheta)
}

/// As [`phase_shift_vector`], with an explicit z-term convention.
pub fn phase_shift_vector_with(
    d: Displacement,
    region: &AngularRegion,
    grid: &SphericalGrid,
    k: Wavenumber,
    convention: ZTermConvention,
) -> Vec<f64> {
    region
        .directions(grid)
        .map(|dir| displacement_phase_with(d, dir, k, convention))
        .collect()
}
