//! Phase-center determination for multi-mode antennas.
//!
//! Given sampled far-field complex field data of an antenna mode on a
//! spherical grid, the toolkit locates the mode's phase center: the
//! displacement from the physical center that best flattens the phase
//! over a chosen angular region. The residual phase variance over the
//! region is minimized with a derivative-free Nelder-Mead simplex search.
//!
//! The typical pipeline is
//!
//! ```text
//! parse pattern file -> phase_of -> unwrap_theta -> select_region -> solve_phase_center
//! ```
//!
//! See the crate examples for runnable end-to-end demonstrations, and the
//! `pckit` binary for the batch command-line front end.

pub mod cli;
pub mod farfield;
pub mod geometry;
pub mod optimizer;
pub mod oracle;
pub mod phase;
pub mod solver;

pub use farfield::{FieldPattern, ModeSet, Polarization, SphericalGrid, Wavenumber};
pub use geometry::{AngularRegion, Direction, Displacement, ZTermConvention};
pub use optimizer::{OptimizeResult, SimplexConfig};
pub use phase::PhasePattern;
pub use solver::{PhaseCenterResult, SolveSettings, SweepResult};
