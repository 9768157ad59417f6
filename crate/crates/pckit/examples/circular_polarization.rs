//! Building a circular component from linear θ/φ components.
//!
//! Measurement systems usually record E_θ and E_φ; the phase-center
//! pipeline runs on one circular component. For a perfect right-hand
//! circular wave, E_φ = j·E_θ, the RHCP component carries all the power
//! and the LHCP component vanishes.

use std::sync::Arc;

use num_complex::Complex64;
use pckit::farfield::{to_circular, Hand};
use pckit::{FieldPattern, Polarization, SphericalGrid};

fn main() {
    let grid = Arc::new(SphericalGrid::new(5.0).unwrap());
    let j = Complex64::new(0.0, 1.0);

    // ideal RHCP radiator with a 40° phase offset
    let e_theta_samples: Vec<Complex64> = grid
        .directions()
        .map(|_| Complex64::from_polar(1.0, 40f64.to_radians()))
        .collect();
    let e_phi_samples: Vec<Complex64> = e_theta_samples.iter().map(|s| j * s).collect();

    let e_theta =
        FieldPattern::new(grid.clone(), 1, Polarization::Theta, e_theta_samples).unwrap();
    let e_phi = FieldPattern::new(grid.clone(), 1, Polarization::Phi, e_phi_samples).unwrap();

    let rhcp = to_circular(&e_theta, &e_phi, Hand::Right).unwrap();
    let lhcp = to_circular(&e_theta, &e_phi, Hand::Left).unwrap();

    let rhcp_peak = rhcp.samples().iter().map(|s| s.norm()).fold(0.0, f64::max);
    let lhcp_peak = lhcp.samples().iter().map(|s| s.norm()).fold(0.0, f64::max);
    let phase = rhcp.samples()[0].arg().to_degrees();

    println!("RHCP peak amplitude: {rhcp_peak:.6} (√2 · linear component)");
    println!("LHCP peak amplitude: {lhcp_peak:.2e} (cross-pol rejection)");
    println!("RHCP phase: {phase:.1}° (source phase preserved)");
    assert!((rhcp_peak - 2f64.sqrt()).abs() < 1e-12);
    assert!(lhcp_peak < 1e-12);
}
