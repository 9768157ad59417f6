//! Phase-center stability across observation directions.
//!
//! For a true point source the solved phase center must not depend on
//! where the angular region sits. This sweeps the region center along
//! θ = 10°..85° in the φ = 0° plane and prints the solved coordinates,
//! which stay flat until the cap is clipped by the horizon.

use std::sync::Arc;

use pckit::farfield::ModeSet;
use pckit::oracle::{self, SyntheticSpec};
use pckit::solver::{self, SolveSettings};
use pckit::{Displacement, SphericalGrid, Wavenumber};

fn main() {
    let lambda = 0.0414;
    let frequency = 7.25e9;
    let grid = Arc::new(SphericalGrid::new(1.0).unwrap());
    let k = Wavenumber::from_frequency(frequency).unwrap();

    let spec = SyntheticSpec {
        true_displacement: Displacement::new(0.008, -0.003, 0.011),
        ..SyntheticSpec::default()
    };
    let pattern = oracle::generate(&spec, &grid, k);
    let modes = ModeSet::from_frequency(vec![pattern], frequency).unwrap();
    let settings = SolveSettings::for_wavelength(lambda);

    let thetas: Vec<f64> = (1..=17).map(|i| (i * 5) as f64).collect();
    let sweep = solver::sweep_theta(&modes, 0.0, &thetas, 20.0, &settings);

    println!("theta0   x/λ       y/λ       z/λ       clipped");
    for entry in &sweep.entries {
        match &entry.result {
            Ok(r) => {
                let dl = r.displacement_lambda();
                println!(
                    "{:>5}   {:+.5}  {:+.5}  {:+.5}  {}",
                    entry.theta, dl[0], dl[1], dl[2], entry.clipped
                );
            }
            Err(e) => println!("{:>5}   solve failed: {e}", entry.theta),
        }
    }
}
