//! Direct use of the derivative-free simplex minimizer.
//!
//! Minimizes the Rosenbrock function from a standard starting point and
//! prints the recorded trace. The same minimizer drives the phase-center
//! search; here it runs on a plain analytic objective.

use pckit::optimizer::{minimize, SimplexConfig};

fn main() {
    let rosenbrock =
        |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);

    let config = SimplexConfig {
        initial_step: 0.5,
        record_trace: true,
        ..SimplexConfig::default()
    };
    let result = minimize(rosenbrock, &[-1.2, 1.0], &config).unwrap();

    for record in result.trace.iter().step_by(20) {
        println!("{}", record.to_line());
    }
    println!(
        "\nconverged={} ({:?}) after {} iterations, {} evaluations",
        result.converged, result.termination_reason, result.iterations, result.evaluations
    );
    println!(
        "x_min = [{:.8}, {:.8}], f_min = {:.3e}",
        result.x_min[0], result.x_min[1], result.f_min
    );
    assert!((result.x_min[0] - 1.0).abs() < 1e-4 && (result.x_min[1] - 1.0).abs() < 1e-4);
}
