//! Shared fixtures for the solver benchmarks.

use stenoflow_core::{DimensionlessParams, NumericalParams, Simulation};

/// Reference configuration advanced `steps` steps from rest, so benchmarks
/// start from a developed flow rather than the zero field.
pub fn developed_simulation(steps: u64) -> Simulation {
    let mut sim = Simulation::new(DimensionlessParams::default(), NumericalParams::default())
        .expect("reference configuration is stable");
    for _ in 0..steps {
        sim.advance().expect("reference run stays bounded");
    }
    sim
}

/// Reference grid with both spacings divided by `factor`, time step
/// reduced to keep the stability margin.
pub fn refined_grid(factor: u32) -> NumericalParams {
    let f = factor as f64;
    NumericalParams::new(5.0, 0.05 / f, 0.025 / f, 0.001 / (f * f)).expect("refined grid divides the domain")
}
