//! Shared fixtures for the criterion benchmarks.

use torus_spde_core::{
    Equation, GridSpec, InitialCondition, NoiseSpec, RealField, SchemeConfig, Solver,
};

pub fn grid(n: usize) -> GridSpec {
    GridSpec::new(2, n).expect("valid benchmark grid")
}

/// A deterministic non-trivial field for transform benchmarks.
pub fn sample_field(n: usize) -> RealField {
    RealField::from_fn(grid(n), |x1, x2| {
        (2.0 * x1).sin() + 0.5 * (3.0 * x2).cos() + 0.25 * (x1 + x2).sin()
    })
}

pub fn noise_spec() -> NoiseSpec {
    NoiseSpec::new(0.4, 12345, 0).expect("valid noise spec")
}

pub fn solver(equation: Equation, n: usize) -> Solver {
    let config = SchemeConfig::new(equation, 6.4e-3, 0.5, 0.4, 1.0, 1000).expect("valid config");
    Solver::new(&config, grid(n), &InitialCondition::Sin2X).expect("valid solver")
}
