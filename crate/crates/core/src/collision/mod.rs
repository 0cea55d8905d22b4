//! Direct-simulation Monte Carlo of binary collisions in a harmonic
//! micro-trap, classical or with a quantized vertical axis, plus the
//! closed-form collisional rates the simulations are checked against.

mod cross_section;
mod density;
mod engine;
mod free;
pub mod oracles;
mod state;
mod thermalize;

pub use cross_section::{cross_section, relative_wave_vector};
pub use density::{
    gaussian_mean_density_2d, gaussian_mean_density_3d, mean_density, occupied_planes, plane_populations,
    AxialProfile, MeanDensity,
};
pub use engine::{
    collide, collide_classical, collide_quantized, elastic_3d, pair_probability_bound, redistribute_2d,
    CollisionStats, DsmcConfig, Pairing,
};
pub use free::{advance_free, FreeFlight};
pub use state::{GasState, Mode, Particle};
pub use thermalize::{
    evolve_gas, nominal_temperature, relaxation_column, simulate, ThermalizationConfig, ThermalizationResult, ThermalizationRun,
};
