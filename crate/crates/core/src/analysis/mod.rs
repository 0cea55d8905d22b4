//! Time series, exponential fits, temperature estimators and goodness-of-fit tests.

mod estimators;
mod fit;
mod stats;
mod timeseries;

pub use estimators::{kinetic_invariant, phase_space_density, temperature_estimators, TemperatureEstimate};
pub use fit::{fit_exponential, fit_exponential_xy, FitResult};
pub use stats::{chi_square_uniform, ks_normal, mean_and_stderr, KsResult};
pub use timeseries::{Column, TimeSeries};
