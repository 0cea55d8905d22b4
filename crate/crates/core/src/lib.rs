//! Physics of sideband cooling and collisional thermalization of cesium in a
//! tilted one-dimensional optical lattice: trap geometry, the Raman
//! sideband rate model, a DSMC collision engine and fit utilities.

pub mod analysis;
pub mod collision;
pub mod constants;
pub mod error;
pub mod physics;
pub mod sideband;
pub mod trap;

pub use constants::Constants;
pub use error::{Error, Result};
pub use physics::{Parity, ThermalState};
pub use trap::TrapConfig;
