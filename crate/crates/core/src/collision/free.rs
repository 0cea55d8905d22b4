use super::state::GasState;
use crate::error::{invalid, Result};

/// Exact harmonic propagation over `dt`: each axis is a phase-space rotation.
#[derive(Debug, Clone, Copy)]
pub struct FreeFlight {
    cos: [f64; 3],
    sin: [f64; 3],
    omega: [f64; 3],
    dt: f64,
}

impl FreeFlight {
    pub fn new(omega: [f64; 3], dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        Ok(Self {
            cos: omega.map(|w| (w * dt).cos()),
            sin: omega.map(|w| (w * dt).sin()),
            omega,
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, state: &mut GasState, axes: usize) {
        for p in &mut state.particles {
            for i in 0..axes {
                let (x, v, w) = (p.r[i], p.v[i], self.omega[i]);
                p.r[i] = x * self.cos[i] + v / w * self.sin[i];
                p.v[i] = v * self.cos[i] - x * w * self.sin[i];
            }
        }
        state.t += self.dt;
    }
}

/// Advances every particle by `dt` in the harmonic trap without collisions.
/// Quantized-axial particles only move horizontally.
pub fn advance_free(state: &mut GasState, dt: f64) -> Result<()> {
    let ff = FreeFlight::new(state.trap.frequencies(), dt)?;
    ff.apply(state, state.mode.moving_axes());
    Ok(())
}
