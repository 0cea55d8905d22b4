use crate::constants::Constants;
use crate::error::{invalid, Result};
use crate::trap::TrapConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Classical3d,
    QuantizedAxial,
}

impl Mode {
    /// Number of axes carried as classical phase-space coordinates.
    pub fn moving_axes(self) -> usize {
        match self {
            Mode::Classical3d => 3,
            Mode::QuantizedAxial => 2,
        }
    }
}

/// One simulation particle. In quantized-axial mode `r[2]` and `v[2]` stay
/// zero and the vertical motion is the oscillator level `axial_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub r: [f64; 3],
    pub v: [f64; 3],
    pub axial_n: Option<u32>,
}

impl Particle {
    pub fn is_finite(&self) -> bool {
        self.r.iter().chain(&self.v).all(|x| x.is_finite())
    }
}

/// A trapped cloud of simulation particles, each standing for `weight` atoms.
#[derive(Debug, Clone)]
pub struct GasState {
    pub particles: Vec<Particle>,
    pub trap: TrapConfig,
    pub constants: Constants,
    pub t: f64,
    pub mode: Mode,
    pub weight: f64,
    pub rng_seed: u64,
    pub(crate) rng: ChaCha8Rng,
}

impl GasState {
    pub fn new(
        particles: Vec<Particle>,
        trap: TrapConfig,
        constants: Constants,
        mode: Mode,
        weight: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(invalid("weight", "must be positive"));
        }
        trap.validate()?;
        for p in &particles {
            if !p.is_finite() {
                return Err(invalid("particles", "non-finite phase-space coordinate"));
            }
            match mode {
                Mode::Classical3d if p.axial_n.is_some() => {
                    return Err(invalid("particles", "classical particles carry no axial level"))
                }
                Mode::QuantizedAxial if p.axial_n.is_none() || p.r[2] != 0.0 || p.v[2] != 0.0 => {
                    return Err(invalid("particles", "quantized particles need axial_n and zero z, v_z"))
                }
                _ => {}
            }
        }
        Ok(Self {
            particles,
            trap,
            constants,
            t: 0.0,
            mode,
            weight,
            rng_seed: seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Thermal cloud with independent temperatures per axis (x, y, z). In
    /// quantized mode the axial levels follow the Bose ladder at `temps[2]`.
    pub fn thermal(
        n: usize,
        temps: [f64; 3],
        trap: TrapConfig,
        constants: Constants,
        mode: Mode,
        weight: f64,
        seed: u64,
    ) -> Result<Self> {
        if temps.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(invalid("temperatures", "must be finite and non-negative"));
        }
        if n < 2 {
            return Err(invalid("n_particles", "need at least two particles"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let omega = trap.frequencies();
        let m = constants.mass;
        let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
        let axes = mode.moving_axes();
        let ladder = if mode == Mode::QuantizedAxial && temps[2] > 0.0 {
            let r = (-constants.hbar * omega[2] / (constants.k_b * temps[2])).exp();
            Some(Geometric::new(1.0 - r).map_err(|e| invalid("temperatures", e.to_string()))?)
        } else {
            None
        };
        let particles = (0..n)
            .map(|_| {
                let mut p = Particle {
                    r: [0.0; 3],
                    v: [0.0; 3],
                    axial_n: None,
                };
                for i in 0..axes {
                    let vs = (constants.k_b * temps[i] / m).sqrt();
                    p.r[i] = vs / omega[i] * std_normal.sample(&mut rng);
                    p.v[i] = vs * std_normal.sample(&mut rng);
                }
                if mode == Mode::QuantizedAxial {
                    p.axial_n = Some(ladder.map_or(0, |g| g.sample(&mut rng).min(u32::MAX as u64) as u32));
                }
                p
            })
            .collect();
        // the engine's stream is seeded apart from the sampling stream
        Self::new(particles, trap, constants, mode, weight, seed ^ 0x9e37_79b9_7f4a_7c15)
            .map(|mut s| {
                s.rng_seed = seed;
                s
            })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// Mean kinetic plus potential energy per particle on each axis (J). In
    /// quantized mode the z entry is `hbar omega (n + 1/2)`.
    pub fn axis_energies(&self) -> [f64; 3] {
        let m = self.constants.mass;
        let w = self.trap.frequencies();
        let mut e = [0.0; 3];
        for p in &self.particles {
            for i in 0..3 {
                e[i] += 0.5 * m * (p.v[i] * p.v[i] + w[i] * w[i] * p.r[i] * p.r[i]);
            }
            if let Some(n) = p.axial_n {
                e[2] += self.constants.hbar * w[2] * (n as f64 + 0.5);
            }
        }
        e.map(|x| x / self.len() as f64)
    }

    /// Total energy of the sample (J), including the axial ladder in quantized mode.
    pub fn total_energy(&self) -> f64 {
        self.axis_energies().iter().sum::<f64>() * self.len() as f64
    }

    pub fn total_momentum(&self) -> [f64; 3] {
        let m = self.constants.mass;
        let mut p = [0.0; 3];
        for q in &self.particles {
            for i in 0..3 {
                p[i] += m * q.v[i];
            }
        }
        p
    }

    /// Mean-square velocity per axis.
    pub fn mean_square_velocity(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for p in &self.particles {
            for i in 0..3 {
                s[i] += p.v[i] * p.v[i];
            }
        }
        s.map(|x| x / self.len() as f64)
    }

    pub fn mean_axial_n(&self) -> f64 {
        self.particles
            .iter()
            .map(|p| p.axial_n.unwrap_or(0) as f64)
            .sum::<f64>()
            / self.len() as f64
    }

    /// Position rms per axis about the trap centre.
    pub fn position_rms(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for p in &self.particles {
            for i in 0..3 {
                s[i] += p.r[i] * p.r[i];
            }
        }
        s.map(|x| (x / self.len() as f64).sqrt())
    }

    /// Temperature of the equilibrium the sample relaxes to, from its
    /// conserved energy.
    pub fn equilibrium_temperature(&self) -> f64 {
        let kb = self.constants.k_b;
        let e = self.axis_energies();
        match self.mode {
            Mode::Classical3d => e.iter().sum::<f64>() / (3.0 * kb),
            Mode::QuantizedAxial => {
                let hw = self.constants.hbar * self.trap.omega_osc;
                // energy above zero point: 2 k T + hbar omega / (e^x - 1)
                let target = e[0] + e[1] + e[2] - 0.5 * hw;
                let f = |t: f64| 2.0 * kb * t + hw / (hw / (kb * t)).exp_m1() - target;
                let (mut lo, mut hi) = (1e-12 * target / kb, target / (2.0 * kb));
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }
}
