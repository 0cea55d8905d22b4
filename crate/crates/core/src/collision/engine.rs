use super::cross_section::capped_sigma_g;
use super::state::{GasState, Mode, Particle};
use crate::constants::Constants;
use crate::error::{invalid, Error, Result};
use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::AddAssign;

/// Cells span this many position rms on each side of the trap centre.
const GRID_HALF_WIDTH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// No-time-counter sampling against a majorant.
    Ntc,
    /// Every pair in a cell is tested; O(N_c^2), used as a cross-check.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsmcConfig {
    /// Cell edge as a fraction of the cloud's position rms on that axis.
    pub cell_fraction: f64,
    pub pairing: Pairing,
    /// Relative speed below which the 8 pi / k^2 cross section is frozen (m/s).
    pub g_min: f64,
    /// Constant `sigma_2D g` of the quasi-2D kernel (m^2/s).
    pub kernel_2d: f64,
    /// Largest allowed per-pair collision probability in one step.
    pub max_pair_probability: f64,
}

impl DsmcConfig {
    /// Defaults for a cloud near temperature `t_ref`: the cross-section
    /// floor sits at 5% of the thermal relative wave vector and the 2D
    /// kernel is `hbar / m`.
    pub fn for_temperature(t_ref: f64, c: &Constants) -> Self {
        let g_thermal = (2.0 * c.k_b * t_ref / c.mass).sqrt();
        Self {
            cell_fraction: 0.25,
            pairing: Pairing::Ntc,
            g_min: 0.05 * g_thermal,
            kernel_2d: c.hbar / c.mass,
            max_pair_probability: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell_fraction > 0.0 && self.cell_fraction <= 2.0) {
            return Err(invalid("cell_fraction", "must lie in (0, 2]"));
        }
        if !(self.g_min > 0.0 && self.g_min.is_finite()) {
            return Err(invalid("g_min", "must be positive"));
        }
        if !(self.kernel_2d > 0.0 && self.kernel_2d.is_finite()) {
            return Err(invalid("kernel_2d", "must be positive"));
        }
        if !(self.max_pair_probability > 0.0 && self.max_pair_probability <= 1.0) {
            return Err(invalid("max_pair_probability", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionStats {
    pub candidates: u64,
    pub collisions: u64,
    /// Collisions whose relative horizontal energy reached 2 hbar omega.
    pub above_threshold: u64,
    pub excitations: u64,
    pub deexcitations: u64,
}

impl AddAssign for CollisionStats {
    fn add_assign(&mut self, o: Self) {
        self.candidates += o.candidates;
        self.collisions += o.collisions;
        self.above_threshold += o.above_threshold;
        self.excitations += o.excitations;
        self.deexcitations += o.deexcitations;
    }
}

/// Elastic s-wave scattering: keeps the centre-of-mass velocity and |v_rel|,
/// points the relative velocity along the unit vector `dir`.
pub fn elastic_3d(v1: [f64; 3], v2: [f64; 3], dir: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let g = ((v1[0] - v2[0]).powi(2) + (v1[1] - v2[1]).powi(2) + (v1[2] - v2[2]).powi(2)).sqrt();
    let mut a = [0.0; 3];
    let mut b = [0.0; 3];
    for i in 0..3 {
        let cm = 0.5 * (v1[i] + v2[i]);
        a[i] = cm + 0.5 * g * dir[i];
        b[i] = cm - 0.5 * g * dir[i];
    }
    (a, b)
}

/// Horizontal scattering that removes `delta_energy` (J, negative to add)
/// from the pair's relative motion and sends it along angle `phi`. Returns
/// `None` when the relative energy `m g^2 / 4` is below `delta_energy`.
pub fn redistribute_2d(
    v1: [f64; 2],
    v2: [f64; 2],
    delta_energy: f64,
    mass: f64,
    phi: f64,
) -> Option<([f64; 2], [f64; 2])> {
    let g2 = (v1[0] - v2[0]).powi(2) + (v1[1] - v2[1]).powi(2);
    let g2_new = g2 - 4.0 * delta_energy / mass;
    if g2_new < 0.0 {
        return None;
    }
    let g = g2_new.sqrt();
    let dir = [phi.cos(), phi.sin()];
    let mut a = [0.0; 2];
    let mut b = [0.0; 2];
    for i in 0..2 {
        let cm = 0.5 * (v1[i] + v2[i]);
        a[i] = cm + 0.5 * g * dir[i];
        b[i] = cm - 0.5 * g * dir[i];
    }
    Some((a, b))
}

/// Particles grouped by cell: `order[groups[k].0..groups[k].1]` lists the
/// members of the k-th occupied cell.
struct Cells {
    order: Vec<usize>,
    groups: Vec<(usize, usize)>,
    volume: f64,
}

fn build_cells(particles: &[Particle], axes: usize, cell_fraction: f64) -> Result<Cells> {
    let n = particles.len();
    let per_axis = (2.0 * GRID_HALF_WIDTH / cell_fraction).ceil() as u64;
    let mut h = [0.0; 3];
    for (i, hi) in h.iter_mut().enumerate().take(axes) {
        let rms = (particles.iter().map(|p| p.r[i] * p.r[i]).sum::<f64>() / n as f64).sqrt();
        if !(rms > 0.0 && rms.is_finite()) {
            return Err(Error::NonFinite("cloud size"));
        }
        *hi = cell_fraction * rms;
    }
    let half = per_axis as f64 / 2.0;
    let mut keys: Vec<(u64, usize)> = particles
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let mut key = 0u64;
            for i in (0..axes).rev() {
                let c = ((p.r[i] / h[i] + half).floor()).clamp(0.0, (per_axis - 1) as f64) as u64;
                key = key * per_axis + c;
            }
            (key, idx)
        })
        .collect();
    keys.sort_unstable();
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || keys[k].0 != keys[start].0 {
            groups.push((start, k));
            start = k;
        }
    }
    Ok(Cells {
        order: keys.into_iter().map(|(_, i)| i).collect(),
        groups,
        volume: h[..axes].iter().product(),
    })
}

fn draw_pair<R: Rng>(rng: &mut R, len: usize) -> (usize, usize) {
    let i = rng.random_range(0..len);
    let mut j = rng.random_range(0..len - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

fn scatter<R: Rng>(particles: &mut [Particle], a: usize, b: usize, rng: &mut R) {
    let dir: [f64; 3] = UnitSphere.sample(rng);
    let (va, vb) = elastic_3d(particles[a].v, particles[b].v, dir);
    particles[a].v = va;
    particles[b].v = vb;
}

fn relative_speed_3d(a: &Particle, b: &Particle) -> f64 {
    ((a.v[0] - b.v[0]).powi(2) + (a.v[1] - b.v[1]).powi(2) + (a.v[2] - b.v[2]).powi(2)).sqrt()
}

/// Bound on the per-pair collision probability in one step of length `dt`.
pub fn pair_probability_bound(state: &GasState, cfg: &DsmcConfig, dt: f64) -> Result<f64> {
    let cells = build_cells(&state.particles, state.mode.moving_axes(), cfg.cell_fraction)?;
    Ok(state.weight * majorant(state, cfg) * dt / cells.volume)
}

fn majorant(state: &GasState, cfg: &DsmcConfig) -> f64 {
    match state.mode {
        Mode::Classical3d => capped_sigma_g(cfg.g_min, cfg.g_min, &state.constants),
        Mode::QuantizedAxial => cfg.kernel_2d,
    }
}

/// One DSMC collision step of length `dt` for the classical 3D gas.
pub fn collide_classical(state: &mut GasState, cfg: &DsmcConfig, dt: f64) -> Result<CollisionStats> {
    if state.mode != Mode::Classical3d {
        return Err(invalid("mode", "collide_classical needs a classical3d state"));
    }
    cfg.validate()?;
    let cells = build_cells(&state.particles, 3, cfg.cell_fraction)?;
    let maj = majorant(state, cfg);
    let p_max = state.weight * maj * dt / cells.volume;
    if p_max > cfg.max_pair_probability {
        return Err(Error::TimeStepTooLarge { dt, p_max });
    }
    let c = state.constants;
    let GasState { particles, rng, .. } = state;
    let mut stats = CollisionStats::default();
    for &(s, e) in &cells.groups {
        let members = &cells.order[s..e];
        let nc = members.len();
        if nc < 2 {
            continue;
        }
        match cfg.pairing {
            Pairing::Ntc => {
                let expected = 0.5 * (nc * (nc - 1)) as f64 * p_max;
                let count = (expected + rng.random::<f64>()).floor() as u64;
                stats.candidates += count;
                for _ in 0..count {
                    let (i, j) = draw_pair(rng, nc);
                    let (a, b) = (members[i], members[j]);
                    let sg = capped_sigma_g(relative_speed_3d(&particles[a], &particles[b]), cfg.g_min, &c);
                    if sg > maj * (1.0 + 1e-12) {
                        return Err(Error::MajorantOverflow { observed: sg, majorant: maj });
                    }
                    if rng.random::<f64>() * maj < sg {
                        scatter(particles, a, b, rng);
                        stats.collisions += 1;
                    }
                }
            }
            Pairing::Exhaustive => {
                for i in 0..nc {
                    for j in i + 1..nc {
                        let (a, b) = (members[i], members[j]);
                        stats.candidates += 1;
                        let sg = capped_sigma_g(relative_speed_3d(&particles[a], &particles[b]), cfg.g_min, &c);
                        if rng.random::<f64>() * maj < p_max * sg {
                            scatter(particles, a, b, rng);
                            stats.collisions += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(stats)
}

/// Outcomes of an axial transfer of 2 quanta between the two atoms, with
/// their conditional probabilities.
const SPLITS: [((u32, u32), f64); 3] = [((2, 0), 0.25), ((1, 1), 0.5), ((0, 2), 0.25)];

fn draw_split(u: f64) -> (u32, u32) {
    let mut acc = 0.0;
    for (split, p) in SPLITS {
        acc += p;
        if u < acc {
            return split;
        }
    }
    SPLITS[2].0
}

/// One DSMC collision step for the quasi-2D gas with quantized axial motion.
///
/// Each collision attempts, with equal probability, to raise or lower the
/// pair's total axial level by 2. Raising needs `m g^2 / 4 >= 2 hbar omega`;
/// lowering needs both levels to stay non-negative. Failed attempts are
/// elastic horizontal collisions.
pub fn collide_quantized(state: &mut GasState, cfg: &DsmcConfig, dt: f64) -> Result<CollisionStats> {
    if state.mode != Mode::QuantizedAxial {
        return Err(invalid("mode", "collide_quantized needs a quantized_axial state"));
    }
    cfg.validate()?;
    let cells = build_cells(&state.particles, 2, cfg.cell_fraction)?;
    let p_max = state.weight * cfg.kernel_2d * dt / cells.volume;
    if p_max > cfg.max_pair_probability {
        return Err(Error::TimeStepTooLarge { dt, p_max });
    }
    let m = state.constants.mass;
    let quantum = 2.0 * state.constants.hbar * state.trap.omega_osc;
    let GasState { particles, rng, .. } = state;
    let mut stats = CollisionStats::default();
    for &(s, e) in &cells.groups {
        let members = &cells.order[s..e];
        let nc = members.len();
        if nc < 2 {
            continue;
        }
        let expected = 0.5 * (nc * (nc - 1)) as f64 * p_max;
        let count = (expected + rng.random::<f64>()).floor() as u64;
        stats.candidates += count;
        for _ in 0..count {
            let (i, j) = draw_pair(rng, nc);
            let (a, b) = (members[i], members[j]);
            let (pa, pb) = (particles[a], particles[b]);
            let va = [pa.v[0], pa.v[1]];
            let vb = [pb.v[0], pb.v[1]];
            let eps = 0.25 * m * ((va[0] - vb[0]).powi(2) + (va[1] - vb[1]).powi(2));
            stats.collisions += 1;
            if eps >= quantum {
                stats.above_threshold += 1;
            }
            let up = rng.random::<f64>() < 0.5;
            let (da, db) = draw_split(rng.random::<f64>());
            let phi = 2.0 * PI * rng.random::<f64>();
            let (na, nb) = (pa.axial_n.unwrap_or(0), pb.axial_n.unwrap_or(0));
            let (levels, delta) = if up {
                ((na + da, nb + db), quantum)
            } else if na >= da && nb >= db {
                ((na - da, nb - db), -quantum)
            } else {
                ((na, nb), 0.0)
            };
            let (levels, (wa, wb)) = match redistribute_2d(va, vb, delta, m, phi) {
                Some(v) => (levels, v),
                None => ((na, nb), redistribute_2d(va, vb, 0.0, m, phi).expect("elastic")),
            };
            if levels.0 + levels.1 > na + nb {
                stats.excitations += 1;
            } else if levels.0 + levels.1 < na + nb {
                stats.deexcitations += 1;
            }
            particles[a].v[..2].copy_from_slice(&wa);
            particles[b].v[..2].copy_from_slice(&wb);
            particles[a].axial_n = Some(levels.0);
            particles[b].axial_n = Some(levels.1);
        }
    }
    Ok(stats)
}

/// Collision step for whichever mode the state is in.
pub fn collide(state: &mut GasState, cfg: &DsmcConfig, dt: f64) -> Result<CollisionStats> {
    match state.mode {
        Mode::Classical3d => collide_classical(state, cfg, dt),
        Mode::QuantizedAxial => collide_quantized(state, cfg, dt),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Constants, TrapConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn elastic_pair_conserves_momentum_and_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let v1 = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
            let v2 = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
            let dir: [f64; 3] = UnitSphere.sample(&mut rng);
            let (a, b) = elastic_3d(v1, v2, dir);
            let e0: f64 = v1.iter().chain(&v2).map(|x| x * x).sum();
            let e1: f64 = a.iter().chain(&b).map(|x| x * x).sum();
            assert!(rel(e0, e1) < 1e-12);
            let p_scale = e0.sqrt();
            for i in 0..3 {
                assert!(((v1[i] + v2[i]) - (a[i] + b[i])).abs() < 1e-12 * p_scale);
            }
        }
    }

    #[test]
    fn inelastic_pair_balances_energy() {
        let m = 2.2e-25;
        let v1 = [0.03, -0.01];
        let v2 = [-0.02, 0.015];
        let eps = 0.25 * m * (0.05f64.powi(2) + 0.025f64.powi(2));
        let de = 0.4 * eps;
        let (a, b) = redistribute_2d(v1, v2, de, m, 1.0).unwrap();
        let ke = |v: [f64; 2]| 0.5 * m * (v[0] * v[0] + v[1] * v[1]);
        let before = ke(v1) + ke(v2);
        let after = ke(a) + ke(b) + de;
        assert!(rel(before, after) < 1e-12);
        assert!(redistribute_2d(v1, v2, 1.01 * eps, m, 1.0).is_none());
    }

    #[test]
    fn split_probabilities() {
        assert_eq!(draw_split(0.1), (2, 0));
        assert_eq!(draw_split(0.5), (1, 1));
        assert_eq!(draw_split(0.9), (0, 2));
        assert!((SPLITS.iter().map(|s| s.1).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn below_threshold_pairs_never_excite() {
        let c = Constants::cesium();
        let trap = TrapConfig::reference(&c);
        // k T = 0.05 hbar omega: essentially no pair reaches 2 hbar omega
        let t = 0.05 * c.hbar * trap.omega_osc / c.k_b;
        let mut s = GasState::thermal(400, [t, t, 0.0], trap, c, Mode::QuantizedAxial, 1.0, 2).unwrap();
        let cfg = DsmcConfig::for_temperature(t, &c);
        let dt = 0.05 / pair_probability_bound(&s, &cfg, 1.0).unwrap();
        let mut total = CollisionStats::default();
        for _ in 0..20 {
            total += collide_quantized(&mut s, &cfg, dt).unwrap();
        }
        assert!(total.collisions > 0);
        assert_eq!(total.above_threshold, 0);
        assert_eq!(total.excitations, 0);
        assert!(s.particles.iter().all(|p| p.axial_n == Some(0)));
    }

    #[test]
    fn time_step_guard() {
        let c = Constants::cesium();
        let trap = TrapConfig::reference(&c);
        let mut s = GasState::thermal(400, [10e-6; 3], trap, c, Mode::Classical3d, 1e9, 2).unwrap();
        let cfg = DsmcConfig::for_temperature(10e-6, &c);
        assert!(matches!(collide_classical(&mut s, &cfg, 1.0), Err(Error::TimeStepTooLarge { .. })));
        assert!(collide_quantized(&mut s, &cfg, 1e-6).is_err());
    }
}
