use super::{build_rate_matrix, PopulationVector, RateMatrix, RateModelConfig};
use crate::error::{invalid, Error, Result};
use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, Normal};
use std::collections::HashMap;

/// Population allowed at the top of the truncated ladder in steady state.
pub const LEAK_LIMIT: f64 = 1e-6;
const RESIDUAL_LIMIT: f64 = 1e-10;
const CONSERVATION_LIMIT: f64 = 1e-8;

/// Number of closed communicating classes of the transition graph, which
/// equals the dimension of the generator's null space.
fn closed_classes(rm: &RateMatrix) -> usize {
    let d = rm.dimension();
    let reach: Vec<Vec<bool>> = (0..d)
        .map(|s| {
            let mut seen = vec![false; d];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(j) = stack.pop() {
                for i in 0..d {
                    if i != j && rm.m[(i, j)] > 0.0 && !seen[i] {
                        seen[i] = true;
                        stack.push(i);
                    }
                }
            }
            seen
        })
        .collect();
    let mut classes: Vec<&Vec<bool>> = Vec::new();
    for i in 0..d {
        let closed = (0..d).all(|j| !reach[i][j] || reach[j][i]);
        if closed && !classes.contains(&&reach[i]) {
            classes.push(&reach[i]);
        }
    }
    classes.len()
}

/// Unique normalized null vector of the generator.
pub fn steady_state(rm: &RateMatrix) -> Result<PopulationVector> {
    let classes = closed_classes(rm);
    if classes != 1 {
        return Err(Error::AmbiguousSteadyState { dimension: classes });
    }
    let scale = rm.max_outflow();
    let mhat = &rm.m / scale;
    let mut a = mhat.clone();
    a.row_mut(0).fill(1.0);
    let mut b = DVector::<f64>::zeros(rm.dimension());
    b[0] = 1.0;
    let mut p = a.lu().solve(&b).ok_or(Error::Integration {
        t: f64::INFINITY,
        reason: "singular system for the steady state".into(),
    })?;
    p.iter_mut().for_each(|x| *x = x.max(0.0));
    p /= p.sum();
    let residual = (&mhat * &p).amax();
    if !(residual < RESIDUAL_LIMIT) {
        return Err(Error::Integration {
            t: f64::INFINITY,
            reason: format!("steady-state residual {residual:e}"),
        });
    }
    let pv = PopulationVector::from_raw(rm.n_max, p.as_slice().to_vec())?;
    let leak = pv.p3(rm.n_max) + pv.p2(rm.n_max);
    if leak > LEAK_LIMIT {
        return Err(Error::TruncationLeak { leak, limit: LEAK_LIMIT });
    }
    Ok(pv)
}

/// Steady state for a configuration, building the generator on the way.
pub fn stationary_limit(cfg: &RateModelConfig) -> Result<PopulationVector> {
    steady_state(&build_rate_matrix(cfg)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub population: PopulationVector,
    pub mean_n: f64,
    pub reduced_temperature: f64,
}

/// Propagates `p0`, given at `t_grid[0]`, through the increasing grid with
/// the exact propagator `exp(M dt)`. Propagators are cached per step size.
pub fn evolve(rm: &RateMatrix, p0: &PopulationVector, t_grid: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    if p0.n_max() != rm.n_max {
        return Err(invalid("populations", "n_max differs from the rate matrix"));
    }
    if (p0.total() - 1.0).abs() > CONSERVATION_LIMIT {
        return Err(invalid("populations", "initial vector must be normalized"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("t_grid", "must be strictly increasing"));
    }
    let mut cache: HashMap<u64, DMatrix<f64>> = HashMap::new();
    let mut p = DVector::from_column_slice(p0.as_slice());
    let mut out = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        if i > 0 {
            let dt = t - t_grid[i - 1];
            let prop = cache
                .entry(dt.to_bits())
                .or_insert_with(|| (&rm.m * dt).exp());
            p = &*prop * p;
            let total = p.sum();
            if !total.is_finite() || (total - 1.0).abs() > CONSERVATION_LIMIT {
                return Err(Error::Integration {
                    t,
                    reason: format!("population sum drifted to {total}"),
                });
            }
            p.iter_mut().for_each(|x| *x = x.max(0.0));
            p /= p.sum();
        }
        let population = PopulationVector::from_raw(rm.n_max, p.as_slice().to_vec())?;
        out.push(TrajectoryPoint {
            t,
            mean_n: population.mean_n(),
            reduced_temperature: population.reduced_temperature(),
            population,
        });
    }
    Ok(out)
}

/// Mean occupation averaged over a Gaussian spread of atom frequencies,
/// using `nodes` equal-weight quantile samples of the detuning.
pub fn ensemble_mean_n(
    cfg: &RateModelConfig,
    detuning_sigma: f64,
    p0: &PopulationVector,
    t_grid: &[f64],
    nodes: usize,
) -> Result<Vec<f64>> {
    if nodes == 0 {
        return Err(invalid("nodes", "must be positive"));
    }
    if !(detuning_sigma >= 0.0) {
        return Err(invalid("detuning_sigma", "must be non-negative"));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut acc = vec![0.0; t_grid.len()];
    for i in 0..nodes {
        let z = if nodes == 1 {
            0.0
        } else {
            normal.inverse_cdf((i as f64 + 0.5) / nodes as f64)
        };
        let mut atom = *cfg;
        atom.detuning = cfg.detuning + detuning_sigma * z;
        let traj = evolve(&build_rate_matrix(&atom)?, p0, t_grid)?;
        for (a, pt) in acc.iter_mut().zip(&traj) {
            *a += pt.mean_n / nodes as f64;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::Constants;
    use crate::physics::Parity;
    use approx::assert_relative_eq;

    fn reference() -> RateModelConfig {
        RateModelConfig::reference(&Constants::cesium())
    }

    #[test]
    fn resonant_steady_state_matches_closed_form() {
        let p = stationary_limit(&reference()).unwrap();
        let cfg = reference();
        let closed = super::super::resonant_excited_population(cfg.gamma_prime, cfg.omega_osc);
        assert_relative_eq!(p.p3(1), closed, max_relative = 0.05);
        assert_relative_eq!(p.total(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_drive_is_ambiguous() {
        let mut cfg = reference();
        cfg.omega_r = 0.0;
        let err = stationary_limit(&cfg).unwrap_err();
        assert_eq!(err, Error::AmbiguousSteadyState { dimension: cfg.n_max + 1 });
    }

    #[test]
    fn leak_is_reported() {
        let mut cfg = reference();
        cfg.n_max = 12;
        cfg.sigma_minus_fraction = 0.9;
        cfg.detuning = 0.5 * cfg.omega_osc;
        assert!(matches!(stationary_limit(&cfg), Err(Error::TruncationLeak { .. })));
    }

    #[test]
    fn evolution_conserves_and_reaches_steady_state() {
        let cfg = reference();
        let rm = build_rate_matrix(&cfg).unwrap();
        let p0 = PopulationVector::thermal(cfg.n_max, 1.0);
        let grid: Vec<f64> = (0..=50).map(|i| i as f64 * 40e-6).collect();
        let traj = evolve(&rm, &p0, &grid).unwrap();
        for pt in &traj {
            assert_relative_eq!(pt.population.total(), 1.0, max_relative = 1e-10);
        }
        let ss = steady_state(&rm).unwrap();
        let last = &traj.last().unwrap().population;
        assert_relative_eq!(last.p3(1), ss.p3(1), max_relative = 1e-3);
        assert!(traj[10].mean_n < traj[0].mean_n);
    }

    #[test]
    fn even_parity_cools_through_second_sideband() {
        let mut cfg = reference();
        cfg.parity = Parity::Even;
        cfg.zeeman_splitting = 2.0 * cfg.omega_osc;
        // n = 1 is a dark state for Delta n = -2, so two classes remain
        assert!(matches!(
            stationary_limit(&cfg),
            Err(Error::AmbiguousSteadyState { dimension: 2 })
        ));
    }

    #[test]
    fn rejects_mismatched_vector() {
        let rm = build_rate_matrix(&reference()).unwrap();
        let p0 = PopulationVector::thermal(20, 1.0);
        assert!(evolve(&rm, &p0, &[0.0, 1e-6]).is_err());
    }
}
