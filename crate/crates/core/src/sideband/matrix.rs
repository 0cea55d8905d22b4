use super::{lorentzian, RateModelConfig};
use crate::error::Result;
use crate::physics::Parity;
use nalgebra::DMatrix;

/// Generator `M` of `dp/dt = M p`. `M[(to, from)]` is a rate; columns sum to zero.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    pub n_max: usize,
    pub m: DMatrix<f64>,
}

impl RateMatrix {
    pub fn dimension(&self) -> usize {
        self.m.nrows()
    }

    /// Largest total outflow rate of any state.
    pub fn max_outflow(&self) -> f64 {
        (0..self.dimension())
            .map(|i| -self.m[(i, i)])
            .fold(0.0, f64::max)
    }

    /// Rate of the transition `from -> to` (off-diagonal entries only).
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.m[(to, from)]
    }

    pub fn index_m3(&self, n: usize) -> usize {
        n
    }

    pub fn index_m2(&self, n: usize) -> usize {
        self.n_max + 1 + n
    }
}

/// Effective Raman coupling for |3,n> -> |2,n+k>, to first order beyond
/// the leading term of the Lamb-Dicke expansion.
fn raman_amplitude(cfg: &RateModelConfig, n: usize, k: i64) -> f64 {
    let upper = (n as i64).max(n as i64 + k) as f64;
    match (cfg.parity, k) {
        (Parity::Odd, 1 | -1) => cfg.omega_r * upper.sqrt(),
        (Parity::Even, 2 | -2) => cfg.omega_r * cfg.eta * (upper * (upper - 1.0)).sqrt() / 2.0,
        _ => 0.0,
    }
}

/// Builds the generator on the (m, n) ladder with a reflecting cut at `n_max`.
///
/// Channels: Raman transfer with immediate repump (|3,n> -> |3,n+k> at
/// `Omega_k^2 Gamma' / (Gamma'^2 + 4 Delta_k^2)`), sigma-minus excitation
/// (|3,n> -> |3,n+-1> at `s Gamma' eta^2` each) and m=2 decay at `Gamma'`.
/// The even-parity carrier (k = 0) does not change n and is left out.
pub fn build_rate_matrix(cfg: &RateModelConfig) -> Result<RateMatrix> {
    cfg.validate()?;
    let nm = cfg.n_max;
    let dim = cfg.dimension();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut add = |from: usize, to: usize, rate: f64| {
        if rate > 0.0 && from != to {
            m[(to, from)] += rate;
            m[(from, from)] -= rate;
        }
    };
    let sigma = cfg.sigma_minus_fraction * cfg.gamma_prime * cfg.eta * cfg.eta;

    for n in 0..=nm {
        for k in [-2i64, -1, 1, 2] {
            let to = n as i64 + k;
            if to < 0 || to > nm as i64 {
                continue;
            }
            let amp = raman_amplitude(cfg, n, k);
            let rate = amp * amp / cfg.gamma_prime
                * lorentzian(cfg.gamma_prime, cfg.sideband_detuning(k));
            add(n, to as usize, rate);
        }
        if n < nm {
            add(n, n + 1, sigma);
        }
        if n > 0 {
            add(n, n - 1, sigma);
        }
        add(nm + 1 + n, n, cfg.gamma_prime);
    }
    Ok(RateMatrix { n_max: nm, m })
}
