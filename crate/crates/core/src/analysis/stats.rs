use crate::error::{invalid, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov survival function with the small-sample correction
/// `lambda = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = 2.0 * (-1f64).powi(j - 1) * (-2.0 * (j as f64 * lambda).powi(2)).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against a centred normal of width `sigma`.
pub fn ks_normal(samples: &[f64], sigma: f64) -> Result<KsResult> {
    if samples.len() < 2 {
        return Err(invalid("samples", "need at least two samples"));
    }
    let dist = Normal::new(0.0, sigma).map_err(|e| invalid("sigma", e.to_string()))?;
    let mut x = samples.to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = dist.cdf(v);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q((sn + 0.12 + 0.11 / sn) * d),
    })
}

/// Pearson chi-square test of equal expected counts; returns (statistic, p).
pub fn chi_square_uniform(counts: &[u64]) -> Result<(f64, f64)> {
    if counts.len() < 2 {
        return Err(invalid("counts", "need at least two bins"));
    }
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum::<f64>();
    let dist = ChiSquared::new((counts.len() - 1) as f64).map_err(|e| invalid("counts", e.to_string()))?;
    Ok((stat, 1.0 - dist.cdf(stat)))
}

/// Sample mean and its standard error.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::Distribution;

    #[test]
    fn ks_accepts_matching_and_rejects_wrong_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = rand_distr::Normal::new(0.0, 2.0).unwrap();
        let xs: Vec<f64> = (0..5000).map(|_| d.sample(&mut rng)).collect();
        assert!(ks_normal(&xs, 2.0).unwrap().p_value > 0.01);
        assert!(ks_normal(&xs, 2.4).unwrap().p_value < 1e-6);
    }

    #[test]
    fn chi_square_flat_counts() {
        let (s, p) = chi_square_uniform(&[100, 100, 100, 100]).unwrap();
        assert_eq!(s, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p) = chi_square_uniform(&[400, 0, 0, 0]).unwrap();
        assert!(p < 1e-10);
    }

    #[test]
    fn mean_and_error() {
        let (m, e) = mean_and_stderr(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((e - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
