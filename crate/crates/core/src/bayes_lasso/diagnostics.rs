use crate::error::{Error, Result};

/// Biased sample autocorrelation at lags `0..=max_lag`.
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n <= max_lag {
        return Err(Error::Parameter(format!(
            "series of length {n} is too short for lag {max_lag}"
        )));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let c0: f64 = centered.iter().map(|x| x * x).sum();
    if !(c0 > 0.0) {
        return Err(Error::Degenerate("autocorrelation of a constant series is undefined".into()));
    }
    Ok((0..=max_lag)
        .map(|k| {
            if k == 0 {
                return 1.0;
            }
            let ck: f64 = centered[..n - k].iter().zip(&centered[k..]).map(|(a, b)| a * b).sum();
            ck / c0
        })
        .collect())
}

/// Effective sample size using Geyer's initial positive sequence: pairs of
/// consecutive autocorrelations are summed until a pair goes non-positive.
pub fn effective_sample_size(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 4 {
        return Err(Error::Parameter("effective sample size needs at least 4 draws".into()));
    }
    let max_lag = (n - 1).min(1_000.max(n / 2)).min(n - 1);
    let rho = acf(series, max_lag)?;
    let mut tau = -1.0;
    let mut k = 0;
    while k + 1 <= max_lag {
        let pair = rho[k] + rho[k + 1];
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 2;
    }
    let tau = tau.max(1.0 / n as f64);
    Ok((n as f64 / tau).min(n as f64))
}

/// Monte-Carlo standard error of the mean, adjusted for autocorrelation.
pub fn mc_stderr(series: &[f64]) -> Result<f64> {
    let ess = effective_sample_size(series)?;
    Ok((crate::stats::variance(series) / ess).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample_standard_normal, Rng};

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = Rng::new(seed);
        let mut x = 0.0;
        (0..n)
            .map(|_| {
                x = phi * x + sample_standard_normal(&mut rng);
                x
            })
            .collect()
    }

    #[test]
    fn white_noise_band() {
        let xs = ar1(0.0, 10_000, 1);
        let r = acf(&xs, 20).unwrap();
        assert_eq!(r[0], 1.0);
        for v in &r[1..] {
            assert!(v.abs() < 4.0 / 100.0, "{v}");
        }
    }

    #[test]
    fn ar1_lag_one() {
        let r = acf(&ar1(0.9, 10_000, 2), 1).unwrap();
        assert!((r[1] - 0.9).abs() < 0.05, "{}", r[1]);
    }

    #[test]
    fn ess_of_ar1_matches_closed_form() {
        // ESS/n = (1 - phi) / (1 + phi) for an AR(1).
        let xs = ar1(0.5, 100_000, 3);
        let ess = effective_sample_size(&xs).unwrap();
        let want = 100_000.0 / 3.0;
        assert!((ess / want - 1.0).abs() < 0.1, "{ess}");
    }

    #[test]
    fn errors() {
        assert!(matches!(acf(&[1.0; 10], 2), Err(Error::Degenerate(_))));
        assert!(acf(&[1.0, 2.0], 2).is_err());
    }
}
