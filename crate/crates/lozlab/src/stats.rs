//! Statistical test helpers shared by the samplers, the spectral
//! comparisons, and the verification suites: chi-square goodness of fit,
//! Kolmogorov-Smirnov distances, total variation against a finite law,
//! lattice dithering, and batch-means standard errors for Markov chains.

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Pearson chi-square statistic against the given expected counts.
/// Cells with zero expectation must have zero observations.
pub fn chi_square_stat(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected.iter()) {
        if e <= 0.0 {
            assert_eq!(o, 0, "observation in a zero-probability cell");
            continue;
        }
        let d = o as f64 - e;
        stat += d * d / e;
    }
    stat
}

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
pub fn chi_square_pvalue(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}

/// Goodness-of-fit p-value of observed counts against the uniform law over
/// the cells (dof = cells - 1).
pub fn chi_square_uniform_pvalue(observed: &[u64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let e = total as f64 / observed.len() as f64;
    let expected = vec![e; observed.len()];
    chi_square_pvalue(chi_square_stat(observed, &expected), observed.len() - 1)
}

/// Kolmogorov-Smirnov statistic of an ascending sample against a CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        debug_assert!(i == 0 || sorted[i - 1] <= x, "sample must be sorted");
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").cdf(x)
}

/// Total variation distance between empirical frequencies and a finite law.
pub fn total_variation(observed: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let mut tv = 0.0;
    for (&o, &p) in observed.iter().zip(probs.iter()) {
        tv += (o as f64 / total as f64 - p).abs();
    }
    tv / 2.0
}

/// Break lattice ties for continuous-distribution tests: add independent
/// uniform noise on (-1/2, 1/2) to each value.
pub fn dither<R: Rng>(vals: &[f64], rng: &mut R) -> Vec<f64> {
    vals.iter()
        .map(|&v| v + rng.gen_range(-0.5..0.5))
        .collect()
}

/// Standard error of the mean of a correlated series by batch means:
/// sqrt(len) batches, sample standard deviation of the batch means over
/// sqrt(batches). Returns None for series too short to batch.
pub fn batch_means_stderr(series: &[f64]) -> Option<f64> {
    let n = series.len();
    let b = (n as f64).sqrt().floor() as usize;
    if b < 2 {
        return None;
    }
    let len = n / b;
    let means: Vec<f64> = (0..b)
        .map(|j| series[j * len..(j + 1) * len].iter().sum::<f64>() / len as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (b as f64 - 1.0);
    Some((var / b as f64).sqrt())
}

pub fn mean(series: &[f64]) -> f64 {
    series.iter().sum::<f64>() / series.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chi_square_known_values() {
        assert_eq!(chi_square_stat(&[5, 5], &[5.0, 5.0]), 0.0);
        // one-dof 95th percentile is about 3.84
        let p = chi_square_pvalue(3.841, 1);
        assert!((p - 0.05).abs() < 1e-3, "p = {p}");
        let p = chi_square_uniform_pvalue(&[25, 25, 25, 25]);
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_of_even_grid() {
        // points at (i + 1/2)/n against the uniform CDF: distance 1/(2n)
        let n = 10;
        let pts: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&pts, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.05).abs() < 1e-12);
        let d = ks_statistic(&[0.0], |x| standard_normal_cdf(x));
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn total_variation_halves_l1() {
        let tv = total_variation(&[3, 1], &[0.5, 0.5]);
        assert!((tv - 0.25).abs() < 1e-12);
        assert_eq!(total_variation(&[2, 2], &[0.5, 0.5]), 0.0);
    }

    #[test]
    fn dither_stays_in_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vals = vec![0.0, 3.0, -2.0];
        let d = dither(&vals, &mut rng);
        for (a, b) in vals.iter().zip(d.iter()) {
            assert!((a - b).abs() < 0.5);
        }
    }

    #[test]
    fn batch_means_on_iid_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let series: Vec<f64> = (0..10_000).map(|_| rng.gen_range(0.0..1.0)).collect();
        let se = batch_means_stderr(&series).unwrap();
        // iid uniform: true stderr of the mean is 1/sqrt(12 n) ~ 0.0029
        assert!(se > 0.001 && se < 0.006, "se = {se}");
        assert!(batch_means_stderr(&[1.0]).is_none());
        assert_eq!(batch_means_stderr(&vec![2.0; 100]).unwrap(), 0.0);
    }
}
