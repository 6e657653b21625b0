//! Estimates with standard errors, jackknife variance errors, regression
//! and descriptive normality diagnostics.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point estimate with its standard error and a normal-approximation
/// 95% interval `value ± 1.96 SE`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub replicate_count: usize,
    pub censored_count: usize,
}

impl Estimate {
    pub fn new(value: f64, std_error: f64, replicate_count: usize, censored_count: usize) -> Self {
        Self { value, std_error, ci95: (value - 1.96 * std_error, value + 1.96 * std_error), replicate_count, censored_count }
    }

    /// `c * self` (a deterministic rescaling).
    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.value * c, self.std_error * c.abs(), self.replicate_count, self.censored_count)
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        self.ci95.0 <= other.ci95.1 && other.ci95.0 <= self.ci95.1
    }

    /// Sum of independent estimates.
    pub fn plus(&self, other: &Estimate) -> Self {
        Self::new(
            self.value + other.value,
            (self.std_error.powi(2) + other.std_error.powi(2)).sqrt(),
            self.replicate_count + other.replicate_count,
            self.censored_count + other.censored_count,
        )
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Sample mean with its standard error.
pub fn mean_estimate(xs: &[f64], censored: usize) -> Estimate {
    let n = xs.len();
    let se = if n > 1 { (variance(xs) / n as f64).sqrt() } else { f64::NAN };
    Estimate::new(mean(xs), se, n, censored)
}

/// Sample variance with a delete-one jackknife standard error. The
/// leave-one-out variances are computed in closed form from running sums.
pub fn variance_estimate(xs: &[f64], censored: usize) -> Estimate {
    let n = xs.len();
    if n < 3 {
        return Estimate::new(variance(xs), f64::NAN, n, censored);
    }
    let m = mean(xs);
    // Centre first for numerical stability.
    let c: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let s1: f64 = c.iter().sum();
    let s2: f64 = c.iter().map(|x| x * x).sum();
    let nf = n as f64;
    let loo: Vec<f64> = c
        .iter()
        .map(|x| {
            let a = s1 - x;
            let b = s2 - x * x;
            (b - a * a / (nf - 1.0)) / (nf - 2.0)
        })
        .collect();
    let lm = mean(&loo);
    let jk = (nf - 1.0) / nf * loo.iter().map(|v| (v - lm) * (v - lm)).sum::<f64>();
    Estimate::new(s2 / (nf - 1.0) - s1 * s1 / (nf * (nf - 1.0)), jk.sqrt(), n, censored)
}

/// Ordinary least squares `y = a + b x` with the slope's standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_se: f64,
    pub correlation: f64,
}

/// Weighted least squares; `weights` default to one. The slope error uses
/// the weights as inverse variances when given, the residual scatter
/// otherwise.
pub fn linear_fit(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::OutOfRange("regression needs at least two paired points".into()));
    }
    let ones = vec![1.0; n];
    let w = weights.unwrap_or(&ones);
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - mx) * (c - my)).sum();
    let syy: f64 = y.iter().zip(w).map(|(c, b)| b * (c - my) * (c - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::OutOfRange("regression abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if weights.is_some() {
        (1.0 / sxx).sqrt()
    } else if n > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, c)| (c - intercept - slope * a).powi(2)).sum();
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    let correlation = if syy > 0.0 { sxy / (sxx * syy).sqrt() } else { f64::NAN };
    Ok(LinearFit { intercept, slope, slope_se, correlation })
}

/// Pearson correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    linear_fit(x, y, None).map_or(f64::NAN, |f| f.correlation)
}

/// Moments and a histogram of standardised samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub skewness_se: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_se: f64,
    /// `(lower edge, upper edge, count)` of standardised values on
    /// `[-4, 4]` in 16 bins; values outside are clamped into the end bins.
    pub histogram: Vec<(f64, f64, usize)>,
}

pub fn normality_diagnostics(samples: &[f64]) -> Result<NormalityReport> {
    let n = samples.len();
    if n < 100 {
        return Err(Error::TooFewPoints { needed: 100, got: n });
    }
    let m = mean(samples);
    let sd = variance(samples).sqrt();
    let nf = n as f64;
    let z: Vec<f64> = samples.iter().map(|x| (x - m) / sd).collect();
    let m3 = z.iter().map(|v| v.powi(3)).sum::<f64>() / nf;
    let m4 = z.iter().map(|v| v.powi(4)).sum::<f64>() / nf;
    let bins = 16;
    let mut histogram: Vec<(f64, f64, usize)> =
        (0..bins).map(|i| (-4.0 + 0.5 * i as f64, -3.5 + 0.5 * i as f64, 0)).collect();
    for v in &z {
        let b = (((v + 4.0) / 0.5).floor().max(0.0) as usize).min(bins - 1);
        histogram[b].2 += 1;
    }
    // Standard large-sample errors of skewness and excess kurtosis under normality.
    let skewness_se = (6.0 * nf * (nf - 1.0) / ((nf - 2.0) * (nf + 1.0) * (nf + 3.0))).sqrt();
    let kurtosis_se = 2.0 * skewness_se * ((nf * nf - 1.0) / ((nf - 3.0) * (nf + 5.0))).sqrt();
    Ok(NormalityReport {
        count: n,
        mean: m,
        std_dev: sd,
        skewness: m3,
        skewness_se,
        excess_kurtosis: m4 - 3.0,
        kurtosis_se,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand_distr::{Distribution, Exp1, StandardNormal};

    #[test]
    fn jackknife_variance_matches_brute_force() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 + 0.1 * i as f64).collect();
        let est = variance_estimate(&xs, 0);
        let n = xs.len() as f64;
        let loo: Vec<f64> = (0..xs.len())
            .map(|i| {
                let rest: Vec<f64> = xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| *x).collect();
                variance(&rest)
            })
            .collect();
        let lm = mean(&loo);
        let jk = ((n - 1.0) / n * loo.iter().map(|v| (v - lm).powi(2)).sum::<f64>()).sqrt();
        assert!((est.value - variance(&xs)).abs() < 1e-10);
        assert!((est.std_error - jk).abs() < 1e-10);
    }

    #[test]
    fn constant_statistic_has_zero_variance() {
        let est = variance_estimate(&[3.0; 40], 0);
        assert_eq!(est.value, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn normality_detects_skew() {
        let mut rng = stream(1, 8, 0, 0);
        let normal: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = normality_diagnostics(&normal).unwrap();
        assert!(r.skewness.abs() < 3.0 * r.skewness_se);
        let expo: Vec<f64> = (0..5000).map(|_| Exp1.sample(&mut rng)).collect();
        let e = normality_diagnostics(&expo).unwrap();
        assert!((e.skewness - 2.0).abs() < 0.4, "{}", e.skewness);
        assert!(normality_diagnostics(&normal[..50]).is_err());
    }

    #[test]
    fn regression_recovers_a_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let f = linear_fit(&x, &y, None).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.correlation - 1.0).abs() < 1e-12);
    }
}
