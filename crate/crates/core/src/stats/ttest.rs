use serde::{Deserialize, Serialize};

use super::special::t_two_sided;
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    pub p: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// Both samples constant with different means: the statistic is infinite.
    pub degenerate: bool,
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub(crate) fn sample_variance(x: &[f64], m: f64) -> f64 {
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// Welch's unequal-variance two-sample t-test, two-sided.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::TooFewSamples { needed: 2, found: s.len() });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
    }
    let (n_a, n_b) = (a.len(), b.len());
    let (mean_a, mean_b) = (mean(a), mean(b));
    let se_a = sample_variance(a, mean_a) / n_a as f64;
    let se_b = sample_variance(b, mean_b) / n_b as f64;
    let se = se_a + se_b;
    let mut result = TTestResult {
        t: 0.0,
        df: (n_a + n_b - 2) as f64,
        p: 1.0,
        mean_a,
        mean_b,
        n_a,
        n_b,
        degenerate: false,
    };
    if se == 0.0 {
        if mean_a != mean_b {
            result.t = if mean_a > mean_b { f64::INFINITY } else { f64::NEG_INFINITY };
            result.p = 0.0;
            result.degenerate = true;
        }
        return Ok(result);
    }
    result.t = (mean_a - mean_b) / se.sqrt();
    result.df = se * se / (se_a * se_a / (n_a - 1) as f64 + se_b * se_b / (n_b - 1) as f64);
    result.p = t_two_sided(result.t, result.df);
    Ok(result)
}

/// Difference over sum; `None` when the means sum to (nearly) zero.
pub fn normalized_diff(mean_a: f64, mean_b: f64) -> Option<f64> {
    let sum = mean_a + mean_b;
    if sum.abs() < 1e-12 {
        None
    } else {
        Some((mean_a - mean_b) / sum)
    }
}
