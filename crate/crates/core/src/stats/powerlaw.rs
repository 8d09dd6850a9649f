use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::features::spectral::ols;

pub const MIN_POWERLAW_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n: usize,
}

/// Least-squares line through `(log10 rank, log10 views)` after sorting
/// views in descending order.
pub fn powerlaw_fit(views: &[u64]) -> Result<PowerLawFit, StatsError> {
    if views.len() < MIN_POWERLAW_POINTS {
        return Err(StatsError::TooFewSamples {
            needed: MIN_POWERLAW_POINTS,
            found: views.len(),
        });
    }
    if views.contains(&0) {
        return Err(StatsError::NonPositive);
    }
    let mut sorted = views.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let points: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| (((i + 1) as f64).log10(), (v as f64).log10()))
        .collect();
    Ok(fit_points(&points))
}

/// Same fit on real-valued views; used where counts were synthesized exactly.
pub fn powerlaw_fit_f64(views: &[f64]) -> Result<PowerLawFit, StatsError> {
    if views.len() < MIN_POWERLAW_POINTS {
        return Err(StatsError::TooFewSamples {
            needed: MIN_POWERLAW_POINTS,
            found: views.len(),
        });
    }
    if views.iter().any(|&v| !v.is_finite() || v < 1.0) {
        return Err(StatsError::NonPositive);
    }
    let mut sorted = views.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let points: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| (((i + 1) as f64).log10(), v.log10()))
        .collect();
    Ok(fit_points(&points))
}

fn fit_points(points: &[(f64, f64)]) -> PowerLawFit {
    let (slope, intercept) = ols(points);
    let my = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - my) * (y - my)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    PowerLawFit {
        slope,
        intercept,
        r_squared,
        n: points.len(),
    }
}

/// `(likes / views, comments / views)`, or `None` without views.
pub fn engagement_rates(views: u64, likes: u64, comments: u64) -> Option<(f64, f64)> {
    if views == 0 {
        return None;
    }
    Some((likes as f64 / views as f64, comments as f64 / views as f64))
}
