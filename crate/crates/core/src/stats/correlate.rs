use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{spearman, SpearmanResult, StatsError};
use crate::features::{FEATURE_COUNT, FEATURE_NAMES};

pub const DEFAULT_METRICS: [&str; 3] = ["views", "likes", "comments"];
pub const MIN_STRATUM_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Stratum {
    pub group: String,
    pub event: String,
    pub theme: String,
}

/// One image with its features and behavioural metrics, in the order of
/// the metric names passed to [`correlate_metrics`].
#[derive(Debug, Clone)]
pub struct MetricObservation<'a> {
    pub stratum: Stratum,
    pub features: &'a [f64; FEATURE_COUNT],
    pub metrics: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub stratum: Stratum,
    pub feature: String,
    pub n: usize,
    /// `None` for strata below the minimum size or with a constant input.
    pub result: Option<SpearmanResult>,
    pub insufficient: bool,
}

/// Spearman correlation of every feature against every metric, within every
/// stratum. Rows are ordered by metric, stratum, then feature.
pub fn correlate_metrics(
    observations: &[MetricObservation],
    metric_names: &[&str],
) -> Result<Vec<CorrelationRow>, StatsError> {
    let mut strata: BTreeMap<&Stratum, Vec<&MetricObservation>> = BTreeMap::new();
    for o in observations {
        if o.metrics.len() != metric_names.len() {
            return Err(StatsError::LengthMismatch(o.metrics.len(), metric_names.len()));
        }
        strata.entry(&o.stratum).or_default().push(o);
    }
    let mut rows = Vec::with_capacity(metric_names.len() * strata.len() * FEATURE_COUNT);
    for (m, metric) in metric_names.iter().enumerate() {
        for (stratum, members) in &strata {
            let y: Vec<f64> = members.iter().map(|o| o.metrics[m]).collect();
            for (f, feature) in FEATURE_NAMES.iter().enumerate() {
                let n = members.len();
                let result = if n >= MIN_STRATUM_SIZE {
                    let x: Vec<f64> = members.iter().map(|o| o.features[f]).collect();
                    spearman(&x, &y)?
                } else {
                    None
                };
                rows.push(CorrelationRow {
                    metric: metric.to_string(),
                    stratum: (*stratum).clone(),
                    feature: feature.to_string(),
                    n,
                    result,
                    insufficient: n < MIN_STRATUM_SIZE,
                });
            }
        }
    }
    Ok(rows)
}
