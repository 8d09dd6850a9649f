use serde::{Deserialize, Serialize};

use super::special::t_two_sided;
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanResult {
    pub rho: f64,
    pub p: f64,
    pub n: usize,
}

/// 1-based ranks, ties share the average of the ranks they span.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with a t-approximation p-value.
///
/// `Ok(None)` when either input has all-equal values.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<SpearmanResult>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewSamples { needed: 3, found: x.len() });
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(StatsError::NonFinite);
    }
    let Some(rho) = pearson(&average_ranks(x), &average_ranks(y)) else {
        return Ok(None);
    };
    let n = x.len();
    let df = (n - 2) as f64;
    let p = if rho.abs() >= 1.0 {
        0.0
    } else {
        t_two_sided(rho * (df / (1.0 - rho * rho)).sqrt(), df)
    };
    Ok(Some(SpearmanResult { rho, p, n }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn monotone() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v + 1.0).collect();
        assert_eq!(spearman(&x, &y).unwrap().unwrap().rho, 1.0);
        let r: Vec<f64> = x.iter().map(|v| -v.exp()).collect();
        let res = spearman(&x, &r).unwrap().unwrap();
        assert_eq!(res.rho, -1.0);
        assert_eq!(res.p, 0.0);
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0, 20.0, 10.0]), vec![2.0, 4.5, 2.0, 6.0, 4.5, 2.0]);
    }

    #[test]
    fn twelve_point_fixture_with_ties() {
        let x = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0, 3.0, 5.0, 8.0];
        let y = [2.0, 7.0, 1.0, 8.0, 2.0, 8.0, 1.0, 8.0, 2.0, 8.0, 4.0, 5.0];
        let r = spearman(&x, &y).unwrap().unwrap();
        // scipy.stats.spearmanr on the same data
        assert!((r.rho - 0.141_579_686_364_015_7).abs() < 1e-12, "{}", r.rho);
        assert!((r.p - 0.660_726_829_286_822_9).abs() < 1e-10);
        assert_eq!(r.n, 12);
    }

    #[test]
    fn constant_input_is_undefined() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]).unwrap(), None);
    }

    #[test]
    fn errors() {
        assert_eq!(spearman(&[1.0, 2.0], &[1.0, 2.0]), Err(StatsError::TooFewSamples { needed: 3, found: 2 }));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0]), Err(StatsError::LengthMismatch(3, 2)));
    }

    #[test]
    fn monotone_transform_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x: Vec<f64> = (0..40).map(|_| rng.random_range(0.1..10.0)).collect();
            let y: Vec<f64> = (0..40).map(|_| rng.random_range(0.1..10.0)).collect();
            let base = spearman(&x, &y).unwrap().unwrap();
            let xe: Vec<f64> = x.iter().map(|v| v.exp()).collect();
            let yl: Vec<f64> = y.iter().map(|v| v.ln()).collect();
            let t = spearman(&xe, &yl).unwrap().unwrap();
            assert!((base.rho - t.rho).abs() < 1e-12);
            assert!((base.p - t.p).abs() < 1e-12);
        }
    }

    #[test]
    fn shuffled_metric_is_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..100).map(|_| rng.random()).collect();
        let mut y = x.clone();
        for i in (1..y.len()).rev() {
            y.swap(i, rng.random_range(0..=i));
        }
        let r = spearman(&x, &y).unwrap().unwrap();
        assert!(r.rho.abs() < 0.3);
        assert!(r.p > 0.01);
    }
}
