//! Error metrics versus ground truth: MAE, RMSE, and the standard deviation
//! of signed errors.

use crate::config::PipelineConfig;
use crate::error::Error;
use crate::Result;

/// Aggregated metrics for one configuration, one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub config: PipelineConfig,
    /// None when every subject failed for this config.
    pub mae: Option<f64>,
    pub rmse: Option<f64>,
    pub sd: Option<f64>,
    pub n_subjects: usize,
    pub n_failed: usize,
}

/// MAE, RMSE and the population standard deviation of the signed errors
/// `estimate - gt`.
pub fn compute_metrics(pairs: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if pairs.is_empty() {
        return Err(Error::NoData);
    }
    let n = pairs.len() as f64;
    let errors: Vec<f64> = pairs.iter().map(|&(est, gt)| est - gt).collect();
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n;
    let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    let mean = errors.iter().sum::<f64>() / n;
    let sd = (errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n).sqrt();
    Ok((mae, rmse, sd))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_errors() {
        let (mae, rmse, sd) = compute_metrics(&[(10.0, 11.0), (12.0, 11.0)]).unwrap();
        assert_eq!(mae, 1.0);
        assert_eq!(rmse, 1.0);
        assert_eq!(sd, 1.0);
    }

    #[test]
    fn perfect_estimates() {
        let (mae, rmse, sd) = compute_metrics(&[(10.0, 10.0), (12.0, 12.0)]).unwrap();
        assert_eq!((mae, rmse, sd), (0.0, 0.0, 0.0));
    }

    #[test]
    fn skewed_errors() {
        // errors -1 and +3: mae 2, rmse sqrt(5), sd of signed errors 2
        let (mae, rmse, sd) = compute_metrics(&[(10.0, 11.0), (14.0, 11.0)]).unwrap();
        assert_eq!(mae, 2.0);
        assert!((rmse - 5.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(sd, 2.0);
    }

    #[test]
    fn empty_is_no_data() {
        assert!(matches!(compute_metrics(&[]), Err(Error::NoData)));
    }

    #[test]
    fn rmse_dominates_mae() {
        // deterministic pseudo-random pairs
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let pairs: Vec<(f64, f64)> = (0..25)
                .map(|_| (10.0 + 20.0 * next(), 10.0 + 20.0 * next()))
                .collect();
            let (mae, rmse, _) = compute_metrics(&pairs).unwrap();
            assert!(rmse >= mae - 1e-12);
        }
    }
}
