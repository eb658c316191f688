//! Derived statistics: pooled welfare, action-profile frequencies, exit
//! probabilities and phase durations, and the conditional frequency curve
//! Pr(delta2 > 0 | delta1).
//!
//! Everything here is a pure function over immutable path results or traces.

use serde::{Deserialize, Serialize};

use crate::engine::{ExitDetector, ExitDirection, PathResult, Trace};
use crate::error::QbError;

/// Mean per-agent reward over the configured window, pooled over paths.
pub fn pooled_mean_welfare(paths: &[PathResult]) -> Result<Vec<f64>, QbError> {
    if paths.is_empty() {
        return Err(QbError::Usage("no paths to pool".into()));
    }
    let agents = paths[0].mean_reward.len();
    let mut pooled = vec![0.0; agents];
    for path in paths {
        for (sum, &m) in pooled.iter_mut().zip(&path.mean_reward) {
            *sum += m;
        }
    }
    Ok(pooled.into_iter().map(|s| s / paths.len() as f64).collect())
}

/// Grand mean over agents of the pooled welfare.
pub fn pooled_mean_welfare_scalar(paths: &[PathResult]) -> Result<f64, QbError> {
    let per_agent = pooled_mean_welfare(paths)?;
    Ok(per_agent.iter().sum::<f64>() / per_agent.len() as f64)
}

/// Standard error of the pooled (agent-averaged) welfare across paths.
pub fn pooled_welfare_std_error(paths: &[PathResult]) -> f64 {
    let n = paths.len();
    if n < 2 {
        return f64::NAN;
    }
    let means: Vec<f64> = paths
        .iter()
        .map(|p| p.mean_reward.iter().sum::<f64>() / p.mean_reward.len() as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / n as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Joint-action frequencies pooled over paths; sums to 1.
pub fn profile_frequencies(paths: &[PathResult]) -> Result<Vec<f64>, QbError> {
    if paths.is_empty() {
        return Err(QbError::Usage("no paths to pool".into()));
    }
    let len = paths[0].profile_counts.len();
    let mut counts = vec![0u64; len];
    for path in paths {
        for (sum, &c) in counts.iter_mut().zip(&path.profile_counts) {
            *sum += c;
        }
    }
    let total: u64 = counts.iter().sum();
    Ok(counts.into_iter().map(|c| c as f64 / total as f64).collect())
}

/// Fraction of paths with a finite exit in the given direction; censored
/// paths count as no-exit.
pub fn exit_fraction(paths: &[PathResult], direction: ExitDirection) -> f64 {
    let hits = paths
        .iter()
        .filter(|p| match direction {
            ExitDirection::ToCooperation => p.exit_to_cooperation.is_some(),
            ExitDirection::ToDefection => p.exit_to_defection.is_some(),
        })
        .count();
    hits as f64 / paths.len() as f64
}

/// First period opening two consecutive periods where every agent's delta
/// has the required sign, or `None` within the horizon.
pub fn exit_time(delta_series: &[Vec<f64>], direction: ExitDirection) -> Option<u64> {
    let horizon = delta_series.first().map_or(0, Vec::len);
    let mut detector = ExitDetector::new(direction);
    let mut deltas = vec![0.0; delta_series.len()];
    for t in 0..horizon {
        for (d, series) in deltas.iter_mut().zip(delta_series) {
            *d = series[t];
        }
        detector.observe(t as u64, &deltas);
    }
    detector.exit_time()
}

/// Median of exit times where censored paths (`None`) order as +infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MedianDuration {
    Finite(f64),
    /// More than half the paths never exited within the horizon.
    Censored,
}

pub fn median_duration(times: &[Option<u64>]) -> MedianDuration {
    assert!(!times.is_empty());
    let mut sorted: Vec<Option<u64>> = times.to_vec();
    // None sorts last, acting as +infinity.
    sorted.sort_by_key(|t| t.map_or(u64::MAX, |v| v));
    let n = sorted.len();
    let at = |i: usize| sorted[i].map(|v| v as f64);
    if n % 2 == 1 {
        match at(n / 2) {
            Some(v) => MedianDuration::Finite(v),
            None => MedianDuration::Censored,
        }
    } else {
        match (at(n / 2 - 1), at(n / 2)) {
            (Some(a), Some(b)) => MedianDuration::Finite((a + b) / 2.0),
            _ => MedianDuration::Censored,
        }
    }
}

/// Binning parameters for the conditional frequency curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    /// Bin width; bin k covers (k*width, k*width + width).
    pub bin_width: f64,
    /// Bins with fewer observations are suppressed.
    pub min_count: usize,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self { bin_width: 0.005, min_count: 500 }
    }
}

/// One retained bin of the conditional frequency curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBin {
    pub k: i64,
    /// Lower edge of the bin, `k * bin_width`.
    pub delta_lo: f64,
    pub count: usize,
    /// Fraction of in-bin periods with delta2 > 0.
    pub frequency: f64,
}

/// Empirical frequency of delta2 > 0 conditional on the bin of delta1:
/// f_k = #{t: delta1 in I_k and delta2 > 0} / #{t: delta1 in I_k}.
pub fn conditional_frequency_curve(
    delta1: &[f64],
    delta2: &[f64],
    spec: &HistogramSpec,
) -> Result<Vec<FrequencyBin>, QbError> {
    if spec.bin_width <= 0.0 || spec.min_count < 1 {
        return Err(QbError::InvalidParameter(
            "bin width must be positive and min count >= 1".into(),
        ));
    }
    if delta1.len() != delta2.len() {
        return Err(QbError::Usage("delta series lengths differ".into()));
    }
    use std::collections::BTreeMap;
    let mut bins: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for (&d1, &d2) in delta1.iter().zip(delta2) {
        let k = (d1 / spec.bin_width).floor() as i64;
        let entry = bins.entry(k).or_default();
        entry.0 += 1;
        if d2 > 0.0 {
            entry.1 += 1;
        }
    }
    Ok(bins
        .into_iter()
        .filter(|(_, (count, _))| *count >= spec.min_count)
        .map(|(k, (count, positive))| FrequencyBin {
            k,
            delta_lo: k as f64 * spec.bin_width,
            count,
            frequency: positive as f64 / count as f64,
        })
        .collect())
}

/// Curve over pooled 2-agent traces.
pub fn conditional_frequency_curve_from_traces(
    traces: &[Trace],
    spec: &HistogramSpec,
) -> Result<Vec<FrequencyBin>, QbError> {
    let mut delta1 = Vec::new();
    let mut delta2 = Vec::new();
    for trace in traces {
        for record in &trace.records {
            if record.delta.len() != 2 {
                return Err(QbError::Usage("conditional curve needs 2-agent traces".into()));
            }
            delta1.push(record.delta[0]);
            delta2.push(record.delta[1]);
        }
    }
    conditional_frequency_curve(&delta1, &delta2, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::AgentSpec;
    use crate::engine::{run_batch, SimConfig};
    use crate::env::{Environment, PdGame};
    use approx::assert_relative_eq;

    #[test]
    fn constant_reward_welfare_is_exact() {
        let paths = vec![PathResult {
            path_index: 0,
            master_seed: 0,
            mean_reward: vec![1.0, 1.0],
            full_mean_reward: vec![1.0, 1.0],
            profile_counts: vec![0, 0, 0, 10],
            exit_to_cooperation: None,
            exit_to_defection: None,
        }];
        assert_eq!(pooled_mean_welfare(&paths).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn empty_pool_is_usage_error() {
        assert!(pooled_mean_welfare(&[]).is_err());
    }

    #[test]
    fn frequencies_sum_to_one() {
        let env = Environment::PrisonersDilemma { game: PdGame::new(2.5, -0.5), channel: None };
        let specs = vec![AgentSpec::two_action(0.5, 0.1, 0.95, 0.0); 2];
        let config = SimConfig::new(5_000, 8, vec![vec![0.95, 1.0]; 2], 21);
        let batch = run_batch(&env, &specs, &config).unwrap();
        let freq = profile_frequencies(&batch.paths).unwrap();
        assert!((freq.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_play_gives_quarter_frequencies() {
        let env = Environment::PrisonersDilemma { game: PdGame::new(2.5, -0.5), channel: None };
        let specs = vec![AgentSpec::two_action(0.5, 1.0, 0.95, 0.0); 2];
        let config = SimConfig::new(40_000, 4, vec![vec![0.95, 1.0]; 2], 33);
        let batch = run_batch(&env, &specs, &config).unwrap();
        for f in profile_frequencies(&batch.paths).unwrap() {
            assert!((f - 0.25).abs() < 0.01, "f = {f}");
        }
    }

    #[test]
    fn exit_time_synthetic_series() {
        let d1 = vec![-1.0, -1.0, 0.5, 0.5, 0.5];
        let d2 = vec![-1.0, -1.0, 0.1, 0.2, 0.3];
        assert_eq!(exit_time(&[d1.clone(), d2.clone()], ExitDirection::ToCooperation), Some(2));
        assert_eq!(exit_time(&[d1, d2], ExitDirection::ToDefection), Some(0));
    }

    #[test]
    fn exit_time_truncation_monotone() {
        let d1 = vec![-1.0; 50]
            .into_iter()
            .chain(vec![1.0; 10])
            .collect::<Vec<_>>();
        let d2 = d1.clone();
        let exit = exit_time(&[d1.clone(), d2.clone()], ExitDirection::ToCooperation).unwrap();
        let truncated: Vec<Vec<f64>> = vec![
            d1[..exit as usize].to_vec(),
            d2[..exit as usize].to_vec(),
        ];
        assert_eq!(exit_time(&truncated, ExitDirection::ToCooperation), None);
    }

    #[test]
    fn median_examples() {
        assert_eq!(
            median_duration(&[Some(3), Some(1), Some(2)]),
            MedianDuration::Finite(2.0)
        );
        assert_eq!(
            median_duration(&[Some(1), Some(2), Some(3), Some(4)]),
            MedianDuration::Finite(2.5)
        );
        assert_eq!(
            median_duration(&[Some(1), None, None]),
            MedianDuration::Censored
        );
        // Censored values order as +infinity but don't block an odd median.
        assert_eq!(
            median_duration(&[Some(5), Some(7), None]),
            MedianDuration::Finite(7.0)
        );
    }

    #[test]
    fn curve_with_always_positive_delta2() {
        let delta1: Vec<f64> = (0..3000).map(|i| (i % 30) as f64 * 0.001).collect();
        let delta2 = vec![1.0; 3000];
        let spec = HistogramSpec { bin_width: 0.005, min_count: 100 };
        let curve = conditional_frequency_curve(&delta1, &delta2, &spec).unwrap();
        assert!(!curve.is_empty());
        for bin in curve {
            assert_eq!(bin.frequency, 1.0);
            assert!(bin.count >= 100);
        }
    }

    #[test]
    fn curve_frequencies_in_unit_interval() {
        let delta1: Vec<f64> = (0..10_000).map(|i| ((i * 37) % 100) as f64 * 0.001 - 0.05).collect();
        let delta2: Vec<f64> = (0..10_000).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let curve =
            conditional_frequency_curve(&delta1, &delta2, &HistogramSpec::default()).unwrap();
        for bin in curve {
            assert!((0.0..=1.0).contains(&bin.frequency));
            assert!(bin.count >= 500);
        }
    }

    #[test]
    fn welfare_tracks_cooperation_share_when_x_plus_y_is_two() {
        // With x + y = 2 and symmetric specs, pooled welfare = 1 + freq(CC).
        let env = Environment::PrisonersDilemma { game: PdGame::new(2.5, -0.5), channel: None };
        let specs = vec![AgentSpec::two_action(0.5, 0.1, 0.95, 0.0); 2];
        let config = SimConfig::new(10_000, 30, vec![vec![0.95, 1.0]; 2], 99);
        let batch = run_batch(&env, &specs, &config).unwrap();
        let welfare = pooled_mean_welfare_scalar(&batch.paths).unwrap();
        let freq = profile_frequencies(&batch.paths).unwrap();
        assert_relative_eq!(welfare, 1.0 + freq[0], epsilon = 1e-9);
    }
}
