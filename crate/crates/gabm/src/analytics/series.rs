//! Series smoothing and cross-replication aggregation bands.

use crate::error::Error;

/// Centered moving average with a window that shrinks at the edges, so the
/// output has the same length as the input. For even windows the extra slot
/// extends to the right.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>, Error> {
    if window == 0 {
        return Err(Error::analytics("moving-average window must be >= 1"));
    }
    let left = (window - 1) / 2;
    let right = window / 2;
    Ok((0..series.len())
        .map(|i| {
            let lo = i.saturating_sub(left);
            let hi = (i + right).min(series.len() - 1);
            let slice = &series[lo..=hi];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect())
}

/// Per-day mean plus an empirical percentile envelope across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Aggregate aligned series across replications at the given coverage level
/// (0.80 keeps the central 80%: the 10th/90th percentile envelope). Shorter
/// runs are right-padded with zeros: once a run has stopped, its days
/// genuinely have zero cases.
pub fn cross_run_band(runs: &[Vec<f64>], level: f64) -> Result<Band, Error> {
    if runs.len() < 2 {
        return Err(Error::analytics(
            "cross-run band needs at least 2 replications",
        ));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::analytics("band level must lie in [0, 1)"));
    }
    let len = runs.iter().map(Vec::len).max().unwrap_or(0);
    let p_low = (1.0 - level) / 2.0;
    let p_high = 1.0 - p_low;

    let mut band = Band {
        mean: Vec::with_capacity(len),
        lower: Vec::with_capacity(len),
        upper: Vec::with_capacity(len),
    };
    let mut column = Vec::with_capacity(runs.len());
    for day in 0..len {
        column.clear();
        column.extend(runs.iter().map(|r| r.get(day).copied().unwrap_or(0.0)));
        band.mean
            .push(column.iter().sum::<f64>() / column.len() as f64);
        column.sort_by(|a, b| a.partial_cmp(b).expect("non-finite series value"));
        band.lower.push(percentile(&column, p_low));
        band.upper.push(percentile(&column, p_high));
    }
    Ok(band)
}

/// Linear-interpolated percentile of a sorted sample (the `p*(n-1)` rank
/// convention).
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_invariant() {
        let out = moving_average(&[2.0, 2.0, 2.0, 2.0], 3).unwrap();
        assert_eq!(out, vec![2.0, 2.0, 2.0, 2.0]);
    }

    // hand-computed centered means with shrinking edges
    #[test]
    fn shrinking_edges_match_hand_computation() {
        let out = moving_average(&[0.0, 3.0, 6.0], 3).unwrap();
        assert_eq!(out, vec![1.5, 3.0, 4.5]);
    }

    #[test]
    fn window_one_is_identity() {
        let s = vec![5.0, -1.0, 2.5];
        assert_eq!(moving_average(&s, 1).unwrap(), s);
    }

    #[test]
    fn window_zero_is_an_argument_error() {
        assert!(moving_average(&[1.0], 0).is_err());
    }

    #[test]
    fn identical_runs_collapse_the_band() {
        let runs: Vec<Vec<f64>> = (0..10).map(|_| vec![1.0, 4.0, 2.0]).collect();
        let band = cross_run_band(&runs, 0.8).unwrap();
        assert_eq!(band.mean, vec![1.0, 4.0, 2.0]);
        assert_eq!(band.lower, band.mean);
        assert_eq!(band.upper, band.mean);
    }

    // percentile oracle on the 1..10 sample: p10 = 1.9, p90 = 9.1 under
    // linear interpolation
    #[test]
    fn interpolated_percentiles_match_the_oracle() {
        let runs: Vec<Vec<f64>> = (1..=10).map(|v| vec![f64::from(v)]).collect();
        let band = cross_run_band(&runs, 0.8).unwrap();
        assert!((band.lower[0] - 1.9).abs() < 1e-12, "{}", band.lower[0]);
        assert!((band.upper[0] - 9.1).abs() < 1e-12, "{}", band.upper[0]);
        assert!((band.mean[0] - 5.5).abs() < 1e-12);
    }

    #[test]
    fn level_zero_returns_the_median_twice() {
        let runs: Vec<Vec<f64>> = (1..=4).map(|v| vec![f64::from(v)]).collect();
        let band = cross_run_band(&runs, 0.0).unwrap();
        assert_eq!(band.lower[0], 2.5);
        assert_eq!(band.upper[0], 2.5);
    }

    #[test]
    fn shorter_runs_are_zero_padded() {
        let runs = vec![vec![2.0, 2.0, 2.0], vec![2.0]];
        let band = cross_run_band(&runs, 0.0).unwrap();
        assert_eq!(band.mean, vec![2.0, 1.0, 1.0]);
    }

    #[test]
    fn band_mean_is_the_arithmetic_mean_to_tolerance() {
        let runs = vec![
            vec![0.1, 0.2, 0.30000000000000004],
            vec![0.3, 0.1, 0.2],
            vec![0.2, 0.3, 0.1],
        ];
        let band = cross_run_band(&runs, 0.8).unwrap();
        for (day, m) in band.mean.iter().enumerate() {
            let exact: f64 = runs.iter().map(|r| r[day]).sum::<f64>() / 3.0;
            assert!((m - exact).abs() < 1e-12);
        }
    }
}
