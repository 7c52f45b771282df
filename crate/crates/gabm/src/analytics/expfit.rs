//! Negative-exponential fit of the prevalence-mobility relation.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::world::DecisionRow;

/// `y = scale * exp(-decay * x)`, fitted by least squares on `ln y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub scale: f64,
    pub decay: f64,
    /// Residual sum of squares on the original scale, over the points used
    /// in the fit (those with y > 0).
    pub rss: f64,
}

/// Fit the decay model on the points with positive y; needs at least 3.
pub fn fit_negative_exponential(points: &[(f64, f64)]) -> Result<ExpFit, Error> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| y > 0.0 && x.is_finite() && y.is_finite())
        .collect();
    if usable.len() < 3 {
        return Err(Error::analytics(format!(
            "exponential fit needs at least 3 positive points (got {})",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in &usable {
        let ly = y.ln();
        sx += x;
        sy += ly;
        sxx += x * x;
        sxy += x * ly;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::analytics(
            "exponential fit is undefined: all x values identical",
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let scale = intercept.exp();
    let decay = -slope;
    let rss = usable
        .iter()
        .map(|&(x, y)| {
            let r = y - scale * (-decay * x).exp();
            r * r
        })
        .sum();
    Ok(ExpFit { scale, decay, rss })
}

/// Pool (yesterday's prevalence %, fraction going out) pairs across days and
/// runs, then fit the decay model when possible. Days without a recorded
/// prevalence (non-full-feedback logs) are skipped.
pub fn prevalence_mobility_relation(
    runs: &[Vec<DecisionRow>],
) -> (Vec<(f64, f64)>, Option<ExpFit>) {
    let mut points = Vec::new();
    for rows in runs {
        let mut day_stats: Vec<(u32, f64, u32, u32)> = Vec::new(); // day, prevalence, out, total
        for row in rows {
            let Some(pct) = row.prevalence_pct else {
                continue;
            };
            match day_stats.iter_mut().find(|(d, ..)| *d == row.day) {
                Some((_, _, out, total)) => {
                    *total += 1;
                    if !row.stay_home {
                        *out += 1;
                    }
                }
                None => day_stats.push((row.day, pct, u32::from(!row.stay_home), 1)),
            }
        }
        for (_, pct, out, total) in day_stats {
            points.push((pct, f64::from(out) / f64::from(total)));
        }
    }
    let fit = fit_negative_exponential(&points).ok();
    (points, fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    // synthetic generator oracle: exact data must recover (a, b)
    #[test]
    fn recovers_synthetic_parameters() {
        let points: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let x = f64::from(i) * 0.25;
                (x, 0.9 * (-0.4 * x).exp())
            })
            .collect();
        let fit = fit_negative_exponential(&points).unwrap();
        assert!((fit.scale - 0.9).abs() < 0.02, "a = {}", fit.scale);
        assert!((fit.decay - 0.4).abs() < 0.02, "b = {}", fit.decay);
        assert!(fit.rss < 1e-12);
    }

    #[test]
    fn flat_relation_has_near_zero_decay() {
        let points: Vec<(f64, f64)> = (0..20).map(|i| (f64::from(i) * 0.5, 0.8)).collect();
        let fit = fit_negative_exponential(&points).unwrap();
        assert!(fit.decay.abs() < 1e-12, "b = {}", fit.decay);
        assert!((fit.scale - 0.8).abs() < 1e-12);
    }

    #[test]
    fn too_few_positive_points_is_an_error() {
        let points = vec![(0.0, 0.5), (1.0, 0.0), (2.0, 0.0)];
        assert!(fit_negative_exponential(&points).is_err());
    }
}
