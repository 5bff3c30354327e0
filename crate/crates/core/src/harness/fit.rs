use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line `log err = intercept + slope * log kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
}

impl RateFit {
    pub fn predict(&self, kappa: f64) -> f64 {
        (self.intercept + self.slope * kappa.ln()).exp()
    }
}

/// Ordinary least squares on `(ln kappa, ln err)`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "a rate needs at least two rows, got {}",
            points.len()
        )));
    }
    if let Some(&(k, e)) = points.iter().find(|(k, e)| !(*k > 0.0 && *e > 0.0)) {
        return Err(Error::Degenerate(format!(
            "log-log fit needs positive values, got ({k}, {e})"
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all rows share one band limit".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}
