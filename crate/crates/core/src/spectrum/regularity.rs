use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{series, AngularPowerSpectrum};
use crate::error::{Error, Result};

/// `C_beta = (2 pi)^{-1} sum_l A_l (2l+1) (l(l+1))^{beta/2}`, the constant in
/// `|k(0) - k(r)| <= C_beta r^beta`.
pub fn holder_constant(spectrum: &AngularPowerSpectrum, beta: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&beta) {
        return Err(Error::InvalidConfig(format!(
            "Hölder constant needs beta in [0, 2], got {beta}"
        )));
    }
    let sum = spectrum.weighted_tail(0, 0.5 * beta).ok_or_else(|| {
        let alpha = spectrum.decay().map(|(_, a)| a).unwrap_or(f64::NAN);
        Error::Divergent(format!(
            "sum A_l l^(1+beta) needs beta < alpha - 2 = {}, got beta = {beta}",
            alpha - 2.0
        ))
    })?;
    Ok(sum / (2.0 * PI))
}

/// Bound constant `2 c_{2p} C_beta^p` on `E|T(x) - T(y)|^{2p} / d(x,y)^{beta p}`,
/// with `c_{2p} = (2p - 1)!!` the `2p`-th standard normal moment.
pub fn moment_constant(spectrum: &AngularPowerSpectrum, beta: f64, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidConfig("moment order p must be positive".into()));
    }
    let c_beta = holder_constant(spectrum, beta)?;
    let double_factorial: f64 = (1..=p).map(|k| (2 * k - 1) as f64).product();
    Ok(2.0 * double_factorial * c_beta.powi(p as i32))
}

/// Equivalent weighted-Sobolev norm
/// `sum_l u_l^2 (2l+1)/2 (1 + l^{2 eta})` with `u_l = A_l / (2 pi)`.
///
/// `l^{2 eta}` at `l = 0` is `0` for `eta > 0` and `1` for `eta = 0`.
/// Returns `f64::INFINITY` when the series diverges.
pub fn sobolev_equiv_norm(spectrum: &AngularPowerSpectrum, eta: f64) -> f64 {
    assert!(eta >= 0.0, "eta must be nonnegative");
    match spectrum {
        AngularPowerSpectrum::PowerLaw { c, alpha } => {
            let base = series::power_weighted_tail(0, 0.0, -2.0 * alpha);
            let weighted = series::power_weighted_tail(0, 2.0 * eta, -2.0 * alpha);
            match (base, weighted) {
                (Some(a), Some(b)) => c * c / (4.0 * PI * PI) * 0.5 * (a + b),
                _ => f64::INFINITY,
            }
        }
        AngularPowerSpectrum::Tabulated { values } => values
            .iter()
            .enumerate()
            .map(|(l, &a)| {
                let u = a / (2.0 * PI);
                let lf = l as f64;
                u * u * (2.0 * lf + 1.0) / 2.0 * (1.0 + lf.powf(2.0 * eta))
            })
            .sum(),
    }
}

/// Sample-regularity exponents implied by a spectrum. `None` marks an
/// unbounded exponent (finite spectra give smooth fields).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub alpha: Option<f64>,
    pub band_limited: bool,
    /// Supremum of `beta` with `sum A_l l^{1+beta} < inf`; not attained.
    pub beta_sup: Option<f64>,
    /// Whether a continuous modification is guaranteed.
    pub continuous_modification: bool,
    /// Supremum Hölder exponent of the field itself (at most 1).
    pub holder_sup: Option<f64>,
    /// Supremum `gamma` with samples in `C^gamma`, i.e. `beta_sup / 2`.
    pub smoothness_sup: Option<f64>,
    /// `k = ceil(beta_sup / 2) - 1` continuous derivatives.
    pub diff_order: Option<u32>,
    /// Supremum Hölder exponent of the `k`-th derivatives.
    pub derivative_holder_sup: Option<f64>,
    /// Supremum Hölder exponent of `exp(T)`.
    pub lognormal_holder_sup: Option<f64>,
}

pub fn regularity_report(spectrum: &AngularPowerSpectrum) -> RegularityReport {
    match *spectrum {
        AngularPowerSpectrum::PowerLaw { alpha, .. } => {
            let beta_sup = (alpha - 2.0).max(0.0);
            let continuous = beta_sup > 0.0;
            let smooth = beta_sup / 2.0;
            let diff_order = if continuous {
                (smooth.ceil() as u32).saturating_sub(1)
            } else {
                0
            };
            RegularityReport {
                alpha: Some(alpha),
                band_limited: false,
                beta_sup: Some(beta_sup),
                continuous_modification: continuous,
                holder_sup: Some(smooth.min(1.0)),
                smoothness_sup: Some(smooth),
                diff_order: Some(diff_order),
                derivative_holder_sup: Some(smooth - diff_order as f64),
                lognormal_holder_sup: Some(smooth.min(1.0)),
            }
        }
        AngularPowerSpectrum::Tabulated { .. } => RegularityReport {
            alpha: None,
            band_limited: true,
            beta_sup: None,
            continuous_modification: true,
            holder_sup: Some(1.0),
            smoothness_sup: None,
            diff_order: None,
            derivative_holder_sup: None,
            lognormal_holder_sup: Some(1.0),
        },
    }
}

impl RegularityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
