//! Angular power spectra and the quantities derived from them: kernel
//! views, weighted norms, Hölder constants and regularity exponents.

mod kernel;
mod regularity;
pub(crate) mod series;

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kernel::{
    deriv_norm_spectral, geodesic_distance, kernel_k, kernel_k_i, kernel_k_t,
    weighted_deriv_norm_quadrature, KernelValue, KernelView,
};
pub use regularity::{
    holder_constant, moment_constant, regularity_report, sobolev_equiv_norm, RegularityReport,
};

/// Variances `A_l` of the degree-`l` expansion coefficients.
///
/// `PowerLaw` is `A_l = c (l + 1)^{-alpha}`; it satisfies the decay
/// hypothesis `A_l <= c l^{-alpha}` for every `l >= 1`. `Tabulated` is zero
/// beyond its length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AngularPowerSpectrum {
    PowerLaw { c: f64, alpha: f64 },
    Tabulated { values: Vec<f64> },
}

impl AngularPowerSpectrum {
    pub fn power_law(c: f64, alpha: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidSpectrum(format!("C must be positive, got {c}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidSpectrum(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self::PowerLaw { c, alpha })
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        if let Some((l, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidSpectrum(format!("A_{l} = {v}")));
        }
        Ok(Self::Tabulated { values })
    }

    /// The identically zero spectrum.
    pub fn zero() -> Self {
        Self::Tabulated { values: Vec::new() }
    }

    pub fn value(&self, ell: usize) -> f64 {
        match self {
            Self::PowerLaw { c, alpha } => c * (ell as f64 + 1.0).powf(-alpha),
            Self::Tabulated { values } => values.get(ell).copied().unwrap_or(0.0),
        }
    }

    /// `(C, alpha)` with `A_l <= C l^{-alpha}` for `l >= 1`, if known.
    pub fn decay(&self) -> Option<(f64, f64)> {
        match *self {
            Self::PowerLaw { c, alpha } => Some((c, alpha)),
            Self::Tabulated { .. } => None,
        }
    }

    /// Largest degree with a nonzero entry, for finite spectra.
    pub fn band_limit(&self) -> Option<usize> {
        match self {
            Self::PowerLaw { .. } => None,
            Self::Tabulated { values } => Some(values.iter().rposition(|&v| v > 0.0).unwrap_or(0)),
        }
    }

    /// Restriction to degrees `0..=kappa` as a table.
    pub fn truncated(&self, kappa: usize) -> Self {
        Self::Tabulated {
            values: (0..=kappa).map(|l| self.value(l)).collect(),
        }
    }

    /// `sum_{l >= from} (2l+1) A_l (l (l+1))^{gamma}`, with `0^0 = 1`.
    pub(crate) fn weighted_tail(&self, from: usize, gamma: f64) -> Option<f64> {
        match self {
            Self::PowerLaw { c, alpha } => {
                series::power_weighted_tail(from, gamma, gamma - alpha).map(|s| c * s)
            }
            Self::Tabulated { values } => Some(
                values
                    .iter()
                    .enumerate()
                    .skip(from)
                    .rev()
                    .map(|(l, &a)| {
                        let lf = l as f64;
                        (2.0 * lf + 1.0) * a * (lf * (lf + 1.0)).powf(gamma)
                    })
                    .sum(),
            ),
        }
    }

    /// `trace Q = sum_l (2l + 1) A_l`.
    pub fn trace_q(&self) -> Result<f64> {
        self.weighted_tail(0, 0.0).ok_or_else(|| self.trace_divergence())
    }

    /// `sum_{l > kappa} (2l + 1) A_l`, the mean-square truncation error of
    /// the band-`kappa` field.
    pub fn tail_sum(&self, kappa: usize) -> Result<f64> {
        self.weighted_tail(kappa + 1, 0.0)
            .ok_or_else(|| self.trace_divergence())
    }

    /// Integral-comparison bound on [`tail_sum`](Self::tail_sum) from the
    /// decay hypothesis: `C (2/(alpha-2) + 1/((alpha-1) kappa)) kappa^{-(alpha-2)}`.
    /// Finite spectra return the exact tail.
    pub fn tail_bound(&self, kappa: usize) -> Result<f64> {
        match *self {
            Self::PowerLaw { c, alpha } => {
                if alpha <= 2.0 {
                    return Err(self.trace_divergence());
                }
                if kappa == 0 {
                    return self.tail_sum(0);
                }
                let k = kappa as f64;
                Ok(c * (2.0 / (alpha - 2.0) + 1.0 / ((alpha - 1.0) * k)) * k.powf(-(alpha - 2.0)))
            }
            Self::Tabulated { .. } => self.tail_sum(kappa),
        }
    }

    fn trace_divergence(&self) -> Error {
        match self {
            Self::PowerLaw { alpha, .. } => Error::Divergent(format!(
                "sum (2l+1) A_l needs alpha > 2, got alpha = {alpha}"
            )),
            Self::Tabulated { .. } => Error::Divergent("tabulated spectrum".into()),
        }
    }

    /// Reads a two-column `l,A_l` table; a header line is allowed and
    /// missing degrees are zero.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut values = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!(
                    "row {row}: expected 2 columns, found {}",
                    rec.len()
                )));
            }
            let ell = match rec[0].parse::<usize>() {
                Ok(l) => l,
                Err(_) if row == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("row {row}: degree: {e}"))),
            };
            let a: f64 = rec[1]
                .parse()
                .map_err(|e| Error::Parse(format!("row {row}: A_l: {e}")))?;
            if values.len() <= ell {
                values.resize(ell + 1, 0.0);
            }
            values[ell] = a;
        }
        Self::tabulated(values)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(std::io::BufReader::new(f))
    }
}

/// `4 pi`, the area of the unit sphere.
pub const SPHERE_AREA: f64 = 4.0 * PI;
