//! Truncation-error experiments with coupled draws.
//!
//! Every sample is drawn once at `kappa_ref`; the error at `kappa` is the
//! synthesized band `kappa < l <= kappa_ref` of that same draw, so the
//! truncations are exact partial sums of the reference.

mod fit;
mod report;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SphereGrid};
use crate::heat::{evolve, ModeState, QWienerSpec, TimeGrid};
use crate::rng::RngStream;
use crate::sampler::{draw_coefficients, field_norms, GridNorms, RealCoefficients, SynthesisPlan};
use crate::specfun::BandLimit;
use crate::spectrum::AngularPowerSpectrum;

pub use fit::{fit_rate, RateFit};
pub use report::{emit_report, render_csv, render_svg, ReportPaths};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    GrfMs,
    GrfPath,
    HeatMs,
    HeatPath,
}

impl ExperimentKind {
    pub fn is_heat(self) -> bool {
        matches!(self, Self::HeatMs | Self::HeatPath)
    }

    pub fn is_path(self) -> bool {
        matches!(self, Self::GrfPath | Self::HeatPath)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GrfMs => "grf_ms",
            Self::GrfPath => "grf_path",
            Self::HeatMs => "heat_ms",
            Self::HeatPath => "heat_path",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "grf_ms" => Ok(Self::GrfMs),
            "grf_path" => Ok(Self::GrfPath),
            "heat_ms" => Ok(Self::HeatMs),
            "heat_path" => Ok(Self::HeatPath),
            _ => Err(Error::Parse(format!("unknown experiment kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub spectrum: AngularPowerSpectrum,
    pub kappas: Vec<usize>,
    pub kappa_ref: usize,
    pub n_samples: usize,
    pub grid: GridSpec,
    /// Final time and number of uniform steps; heat kinds only.
    pub t_final: f64,
    pub steps: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Power-law spectrum with the reference setup: `kappa_ref = 128`,
    /// `kappa` doubling from 2 to 64, a 64x128 grid, 1000 samples for
    /// mean-square GRF runs, 100 for heat runs, one for paths, `T = 1` in one
    /// step.
    pub fn new(kind: ExperimentKind, c: f64, alpha: f64, seed: u64) -> Result<Self> {
        let n_samples = match kind {
            ExperimentKind::GrfMs => 1000,
            ExperimentKind::HeatMs => 100,
            _ => 1,
        };
        Ok(Self {
            kind,
            spectrum: AngularPowerSpectrum::power_law(c, alpha)?,
            kappas: vec![2, 4, 8, 16, 32, 64],
            kappa_ref: 128,
            n_samples,
            grid: GridSpec::default(),
            t_final: 1.0,
            steps: 1,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.kappas.is_empty() {
            return bad("no band limits given".into());
        }
        if self.kappas.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("band limits {:?} not strictly increasing", self.kappas));
        }
        let max = *self.kappas.last().unwrap();
        if max >= self.kappa_ref {
            return bad(format!(
                "band limit {max} must stay below the reference {}",
                self.kappa_ref
            ));
        }
        if self.n_samples == 0 {
            return bad("at least one sample".into());
        }
        if self.kind.is_path() && self.n_samples != 1 {
            return bad(format!("{} runs exactly one sample", self.kind));
        }
        if self.n_samples > 1 << 32 {
            return bad("sample count exceeds the stream address space".into());
        }
        if self.grid.n_theta == 0 || self.grid.n_phi == 0 {
            return bad(format!("empty grid {}", self.grid));
        }
        if self.kind.is_heat() {
            if !(self.t_final > 0.0 && self.t_final.is_finite()) {
                return bad(format!("final time {} must be positive", self.t_final));
            }
            if self.steps == 0 {
                return bad("at least one time step".into());
            }
        }
        Ok(())
    }

    /// `-(alpha - 2)/2` for fields, `-alpha/2` for the heat equation.
    pub fn theoretical_slope(&self) -> Option<f64> {
        let (_, alpha) = self.spectrum.decay()?;
        Some(if self.kind.is_heat() {
            -alpha / 2.0
        } else {
            -(alpha - 2.0) / 2.0
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub kappa: usize,
    /// Root mean square over samples of the grid maximum error.
    pub err_sup: f64,
    /// Root mean square over samples of the `L^2(S^2)` error.
    pub err_l2: f64,
    /// Standard error of `err_l2` by the delta method; `0` for one sample.
    pub stderr_l2: f64,
    /// Sample mean of the squared `L^2` error and its standard error.
    pub ms_l2: f64,
    pub ms_stderr_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub kind: ExperimentKind,
    pub rows: Vec<ErrorRow>,
    pub fitted_sup: Option<RateFit>,
    pub fitted_l2: Option<RateFit>,
    pub theoretical_slope: Option<f64>,
}

impl ErrorTable {
    fn from_rows(config: &ExperimentConfig, rows: Vec<ErrorRow>) -> Self {
        let fit = |f: fn(&ErrorRow) -> f64| {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.kappa as f64, f(r))).collect();
            fit_rate(&pts).ok()
        };
        Self {
            kind: config.kind,
            fitted_sup: fit(|r| r.err_sup),
            fitted_l2: fit(|r| r.err_l2),
            theoretical_slope: config.theoretical_slope(),
            rows,
        }
    }

    pub fn fitted_slope_sup(&self) -> Option<f64> {
        self.fitted_sup.map(|f| f.slope)
    }

    pub fn fitted_slope_l2(&self) -> Option<f64> {
        self.fitted_l2.map(|f| f.slope)
    }
}

/// Dispatches on `config.kind`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ErrorTable> {
    match config.kind {
        ExperimentKind::GrfMs => run_grf_ms(config),
        ExperimentKind::GrfPath => run_grf_path(config),
        ExperimentKind::HeatMs => run_heat_ms(config),
        ExperimentKind::HeatPath => run_heat_path(config),
    }
}

fn expect_kind(config: &ExperimentConfig, kinds: &[ExperimentKind]) -> Result<()> {
    if !kinds.contains(&config.kind) {
        return Err(Error::InvalidConfig(format!(
            "expected a {} experiment, got {}",
            kinds[0], config.kind
        )));
    }
    config.validate()
}

pub fn run_grf_ms(config: &ExperimentConfig) -> Result<ErrorTable> {
    expect_kind(config, &[ExperimentKind::GrfMs])?;
    run_grf(config)
}

pub fn run_grf_path(config: &ExperimentConfig) -> Result<ErrorTable> {
    expect_kind(config, &[ExperimentKind::GrfPath])?;
    run_grf(config)
}

pub fn run_heat_ms(config: &ExperimentConfig) -> Result<ErrorTable> {
    expect_kind(config, &[ExperimentKind::HeatMs])?;
    run_heat(config)
}

pub fn run_heat_path(config: &ExperimentConfig) -> Result<ErrorTable> {
    expect_kind(config, &[ExperimentKind::HeatPath])?;
    run_heat(config)
}

fn run_grf(config: &ExperimentConfig) -> Result<ErrorTable> {
    let rng = RngStream::new(config.seed);
    let kappa_ref = BandLimit(config.kappa_ref);
    run_coupled(config, |s| {
        draw_coefficients(kappa_ref, &rng, s).scaled(&config.spectrum)
    })
}

fn run_heat(config: &ExperimentConfig) -> Result<ErrorTable> {
    let rng = RngStream::new(config.seed);
    let kappa_ref = BandLimit(config.kappa_ref);
    let qspec = QWienerSpec::new(config.spectrum.clone());
    let times = TimeGrid::uniform(config.t_final, config.steps)?;
    let x0 = ModeState::zeros(kappa_ref);
    run_coupled(config, |s| {
        evolve(&x0, &times, &qspec, &rng, s)
            .expect("initial state matches the time grid")
            .coeffs
    })
}

/// Per-sample tail norms, reduced in sample order.
fn run_coupled(
    config: &ExperimentConfig,
    reference: impl Fn(u64) -> RealCoefficients + Sync,
) -> Result<ErrorTable> {
    let grid = Arc::new(SphereGrid::new(config.grid)?);
    let plan = SynthesisPlan::new(grid, BandLimit(config.kappa_ref));
    let per_sample: Vec<Vec<GridNorms>> = (0..config.n_samples as u64)
        .into_par_iter()
        .map(|s| {
            let coeffs = reference(s);
            config
                .kappas
                .iter()
                .map(|&k| field_norms(&plan.synthesize_band(&coeffs, k + 1..=config.kappa_ref)))
                .collect()
        })
        .collect();

    let n = config.n_samples as f64;
    let rows = config
        .kappas
        .iter()
        .enumerate()
        .map(|(col, &kappa)| {
            let (mut sup2, mut l2sq, mut l2sq2) = (0.0, 0.0, 0.0);
            for sample in &per_sample {
                let e = sample[col];
                sup2 += e.sup * e.sup;
                let q = e.l2 * e.l2;
                l2sq += q;
                l2sq2 += q * q;
            }
            let ms = l2sq / n;
            let ms_stderr = if config.n_samples > 1 {
                let var = ((l2sq2 - n * ms * ms) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            let rms = ms.sqrt();
            ErrorRow {
                kappa,
                err_sup: (sup2 / n).sqrt(),
                err_l2: rms,
                stderr_l2: if rms > 0.0 { ms_stderr / (2.0 * rms) } else { 0.0 },
                ms_l2: ms,
                ms_stderr_l2: ms_stderr,
            }
        })
        .collect();
    Ok(ErrorTable::from_rows(config, rows))
}
