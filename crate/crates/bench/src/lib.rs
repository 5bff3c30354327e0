//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use sgrf_core::{AngularPowerSpectrum, BandLimit, GridSpec, RealCoefficients, RngStream, SphereGrid};

pub const SEED: u64 = 7;

pub fn spectrum(alpha: f64) -> AngularPowerSpectrum {
    AngularPowerSpectrum::power_law(1.0, alpha).expect("valid power law")
}

pub fn grid(n_theta: usize, n_phi: usize) -> Arc<SphereGrid> {
    Arc::new(SphereGrid::new(GridSpec::equiangular(n_theta, n_phi)).expect("valid grid"))
}

/// Scaled coefficients of one draw, so synthesis timings exclude sampling.
pub fn coefficients(kappa: usize, alpha: f64) -> RealCoefficients {
    sgrf_core::draw_coefficients(BandLimit(kappa), &RngStream::new(SEED), 0).scaled(&spectrum(alpha))
}
