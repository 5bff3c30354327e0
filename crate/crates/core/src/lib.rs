//! Isotropic Gaussian random fields on the unit sphere.
//!
//! Fields are expanded in real spherical harmonics with variances given by an
//! [`AngularPowerSpectrum`]. The crate covers the special functions behind
//! that expansion, kernel and regularity quantities of a spectrum,
//! Karhunen–Loève sampling with nested truncations, the lognormal transform,
//! the stochastic heat equation driven by a `Q`-Wiener process, and the
//! convergence experiments built on top of them.

pub mod error;
pub mod grid;
pub mod harness;
pub mod heat;
pub mod rng;
pub mod sampler;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
pub use grid::{GridKind, GridSpec, SphereGrid};
pub use harness::{
    emit_report, fit_rate, run_experiment, ErrorRow, ErrorTable, ExperimentConfig, ExperimentKind,
    RateFit,
};
pub use heat::{ModeLaw, ModeState, QWienerSpec, TimeGrid};
pub use rng::{variate_index, Component, RngStream};
pub use sampler::{
    draw_coefficients, evaluate_at, export_deformed_mesh, field_norms, grid_norms, lognormal_transform,
    synthesize, CoefficientDraw, FieldSample, GridNorms, PointEvaluator, RawField,
    RealCoefficients, SynthesisPlan,
};
pub use specfun::BandLimit;
pub use spectrum::{AngularPowerSpectrum, KernelValue, KernelView, RegularityReport};
