//! Spectral solver for `dX = Laplace X dt + dW` on the sphere with isotropic
//! `Q`-Wiener noise.
//!
//! Each real coefficient is an Ornstein–Uhlenbeck process with rate
//! `l(l+1)`, so a step of length `h` is exact:
//! `c <- exp(-l(l+1) h) c + gain * N` with `gain = sqrt(A_l) sigma_lh` at
//! `m = 0` and `sqrt(2 A_l) sigma_lh` for `m >= 1`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{GridKind, SphereGrid};
use crate::rng::{Component, RngStream};
use crate::sampler::{draw_coefficients_at_step, FieldSample, RealCoefficients};
use crate::specfun::{assoc_legendre_table, packed_index, BandLimit};
use crate::spectrum::AngularPowerSpectrum;

/// `sigma^2_lh = (1 - exp(-2 l(l+1) h)) / (2 l(l+1))`, and `h` at `l = 0`.
pub fn sigma2(ell: usize, h: f64) -> f64 {
    assert!(h >= 0.0, "negative step {h}");
    if ell == 0 {
        return h;
    }
    let lam = (ell * (ell + 1)) as f64;
    -(-2.0 * lam * h).exp_m1() / (2.0 * lam)
}

/// Covariance of the noise, given by its eigenvalues `A_l`.
///
/// `trace` is `None` when `Q` is not trace class; the solution still has
/// finite variance for any positive decay rate, since `sigma^2_lh ~ l^-2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QWienerSpec {
    pub spectrum: AngularPowerSpectrum,
    pub trace: Option<f64>,
}

impl QWienerSpec {
    pub fn new(spectrum: AngularPowerSpectrum) -> Self {
        let trace = spectrum.trace_q().ok();
        Self { spectrum, trace }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfig("a time grid needs two points".into()));
        }
        if points[0] != 0.0 {
            return Err(Error::InvalidConfig(format!(
                "time grid starts at {}, not 0",
                points[0]
            )));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[1] > w[0] && w[1].is_finite())) {
            return Err(Error::InvalidConfig(format!(
                "time grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { points })
    }

    pub fn uniform(t_final: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidConfig("at least one time step".into()));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidConfig(format!("final time {t_final}")));
        }
        let mut points: Vec<f64> = (0..steps)
            .map(|k| t_final * k as f64 / steps as f64)
            .collect();
        points.push(t_final);
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn t_final(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn n_steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.windows(2).map(|w| w[1] - w[0])
    }
}

/// Coefficients of `X(t)` in the real basis up to band `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub t: f64,
    pub coeffs: RealCoefficients,
}

impl ModeState {
    pub fn zeros(kappa: BandLimit) -> Self {
        Self {
            t: 0.0,
            coeffs: RealCoefficients::zeros(kappa),
        }
    }

    /// Initial state from known coefficients, truncated to `kappa`.
    pub fn from_coefficients(coeffs: &RealCoefficients, kappa: BandLimit) -> Self {
        let coeffs = if coeffs.kappa >= kappa {
            coeffs.truncate(kappa)
        } else {
            let mut padded = RealCoefficients::zeros(kappa);
            padded.values[..coeffs.values.len()].copy_from_slice(&coeffs.values);
            padded
        };
        Self { t: 0.0, coeffs }
    }

    pub fn kappa(&self) -> BandLimit {
        self.coeffs.kappa
    }

    pub fn truncate(&self, kappa: BandLimit) -> Self {
        Self {
            t: self.t,
            coeffs: self.coeffs.truncate(kappa),
        }
    }
}

/// Coefficients of a grid field up to band `kappa` by exact quadrature.
///
/// Needs a Gauss-latitude grid integrating degree `2 kappa` exactly.
pub fn project_initial(field: &FieldSample, kappa: BandLimit) -> Result<ModeState> {
    let grid: &SphereGrid = &field.grid;
    let k = kappa.kappa();
    if grid.spec.kind != GridKind::GaussLatitudes {
        return Err(Error::InsufficientGrid {
            kappa: k,
            reason: "projection needs Gauss latitudes".into(),
        });
    }
    if grid.exact_degree() < 2 * k {
        return Err(Error::InsufficientGrid {
            kappa: k,
            reason: format!(
                "grid {} is exact to degree {}, need {}",
                grid.spec,
                grid.exact_degree(),
                2 * k
            ),
        });
    }
    let n_phi = grid.n_phi();
    let mut c1 = vec![0.0; kappa.n_packed()];
    let mut c2 = vec![0.0; kappa.n_packed()];
    let mut fc = vec![0.0; k + 1];
    let mut fs = vec![0.0; k + 1];
    for (i, &theta) in grid.thetas.iter().enumerate() {
        let row = &field.values[i * n_phi..(i + 1) * n_phi];
        for m in 0..=k {
            let (mut sc, mut ss) = (0.0, 0.0);
            for (&v, &phi) in row.iter().zip(&grid.phis) {
                let (s, c) = (m as f64 * phi).sin_cos();
                sc += v * c;
                ss += v * s;
            }
            fc[m] = sc;
            fs[m] = ss;
        }
        let w = grid.ring_weights[i];
        let table = assoc_legendre_table(k, theta);
        for l in 0..=k {
            for m in 0..=l {
                let p = packed_index(l, m);
                let scale = if m == 0 { w } else { 2.0 * w };
                c1[p] += scale * table[p] * fc[m];
                c2[p] += scale * table[p] * fs[m];
            }
        }
    }
    let mut coeffs = RealCoefficients::zeros(kappa);
    for l in 0..=k {
        coeffs.set(l, 0, Component::First, c1[packed_index(l, 0)]);
        for m in 1..=l {
            coeffs.set(l, m, Component::First, c1[packed_index(l, m)]);
            coeffs.set(l, m, Component::Second, c2[packed_index(l, m)]);
        }
    }
    Ok(ModeState { t: 0.0, coeffs })
}

/// One exact step of length `h`; the noise is read from `(sample, step_index)`.
pub fn step(
    state: &ModeState,
    h: f64,
    qspec: &QWienerSpec,
    rng: &RngStream,
    sample_index: u64,
    step_index: u64,
) -> ModeState {
    assert!(h > 0.0, "step must be positive, got {h}");
    let kappa = state.kappa();
    let noise = draw_coefficients_at_step(kappa, rng, sample_index, step_index);
    let mut values = Vec::with_capacity(state.coeffs.values.len());
    for l in 0..=kappa.kappa() {
        let lam = (l * (l + 1)) as f64;
        let decay = (-lam * h).exp();
        let a = qspec.spectrum.value(l);
        let s = sigma2(l, h).sqrt();
        let g0 = a.sqrt() * s;
        let gm = (2.0 * a).sqrt() * s;
        let range = l * l..(l + 1) * (l + 1);
        let old = &state.coeffs.values[range.clone()];
        let n = &noise.variates[range];
        values.push(decay * old[0] + g0 * n[0]);
        for (c, x) in old[1..].iter().zip(&n[1..]) {
            values.push(decay * c + gm * x);
        }
    }
    ModeState {
        t: state.t + h,
        coeffs: RealCoefficients { kappa, values },
    }
}

/// Folds [`step`] over the grid; step `j` uses noise stream `j`.
pub fn evolve(
    state: &ModeState,
    grid: &TimeGrid,
    qspec: &QWienerSpec,
    rng: &RngStream,
    sample_index: u64,
) -> Result<ModeState> {
    if state.t != grid.points()[0] {
        return Err(Error::InvalidConfig(format!(
            "state at t = {} but grid starts at {}",
            state.t,
            grid.points()[0]
        )));
    }
    let mut s = state.clone();
    for (j, h) in grid.steps().enumerate() {
        s = step(&s, h, qspec, rng, sample_index, j as u64);
    }
    s.t = grid.t_final();
    Ok(s)
}

/// Like [`evolve`], keeping every intermediate state including the first.
pub fn trajectory(
    state: &ModeState,
    grid: &TimeGrid,
    qspec: &QWienerSpec,
    rng: &RngStream,
    sample_index: u64,
) -> Result<Vec<ModeState>> {
    if state.t != grid.points()[0] {
        return Err(Error::InvalidConfig("state and time grid disagree on t_0".into()));
    }
    let mut out = vec![state.clone()];
    for (j, h) in grid.steps().enumerate() {
        let next = step(out.last().unwrap(), h, qspec, rng, sample_index, j as u64);
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeLaw {
    pub mean: f64,
    pub variance: f64,
}

/// Exact law of one real coefficient at time `t` from initial value `x0`.
pub fn exact_mode_law(ell: usize, m: usize, t: f64, qspec: &QWienerSpec, x0: f64) -> ModeLaw {
    let lam = (ell * (ell + 1)) as f64;
    let a = qspec.spectrum.value(ell);
    let scale = if m == 0 { 1.0 } else { 2.0 };
    ModeLaw {
        mean: (-lam * t).exp() * x0,
        variance: scale * a * sigma2(ell, t),
    }
}

/// Rows `t,ell,m,c1,c2`; `c2` is `0` at `m = 0`.
pub fn write_trajectory_csv<W: Write>(states: &[ModeState], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["t", "ell", "m", "c1", "c2"]).map_err(err)?;
    for s in states {
        for l in 0..=s.kappa().kappa() {
            for m in 0..=l {
                w.write_record([
                    s.t.to_string(),
                    l.to_string(),
                    m.to_string(),
                    s.coeffs.c1(l, m).to_string(),
                    s.coeffs.c2(l, m).to_string(),
                ])
                .map_err(err)?;
            }
        }
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}
