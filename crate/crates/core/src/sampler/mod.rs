//! Karhunen–Loève sampling: coefficient draws, synthesis on sphere grids,
//! the lognormal transform, grid norms and file output.
//!
//! A field of band `kappa` is
//!
//! ```text
//! T(theta, phi) = sum_{l <= kappa} [ c1_l0 L_l0(theta)
//!               + sum_{m=1}^{l} L_lm(theta) (c1_lm cos(m phi) + c2_lm sin(m phi)) ]
//! ```
//!
//! with `c1_l0 = sqrt(A_l) X1_l0` and `c{1,2}_lm = sqrt(2 A_l) X{1,2}_lm` for
//! standard normal `X`.

mod io;
mod mesh;

use std::ops::RangeInclusive;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::SphereGrid;
use crate::rng::{variate_index, Component, RngStream};
use crate::specfun::{assoc_legendre_table, fill_assoc_legendre, packed_index, BandLimit};
use crate::spectrum::AngularPowerSpectrum;

pub use io::RawField;
pub use mesh::{export_deformed_mesh, write_deformed_mesh};

/// Real coefficients in the `L_lm cos / L_lm sin` basis, stored in
/// [`variate_index`] order (`(kappa + 1)^2` values).
#[derive(Debug, Clone, PartialEq)]
pub struct RealCoefficients {
    pub kappa: BandLimit,
    pub values: Vec<f64>,
}

impl RealCoefficients {
    pub fn zeros(kappa: BandLimit) -> Self {
        Self {
            kappa,
            values: vec![0.0; kappa.n_real_coeffs()],
        }
    }

    pub fn get(&self, ell: usize, m: usize, component: Component) -> f64 {
        self.values[variate_index(ell, m, component)]
    }

    pub fn set(&mut self, ell: usize, m: usize, component: Component, v: f64) {
        self.values[variate_index(ell, m, component)] = v;
    }

    /// The first-component coefficient; the second one at `m = 0` is zero.
    pub fn c1(&self, ell: usize, m: usize) -> f64 {
        self.get(ell, m, Component::First)
    }

    pub fn c2(&self, ell: usize, m: usize) -> f64 {
        if m == 0 {
            0.0
        } else {
            self.get(ell, m, Component::Second)
        }
    }

    /// Prefix up to band `kappa`.
    pub fn truncate(&self, kappa: BandLimit) -> Self {
        assert!(kappa <= self.kappa, "cannot extend by truncation");
        Self {
            kappa,
            values: self.values[..kappa.n_real_coeffs()].to_vec(),
        }
    }

    /// `||f||^2_{L^2(S^2)}` of the represented function: `c_l0^2` plus
    /// `(c1^2 + c2^2) / 2` for `m >= 1`.
    pub fn l2_norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for l in 0..=self.kappa.kappa() {
            s += self.c1(l, 0).powi(2);
            for m in 1..=l {
                s += 0.5 * (self.c1(l, m).powi(2) + self.c2(l, m).powi(2));
            }
        }
        s
    }

    /// Visits `(l, m, component, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Component, f64)> + '_ {
        (0..=self.kappa.kappa()).flat_map(move |l| {
            std::iter::once((l, 0, Component::First)).chain((1..=l).flat_map(move |m| {
                [(l, m, Component::First), (l, m, Component::Second)]
            }))
            .map(move |(l, m, c)| (l, m, c, self.get(l, m, c)))
        })
    }
}

/// Standard normal `X1_lm` (`0 <= m <= l`) and `X2_lm` (`m >= 1`) up to band
/// `kappa`; a draw at a smaller band is exactly a prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientDraw {
    pub kappa: BandLimit,
    pub variates: Vec<f64>,
}

impl CoefficientDraw {
    pub fn len(&self) -> usize {
        self.variates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variates.is_empty()
    }

    pub fn x1(&self, ell: usize, m: usize) -> f64 {
        self.variates[variate_index(ell, m, Component::First)]
    }

    pub fn x2(&self, ell: usize, m: usize) -> f64 {
        self.variates[variate_index(ell, m, Component::Second)]
    }

    pub fn truncate(&self, kappa: BandLimit) -> Self {
        assert!(kappa <= self.kappa, "cannot extend by truncation");
        Self {
            kappa,
            variates: self.variates[..kappa.n_real_coeffs()].to_vec(),
        }
    }

    /// KL coefficients `sqrt(A_l) X1_l0`, `sqrt(2 A_l) X_lm`.
    pub fn scaled(&self, spectrum: &AngularPowerSpectrum) -> RealCoefficients {
        scale_by_spectrum(&self.variates, self.kappa, |l| spectrum.value(l))
    }
}

pub(crate) fn scale_by_spectrum(
    variates: &[f64],
    kappa: BandLimit,
    variance: impl Fn(usize) -> f64,
) -> RealCoefficients {
    let mut values = Vec::with_capacity(kappa.n_real_coeffs());
    for l in 0..=kappa.kappa() {
        let a = variance(l);
        let g0 = a.sqrt();
        let gm = (2.0 * a).sqrt();
        let block = &variates[l * l..(l + 1) * (l + 1)];
        values.push(g0 * block[0]);
        values.extend(block[1..].iter().map(|x| gm * x));
    }
    RealCoefficients { kappa, values }
}

pub fn draw_coefficients(kappa: BandLimit, rng: &RngStream, sample_index: u64) -> CoefficientDraw {
    draw_coefficients_at_step(kappa, rng, sample_index, 0)
}

pub(crate) fn draw_coefficients_at_step(
    kappa: BandLimit,
    rng: &RngStream,
    sample_index: u64,
    step: u64,
) -> CoefficientDraw {
    CoefficientDraw {
        kappa,
        variates: rng.fill(sample_index, step, kappa.n_real_coeffs()),
    }
}

/// Real field values on a grid, row-major in `(theta_i, phi_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub grid: Arc<SphereGrid>,
    pub values: Vec<f64>,
}

impl FieldSample {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidConfig(format!(
                "{} values for a {} grid",
                values.len(),
                grid.spec
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<SphereGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<SphereGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &t in &grid.thetas {
            for &p in &grid.phis {
                values.push(f(t, p));
            }
        }
        Self { grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_phi() + j]
    }
}

/// Grid-dependent tables reused across many syntheses on one grid:
/// normalized Legendre values per latitude (order-major) and `cos(m phi)`,
/// `sin(m phi)` per longitude.
#[derive(Debug, Clone)]
pub struct SynthesisPlan {
    grid: Arc<SphereGrid>,
    kappa: usize,
    // per theta: for m in 0..=kappa, l in m..=kappa
    legendre: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

#[inline]
fn order_offset(kappa: usize, m: usize) -> usize {
    // orders j < m hold kappa + 1 - j degrees each
    m * (kappa + 1) - m * m.saturating_sub(1) / 2
}

impl SynthesisPlan {
    pub fn new(grid: Arc<SphereGrid>, kappa: BandLimit) -> Self {
        let kappa = kappa.kappa();
        let block = BandLimit(kappa).n_packed();
        let mut legendre = vec![0.0; grid.n_theta() * block];
        let mut scratch = vec![0.0; block];
        for (i, &theta) in grid.thetas.iter().enumerate() {
            fill_assoc_legendre(kappa, theta, &mut scratch);
            let row = &mut legendre[i * block..(i + 1) * block];
            let mut k = 0;
            for m in 0..=kappa {
                for l in m..=kappa {
                    row[k] = scratch[packed_index(l, m)];
                    k += 1;
                }
            }
        }
        let n_phi = grid.n_phi();
        let mut cos = vec![0.0; n_phi * (kappa + 1)];
        let mut sin = vec![0.0; n_phi * (kappa + 1)];
        for (j, &phi) in grid.phis.iter().enumerate() {
            for m in 0..=kappa {
                let (s, c) = (m as f64 * phi).sin_cos();
                cos[j * (kappa + 1) + m] = c;
                sin[j * (kappa + 1) + m] = s;
            }
        }
        Self {
            grid,
            kappa,
            legendre,
            cos,
            sin,
        }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn kappa(&self) -> BandLimit {
        BandLimit(self.kappa)
    }

    /// Field of the degrees in `band` only, for coefficients of any band
    /// covering `band.end()`.
    pub fn synthesize_band(
        &self,
        coeffs: &RealCoefficients,
        band: RangeInclusive<usize>,
    ) -> FieldSample {
        let mut values = vec![0.0; self.grid.len()];
        let order = OrderMajor::new(coeffs, *band.end());
        let n_phi = self.grid.n_phi();
        for (i, row) in values.chunks_mut(n_phi).enumerate() {
            self.fill_row(i, &order, band.clone(), row);
        }
        FieldSample {
            grid: self.grid.clone(),
            values,
        }
    }

    /// As [`synthesize_band`](Self::synthesize_band), latitude rows in parallel.
    pub fn par_synthesize_band(
        &self,
        coeffs: &RealCoefficients,
        band: RangeInclusive<usize>,
    ) -> FieldSample {
        let mut values = vec![0.0; self.grid.len()];
        let order = OrderMajor::new(coeffs, *band.end());
        let n_phi = self.grid.n_phi();
        values
            .par_chunks_mut(n_phi)
            .enumerate()
            .for_each(|(i, row)| self.fill_row(i, &order, band.clone(), row));
        FieldSample {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn synthesize(&self, coeffs: &RealCoefficients) -> FieldSample {
        self.synthesize_band(coeffs, 0..=coeffs.kappa.kappa())
    }

    fn fill_row(&self, i: usize, order: &OrderMajor, band: RangeInclusive<usize>, row: &mut [f64]) {
        let (lo, hi) = (*band.start(), *band.end());
        assert!(hi <= self.kappa, "band {hi} exceeds plan band {}", self.kappa);
        let block = BandLimit(self.kappa).n_packed();
        let table = &self.legendre[i * block..(i + 1) * block];
        // per-order accumulators, ascending l
        let mut a = vec![0.0; hi + 1];
        let mut b = vec![0.0; hi + 1];
        for m in 0..=hi {
            let start = lo.max(m);
            if start > hi {
                continue;
            }
            let base = order_offset(self.kappa, m);
            let lg = &table[base + (start - m)..=base + (hi - m)];
            let (c1, c2) = order.column(m);
            let c1 = &c1[start - m..=hi - m];
            let mut acc = 0.0;
            for (p, c) in lg.iter().zip(c1) {
                acc += p * c;
            }
            a[m] = acc;
            if m > 0 {
                let c2 = &c2[start - m..=hi - m];
                let mut acc = 0.0;
                for (p, c) in lg.iter().zip(c2) {
                    acc += p * c;
                }
                b[m] = acc;
            }
        }
        let stride = self.kappa + 1;
        for (j, out) in row.iter_mut().enumerate() {
            let cs = &self.cos[j * stride..j * stride + hi + 1];
            let sn = &self.sin[j * stride..j * stride + hi + 1];
            let mut v = a[0];
            for m in 1..=hi {
                v += a[m] * cs[m] + b[m] * sn[m];
            }
            *out = v;
        }
    }
}

/// Coefficients regrouped by order: for each `m`, `l = m..=kappa` contiguous.
struct OrderMajor {
    kappa: usize,
    c1: Vec<f64>,
    c2: Vec<f64>,
}

impl OrderMajor {
    fn new(coeffs: &RealCoefficients, kappa: usize) -> Self {
        assert!(kappa <= coeffs.kappa.kappa(), "coefficients stop at band {}", coeffs.kappa.kappa());
        let n = BandLimit(kappa).n_packed();
        let mut c1 = Vec::with_capacity(n);
        let mut c2 = Vec::with_capacity(n);
        for m in 0..=kappa {
            for l in m..=kappa {
                c1.push(coeffs.c1(l, m));
                c2.push(coeffs.c2(l, m));
            }
        }
        Self { kappa, c1, c2 }
    }

    fn column(&self, m: usize) -> (&[f64], &[f64]) {
        let base = order_offset(self.kappa, m);
        let len = self.kappa + 1 - m;
        (&self.c1[base..base + len], &self.c2[base..base + len])
    }
}

/// `T^kappa` on a grid from a draw and its spectrum.
pub fn synthesize(
    draw: &CoefficientDraw,
    spectrum: &AngularPowerSpectrum,
    grid: &Arc<SphereGrid>,
) -> FieldSample {
    let coeffs = draw.scaled(spectrum);
    SynthesisPlan::new(grid.clone(), draw.kappa).par_synthesize_band(&coeffs, 0..=draw.kappa.kappa())
}

/// Field value at a single point.
pub fn evaluate_at(coeffs: &RealCoefficients, theta: f64, phi: f64) -> f64 {
    PointEvaluator::new(theta, phi, coeffs.kappa).evaluate(coeffs)
}

/// Basis values at one point, for repeated evaluation of many coefficient sets.
#[derive(Debug, Clone)]
pub struct PointEvaluator {
    basis: Vec<f64>,
}

impl PointEvaluator {
    pub fn new(theta: f64, phi: f64, kappa: BandLimit) -> Self {
        let table = assoc_legendre_table(kappa.kappa(), theta);
        let mut basis = Vec::with_capacity(kappa.n_real_coeffs());
        for l in 0..=kappa.kappa() {
            basis.push(table[packed_index(l, 0)]);
            for m in 1..=l {
                let (s, c) = (m as f64 * phi).sin_cos();
                let p = table[packed_index(l, m)];
                basis.push(p * c);
                basis.push(p * s);
            }
        }
        Self { basis }
    }

    pub fn evaluate(&self, coeffs: &RealCoefficients) -> f64 {
        self.basis.iter().zip(&coeffs.values).map(|(b, c)| b * c).sum()
    }
}

/// Pointwise `exp`; values above 700 are rejected as overflowing.
pub fn lognormal_transform(field: &FieldSample) -> Result<FieldSample> {
    let n_phi = field.grid.n_phi();
    if let Some(k) = field.values.iter().position(|&v| v > 700.0) {
        return Err(Error::Overflow {
            i: k / n_phi,
            j: k % n_phi,
            value: field.values[k],
        });
    }
    Ok(FieldSample {
        grid: field.grid.clone(),
        values: field.values.iter().map(|v| v.exp()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNorms {
    pub l2: f64,
    pub sup: f64,
}

/// Quadrature `L^2(S^2)` norm and grid maximum of `a - b`.
pub fn grid_norms(a: &FieldSample, b: &FieldSample) -> Result<GridNorms> {
    if a.grid.spec != b.grid.spec {
        return Err(Error::GridMismatch);
    }
    Ok(norms(&a.grid, a.values.iter().zip(&b.values).map(|(x, y)| x - y)))
}

/// Norms of a single field, i.e. its distance to zero.
pub fn field_norms(f: &FieldSample) -> GridNorms {
    norms(&f.grid, f.values.iter().copied())
}

fn norms(grid: &SphereGrid, values: impl Iterator<Item = f64>) -> GridNorms {
    let n_phi = grid.n_phi();
    let mut l2 = 0.0;
    let mut ring = 0.0;
    let mut sup = 0.0f64;
    for (k, d) in values.enumerate() {
        ring += d * d;
        sup = sup.max(d.abs());
        if (k + 1) % n_phi == 0 {
            l2 += grid.ring_weights[k / n_phi] * ring;
            ring = 0.0;
        }
    }
    GridNorms {
        l2: l2.sqrt(),
        sup,
    }
}
