use super::{AngularPowerSpectrum, SPHERE_AREA};
use crate::error::{Error, Result};
use crate::specfun::{jacobi_p_all, legendre_p_all, BandLimit, QuadratureRule};

/// Partial kernel sum together with a rigorous bound on the dropped tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// The covariance kernel of an isotropic field, band-limited for evaluation.
///
/// `tail_bound` is `sum_{l > band} (2l+1) A_l / (4 pi)`; since `|P_l| <= 1`
/// it bounds the error of every partial sum this view returns.
#[derive(Debug, Clone)]
pub struct KernelView {
    pub spectrum: AngularPowerSpectrum,
    pub eval_band: BandLimit,
    pub tail_bound: f64,
    // A_l (2l+1) / (4 pi) for l <= band
    weights: Vec<f64>,
}

impl KernelView {
    pub fn new(spectrum: AngularPowerSpectrum, band: BandLimit) -> Result<Self> {
        let tail_bound = spectrum.tail_sum(band.kappa())? / SPHERE_AREA;
        let weights = (0..=band.kappa())
            .map(|l| spectrum.value(l) * (2.0 * l as f64 + 1.0) / SPHERE_AREA)
            .collect();
        Ok(Self {
            spectrum,
            eval_band: band,
            tail_bound,
            weights,
        })
    }

    /// `k_I(mu) = sum_l A_l (2l+1)/(4 pi) P_l(mu)`.
    pub fn k_i(&self, mu: f64) -> Result<KernelValue> {
        let p = legendre_p_all(self.eval_band.kappa(), mu)?;
        let value = self
            .weights
            .iter()
            .zip(&p)
            .rev()
            .map(|(w, p)| w * p)
            .sum();
        Ok(KernelValue {
            value,
            tail_bound: self.tail_bound,
        })
    }

    /// Kernel as a function of geodesic distance `r` in `[0, pi]`.
    pub fn k(&self, r: f64) -> Result<KernelValue> {
        if !(0.0..=std::f64::consts::PI).contains(&r) {
            return Err(Error::InvalidConfig(format!("distance {r} outside [0, pi]")));
        }
        self.k_i(r.cos())
    }

    /// Kernel of two points on the unit sphere.
    pub fn k_t(&self, x: [f64; 3], y: [f64; 3]) -> Result<KernelValue> {
        check_unit(x)?;
        check_unit(y)?;
        self.k_i(dot(x, y).clamp(-1.0, 1.0))
    }
}

pub fn kernel_k(spectrum: &AngularPowerSpectrum, r: f64, band: BandLimit) -> Result<KernelValue> {
    KernelView::new(spectrum.clone(), band)?.k(r)
}

pub fn kernel_k_i(spectrum: &AngularPowerSpectrum, mu: f64, band: BandLimit) -> Result<KernelValue> {
    KernelView::new(spectrum.clone(), band)?.k_i(mu)
}

pub fn kernel_k_t(
    spectrum: &AngularPowerSpectrum,
    x: [f64; 3],
    y: [f64; 3],
    band: BandLimit,
) -> Result<KernelValue> {
    KernelView::new(spectrum.clone(), band)?.k_t(x, y)
}

fn dot(x: [f64; 3], y: [f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

fn check_unit(x: [f64; 3]) -> Result<()> {
    let norm = dot(x, x).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(())
}

/// Great-circle distance `arccos <x, y>` between unit vectors.
pub fn geodesic_distance(x: [f64; 3], y: [f64; 3]) -> Result<f64> {
    check_unit(x)?;
    check_unit(y)?;
    Ok(dot(x, y).clamp(-1.0, 1.0).acos())
}

/// `(l+n)! / (l-n)!` as a product, `n <= l`.
fn rising_ratio(ell: usize, n: usize) -> f64 {
    ((ell + 1 - n)..=(ell + n)).map(|k| k as f64).product()
}

/// `int_{-1}^{1} |d^n/dmu^n k_I(mu)|^2 (1 - mu^2)^n dmu` for the band-limited
/// kernel, by quadrature.
///
/// Derivatives use `d^n P_l = (l+n)! / (2^n l!) P_{l-n}^{(n,n)}`; the integrand
/// is a polynomial of degree `2 kappa`, so a rule exact to `2 kappa + 2n`
/// leaves only roundoff.
pub fn weighted_deriv_norm_quadrature(
    spectrum: &AngularPowerSpectrum,
    n: usize,
    band: BandLimit,
    rule: &QuadratureRule,
) -> Result<f64> {
    let kappa = band.kappa();
    let required = 2 * kappa + 2 * n;
    if rule.exact_degree() < required {
        return Err(Error::InsufficientQuadrature {
            required,
            available: rule.exact_degree(),
        });
    }
    if n > kappa {
        return Ok(0.0);
    }
    let two_n = 2f64.powi(n as i32);
    let coeffs: Vec<f64> = (n..=kappa)
        .map(|l| {
            let lf = l as f64;
            let up: f64 = ((l + 1)..=(l + n)).map(|k| k as f64).product();
            spectrum.value(l) * (2.0 * lf + 1.0) / SPHERE_AREA * up / two_n
        })
        .collect();
    let nf = n as f64;
    let mut total = 0.0;
    for (&mu, &w) in rule.nodes.iter().zip(&rule.weights) {
        let jac = jacobi_p_all(kappa - n, nf, nf, mu)?;
        let d: f64 = coeffs.iter().zip(&jac).map(|(c, p)| c * p).sum();
        total += w * d * d * (1.0 - mu * mu).powi(n as i32);
    }
    Ok(total)
}

/// Closed form of [`weighted_deriv_norm_quadrature`]:
/// `sum_{n <= l <= kappa} A_l^2 * 2 (2l+1) / (4 pi)^2 * (l+n)! / (l-n)!`.
pub fn deriv_norm_spectral(spectrum: &AngularPowerSpectrum, n: usize, band: BandLimit) -> f64 {
    (n..=band.kappa())
        .map(|l| {
            let a = spectrum.value(l);
            a * a * 2.0 * (2.0 * l as f64 + 1.0) / (SPHERE_AREA * SPHERE_AREA) * rising_ratio(l, n)
        })
        .sum()
}
