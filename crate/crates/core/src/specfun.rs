//! Deterministic basis layer: Legendre, normalized associated Legendre and
//! Jacobi functions, complex spherical harmonics and Gauss–Legendre rules.
//!
//! Phase convention: the associated Legendre functions carry the
//! Condon–Shortley factor `(-1)^m`,
//!
//! ```text
//! P_lm(mu) = (-1)^m (1 - mu^2)^{m/2} d^m/dmu^m P_l(mu)
//! ```
//!
//! so `L_11(pi/2) = -sqrt(3 / (8 pi))`. Libraries that drop the factor
//! (common in geodesy and graphics) differ from these values by a sign for
//! odd `m`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum degree retained in a truncated expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BandLimit(pub usize);

impl BandLimit {
    pub fn kappa(self) -> usize {
        self.0
    }

    /// Number of real coefficients `sum_{l <= kappa} (2l + 1)`.
    pub fn n_real_coeffs(self) -> usize {
        (self.0 + 1) * (self.0 + 1)
    }

    /// Length of a packed `0 <= m <= l <= kappa` triangle.
    pub fn n_packed(self) -> usize {
        (self.0 + 1) * (self.0 + 2) / 2
    }
}

/// Offset of `(l, m)` in a packed lower triangle, rows by degree.
#[inline]
pub fn packed_index(ell: usize, m: usize) -> usize {
    debug_assert!(m <= ell);
    ell * (ell + 1) / 2 + m
}

fn check_unit_interval(mu: f64) -> Result<()> {
    if mu.is_nan() || mu.abs() > 1.0 {
        return Err(Error::Domain { value: mu });
    }
    Ok(())
}

/// Legendre polynomial `P_l(mu)` by the three-term recurrence.
pub fn legendre_p(ell: usize, mu: f64) -> Result<f64> {
    check_unit_interval(mu)?;
    let mut prev = 1.0;
    if ell == 0 {
        return Ok(prev);
    }
    let mut cur = mu;
    for k in 1..ell {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * mu * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `P_0(mu), ..., P_kappa(mu)` in one sweep.
pub fn legendre_p_all(kappa: usize, mu: f64) -> Result<Vec<f64>> {
    check_unit_interval(mu)?;
    let mut out = Vec::with_capacity(kappa + 1);
    out.push(1.0);
    if kappa >= 1 {
        out.push(mu);
    }
    for k in 1..kappa {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * mu * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// Normalized associated Legendre function
/// `L_lm(theta) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_lm(cos theta)`.
///
/// Evaluated by the recurrence in the normalized functions themselves
/// (diagonal seed `L_mm`, then upward in `l`), so no factorials appear and
/// degrees in the thousands stay finite.
pub fn assoc_legendre_normalized(ell: usize, m: i64, theta: f64) -> Result<f64> {
    if m < 0 || m as usize > ell {
        return Err(Error::Order {
            ell: ell as i64,
            m,
        });
    }
    let m = m as usize;
    let (s, x) = theta.sin_cos();
    let mut diag = (0.25 / PI).sqrt();
    for k in 1..=m {
        let k = k as f64;
        diag *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    if ell == m {
        return Ok(diag);
    }
    let mut prev = diag;
    let mut cur = (2.0 * m as f64 + 3.0).sqrt() * x * diag;
    for l in (m + 2)..=ell {
        let (a, b) = upward_coeffs(l, m);
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

#[inline]
fn upward_coeffs(l: usize, m: usize) -> (f64, f64) {
    let lf = l as f64;
    let mf = m as f64;
    let l1 = lf - 1.0;
    let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
    let b = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
    (a, b)
}

/// All `L_lm(theta)` for `0 <= m <= l <= kappa`, packed by [`packed_index`].
pub fn assoc_legendre_table(kappa: usize, theta: f64) -> Vec<f64> {
    let mut out = vec![0.0; BandLimit(kappa).n_packed()];
    fill_assoc_legendre(kappa, theta, &mut out);
    out
}

pub(crate) fn fill_assoc_legendre(kappa: usize, theta: f64, out: &mut [f64]) {
    let (s, x) = theta.sin_cos();
    let mut diag = (0.25 / PI).sqrt();
    for m in 0..=kappa {
        if m > 0 {
            let k = m as f64;
            diag *= -((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
        }
        out[packed_index(m, m)] = diag;
        if m == kappa {
            break;
        }
        let mut prev = diag;
        let mut cur = (2.0 * m as f64 + 3.0).sqrt() * x * diag;
        out[packed_index(m + 1, m)] = cur;
        for l in (m + 2)..=kappa {
            let (a, b) = upward_coeffs(l, m);
            let next = a * (x * cur - b * prev);
            prev = cur;
            cur = next;
            out[packed_index(l, m)] = cur;
        }
    }
}

/// Jacobi polynomial `P_l^{(a,b)}(mu)` by the standard three-term recurrence.
pub fn jacobi_p(ell: usize, a: f64, b: f64, mu: f64) -> Result<f64> {
    Ok(*jacobi_p_all(ell, a, b, mu)?.last().expect("nonempty"))
}

/// `P_0^{(a,b)}(mu), ..., P_n^{(a,b)}(mu)`.
pub fn jacobi_p_all(n: usize, a: f64, b: f64, mu: f64) -> Result<Vec<f64>> {
    check_unit_interval(mu)?;
    if a <= -1.0 || b <= -1.0 {
        return Err(Error::InvalidConfig(format!(
            "Jacobi parameters must exceed -1, got ({a}, {b})"
        )));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return Ok(out);
    }
    out.push(0.5 * (a - b) + 0.5 * (a + b + 2.0) * mu);
    let ab = a + b;
    for k in 2..=n {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        let d1 = 2.0 * kf * (kf + ab) * (c - 2.0);
        let d2 = (c - 1.0) * (c * (c - 2.0) * mu + a * a - b * b);
        let d3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * c;
        let next = (d2 * out[k - 1] - d3 * out[k - 2]) / d1;
        out.push(next);
    }
    Ok(out)
}

/// Complex spherical harmonic `Y_lm(theta, phi)`, `|m| <= l`, with
/// `Y_{l,-m} = (-1)^m conj(Y_lm)`.
pub fn sph_harm(ell: usize, m: i64, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() as usize > ell {
        return Err(Error::Order {
            ell: ell as i64,
            m,
        });
    }
    let am = m.abs();
    let l = assoc_legendre_normalized(ell, am, theta)?;
    let y = Complex64::from_polar(1.0, am as f64 * phi) * l;
    if m >= 0 {
        Ok(y)
    } else if am % 2 == 0 {
        Ok(y.conj())
    } else {
        Ok(-y.conj())
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss–Legendre rule, nodes by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    for i in 0..half {
        // roots come out descending from +1
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                dp = legendre_with_derivative(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
