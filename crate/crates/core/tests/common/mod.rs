//! Independent oracles: explicit polynomials instead of recurrences, brute
//! force sums instead of closed forms.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Dense polynomial, ascending coefficients.
#[derive(Debug, Clone)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Poly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    fn scale(mut self, s: f64) -> Poly {
        self.0.iter_mut().for_each(|c| *c *= s);
        self
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Generalized binomial `C(x, k)` for real `x`.
pub fn binomial_real(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Rodrigues: `P_l = 1/(2^l l!) d^l/dx^l (x^2 - 1)^l`.
pub fn rodrigues_legendre(ell: usize) -> Poly {
    let mut c = vec![0.0; 2 * ell + 1];
    for k in 0..=ell {
        let sign = if (ell - k) % 2 == 0 { 1.0 } else { -1.0 };
        c[2 * k] = sign * binomial(ell, k);
    }
    Poly(c)
        .nth_derivative(ell)
        .scale(1.0 / (2f64.powi(ell as i32) * factorial(ell)))
}

/// `sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) (-1)^m sin^m(theta) P_l^{(m)}(cos theta)`.
pub fn oracle_assoc_normalized(ell: usize, m: usize, theta: f64) -> f64 {
    let dp = rodrigues_legendre(ell).nth_derivative(m);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let norm = ((2 * ell + 1) as f64 / (4.0 * PI) * factorial(ell - m) / factorial(ell + m)).sqrt();
    norm * sign * theta.sin().powi(m as i32) * dp.eval(theta.cos())
}

/// Explicit sum `P_n^{(a,b)}(x) = sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^{n-s}`.
pub fn oracle_jacobi(n: usize, a: f64, b: f64, x: f64) -> f64 {
    (0..=n)
        .map(|s| {
            binomial_real(n as f64 + a, n - s)
                * binomial_real(n as f64 + b, s)
                * ((x - 1.0) / 2.0).powi(s as i32)
                * ((x + 1.0) / 2.0).powi((n - s) as i32)
        })
        .sum()
}

/// `sum_{lo < l <= hi} (2l + 1) * variance(l)`, summed from the small end.
pub fn brute_tail(lo: usize, hi: usize, variance: impl Fn(usize) -> f64) -> f64 {
    ((lo + 1)..=hi)
        .rev()
        .map(|l| (2 * l + 1) as f64 * variance(l))
        .sum()
}

/// Rotation matrix from a (not necessarily normalized) quaternion.
pub fn rotation(q: [f64; 4]) -> [[f64; 3]; 3] {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub fn apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2])
}

pub fn unit(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sample variance with its standard error `sqrt((m4 - s^4) / n)`.
pub fn variance_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (var, ((m4 - var * var).max(0.0) / n).sqrt())
}
