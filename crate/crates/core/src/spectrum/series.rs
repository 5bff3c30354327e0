//! Tails of power-weighted series
//! `S(from; b, c) = sum_{l >= from} (2l + 1) l^b (l + 1)^c`.
//!
//! Summed directly up to a cutoff, then closed by Euler–Maclaurin where
//! the summand is expanded as `x^q (2 + u)(1 + u)^c`, `u = 1/x`,
//! `q = 1 + b + c`, so the integral and all derivatives are termwise.

const CUTOFF: usize = 2000;
const MAX_TERMS: usize = 60;

/// `None` when the series diverges (`1 + b + c >= -1`).
pub(crate) fn power_weighted_tail(from: usize, b: f64, c: f64) -> Option<f64> {
    let q = 1.0 + b + c;
    if q >= -1.0 {
        return None;
    }
    let n = from.max(CUTOFF);
    let mut direct = 0.0;
    for l in (from..n).rev() {
        let lf = l as f64;
        direct += (2.0 * lf + 1.0) * lf.powf(b) * (lf + 1.0).powf(c);
    }
    Some(direct + euler_maclaurin_tail(n as f64, q, c))
}

fn euler_maclaurin_tail(n: f64, q: f64, c: f64) -> f64 {
    // d_k: coefficients of (2 + u)(1 + u)^c
    let mut coeffs = Vec::with_capacity(MAX_TERMS);
    let mut binom_prev = 0.0;
    let mut binom = 1.0;
    for k in 0..MAX_TERMS {
        if k > 0 {
            binom_prev = binom;
            binom *= (c - k as f64 + 1.0) / k as f64;
        }
        coeffs.push(2.0 * binom + binom_prev);
    }

    let deriv = |j: u32| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                let p = q - k as f64;
                let falling: f64 = (0..j).map(|i| p - i as f64).product();
                d * falling * n.powf(p - j as f64)
            })
            .sum()
    };
    let integral: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let p = q - k as f64;
            d * n.powf(p + 1.0) / (-(p + 1.0))
        })
        .sum();

    // Bernoulli numbers B2..B8 over (2i)!
    integral + 0.5 * deriv(0) - deriv(1) / 12.0 + deriv(3) / 720.0 - deriv(5) / 30240.0
        + deriv(7) / 1_209_600.0
}
