//! Counter-based normal variates.
//!
//! Every variate has an address `(sample, l, m, component, step)` and is a
//! pure function of `(seed, address)`. Per `(sample, step)` the ChaCha8
//! stream `sample << 32 | step` is read from position zero; variate `v`
//! (in [`variate_index`] order) is half of a Box–Muller pair built from the
//! two 64-bit words at pair index `v / 2`. Draws at band `kappa` are the
//! prefix of draws at any larger band.

use std::f64::consts::TAU;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Which real coefficient at `(l, m)`: `First` multiplies `cos(m phi)`,
/// `Second` multiplies `sin(m phi)` and does not exist for `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    First,
    Second,
}

/// Position of `(l, m, component)` among the `(kappa + 1)^2` real
/// coefficients: degree blocks of length `2l + 1` ordered
/// `X1_l0, X1_l1, X2_l1, ..., X1_ll, X2_ll`.
pub fn variate_index(ell: usize, m: usize, component: Component) -> usize {
    assert!(m <= ell, "order {m} exceeds degree {ell}");
    let base = ell * ell;
    match (m, component) {
        (0, Component::First) => base,
        (0, Component::Second) => panic!("X2 at m = 0 is identically zero"),
        (_, Component::First) => base + 2 * m - 1,
        (_, Component::Second) => base + 2 * m,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn stream(&self, sample: u64, step: u64) -> ChaCha8Rng {
        assert!(sample < 1 << 32, "sample index {sample} exceeds 2^32");
        assert!(step < 1 << 32, "step index {step} exceeds 2^32");
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(sample << 32 | step);
        rng
    }

    /// The single variate at an address.
    pub fn normal(&self, sample: u64, ell: usize, m: usize, component: Component, step: u64) -> f64 {
        let v = variate_index(ell, m, component);
        let mut rng = self.stream(sample, step);
        // 2 u64 words = 4 u32 words per pair
        rng.set_word_pos(4 * (v / 2) as u128);
        let (a, b) = box_muller(rng.next_u64(), rng.next_u64());
        if v.is_multiple_of(2) {
            a
        } else {
            b
        }
    }

    /// The first `count` variates of `(sample, step)` in index order.
    pub fn fill(&self, sample: u64, step: u64, count: usize) -> Vec<f64> {
        let mut rng = self.stream(sample, step);
        let mut out = Vec::with_capacity(count + 1);
        while out.len() < count {
            let (a, b) = box_muller(rng.next_u64(), rng.next_u64());
            out.push(a);
            out.push(b);
        }
        out.truncate(count);
        out
    }
}

/// Uniform in the open interval `(0, 1)` from the top 53 bits.
#[inline]
fn open_unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn box_muller(u: u64, v: u64) -> (f64, f64) {
    let r = (-2.0 * open_unit(u).ln()).sqrt();
    let (s, c) = (TAU * open_unit(v)).sin_cos();
    (r * c, r * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout_is_dense() {
        let kappa = 6;
        let mut seen = vec![false; (kappa + 1) * (kappa + 1)];
        for l in 0..=kappa {
            seen[variate_index(l, 0, Component::First)] = true;
            for m in 1..=l {
                seen[variate_index(l, m, Component::First)] = true;
                seen[variate_index(l, m, Component::Second)] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn addressed_equals_sequential() {
        let rng = RngStream::new(42);
        let all = rng.fill(7, 3, 64);
        for l in 0..8usize {
            assert_eq!(rng.normal(7, l, 0, Component::First, 3), all[variate_index(l, 0, Component::First)]);
            for m in 1..=l {
                for c in [Component::First, Component::Second] {
                    assert_eq!(rng.normal(7, l, m, c, 3), all[variate_index(l, m, c)]);
                }
            }
        }
    }

    #[test]
    fn prefix_property_and_stream_separation() {
        let rng = RngStream::new(1);
        let long = rng.fill(0, 0, 101);
        let short = rng.fill(0, 0, 17);
        assert_eq!(&long[..17], &short[..]);
        assert_ne!(rng.fill(1, 0, 4), rng.fill(0, 0, 4));
        assert_ne!(rng.fill(0, 1, 4), rng.fill(0, 0, 4));
        assert_ne!(RngStream::new(2).fill(0, 0, 4), short[..4]);
    }

    #[test]
    fn moments_are_standard_normal() {
        let rng = RngStream::new(9);
        let n = 200_000;
        let x = rng.fill(0, 0, n);
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let kurt = x.iter().map(|v| v.powi(4)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt());
        assert!((kurt - 3.0).abs() < 4.0 * (96.0 / n as f64).sqrt());
    }
}
