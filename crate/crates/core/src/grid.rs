use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// `theta_i = (i + 1/2) pi / n_theta` with Fejér weights; never hits a pole.
    Equiangular,
    /// Gauss–Legendre nodes in `cos theta`.
    GaussLatitudes,
}

/// Shape of a `(theta, phi)` lattice; parses from `"64x128"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: GridKind,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl GridSpec {
    pub fn equiangular(n_theta: usize, n_phi: usize) -> Self {
        Self {
            kind: GridKind::Equiangular,
            n_theta,
            n_phi,
        }
    }

    pub fn gauss(n_theta: usize, n_phi: usize) -> Self {
        Self {
            kind: GridKind::GaussLatitudes,
            n_theta,
            n_phi,
        }
    }

    /// Smallest Gauss grid integrating products of band-`kappa` fields exactly.
    pub fn gauss_for_band(kappa: usize) -> Self {
        Self::gauss(kappa + 1, 2 * kappa + 1)
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::equiangular(64, 128)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Parse(format!("grid `{s}` is not of the form NxM")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("grid `{s}`: {e}")))
        };
        Ok(Self::equiangular(parse(a)?, parse(b)?))
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_theta, self.n_phi)
    }
}

/// Evaluation lattice with tensor-product quadrature weights summing to `4 pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub spec: GridSpec,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// Per-ring weight; the weight of node `(i, j)` is `ring_weights[i]`.
    pub ring_weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        if spec.n_theta == 0 || spec.n_phi == 0 {
            return Err(Error::InvalidConfig(format!("empty grid {spec}")));
        }
        let n = spec.n_theta;
        let nf = n as f64;
        let dphi = 2.0 * PI / spec.n_phi as f64;
        let (thetas, ring_weights): (Vec<f64>, Vec<f64>) = match spec.kind {
            GridKind::Equiangular => (0..n)
                .map(|i| {
                    let theta = (i as f64 + 0.5) * PI / nf;
                    let s: f64 = (1..=n / 2)
                        .map(|j| {
                            let jf = j as f64;
                            (2.0 * jf * theta).cos() / (4.0 * jf * jf - 1.0)
                        })
                        .sum();
                    (theta, 2.0 / nf * (1.0 - 2.0 * s) * dphi)
                })
                .unzip(),
            GridKind::GaussLatitudes => {
                let rule = gauss_legendre(n);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .rev()
                    .map(|(&mu, &w)| (mu.acos(), w * dphi))
                    .unzip()
            }
        };
        let phis = (0..spec.n_phi).map(|j| j as f64 * dphi).collect();
        Ok(Self {
            spec,
            thetas,
            phis,
            ring_weights,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self, i: usize, _j: usize) -> f64 {
        self.ring_weights[i]
    }

    /// Largest total degree `d` such that every band-`d` polynomial on the
    /// sphere is integrated exactly.
    pub fn exact_degree(&self) -> usize {
        let lat = match self.spec.kind {
            GridKind::Equiangular => self.n_theta() - 1,
            GridKind::GaussLatitudes => 2 * self.n_theta() - 1,
        };
        lat.min(self.n_phi() - 1)
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 3] {
        let (st, ct) = self.thetas[i].sin_cos();
        let (sp, cp) = self.phis[j].sin_cos();
        [st * cp, st * sp, ct]
    }
}
