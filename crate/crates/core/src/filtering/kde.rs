//! Gaussian product-kernel density estimate over a weighted particle cloud.

use std::f64::consts::PI;

use super::state::{ParticleCloud, StateVector4};

/// Lower bound on any per-axis bandwidth, in state units.
pub const MIN_BANDWIDTH: f64 = 1e-3;

/// Lower bound on any returned density value.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Kernel density estimator with bandwidths fixed at construction.
///
/// Bandwidths follow Silverman's rule per axis,
/// `h = 1.06 σ n_eff^(-1/5)`, where `σ` is the weighted standard deviation
/// of that axis and `n_eff = 1 / Σ w²`.
#[derive(Debug, Clone)]
pub struct Kde {
    points: Vec<[f64; 4]>,
    weights: Vec<f64>,
    inv_h: [f64; 4],
    norm: f64,
}

impl Kde {
    pub fn new(cloud: &ParticleCloud) -> Self {
        let total: f64 = cloud.particles().iter().map(|p| p.weight).sum();
        let weights: Vec<f64> = cloud.particles().iter().map(|p| p.weight / total).collect();
        let n_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let factor = 1.06 * n_eff.powf(-0.2);
        let h = cloud.std_dev().map(|s| (factor * s).max(MIN_BANDWIDTH));
        let norm = h.iter().map(|hk| 1.0 / (hk * (2.0 * PI).sqrt())).product();
        Self {
            points: cloud.states().map(|s| s.to_array()).collect(),
            weights,
            inv_h: h.map(|hk| 1.0 / hk),
            norm,
        }
    }

    pub fn bandwidths(&self) -> [f64; 4] {
        self.inv_h.map(|v| 1.0 / v)
    }

    pub fn density(&self, at: &StateVector4) -> f64 {
        let q = at.to_array();
        let mut acc = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            let mut e = 0.0;
            for k in 0..4 {
                let d = (q[k] - p[k]) * self.inv_h[k];
                e += d * d;
            }
            acc += w * (-0.5 * e).exp();
        }
        (acc * self.norm).max(DENSITY_FLOOR)
    }
}

/// One-shot density evaluation; build a [`Kde`] to query repeatedly.
pub fn kde_density(cloud: &ParticleCloud, point: &StateVector4) -> f64 {
    Kde::new(cloud).density(point)
}
