//! Monte-Carlo sampling of fused densities.
//!
//! A p-PCR5 sample is obtained by drawing one candidate per source together
//! with its own source density, then keeping candidate `s` with probability
//! proportional to that density. The whitened and multi-source kernels are
//! the same categorical choice with other weights, and mean fusion is the
//! equal-weight case.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::density::Gaussian1D;
use crate::error::{Error, Result};

/// Redraws allowed for zero-weight candidate sets before giving up.
pub const MAX_REDRAWS: usize = 100;

/// A point paired with the density of its own source at that point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluatedSample<P = f64> {
    pub point: P,
    pub density: f64,
}

impl<P> EvaluatedSample<P> {
    pub fn new(point: P, density: f64) -> Result<Self> {
        if !(density >= 0.0 && density.is_finite()) {
            return Err(Error::InvalidParameter(format!("sample density {density}")));
        }
        Ok(Self { point, density })
    }
}

/// Something that can be sampled and can evaluate its own density at the
/// points it draws.
pub trait DensitySource {
    type Point;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> EvaluatedSample<Self::Point>;
}

impl DensitySource for Gaussian1D {
    type Point = f64;

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> EvaluatedSample<f64> {
        let z: f64 = StandardNormal.sample(rng);
        let x = self.mean() + self.sigma() * z;
        EvaluatedSample {
            point: x,
            density: self.pdf(x),
        }
    }
}

/// Keeps `s1` iff `u < d1 / (d1 + d2)`.
pub fn pcr5_select<P>(
    s1: EvaluatedSample<P>,
    s2: EvaluatedSample<P>,
    u: f64,
) -> Result<EvaluatedSample<P>> {
    let total = s1.density + s2.density;
    if !(total > 0.0) {
        return Err(Error::Unsampleable);
    }
    if u < s1.density / total {
        Ok(s1)
    } else {
        Ok(s2)
    }
}

/// Draws `n` independent samples of the p-PCR5 fusion of two sources.
pub fn pcr5_sample_batch<S, R>(src1: &S, src2: &S, n: usize, rng: &mut R) -> Result<Vec<S::Point>>
where
    S: DensitySource,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut attempts = 0;
        let picked = loop {
            let y1 = src1.draw(rng);
            let y2 = src2.draw(rng);
            let u: f64 = rng.random();
            match pcr5_select(y1, y2, u) {
                Ok(s) => break s,
                Err(Error::Unsampleable) if attempts + 1 < MAX_REDRAWS => attempts += 1,
                Err(Error::Unsampleable) => {
                    return Err(Error::RedrawLimit {
                        attempts: MAX_REDRAWS,
                    })
                }
                Err(e) => return Err(e),
            }
        };
        out.push(picked.point);
    }
    Ok(out)
}

/// Index of the candidate chosen with probability proportional to its
/// weight, using one uniform draw `u ∈ [0, 1)`.
pub fn weighted_select_index(weights: &[f64], u: f64) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Unsampleable);
    }
    let target = u * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return Ok(i);
        }
    }
    // u * total rounded up to the full sum: last positive weight
    Ok(weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1))
}

/// Categorical choice among weighted candidates.
pub fn weighted_select<P: Clone>(candidates: &[(P, f64)], u: f64) -> Result<P> {
    let weights: Vec<f64> = candidates.iter().map(|c| c.1).collect();
    weighted_select_index(&weights, u).map(|i| candidates[i].0.clone())
}

/// Uniform choice among candidates: a draw from the equal-weight mixture.
pub fn mean_fuse_select_index(len: usize, u: f64) -> usize {
    assert!(len > 0, "mean fusion needs at least one candidate");
    ((u * len as f64) as usize).min(len - 1)
}

pub fn mean_fuse_select<P: Clone>(candidates: &[P], u: f64) -> P {
    candidates[mean_fuse_select_index(candidates.len(), u)].clone()
}
