use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fusion_rules::sampling::weighted_select_index;

/// Target state: planar position and velocity (position units per step).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateVector4 {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl StateVector4 {
    pub const fn new(x: f64, y: f64, vx: f64, vy: f64) -> Self {
        Self { x, y, vx, vy }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.vx, self.vy]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn position_distance(&self, other: &Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn speed_distance(&self, other: &Self) -> f64 {
        (self.vx - other.vx).hypot(self.vy - other.vy)
    }
}

/// Quasi-constant velocity motion with independent Gaussian kicks on each
/// velocity and position axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionModel {
    pub dt: f64,
    pub q_vel: f64,
    pub q_pos: f64,
}

impl Default for MotionModel {
    fn default() -> Self {
        Self {
            dt: 1.0,
            q_vel: 0.1,
            q_pos: 0.3,
        }
    }
}

impl MotionModel {
    pub fn new(dt: f64, q_vel: f64, q_pos: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt {dt}")));
        }
        if !(q_vel >= 0.0 && q_pos >= 0.0 && q_vel.is_finite() && q_pos.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise gains {q_vel}, {q_pos}")));
        }
        Ok(Self { dt, q_vel, q_pos })
    }

    /// One transition. Positions move with the velocity held before the
    /// velocity kick.
    pub fn step<R: Rng + ?Sized>(&self, s: &StateVector4, rng: &mut R) -> StateVector4 {
        let n: [f64; 4] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        StateVector4 {
            x: s.x + self.dt * s.vx + self.q_pos * n[2],
            y: s.y + self.dt * s.vy + self.q_pos * n[3],
            vx: s.vx + self.q_vel * n[0],
            vy: s.vy + self.q_vel * n[1],
        }
    }

    pub fn step_noiseless(&self, s: &StateVector4) -> StateVector4 {
        StateVector4 {
            x: s.x + self.dt * s.vx,
            y: s.y + self.dt * s.vy,
            ..*s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub state: StateVector4,
    pub weight: f64,
}

/// Weighted particle set.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    particles: Vec<Particle>,
    normalized: bool,
}

impl ParticleCloud {
    /// Cloud from explicit particles; not normalized.
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::InvalidParameter("empty particle cloud".into()));
        }
        if let Some(p) = particles
            .iter()
            .find(|p| !(p.weight.is_finite() && p.weight >= 0.0))
        {
            return Err(Error::InvalidParameter(format!("particle weight {}", p.weight)));
        }
        Ok(Self {
            particles,
            normalized: false,
        })
    }

    /// Equally weighted cloud.
    pub fn uniform(states: Vec<StateVector4>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("empty particle cloud".into()));
        }
        let w = 1.0 / states.len() as f64;
        Ok(Self {
            particles: states
                .into_iter()
                .map(|state| Particle { state, weight: w })
                .collect(),
            normalized: true,
        })
    }

    /// Gaussian cloud around `center` with per-axis standard deviations.
    pub fn gaussian<R: Rng + ?Sized>(
        center: StateVector4,
        spread: [f64; 4],
        n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let c = center.to_array();
        let states = (0..n)
            .map(|_| {
                let mut s = [0.0; 4];
                for k in 0..4 {
                    let z: f64 = StandardNormal.sample(rng);
                    s[k] = c[k] + spread[k] * z;
                }
                StateVector4::from_array(s)
            })
            .collect();
        Self::uniform(states)
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn states(&self) -> impl Iterator<Item = &StateVector4> + '_ {
        self.particles.iter().map(|p| &p.state)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.weight).collect()
    }

    /// True when every particle carries the same weight.
    pub fn is_uniform(&self) -> bool {
        let w0 = self.particles[0].weight;
        self.particles.iter().all(|p| p.weight == w0)
    }

    /// Scales weights to unit sum and returns the sum before scaling.
    pub fn normalize(&mut self) -> Result<f64> {
        let total: f64 = self.particles.iter().map(|p| p.weight).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Divergence);
        }
        for p in &mut self.particles {
            p.weight /= total;
        }
        self.normalized = true;
        Ok(total)
    }

    /// Weighted mean state.
    pub fn mean(&self) -> StateVector4 {
        let total: f64 = self.particles.iter().map(|p| p.weight).sum();
        let mut acc = [0.0; 4];
        for p in &self.particles {
            for (a, v) in acc.iter_mut().zip(p.state.to_array()) {
                *a += p.weight * v;
            }
        }
        StateVector4::from_array(acc.map(|a| a / total))
    }

    /// Weighted per-axis standard deviations.
    pub fn std_dev(&self) -> [f64; 4] {
        let total: f64 = self.particles.iter().map(|p| p.weight).sum();
        let m = self.mean().to_array();
        let mut acc = [0.0; 4];
        for p in &self.particles {
            for (k, v) in p.state.to_array().into_iter().enumerate() {
                acc[k] += p.weight * (v - m[k]) * (v - m[k]);
            }
        }
        acc.map(|a| (a / total).sqrt())
    }

    /// Weighted 2x2 covariance of the position components `[xx, xy, yy]`.
    pub fn position_covariance(&self) -> [f64; 3] {
        let total: f64 = self.particles.iter().map(|p| p.weight).sum();
        let m = self.mean();
        let mut c = [0.0; 3];
        for p in &self.particles {
            let (dx, dy) = (p.state.x - m.x, p.state.y - m.y);
            c[0] += p.weight * dx * dx;
            c[1] += p.weight * dx * dy;
            c[2] += p.weight * dy * dy;
        }
        c.map(|v| v / total)
    }

    /// Position spread `sqrt(var_x + var_y)`.
    pub fn position_spread(&self) -> f64 {
        let c = self.position_covariance();
        (c[0] + c[2]).sqrt()
    }

    /// Effective sample size `1 / Σ w²` of the normalized weights.
    pub fn effective_size(&self) -> f64 {
        let total: f64 = self.particles.iter().map(|p| p.weight).sum();
        1.0 / self
            .particles
            .iter()
            .map(|p| (p.weight / total).powi(2))
            .sum::<f64>()
    }

    /// Index drawn with probability proportional to weight from one uniform
    /// draw. Uniform clouds skip the cumulative scan.
    pub fn draw_index(&self, u: f64) -> usize {
        if self.is_uniform() {
            ((u * self.len() as f64) as usize).min(self.len() - 1)
        } else {
            weighted_select_index(&self.weights(), u).unwrap_or(0)
        }
    }

    pub(crate) fn map_states(&self, mut f: impl FnMut(&StateVector4) -> StateVector4) -> Self {
        Self {
            particles: self
                .particles
                .iter()
                .map(|p| Particle {
                    state: f(&p.state),
                    weight: p.weight,
                })
                .collect(),
            normalized: self.normalized,
        }
    }

    pub(crate) fn with_weights(&self, weights: impl IntoIterator<Item = f64>) -> Self {
        Self {
            particles: self
                .particles
                .iter()
                .zip(weights)
                .map(|(p, weight)| Particle {
                    state: p.state,
                    weight,
                })
                .collect(),
            normalized: false,
        }
    }

    /// Concatenation with every particle's weight divided by the number of
    /// clouds: the equal-weight mixture of normalized clouds.
    pub fn mixture(clouds: &[&ParticleCloud]) -> Result<Self> {
        let k = clouds.len() as f64;
        let particles: Vec<Particle> = clouds
            .iter()
            .flat_map(|c| {
                let total: f64 = c.particles.iter().map(|p| p.weight).sum();
                c.particles.iter().map(move |p| Particle {
                    state: p.state,
                    weight: p.weight / total / k,
                })
            })
            .collect();
        let mut out = Self::new(particles)?;
        out.normalized = true;
        Ok(out)
    }
}
