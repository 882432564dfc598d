//! Single-sensor particle filtering for bearing-only tracking.

pub mod kde;
pub mod sensor;
pub mod state;

use rand::Rng;

pub use kde::{kde_density, Kde};
pub use sensor::{bearing, likelihood, wrap_angle, Measurement, Sensor};
pub use state::{MotionModel, Particle, ParticleCloud, StateVector4};

use crate::error::{Error, Result};

/// Propagates every particle through the motion model; weights are kept.
pub fn predict<R: Rng + ?Sized>(
    cloud: &ParticleCloud,
    model: &MotionModel,
    rng: &mut R,
) -> ParticleCloud {
    cloud.map_states(|s| model.step(s, rng))
}

/// Multiplies weights by the measurement likelihood and normalizes.
/// Returns the new cloud and the weight sum before normalization.
pub fn update_weights(
    cloud: &ParticleCloud,
    sensor: &Sensor,
    z: &Measurement,
) -> Result<(ParticleCloud, f64)> {
    let mut out = cloud.with_weights(
        cloud
            .particles()
            .iter()
            .map(|p| p.weight * likelihood(sensor, z, &p.state)),
    );
    let evidence = out.normalize()?;
    Ok((out, evidence))
}

/// Low-variance resampling: one uniform offset, `n_out` evenly spaced
/// pointers over the cumulative weights.
pub fn systematic_resample<R: Rng + ?Sized>(
    cloud: &ParticleCloud,
    n_out: usize,
    rng: &mut R,
) -> Result<ParticleCloud> {
    if n_out == 0 {
        return Err(Error::InvalidParameter("resample size must be at least 1".into()));
    }
    let total: f64 = cloud.particles().iter().map(|p| p.weight).sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Divergence);
    }
    let step = 1.0 / n_out as f64;
    let offset: f64 = rng.random::<f64>() * step;
    let particles = cloud.particles();
    let mut states = Vec::with_capacity(n_out);
    let mut i = 0;
    let mut cum = particles[0].weight / total;
    for k in 0..n_out {
        let pointer = offset + k as f64 * step;
        while pointer >= cum && i + 1 < particles.len() {
            i += 1;
            cum += particles[i].weight / total;
        }
        states.push(particles[i].state);
    }
    ParticleCloud::uniform(states)
}
