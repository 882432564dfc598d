//! Ground truth and measurement generation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::filtering::{bearing, wrap_angle, Measurement, MotionModel, Sensor, StateVector4};

use super::config::TrajectorySpec;

/// Target states for steps `0..=spec.steps`; entry 0 is `spec.start`.
///
/// Noiseless trajectories are exact kinematics and never touch `rng`.
/// A waypoint at step `k` replaces the velocity of the state at step `k`,
/// so the position moves with the new velocity from step `k` on.
pub fn simulate_truth<R: Rng + ?Sized>(
    spec: &TrajectorySpec,
    model: &MotionModel,
    rng: &mut R,
) -> Vec<StateVector4> {
    let mut out = Vec::with_capacity(spec.steps + 1);
    let mut s = spec.start;
    let mut turns = spec.waypoints.iter().peekable();
    out.push(s);
    for t in 1..=spec.steps {
        s = if spec.noisy {
            model.step(&s, rng)
        } else {
            model.step_noiseless(&s)
        };
        if let Some(w) = turns.next_if(|w| w.step == t) {
            s.vx = w.vx;
            s.vy = w.vy;
        }
        out.push(s);
    }
    out
}

/// One bearing per sensor for every entry of `truth`; `time` is the entry
/// index. Noise draws run step-major, sensor-minor.
pub fn generate_measurements<R: Rng + ?Sized>(
    truth: &[StateVector4],
    sensors: &[Sensor],
    rng: &mut R,
) -> Result<Vec<Vec<Measurement>>> {
    truth
        .iter()
        .enumerate()
        .map(|(t, state)| {
            sensors
                .iter()
                .enumerate()
                .map(|(s, sensor)| {
                    let b = bearing(sensor, state)?;
                    let noise: f64 = rng.sample(StandardNormal);
                    Ok(Measurement {
                        sensor_id: s,
                        bearing: wrap_angle(b + sensor.sigma_bearing * noise),
                        time: t,
                    })
                })
                .collect()
        })
        .collect()
}
