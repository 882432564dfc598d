use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fusion_rules::density::normal_pdf;

use super::state::StateVector4;

/// Default azimuth noise, radians (standard deviation).
pub const DEFAULT_SIGMA_BEARING: f64 = 0.01;

/// Passive sensor measuring only the azimuth to the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensor {
    pub x: f64,
    pub y: f64,
    pub sigma_bearing: f64,
}

impl Sensor {
    pub fn new(x: f64, y: f64, sigma_bearing: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::InvalidParameter(format!("sensor position ({x}, {y})")));
        }
        if !(sigma_bearing > 0.0 && sigma_bearing.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sensor bearing sigma {sigma_bearing}"
            )));
        }
        Ok(Self {
            x,
            y,
            sigma_bearing,
        })
    }
}

/// Noisy azimuth observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub sensor_id: usize,
    /// Radians in `(-π, π]`.
    pub bearing: f64,
    pub time: usize,
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Azimuth of the target seen from the sensor, counter-clockwise from +x.
pub fn bearing(sensor: &Sensor, state: &StateVector4) -> Result<f64> {
    let (dx, dy) = (state.x - sensor.x, state.y - sensor.y);
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::CoincidentTarget {
            x: sensor.x,
            y: sensor.y,
        });
    }
    Ok(wrap_angle(dy.atan2(dx)))
}

/// Gaussian density of the wrapped angular error. A target sitting on the
/// sensor has likelihood zero.
pub fn likelihood(sensor: &Sensor, z: &Measurement, state: &StateVector4) -> f64 {
    match bearing(sensor, state) {
        Ok(b) => normal_pdf(wrap_angle(z.bearing - b), sensor.sigma_bearing),
        Err(_) => 0.0,
    }
}
