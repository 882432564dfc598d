//! Scenario configuration and its flat `key = value` file format.
//!
//! ```text
//! # comment
//! fusion = whitened
//! sensor.1.x = 0
//! sensor.1.y = 100
//! truth.start = 200, 0, 0, 1
//! init.1.center = 190, 10, 0, 0
//! ```
//!
//! Sensor and initialization indices start at 1 and must be contiguous.
//! Every key may appear at most once; unknown keys are errors.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::distributed::{FusionRule, ResamplePolicy};
use crate::error::{Error, Result};
use crate::filtering::sensor::DEFAULT_SIGMA_BEARING;
use crate::filtering::{MotionModel, Sensor, StateVector4};

pub const DEFAULT_PARTICLES: usize = 200;
pub const DEFAULT_STEPS: usize = 60;
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 30.0;
pub const DEFAULT_INIT_SPREAD: [f64; 4] = [5.0, 5.0, 0.5, 0.5];

/// Upper bounds keeping a parsed config runnable.
const MAX_SENSORS: usize = 64;
const MAX_PARTICLES: usize = 1_000_000;
const MAX_STEPS: usize = 1_000_000;
const MAX_RUNS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    ConstantVelocity,
    Scripted,
}

/// Velocity reset applied at the end of `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub step: usize,
    pub vx: f64,
    pub vy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    pub start: StateVector4,
    pub waypoints: Vec<Waypoint>,
    pub steps: usize,
    pub noisy: bool,
}

impl TrajectorySpec {
    pub fn constant_velocity(start: StateVector4, steps: usize) -> Self {
        Self {
            kind: TrajectoryKind::ConstantVelocity,
            start,
            waypoints: Vec::new(),
            steps,
            noisy: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::config("steps", "must be at least 1"));
        }
        if !self.start.is_finite() {
            return Err(Error::config("truth.start", "must be finite"));
        }
        if self.kind == TrajectoryKind::ConstantVelocity && !self.waypoints.is_empty() {
            return Err(Error::config(
                "truth.turn",
                "turns require truth.kind = scripted",
            ));
        }
        for w in self.waypoints.windows(2) {
            if w[1].step <= w[0].step {
                return Err(Error::config("truth.turn", "turn steps must be strictly increasing"));
            }
        }
        if self.waypoints.iter().any(|w| w.step == 0 || !(w.vx.is_finite() && w.vy.is_finite())) {
            return Err(Error::config("truth.turn", "turns need step >= 1 and finite velocity"));
        }
        Ok(())
    }
}

/// Initial cloud of each local filter.
#[derive(Debug, Clone, PartialEq)]
pub struct InitSpec {
    pub centers: Vec<StateVector4>,
    pub spread: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub sensors: Vec<Sensor>,
    pub trajectory: TrajectorySpec,
    pub init: InitSpec,
    pub motion: MotionModel,
    pub particles: usize,
    pub fusion: FusionRule,
    pub seed: u64,
    pub runs: usize,
    pub divergence_threshold: f64,
    /// Re-inject the fused cloud into the local filters.
    pub feedback: bool,
    pub resample: ResamplePolicy,
}

impl ScenarioConfig {
    pub fn steps(&self) -> usize {
        self.trajectory.steps
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensors.is_empty() {
            return Err(Error::config("sensor", "at least one sensor is required"));
        }
        if self.sensors.len() > MAX_SENSORS {
            return Err(Error::config("sensor", format!("at most {MAX_SENSORS} sensors")));
        }
        if self.init.centers.len() != self.sensors.len() {
            return Err(Error::config(
                "init",
                format!(
                    "{} initial centers for {} sensors",
                    self.init.centers.len(),
                    self.sensors.len()
                ),
            ));
        }
        if self.init.centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::config("init.center", "must be finite"));
        }
        if self.init.spread.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::config("init.spread", "spreads must be positive"));
        }
        if self.particles == 0 || self.particles > MAX_PARTICLES {
            return Err(Error::config("particles", format!("must be in 1..={MAX_PARTICLES}")));
        }
        if self.runs == 0 || self.runs > MAX_RUNS {
            return Err(Error::config("runs", format!("must be in 1..={MAX_RUNS}")));
        }
        if self.trajectory.steps > MAX_STEPS {
            return Err(Error::config("steps", format!("at most {MAX_STEPS}")));
        }
        if !(self.divergence_threshold > 0.0 && self.divergence_threshold.is_finite()) {
            return Err(Error::config("divergence_threshold", "must be positive"));
        }
        if let ResamplePolicy::EssBelow(f) = self.resample {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::config("resample_ess", "must be in (0, 1]"));
            }
        }
        self.trajectory.validate()
    }

    /// Parses and validates a configuration file's contents.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = parse_entries(text)?;
        build(entries)
    }
}

impl FromStr for ScenarioConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Splits the text into `key -> (value, line)` entries.
fn parse_entries(text: &str) -> Result<BTreeMap<String, (String, usize)>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(line, format!("line {}: expected `key = value`", n + 1))
        })?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_') {
            return Err(Error::config(key, format!("line {}: malformed key", n + 1)));
        }
        if map
            .insert(key.to_string(), (value.trim().to_string(), n + 1))
            .is_some()
        {
            return Err(Error::config(key, format!("line {}: duplicate key", n + 1)));
        }
    }
    Ok(map)
}

struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.map.remove(key)
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::config(key, format!("line {line}: cannot parse `{v}`"))),
        }
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>> {
        match self.parse::<f64>(key)? {
            Some(v) if !v.is_finite() => Err(Error::config(key, "must be finite")),
            other => Ok(other),
        }
    }

    fn reals<const N: usize>(&mut self, key: &str) -> Result<Option<[f64; N]>> {
        let Some((v, line)) = self.take(key) else {
            return Ok(None);
        };
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        if parts.len() != N {
            return Err(Error::config(
                key,
                format!("line {line}: expected {N} comma-separated numbers"),
            ));
        }
        let mut out = [0.0; N];
        for (o, p) in out.iter_mut().zip(parts) {
            *o = p
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::config(key, format!("line {line}: cannot parse `{p}`")))?;
        }
        Ok(Some(out))
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => match v.as_str() {
                "true" | "yes" | "1" => Ok(Some(true)),
                "false" | "no" | "0" => Ok(Some(false)),
                _ => Err(Error::config(key, format!("line {line}: expected true or false"))),
            },
        }
    }

    /// Sorted 1-based indices found under `prefix.<i>.`.
    fn indices(&self, prefix: &str) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for key in self.map.keys() {
            if let Some(rest) = key.strip_prefix(prefix).and_then(|r| r.strip_prefix('.')) {
                let idx = rest.split('.').next().unwrap_or("");
                // non-numeric segments are other keys, rejected later if unknown
                if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
                    continue;
                }
                let i: usize = idx
                    .parse()
                    .map_err(|_| Error::config(key.as_str(), "index too large"))?;
                if i == 0 {
                    return Err(Error::config(key.as_str(), "indices start at 1"));
                }
                if i > MAX_SENSORS.max(MAX_TURNS) {
                    return Err(Error::config(key.as_str(), "index too large"));
                }
                if !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

const MAX_TURNS: usize = 1024;

fn contiguous(prefix: &str, idx: &[usize]) -> Result<()> {
    for (k, &i) in idx.iter().enumerate() {
        if i != k + 1 {
            return Err(Error::config(
                format!("{prefix}.{}", k + 1),
                "indices must be contiguous from 1",
            ));
        }
    }
    Ok(())
}

fn build(map: BTreeMap<String, (String, usize)>) -> Result<ScenarioConfig> {
    let mut e = Entries { map };

    let name = e.take("name").map(|(v, _)| v).unwrap_or_else(|| "scenario".into());
    let fusion = match e.take("fusion") {
        None => FusionRule::Whitened,
        Some((v, line)) => v
            .parse()
            .map_err(|_| Error::config("fusion", format!("line {line}: unknown rule `{v}` (valid: bayes, pcr5, whitened, mean)")))?,
    };
    let seed = e.parse::<u64>("seed")?.unwrap_or(0);
    let runs = e.parse::<usize>("runs")?.unwrap_or(1);
    let particles = e.parse::<usize>("particles")?.unwrap_or(DEFAULT_PARTICLES);
    let steps = e.parse::<usize>("steps")?.unwrap_or(DEFAULT_STEPS);
    let divergence_threshold = e
        .real("divergence_threshold")?
        .unwrap_or(DEFAULT_DIVERGENCE_THRESHOLD);
    let feedback = e.boolean("feedback")?.unwrap_or(true);
    let resample = match e.real("resample_ess")? {
        None => ResamplePolicy::Always,
        Some(0.0) => ResamplePolicy::Always,
        Some(f) => ResamplePolicy::EssBelow(f),
    };

    let defaults = MotionModel::default();
    let motion = MotionModel::new(
        e.real("motion.dt")?.unwrap_or(defaults.dt),
        e.real("motion.q_vel")?.unwrap_or(defaults.q_vel),
        e.real("motion.q_pos")?.unwrap_or(defaults.q_pos),
    )
    .map_err(|err| Error::config("motion", err.to_string()))?;

    let sensor_idx = e.indices("sensor")?;
    contiguous("sensor", &sensor_idx)?;
    let mut sensors = Vec::with_capacity(sensor_idx.len());
    for i in sensor_idx {
        let key = |f: &str| format!("sensor.{i}.{f}");
        let x = e.real(&key("x"))?.ok_or_else(|| Error::config(key("x"), "missing"))?;
        let y = e.real(&key("y"))?.ok_or_else(|| Error::config(key("y"), "missing"))?;
        let sigma = e.real(&key("sigma"))?.unwrap_or(DEFAULT_SIGMA_BEARING);
        sensors.push(Sensor::new(x, y, sigma).map_err(|err| Error::config(key("sigma"), err.to_string()))?);
    }

    let kind = match e.take("truth.kind") {
        None => TrajectoryKind::ConstantVelocity,
        Some((v, line)) => match v.as_str() {
            "constant_velocity" => TrajectoryKind::ConstantVelocity,
            "scripted" => TrajectoryKind::Scripted,
            _ => {
                return Err(Error::config(
                    "truth.kind",
                    format!("line {line}: expected constant_velocity or scripted"),
                ))
            }
        },
    };
    let start = e
        .reals::<4>("truth.start")?
        .map(StateVector4::from_array)
        .ok_or_else(|| Error::config("truth.start", "missing"))?;
    let noisy = e.boolean("truth.noisy")?.unwrap_or(false);
    let turn_idx = e.indices("truth.turn")?;
    contiguous("truth.turn", &turn_idx)?;
    let mut waypoints = Vec::with_capacity(turn_idx.len());
    for i in turn_idx {
        let key = format!("truth.turn.{i}");
        let [step, vx, vy] = e.reals::<3>(&key)?.ok_or_else(|| Error::config(key.as_str(), "missing"))?;
        if step.fract() != 0.0 || step < 1.0 || step > MAX_STEPS as f64 {
            return Err(Error::config(key, "turn step must be a positive integer"));
        }
        waypoints.push(Waypoint {
            step: step as usize,
            vx,
            vy,
        });
    }

    let init_idx = e.indices("init")?;
    contiguous("init", &init_idx)?;
    let mut centers = Vec::with_capacity(init_idx.len());
    for i in init_idx {
        let key = format!("init.{i}.center");
        let c = e.reals::<4>(&key)?.ok_or_else(|| Error::config(key, "missing"))?;
        centers.push(StateVector4::from_array(c));
    }
    let spread = e.reals::<4>("init.spread")?.unwrap_or(DEFAULT_INIT_SPREAD);

    if let Some((key, (_, line))) = e.map.iter().next() {
        return Err(Error::config(key.as_str(), format!("line {line}: unknown key")));
    }

    let config = ScenarioConfig {
        name,
        sensors,
        trajectory: TrajectorySpec {
            kind,
            start,
            waypoints,
            steps,
            noisy,
        },
        init: InitSpec { centers, spread },
        motion,
        particles,
        fusion,
        seed,
        runs,
        divergence_threshold,
        feedback,
        resample,
    };
    config.validate()?;
    Ok(config)
}
