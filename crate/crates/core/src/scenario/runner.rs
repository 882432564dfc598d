//! Tracking runs and Monte-Carlo batches.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::distributed::{feedback, fuse, local_update, FusionRule, LocalPosterior};
use crate::error::Result;
use crate::filtering::{predict, Measurement, ParticleCloud, StateVector4};
use crate::rng::{derive_seed, stream, SimRng};

use super::config::ScenarioConfig;
use super::sim::{generate_measurements, simulate_truth};

/// Generator stream assignment inside one run.
mod streams {
    pub const TRUTH: u64 = 0;
    pub const MEASUREMENTS: u64 = 1;
    pub const INIT: u64 = 2;
    pub const PREDICT: u64 = 3;
    pub const FUSION: u64 = 4;
    pub const SENSOR_BASE: u64 = 16;
}

/// Per-run metrics; every series has one entry per step `1..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// RMS particle position error around the truth.
    pub pos_rmse: Vec<f64>,
    /// RMS particle velocity error around the truth.
    pub speed_rmse: Vec<f64>,
    /// Position error of the weighted-mean estimate.
    pub pos_error: Vec<f64>,
    /// Position spread `sqrt(var_x + var_y)` of the fused cloud.
    pub spread: Vec<f64>,
    pub estimates: Vec<StateVector4>,
    pub diverged: bool,
    /// First step from which the run stayed diverged.
    pub diverge_step: Option<usize>,
    pub final_error: f64,
    /// Lower-layer failure that stopped the filter, if any.
    pub failure: Option<String>,
}

impl RunMetrics {
    pub fn mean_pos_rmse(&self) -> f64 {
        mean(&self.pos_rmse)
    }
}

/// Result of [`run_filter`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub metrics: RunMetrics,
    /// Fused cloud after each step; frozen after a filter failure.
    pub clouds: Vec<ParticleCloud>,
}

/// Simulated world of one replicate: truth for steps `0..=steps` and the
/// matching measurements.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub seed: u64,
    pub truth: Vec<StateVector4>,
    pub measurements: Vec<Vec<Measurement>>,
}

impl Replicate {
    /// Truth and measurements depend only on the replicate seed, never on
    /// the fusion rule, so rules compared on one seed see the same world.
    pub fn generate(config: &ScenarioConfig, run: usize) -> Result<Self> {
        let seed = derive_seed(config.seed, run as u64);
        let truth = simulate_truth(
            &config.trajectory,
            &config.motion,
            &mut stream(seed, streams::TRUTH),
        );
        let measurements =
            generate_measurements(&truth, &config.sensors, &mut stream(seed, streams::MEASUREMENTS))?;
        Ok(Self {
            seed,
            truth,
            measurements,
        })
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn initial_clouds(config: &ScenarioConfig, seed: u64) -> Result<Vec<ParticleCloud>> {
    let mut rng = stream(seed, streams::INIT);
    config
        .init
        .centers
        .iter()
        .map(|c| ParticleCloud::gaussian(*c, config.init.spread, config.particles, &mut rng))
        .collect()
}

struct StepState {
    priors: Vec<ParticleCloud>,
    /// Fused cloud of the previous step, shared by all locals under feedback.
    shared: Option<ParticleCloud>,
}

fn filter_step(
    config: &ScenarioConfig,
    state: &mut StepState,
    z: &[Measurement],
    predict_rng: &mut SimRng,
    sensor_rngs: &mut [SimRng],
    fusion_rng: &mut SimRng,
) -> Result<ParticleCloud> {
    // Under feedback every local shares one prediction of the fused cloud,
    // which is the common predicted cloud the Bayesian product needs.
    let common = state
        .shared
        .as_ref()
        .map(|fused| predict(fused, &config.motion, predict_rng));
    let mut locals: Vec<LocalPosterior> = Vec::with_capacity(config.sensors.len());
    for (s, (sensor, rng)) in config.sensors.iter().zip(sensor_rngs.iter_mut()).enumerate() {
        let predicted = match &common {
            Some(c) => c.clone(),
            None => predict(&state.priors[s], &config.motion, rng),
        };
        locals.push(local_update(
            predicted,
            sensor,
            &z[s],
            config.particles,
            config.resample,
            rng,
        )?);
    }
    let fused = fuse(config.fusion, &locals, config.particles, fusion_rng)?;
    if config.feedback {
        state.priors = feedback(&fused, &locals);
        state.shared = Some(fused.clone());
    } else {
        state.priors = locals.into_iter().map(|l| l.cloud).collect();
    }
    Ok(fused)
}

fn cloud_errors(cloud: &ParticleCloud, truth: &StateVector4) -> (f64, f64) {
    let (mut p, mut v, mut w) = (0.0, 0.0, 0.0);
    for q in cloud.particles() {
        p += q.weight * q.state.position_distance(truth).powi(2);
        v += q.weight * q.state.speed_distance(truth).powi(2);
        w += q.weight;
    }
    ((p / w).sqrt(), (v / w).sqrt())
}

/// Runs the distributed filter over one replicate.
///
/// A failure in a lower layer (all weights underflowing, redraw cap hit)
/// ends filtering: the run is flagged diverged at that step and the last
/// fused cloud is held for the remaining metrics.
pub fn run_filter(config: &ScenarioConfig, replicate: &Replicate) -> Result<RunOutput> {
    let seed = replicate.seed;
    let steps = config.steps();
    let mut state = StepState {
        priors: initial_clouds(config, seed)?,
        shared: None,
    };
    let mut predict_rng = stream(seed, streams::PREDICT);
    let mut fusion_rng = stream(seed, streams::FUSION);
    let mut sensor_rngs: Vec<SimRng> = (0..config.sensors.len())
        .map(|s| stream(seed, streams::SENSOR_BASE + s as u64))
        .collect();

    let mut clouds: Vec<ParticleCloud> = Vec::with_capacity(steps);
    let mut failure: Option<(usize, String)> = None;
    let mut current = ParticleCloud::mixture(&state.priors.iter().collect::<Vec<_>>())?;
    let mut m = RunMetrics {
        pos_rmse: Vec::with_capacity(steps),
        speed_rmse: Vec::with_capacity(steps),
        pos_error: Vec::with_capacity(steps),
        spread: Vec::with_capacity(steps),
        estimates: Vec::with_capacity(steps),
        diverged: false,
        diverge_step: None,
        final_error: 0.0,
        failure: None,
    };

    for t in 1..=steps {
        if failure.is_none() {
            match filter_step(
                config,
                &mut state,
                &replicate.measurements[t],
                &mut predict_rng,
                &mut sensor_rngs,
                &mut fusion_rng,
            ) {
                Ok(fused) => current = fused,
                Err(e) => failure = Some((t, e.to_string())),
            }
        }
        let truth = &replicate.truth[t];
        let est = current.mean();
        let (pr, sr) = cloud_errors(&current, truth);
        m.pos_rmse.push(pr);
        m.speed_rmse.push(sr);
        m.pos_error.push(est.position_distance(truth));
        m.spread.push(current.position_spread());
        m.estimates.push(est);
        clouds.push(current.clone());
    }

    m.final_error = m.pos_error.last().copied().unwrap_or(0.0);
    if let Some((t, msg)) = failure {
        m.diverged = true;
        m.diverge_step = Some(t);
        m.failure = Some(msg);
    } else if m.final_error > config.divergence_threshold {
        m.diverged = true;
        let stay = m
            .pos_error
            .iter()
            .rposition(|e| *e <= config.divergence_threshold)
            .map_or(0, |i| i + 1);
        m.diverge_step = Some(stay + 1);
    }
    Ok(RunOutput { metrics: m, clouds })
}

/// One full replicate: world generation then filtering.
pub fn run_replicate(config: &ScenarioConfig, run: usize) -> Result<(Replicate, RunOutput)> {
    let rep = Replicate::generate(config, run)?;
    let out = run_filter(config, &rep)?;
    Ok((rep, out))
}

/// Aggregate of a Monte-Carlo batch.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub rule: FusionRule,
    pub runs: usize,
    pub seed: u64,
    /// Diverged runs / runs.
    pub divergence_rate: f64,
    /// Mean final error over converged runs; `None` when every run diverged.
    pub mean_final_error: Option<f64>,
    /// Per-step means over all runs.
    pub mean_pos_rmse: Vec<f64>,
    pub mean_speed_rmse: Vec<f64>,
    pub mean_pos_error: Vec<f64>,
    pub mean_spread: Vec<f64>,
    pub mean_estimates: Vec<StateVector4>,
    /// Per-step truth averaged over runs.
    pub mean_truth: Vec<StateVector4>,
    pub run_seeds: Vec<u64>,
    pub run_metrics: Vec<RunMetrics>,
    /// SHA-256 over all truth trajectories; equal across rules run on the
    /// same scenario and seed.
    pub truth_hash: String,
}

impl MonteCarloSummary {
    /// Mean over runs of each run's mean position RMSE.
    pub fn mean_pos_rmse_overall(&self) -> f64 {
        mean(&self.run_metrics.iter().map(RunMetrics::mean_pos_rmse).collect::<Vec<_>>())
    }

    pub fn diverged_runs(&self) -> usize {
        self.run_metrics.iter().filter(|m| m.diverged).count()
    }
}

/// Runs `config.runs` independent replicates in parallel and aggregates
/// them in run order, so the result depends only on the config.
pub fn run_monte_carlo(config: &ScenarioConfig) -> Result<MonteCarloSummary> {
    config.validate()?;
    let results: Vec<(Vec<StateVector4>, u64, RunMetrics)> = (0..config.runs)
        .into_par_iter()
        .map(|r| run_replicate(config, r).map(|(rep, out)| (rep.truth, rep.seed, out.metrics)))
        .collect::<Result<_>>()?;
    Ok(summarize(config, results))
}

fn summarize(config: &ScenarioConfig, results: Vec<(Vec<StateVector4>, u64, RunMetrics)>) -> MonteCarloSummary {
    let steps = config.steps();
    let n = results.len() as f64;
    let mut hasher = Sha256::new();
    let mut pos_rmse = vec![0.0; steps];
    let mut speed_rmse = vec![0.0; steps];
    let mut pos_error = vec![0.0; steps];
    let mut spread = vec![0.0; steps];
    let mut est = vec![[0.0; 4]; steps];
    let mut truth_mean = vec![[0.0; 4]; steps];
    let mut seeds = Vec::with_capacity(results.len());
    let mut metrics = Vec::with_capacity(results.len());
    for (truth, seed, m) in results {
        for s in &truth {
            for v in s.to_array() {
                hasher.update(v.to_le_bytes());
            }
        }
        for t in 0..steps {
            pos_rmse[t] += m.pos_rmse[t];
            speed_rmse[t] += m.speed_rmse[t];
            pos_error[t] += m.pos_error[t];
            spread[t] += m.spread[t];
            let (e, tr) = (m.estimates[t].to_array(), truth[t + 1].to_array());
            for k in 0..4 {
                est[t][k] += e[k];
                truth_mean[t][k] += tr[k];
            }
        }
        seeds.push(seed);
        metrics.push(m);
    }
    let scale = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x / n).collect() };
    let diverged = metrics.iter().filter(|m| m.diverged).count();
    let converged: Vec<f64> = metrics.iter().filter(|m| !m.diverged).map(|m| m.final_error).collect();
    MonteCarloSummary {
        rule: config.fusion,
        runs: metrics.len(),
        seed: config.seed,
        divergence_rate: diverged as f64 / metrics.len() as f64,
        mean_final_error: (!converged.is_empty()).then(|| mean(&converged)),
        mean_pos_rmse: scale(pos_rmse),
        mean_speed_rmse: scale(speed_rmse),
        mean_pos_error: scale(pos_error),
        mean_spread: scale(spread),
        mean_estimates: est.into_iter().map(|a| StateVector4::from_array(a.map(|v| v / n))).collect(),
        mean_truth: truth_mean.into_iter().map(|a| StateVector4::from_array(a.map(|v| v / n))).collect(),
        run_seeds: seeds,
        run_metrics: metrics,
        truth_hash: hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect(),
    }
}
