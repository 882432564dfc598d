//! Distributed filtering architectures.
//!
//! Every sensor runs a local particle filter (prediction, then update with
//! its own measurement). At each step the local posteriors are fused into
//! one cloud, and the fused cloud is fed back as every local filter's next
//! prior.
//!
//! Four fusion rules are provided:
//!
//! - **Bayes**: reweights the common predicted cloud by the product of all
//!   sensors' likelihoods, since each local posterior divided by the common
//!   prediction is proportional to that sensor's likelihood.
//! - **p-PCR5**: draws one candidate per local posterior and keeps one with
//!   probability proportional to its own-posterior density, estimated as
//!   `kde(predicted) × likelihood`.
//! - **Whitened p-PCR5**: same draw, but the selection weight is the
//!   posterior-to-prediction ratio, which reduces to the likelihood.
//! - **Mean**: draws from the equal-weight mixture of local posteriors.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::filtering::{
    likelihood, predict, systematic_resample, update_weights, Kde, Measurement, MotionModel,
    ParticleCloud, Sensor,
};
use crate::fusion_rules::sampling::{mean_fuse_select_index, weighted_select_index, MAX_REDRAWS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionRule {
    Bayes,
    Pcr5,
    Whitened,
    Mean,
}

impl FusionRule {
    pub const ALL: [FusionRule; 4] = [
        FusionRule::Bayes,
        FusionRule::Pcr5,
        FusionRule::Whitened,
        FusionRule::Mean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FusionRule::Bayes => "bayes",
            FusionRule::Pcr5 => "pcr5",
            FusionRule::Whitened => "whitened",
            FusionRule::Mean => "mean",
        }
    }
}

impl fmt::Display for FusionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FusionRule::ALL
            .into_iter()
            .find(|r| r.name() == s.trim())
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown fusion rule `{s}` (valid: bayes, pcr5, whitened, mean)"
                ))
            })
    }
}

/// When a local filter resamples after its measurement update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ResamplePolicy {
    #[default]
    Always,
    /// Resample only when the effective sample size drops below this
    /// fraction of the cloud size.
    EssBelow(f64),
}

/// Output of one local filter step.
#[derive(Debug, Clone)]
pub struct LocalPosterior {
    pub sensor_id: usize,
    pub sensor: Sensor,
    pub measurement: Measurement,
    /// Posterior cloud after update (and resampling).
    pub cloud: ParticleCloud,
    /// Cloud after prediction, before the measurement update.
    pub predicted: ParticleCloud,
    /// This sensor's likelihood at each particle of `cloud`.
    pub likelihoods: Vec<f64>,
}

/// Prediction followed by the local measurement update.
pub fn local_step<R: Rng + ?Sized>(
    prior: &ParticleCloud,
    sensor: &Sensor,
    z: &Measurement,
    model: &MotionModel,
    n_out: usize,
    rng: &mut R,
) -> Result<LocalPosterior> {
    let predicted = predict(prior, model, rng);
    local_update(predicted, sensor, z, n_out, ResamplePolicy::Always, rng)
}

/// Measurement update of an already predicted cloud.
pub fn local_update<R: Rng + ?Sized>(
    predicted: ParticleCloud,
    sensor: &Sensor,
    z: &Measurement,
    n_out: usize,
    policy: ResamplePolicy,
    rng: &mut R,
) -> Result<LocalPosterior> {
    let (updated, _) = update_weights(&predicted, sensor, z)?;
    let cloud = match policy {
        ResamplePolicy::Always => systematic_resample(&updated, n_out, rng)?,
        ResamplePolicy::EssBelow(frac) => {
            if updated.effective_size() < frac * updated.len() as f64 || n_out != updated.len() {
                systematic_resample(&updated, n_out, rng)?
            } else {
                updated
            }
        }
    };
    let likelihoods = cloud.states().map(|s| likelihood(sensor, z, s)).collect();
    Ok(LocalPosterior {
        sensor_id: z.sensor_id,
        sensor: *sensor,
        measurement: *z,
        cloud,
        predicted,
        likelihoods,
    })
}

fn check_locals(locals: &[LocalPosterior]) -> Result<()> {
    if locals.is_empty() {
        return Err(Error::InvalidParameter("no local posteriors to fuse".into()));
    }
    Ok(())
}

/// Fuses local posteriors with the given rule.
pub fn fuse<R: Rng + ?Sized>(
    rule: FusionRule,
    locals: &[LocalPosterior],
    n_out: usize,
    rng: &mut R,
) -> Result<ParticleCloud> {
    match rule {
        FusionRule::Bayes => fuse_bayes(locals, n_out, rng),
        FusionRule::Pcr5 => fuse_pcr5(locals, n_out, rng),
        FusionRule::Whitened => fuse_whitened(locals, n_out, rng),
        FusionRule::Mean => fuse_mean(locals, n_out, rng),
    }
}

/// Product-of-likelihoods reweighting of the common predicted cloud.
///
/// When the local predictions differ (first step from distinct initial
/// clouds, or no feedback), their equal-weight mixture stands in for the
/// common prediction.
pub fn fuse_bayes<R: Rng + ?Sized>(
    locals: &[LocalPosterior],
    n_out: usize,
    rng: &mut R,
) -> Result<ParticleCloud> {
    check_locals(locals)?;
    let first = &locals[0].predicted;
    let pooled;
    let base = if locals.iter().all(|l| l.predicted == *first) {
        first
    } else {
        pooled = ParticleCloud::mixture(&locals.iter().map(|l| &l.predicted).collect::<Vec<_>>())?;
        &pooled
    };
    let weights = base.particles().iter().map(|p| {
        locals.iter().fold(p.weight, |w, l| {
            w * likelihood(&l.sensor, &l.measurement, &p.state)
        })
    });
    let mut fused = base.with_weights(weights);
    fused.normalize()?;
    systematic_resample(&fused, n_out, rng)
}

/// Draws one candidate per local posterior and picks among them with the
/// given per-candidate weights; repeats `n_out` times.
fn fuse_by_selection<R, W>(
    locals: &[LocalPosterior],
    n_out: usize,
    rng: &mut R,
    weight: W,
) -> Result<ParticleCloud>
where
    R: Rng + ?Sized,
    W: Fn(usize, usize) -> f64,
{
    check_locals(locals)?;
    if n_out == 0 {
        return Err(Error::InvalidParameter("fused cloud size must be at least 1".into()));
    }
    let mut states = Vec::with_capacity(n_out);
    let mut picks = vec![0usize; locals.len()];
    let mut weights = vec![0.0; locals.len()];
    for _ in 0..n_out {
        let mut attempts = 0;
        let chosen = loop {
            for (s, l) in locals.iter().enumerate() {
                picks[s] = l.cloud.draw_index(rng.random());
                weights[s] = weight(s, picks[s]);
            }
            match weighted_select_index(&weights, rng.random()) {
                Ok(s) => break s,
                Err(_) if attempts + 1 < MAX_REDRAWS => attempts += 1,
                Err(_) => return Err(Error::Divergence),
            }
        };
        states.push(locals[chosen].cloud.particles()[picks[chosen]].state);
    }
    ParticleCloud::uniform(states)
}

/// p-PCR5 fusion: selection weight of candidate `y` from sensor `s` is
/// `kde(predicted_s)(y) × p(z_s | y)`.
pub fn fuse_pcr5<R: Rng + ?Sized>(
    locals: &[LocalPosterior],
    n_out: usize,
    rng: &mut R,
) -> Result<ParticleCloud> {
    check_locals(locals)?;
    // Candidates always come from the local clouds, so weigh every local
    // particle once up front.
    let weights: Vec<Vec<f64>> = locals
        .iter()
        .map(|l| {
            let kde = Kde::new(&l.predicted);
            l.cloud
                .states()
                .zip(&l.likelihoods)
                .map(|(s, lik)| kde.density(s) * lik)
                .collect()
        })
        .collect();
    fuse_by_selection(locals, n_out, rng, |s, i| weights[s][i])
}

/// Whitened p-PCR5 fusion: selection weight is the sensor likelihood alone.
pub fn fuse_whitened<R: Rng + ?Sized>(
    locals: &[LocalPosterior],
    n_out: usize,
    rng: &mut R,
) -> Result<ParticleCloud> {
    fuse_by_selection(locals, n_out, rng, |s, i| locals[s].likelihoods[i])
}

/// Equal-weight mixture of the local posteriors.
pub fn fuse_mean<R: Rng + ?Sized>(
    locals: &[LocalPosterior],
    n_out: usize,
    rng: &mut R,
) -> Result<ParticleCloud> {
    check_locals(locals)?;
    let states = (0..n_out)
        .map(|_| {
            let l = &locals[mean_fuse_select_index(locals.len(), rng.random())];
            l.cloud.particles()[l.cloud.draw_index(rng.random())].state
        })
        .collect();
    ParticleCloud::uniform(states)
}

/// Next-step priors: an independent copy of the fused cloud per local filter.
pub fn feedback(fused: &ParticleCloud, locals: &[LocalPosterior]) -> Vec<ParticleCloud> {
    locals.iter().map(|_| fused.clone()).collect()
}
