//! CSV serialization of experiment results.
//!
//! Every file has a header row, `.` decimal separators (Rust's `Display`
//! for `f64`, independent of locale) and `\n` line endings. Files are
//! written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::filtering::ParticleCloud;
use crate::fusion_rules::GridDensity1D;
use crate::scenario::MonteCarloSummary;

pub const TRAJECTORY_HEADER: &str = "step,truth_x,truth_y,est_x,est_y,est_vx,est_vy,pos_error";
pub const CLOUD_HEADER: &str = "step,particle_id,x,y,vx,vy";
pub const SUMMARY_HEADER: &str =
    "run_id,rule,seed,diverged,diverge_step,final_error,mean_pos_rmse";
pub const COMPARE_HEADER: &str =
    "rule,runs,seed,divergence_rate,mean_final_error,mean_pos_rmse,truth_hash";
pub const DENSITY_HEADER: &str = "x,p1,p2,p12_pcr5,p12_bayes";
pub const HISTOGRAM_HEADER: &str = "bin,count_pcr5";

/// Writes `contents` to `dir/name` via a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn table(header: &str) -> String {
    let mut s = String::with_capacity(4096);
    s.push_str(header);
    s.push('\n');
    s
}

/// Run-averaged truth and estimates, one row per step.
pub fn trajectory_csv(summary: &MonteCarloSummary) -> String {
    let mut s = table(TRAJECTORY_HEADER);
    for (t, ((truth, est), err)) in summary
        .mean_truth
        .iter()
        .zip(&summary.mean_estimates)
        .zip(&summary.mean_pos_error)
        .enumerate()
    {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            t + 1,
            truth.x,
            truth.y,
            est.x,
            est.y,
            est.vx,
            est.vy,
            err
        );
    }
    s
}

/// Fused clouds of one run at step 1 and every `every`-th step.
pub fn cloud_csv(clouds: &[ParticleCloud], every: usize) -> String {
    let mut s = table(CLOUD_HEADER);
    for (i, cloud) in clouds.iter().enumerate() {
        let step = i + 1;
        if step != 1 && step % every.max(1) != 0 {
            continue;
        }
        for (id, p) in cloud.states().enumerate() {
            let _ = writeln!(s, "{step},{id},{},{},{},{}", p.x, p.y, p.vx, p.vy);
        }
    }
    s
}

/// One row per run.
pub fn summary_csv(summary: &MonteCarloSummary) -> String {
    let mut s = table(SUMMARY_HEADER);
    for (run, (m, seed)) in summary.run_metrics.iter().zip(&summary.run_seeds).enumerate() {
        let _ = writeln!(
            s,
            "{run},{},{seed},{},{},{},{}",
            summary.rule,
            u8::from(m.diverged),
            m.diverge_step.map_or(-1, |k| k as i64),
            m.final_error,
            m.mean_pos_rmse()
        );
    }
    s
}

/// One row per rule. `mean_final_error` is empty when every run diverged.
pub fn compare_csv(summaries: &[MonteCarloSummary]) -> String {
    let mut s = table(COMPARE_HEADER);
    for m in summaries {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            m.rule,
            m.runs,
            m.seed,
            m.divergence_rate,
            m.mean_final_error.map(|v| v.to_string()).unwrap_or_default(),
            m.mean_pos_rmse_overall(),
            m.truth_hash
        );
    }
    s
}

/// Input and fused densities on a shared grid.
pub fn density_csv(
    p1: &GridDensity1D,
    p2: &GridDensity1D,
    pcr5: &GridDensity1D,
    bayes: &GridDensity1D,
) -> String {
    let mut s = table(DENSITY_HEADER);
    for i in 0..p1.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            p1.x(i),
            p1.values()[i],
            p2.values()[i],
            pcr5.values()[i],
            bayes.values()[i]
        );
    }
    s
}

/// Histogram of samples over `bins` equal-width bins on `[lo, hi]`; the
/// `bin` column is the bin center. Samples outside the range are dropped.
pub fn histogram_csv(samples: &[f64], lo: f64, hi: f64, bins: usize) -> String {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        if (lo..=hi).contains(&x) {
            counts[(((x - lo) / width) as usize).min(bins - 1)] += 1;
        }
    }
    let mut s = table(HISTOGRAM_HEADER);
    for (b, c) in counts.iter().enumerate() {
        let _ = writeln!(s, "{},{c}", lo + (b as f64 + 0.5) * width);
    }
    s
}
