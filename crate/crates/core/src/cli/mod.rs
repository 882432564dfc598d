//! Batch command-line front end.
//!
//! ```text
//! ppcr5 fuse-demo --mean1 0 --sigma1 1 --mean2 10 --sigma2 1 --out demo
//! ppcr5 run --scenario table1_first --fusion whitened --runs 100 --out out
//! ppcr5 compare --scenario poor_init --rules bayes,pcr5,whitened,mean --out cmp
//! ```

pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::distributed::FusionRule;
use crate::error::{Error, Result};
use crate::fusion_rules::{grid_bayes_fuse, grid_pcr5_fuse, pcr5_sample_batch, Gaussian1D, GridDensity1D};
use crate::rng::stream;
use crate::scenario::{self, run_monte_carlo, run_replicate, ScenarioConfig};

use output::{
    cloud_csv, compare_csv, density_csv, histogram_csv, summary_csv, trajectory_csv, write_atomic,
};

/// Histogram resolution of `fuse-demo`.
pub const DEMO_BINS: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "ppcr5", version, about = "p-PCR5 fusion demos and distributed bearing-only tracking experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fuse two 1D Gaussians by quadrature and by sampling.
    FuseDemo(FuseDemoArgs),
    /// Run a Monte-Carlo tracking experiment.
    Run(RunArgs),
    /// Run one scenario under several fusion rules on identical worlds.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct FuseDemoArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mean1: f64,
    #[arg(long)]
    pub sigma1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub mean2: f64,
    #[arg(long)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "fuse_demo")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Traj,
    Cloud,
    Metrics,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_parser = parse_rule)]
    pub fusion: Option<FusionRule>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "traj,metrics")]
    pub emit: Vec<Emit>,
    /// Write the cloud of step 1 and of every K-th step.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub cloud_every: u64,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_parser = parse_rule, value_delimiter = ',', required = true)]
    pub rules: Vec<FusionRule>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn parse_rule(s: &str) -> std::result::Result<FusionRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses an argument vector (including the program name).
pub fn parse_args<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)
}

/// Runs a parsed command and returns the text to print on stdout.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::FuseDemo(a) => cmd_fuse_demo(a),
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

pub fn cmd_fuse_demo(a: &FuseDemoArgs) -> Result<String> {
    let g1 = Gaussian1D::new(a.mean1, a.sigma1)?;
    let g2 = Gaussian1D::new(a.mean2, a.sigma2)?;
    let (lo, hi, n) = GridDensity1D::demo_bounds(&[g1, g2]);
    let d1 = GridDensity1D::from_gaussian(&g1, lo, hi, n)?;
    let d2 = GridDensity1D::from_gaussian(&g2, lo, hi, n)?;
    let pcr5 = grid_pcr5_fuse(&d1, &d2)?.density;
    let bayes = grid_bayes_fuse(&d1, &d2)?;
    let samples = pcr5_sample_batch(&g1, &g2, a.samples, &mut stream(a.seed, 0))?;
    write_atomic(&a.out, "density.csv", &density_csv(&d1, &d2, &pcr5, &bayes))?;
    write_atomic(&a.out, "histogram.csv", &histogram_csv(&samples, lo, hi, DEMO_BINS))?;
    Ok(format!(
        "pcr5 mean={} var={}; bayes mean={} var={}; samples={}\n",
        pcr5.mean(),
        pcr5.variance(),
        bayes.mean(),
        bayes.variance(),
        samples.len()
    ))
}

/// Scenario with command-line overrides applied and validated.
pub fn load_config(a: &RunArgs) -> Result<ScenarioConfig> {
    let mut c = scenario::load(&a.scenario)?;
    if let Some(r) = a.fusion {
        c.fusion = r;
    }
    if let Some(n) = a.runs {
        c.runs = n;
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    if let Some(n) = a.particles {
        c.particles = n;
    }
    if let Some(n) = a.steps {
        c.trajectory.steps = n;
    }
    c.validate()?;
    Ok(c)
}

fn summary_line(s: &scenario::MonteCarloSummary) -> String {
    format!(
        "rule={} runs={} divergence_rate={} mean_final_error={}\n",
        s.rule,
        s.runs,
        s.divergence_rate,
        s.mean_final_error
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"))
    )
}

pub fn cmd_run(a: &RunArgs) -> Result<String> {
    let config = load_config(a)?;
    let summary = run_monte_carlo(&config)?;
    if a.emit.contains(&Emit::Traj) {
        write_atomic(&a.out, "trajectory.csv", &trajectory_csv(&summary))?;
    }
    if a.emit.contains(&Emit::Metrics) {
        write_atomic(&a.out, "summary.csv", &summary_csv(&summary))?;
    }
    if a.emit.contains(&Emit::Cloud) {
        let (_, first) = run_replicate(&config, 0)?;
        write_atomic(&a.out, "cloud.csv", &cloud_csv(&first.clouds, a.cloud_every as usize))?;
    }
    Ok(summary_line(&summary))
}

pub fn cmd_compare(a: &CompareArgs) -> Result<String> {
    let mut config = scenario::load(&a.scenario)?;
    if let Some(n) = a.runs {
        config.runs = n;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    let mut summaries = Vec::with_capacity(a.rules.len());
    let mut text = String::new();
    for rule in &a.rules {
        config.fusion = *rule;
        let s = run_monte_carlo(&config)?;
        text += &summary_line(&s);
        summaries.push(s);
    }
    write_atomic(&a.out, "compare.csv", &compare_csv(&summaries))?;
    Ok(text)
}
