//! Acceptance suite: one PASS/FAIL line per criterion, plus informational
//! NOTE lines. Failures are reported but only fail the process when
//! `PPCR5_ACCEPTANCE_STRICT=1`, so a plain `cargo test` still runs the other
//! suites.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{ks_one_sample, ks_pooled, mean_sd, pcr5_density, pcr5_expectation, trapezoid_grid};
use ppcr5::distributed::{fuse_whitened, FusionRule, LocalPosterior};
use ppcr5::filtering::{Measurement, ParticleCloud, Sensor, StateVector4};
use ppcr5::fusion_rules::{
    bayes_fuse_gaussian, discrete_p_pcr5, discrete_pcr5, grid_pcr5_fuse, pcr5_sample_batch,
    DiscreteBBA, DiscreteProbability, FiniteFrame, Gaussian1D, GridDensity1D,
};
use ppcr5::rng::stream;
use ppcr5::scenario::{bundled, run_monte_carlo, run_replicate};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn main() {
    type Check = (u32, Duration, fn() -> Verdict);
    let criteria: [Check; 10] = [
        (1, secs(1), c1_discrete_example),
        (2, secs(1), c2_singleton_equivalence),
        (3, secs(5), c3_gaussian_bayes),
        (4, secs(10), c4_sampler_vs_quadrature),
        (5, secs(10), c5_expectation_identity),
        (6, secs(5), c6_modes),
        (7, secs(30), c7_whitened_identity),
        (8, secs(180), c8_tracking_robustness),
        (9, secs(30), c9_mean_ablation),
        (10, secs(30), c10_determinism),
    ];
    let mut failed = 0;
    for (n, budget, check) in criteria {
        let t = Instant::now();
        let v = check();
        let took = t.elapsed();
        let pass = v.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        let status = if pass { "PASS" } else { "FAIL" };
        let slow = if took > budget { " [over runtime budget]" } else { "" };
        println!("criterion {n}: {status} — {} ({:.2}s){slow}", v.detail, took.as_secs_f64());
    }
    note_cross_shaped_cloud();
    note_whitened_vs_bayes_poor_init();
    println!("{} of 10 criteria passed, {failed} FAILED", 10 - failed);
    if failed > 0 && std::env::var("PPCR5_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn c1_discrete_example() -> Verdict {
    let frame = FiniteFrame::new(["A", "B"]).unwrap();
    let (a, b, ab) = (
        frame.singleton("A").unwrap(),
        frame.singleton("B").unwrap(),
        frame.full(),
    );
    let m1 = DiscreteBBA::new(frame.clone(), [(a, 0.6), (ab, 0.4)]).unwrap();
    let m2 = DiscreteBBA::new(frame, [(b, 0.3), (ab, 0.7)]).unwrap();
    let m = discrete_pcr5(&m1, &m2).unwrap();
    let got = [m.mass(a), m.mass(b), m.mass(ab)];
    let dev = got
        .iter()
        .zip([0.54, 0.18, 0.28])
        .map(|(g, e)| (g - e).abs())
        .fold(0.0, f64::max);
    verdict(dev < 1e-12, format!("m(A), m(B), m(A∪B) = {got:?}, max deviation {dev:.1e}"))
}

fn c2_singleton_equivalence() -> Verdict {
    let mut rng = stream(9001, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let size = rng.random_range(2..=5);
        let frame = FiniteFrame::lettered(size).unwrap();
        let draw = |rng: &mut ppcr5::rng::SimRng| {
            let raw: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
            let t: f64 = raw.iter().sum();
            DiscreteProbability::new(frame.clone(), raw.iter().map(|r| r / t).collect()).unwrap()
        };
        let (p1, p2) = (draw(&mut rng), draw(&mut rng));
        let fused = discrete_p_pcr5(&p1, &p2).unwrap();
        let bba = discrete_pcr5(&DiscreteBBA::from_probability(&p1), &DiscreteBBA::from_probability(&p2)).unwrap();
        for (i, label) in frame.elements().iter().enumerate() {
            let s = frame.singleton(label).unwrap();
            worst = worst.max((fused.probs()[i] - bba.mass(s)).abs());
        }
    }
    verdict(worst < 1e-12, format!("1000 random pairs, max deviation {worst:.1e}"))
}

/// Normalized product of two Gaussians on a fine grid, in log space.
fn grid_product_moments(g1: (f64, f64), g2: (f64, f64)) -> (f64, f64) {
    let smax = g1.1.max(g2.1);
    let (xs, ws) = trapezoid_grid(g1.0.min(g2.0) - 10.0 * smax, g1.0.max(g2.0) + 10.0 * smax, 40_001);
    let logp: Vec<f64> = xs
        .iter()
        .map(|x| -0.5 * (((x - g1.0) / g1.1).powi(2) + ((x - g2.0) / g2.1).powi(2)))
        .collect();
    let top = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let p: Vec<f64> = logp.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = p.iter().zip(&ws).map(|(p, w)| p * w).sum();
    let m = xs.iter().zip(&p).zip(&ws).map(|((x, p), w)| x * p * w).sum::<f64>() / z;
    let v = xs.iter().zip(&p).zip(&ws).map(|((x, p), w)| (x - m).powi(2) * p * w).sum::<f64>() / z;
    (m, v)
}

fn c3_gaussian_bayes() -> Verdict {
    let mut rng = stream(9002, 0);
    let (mut dm, mut dv) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let a = (rng.random_range(-5.0..5.0), rng.random_range(0.3..3.0));
        let b = (rng.random_range(-5.0..5.0), rng.random_range(0.3..3.0));
        let f = bayes_fuse_gaussian(&Gaussian1D::new(a.0, a.1).unwrap(), &Gaussian1D::new(b.0, b.1).unwrap());
        let (m, v) = grid_product_moments(a, b);
        dm = dm.max((f.mean() - m).abs());
        dv = dv.max((f.variance() - v).abs());
    }
    let s = 1.7;
    let eq = bayes_fuse_gaussian(&Gaussian1D::new(-1.25, s).unwrap(), &Gaussian1D::new(3.5, s).unwrap());
    let exact = eq.mean() == 0.5 * (-1.25 + 3.5) && eq.variance() == s * s / 2.0;
    verdict(
        dm < 1e-6 && dv < 1e-6 && exact,
        format!("max |Δmean| {dm:.1e}, max |Δvar| {dv:.1e}; equal-sigma case exact: {exact}"),
    )
}

fn c4_sampler_vs_quadrature() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, d) in [1.0, 3.0, 10.0].into_iter().enumerate() {
        let g = [Gaussian1D::new(0.0, 1.0).unwrap(), Gaussian1D::new(d, 1.0).unwrap()];
        let (lo, hi, n) = GridDensity1D::demo_bounds(&g);
        let d1 = GridDensity1D::from_gaussian(&g[0], lo, hi, n).unwrap();
        let d2 = GridDensity1D::from_gaussian(&g[1], lo, hi, n).unwrap();
        let grid = grid_pcr5_fuse(&d1, &d2).unwrap().density;
        // grid must agree with an independent pointwise quadrature
        let oracle_dev = (0..grid.len())
            .step_by(97)
            .map(|i| (grid.values()[i] - pcr5_density(grid.x(i), (0.0, 1.0), (d, 1.0), lo, hi, 2001)).abs())
            .fold(0.0, f64::max);
        let s = pcr5_sample_batch(&g[0], &g[1], 100_000, &mut stream(9003, k as u64)).unwrap();
        let ks = ks_one_sample(&s, |x| grid.mass_below(x));
        pass &= ks < 0.01 && oracle_dev < 1e-4;
        parts.push(format!("d={d}: KS {ks:.4} (grid vs pointwise quadrature {oracle_dev:.1e})"));
    }
    verdict(pass, parts.join(", "))
}

type Moment = (u32, fn(f64) -> f64);

fn c5_expectation_identity() -> Verdict {
    let g1 = Gaussian1D::new(0.0, 1.0).unwrap();
    let g2 = Gaussian1D::new(2.5, 1.0).unwrap();
    let s = pcr5_sample_batch(&g1, &g2, 100_000, &mut stream(9004, 0)).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    let moments: [Moment; 2] = [(1, |y| y), (2, |y| y * y)];
    for (k, f) in moments {
        let vals: Vec<f64> = s.iter().map(|&y| f(y)).collect();
        let (mc, sd) = mean_sd(&vals);
        let se = sd / (vals.len() as f64).sqrt();
        let rhs = pcr5_expectation(0.0, 2.5, f);
        let z = (mc - rhs).abs() / se;
        pass &= z < 3.0;
        parts.push(format!("moment {k}: MC {mc:.4} vs quadrature {rhs:.4} ({z:.2} SE)"));
    }
    verdict(pass, parts.join(", "))
}

fn c6_modes() -> Verdict {
    let fused = |m2: f64| {
        let g = [Gaussian1D::new(0.0, 1.0).unwrap(), Gaussian1D::new(m2, 1.0).unwrap()];
        let (lo, hi, n) = GridDensity1D::demo_bounds(&g);
        let d1 = GridDensity1D::from_gaussian(&g[0], lo, hi, n).unwrap();
        let d2 = GridDensity1D::from_gaussian(&g[1], lo, hi, n).unwrap();
        (grid_pcr5_fuse(&d1, &d2).unwrap().density, ppcr5::fusion_rules::grid_bayes_fuse(&d1, &d2).unwrap())
    };
    let (pcr5, bayes) = fused(10.0);
    let (np, nb) = (pcr5.local_maxima(1e-3).len(), bayes.local_maxima(1e-3).len());
    let v = fused(1.0).0.variance();
    verdict(
        np == 2 && nb == 1 && v > 0.5 && v < 1.0,
        format!("distant means: pcr5 {np} maxima, Bayes {nb}; close means pcr5 variance {v:.4}"),
    )
}

fn c7_whitened_identity() -> Verdict {
    let sensors = [Sensor::new(0.0, 100.0, 0.01).unwrap(), Sensor::new(100.0, 0.0, 0.01).unwrap()];
    let local = |id: usize, p: &ParticleCloud| LocalPosterior {
        sensor_id: id,
        sensor: sensors[id],
        measurement: Measurement { sensor_id: id, bearing: 0.0, time: 1 },
        cloud: p.clone(),
        predicted: p.clone(),
        likelihoods: vec![0.7; p.len()],
    };
    let mut trials = [Vec::new(), Vec::new()];
    for k in 0..100 {
        let mut rng = stream(9005, k);
        let p = ParticleCloud::gaussian(StateVector4::new(200.0, 10.0, 0.0, 1.0), [5.0, 5.0, 0.5, 0.5], 200, &mut rng)
            .unwrap();
        let out = fuse_whitened(&[local(0, &p), local(1, &p)], 200, &mut rng).unwrap();
        trials[0].push((out.states().map(|s| s.x).collect(), p.states().map(|s| s.x).collect()));
        trials[1].push((out.states().map(|s| s.y).collect(), p.states().map(|s| s.y).collect()));
    }
    let (kx, ky) = (ks_pooled(&trials[0]), ks_pooled(&trials[1]));
    verdict(kx < 0.02 && ky < 0.02, format!("trial-averaged KS x {kx:.4}, y {ky:.4}"))
}

fn divergence(name: &str, rule: FusionRule) -> (f64, f64) {
    let mut c = bundled(name).unwrap();
    c.fusion = rule;
    let t = Instant::now();
    let s = run_monte_carlo(&c).unwrap();
    assert_eq!(s.runs, 100);
    (s.divergence_rate, t.elapsed().as_secs_f64())
}

fn c8_tracking_robustness() -> Verdict {
    let (w, tw) = divergence("table1_first", FusionRule::Whitened);
    let (p, tp) = divergence("table1_first", FusionRule::Pcr5);
    let (b, tb) = divergence("poor_init", FusionRule::Bayes);
    let fast = tw < 60.0 && tp < 60.0 && tb < 60.0;
    verdict(
        w <= 0.10 && p <= 0.20 && (0.15..=0.60).contains(&b) && fast,
        format!(
            "whitened {:.0}% (≤10%), pcr5 {:.0}% (≤20%), Bayes poor-init {:.0}% (band 15–60%); \
             batch times {tw:.1}s/{tp:.1}s/{tb:.1}s",
            100.0 * w,
            100.0 * p,
            100.0 * b
        ),
    )
}

fn spread_curve(rule: FusionRule) -> Vec<f64> {
    let mut c = bundled("table1_first").unwrap();
    c.fusion = rule;
    c.runs = 20;
    run_monte_carlo(&c).unwrap().mean_spread
}

fn c9_mean_ablation() -> Verdict {
    let ratio = |curve: &[f64]| curve[44] / curve.iter().cloned().fold(0.0, f64::max);
    let (mean, whitened) = (spread_curve(FusionRule::Mean), spread_curve(FusionRule::Whitened));
    let (rm, rw) = (ratio(&mean), ratio(&whitened));
    verdict(
        rm >= 0.8 && rw <= 0.4,
        format!(
            "step-45 spread / max: mean {rm:.3} (≥0.8), whitened {rw:.3} (≤0.4); \
             mean spread at step 10 vs 45: {:.2} → {:.2}",
            mean[9], mean[44]
        ),
    )
}

fn c10_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_ppcr5"))
            .args(["run", "--scenario", "table1_second", "--runs", "10", "--seed", "42", "--out"])
            .arg(&out)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(out.join("summary.csv")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    verdict(a == b, format!("two invocations, {} bytes, identical: {}", a.len(), a == b))
}

/// Angle between an axis and a direction, folded into [0, 90] degrees.
fn axis_angle(axis: f64, dir: f64) -> f64 {
    let d = (axis - dir).rem_euclid(std::f64::consts::PI).to_degrees();
    d.min(180.0 - d)
}

/// After the late turn of the curved scenario, assign fused-cloud particles to
/// the sensor whose bearing line through the cloud mean they sit closest to,
/// and compare each group's principal axis with that bearing.
fn note_cross_shaped_cloud() {
    let mut c = bundled("curved").unwrap();
    c.fusion = FusionRule::Whitened;
    let mut errs = [Vec::new(), Vec::new()];
    for run in 0..10 {
        let (rep, out) = run_replicate(&c, run).unwrap();
        if out.metrics.diverged {
            continue;
        }
        for step in 151..=c.steps() {
            let cloud = &out.clouds[step - 1];
            let m = cloud.mean();
            let truth = rep.truth[step];
            let dirs: Vec<f64> = c.sensors.iter().map(|s| (truth.y - s.y).atan2(truth.x - s.x)).collect();
            let mut groups = [Vec::new(), Vec::new()];
            for s in cloud.states() {
                let (dx, dy) = (s.x - m.x, s.y - m.y);
                let off = |a: f64| (dx * a.sin() - dy * a.cos()).abs();
                groups[usize::from(off(dirs[1]) < off(dirs[0]))].push((s.x, s.y));
            }
            for (k, g) in groups.iter().enumerate() {
                if g.len() < 20 {
                    continue;
                }
                let n = g.len() as f64;
                let (mx, my) = (g.iter().map(|p| p.0).sum::<f64>() / n, g.iter().map(|p| p.1).sum::<f64>() / n);
                let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
                for p in g {
                    xx += (p.0 - mx) * (p.0 - mx);
                    xy += (p.0 - mx) * (p.1 - my);
                    yy += (p.1 - my) * (p.1 - my);
                }
                let axis = 0.5 * (2.0 * xy).atan2(xx - yy);
                errs[k].push(axis_angle(axis, dirs[k]));
            }
        }
    }
    let summary: Vec<String> = errs
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let mut e = e.clone();
            e.sort_by(f64::total_cmp);
            let within = e.iter().filter(|d| **d <= 15.0).count();
            let median = e.get(e.len() / 2).copied().unwrap_or(f64::NAN);
            format!("sensor {}: median {median:.1}°, {within}/{} within 15°", k + 1, e.len())
        })
        .collect();
    println!("NOTE cross-shaped cloud after the late turn (curved, whitened): {}", summary.join("; "));
}

fn note_whitened_vs_bayes_poor_init() {
    let (w, _) = divergence("poor_init", FusionRule::Whitened);
    let (b, _) = divergence("poor_init", FusionRule::Bayes);
    println!(
        "NOTE poor-init divergence: whitened {:.0}%, Bayes {:.0}% (whitened ≤ Bayes: {})",
        100.0 * w,
        100.0 * b,
        w <= b
    );
}

