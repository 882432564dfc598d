#![allow(dead_code)]

use std::f64::consts::PI;

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// KS statistic between trial-averaged empirical CDFs: trials are pairs of
/// equal-size samples, so this equals the two-sample KS of the pooled data.
pub fn ks_pooled(trials: &[(Vec<f64>, Vec<f64>)]) -> f64 {
    let a: Vec<f64> = trials.iter().flat_map(|t| t.0.iter().copied()).collect();
    let b: Vec<f64> = trials.iter().flat_map(|t| t.1.iter().copied()).collect();
    ks_two_sample(&a, &b)
}

pub fn gauss(x: f64, m: f64, s: f64) -> f64 {
    (-0.5 * ((x - m) / s).powi(2)).exp() / (s * (2.0 * PI).sqrt())
}

/// Uniform grid with trapezoid weights.
pub fn trapezoid_grid(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (hi - lo) / (n - 1) as f64;
    let xs = (0..n).map(|i| lo + i as f64 * h).collect();
    let ws = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    (xs, ws)
}

pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

/// Continuous PCR5 density of two Gaussians at `x`, by direct trapezoid
/// quadrature of the inner integrals over `[lo, hi]`.
pub fn pcr5_density(x: f64, g1: (f64, f64), g2: (f64, f64), lo: f64, hi: f64, n: usize) -> f64 {
    let (ys, ws) = trapezoid_grid(lo, hi, n);
    let (a, b) = (gauss(x, g1.0, g1.1), gauss(x, g2.0, g2.1));
    let mut acc = 0.0;
    for (y, w) in ys.iter().zip(&ws) {
        let (p1y, p2y) = (gauss(*y, g1.0, g1.1), gauss(*y, g2.0, g2.1));
        if a + p2y > 0.0 {
            acc += w * a * a * p2y / (a + p2y);
        }
        if b + p1y > 0.0 {
            acc += w * b * b * p1y / (b + p1y);
        }
    }
    acc
}

/// `∫∫ p1(y1) p2(y2) (p1(y1) f(y1) + p2(y2) f(y2)) / (p1(y1) + p2(y2))` by 2D
/// trapezoid quadrature, unit-variance inputs.
pub fn pcr5_expectation(m1: f64, m2: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (xs, ws) = trapezoid_grid(m1.min(m2) - 9.0, m1.max(m2) + 9.0, 1201);
    let p1: Vec<f64> = xs.iter().map(|&x| gauss(x, m1, 1.0)).collect();
    let p2: Vec<f64> = xs.iter().map(|&x| gauss(x, m2, 1.0)).collect();
    let mut acc = 0.0;
    for i in 0..xs.len() {
        for j in 0..xs.len() {
            let den = p1[i] + p2[j];
            if den > 0.0 {
                acc += ws[i] * ws[j] * p1[i] * p2[j] * (p1[i] * f(xs[i]) + p2[j] * f(xs[j])) / den;
            }
        }
    }
    acc
}
