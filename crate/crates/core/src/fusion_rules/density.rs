//! One-dimensional densities: closed-form Gaussians and trapezoidal grids.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Grid points used by the Gaussian demos.
pub const DEFAULT_GRID_POINTS: usize = 4001;

/// Half-width of the demo grid, in units of the largest sigma.
pub const DEFAULT_GRID_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian1D {
    mean: f64,
    variance: f64,
}

impl Gaussian1D {
    pub fn new(mean: f64, sigma: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter(format!("gaussian mean {mean}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gaussian sigma {sigma}")));
        }
        Ok(Self {
            mean,
            variance: sigma * sigma,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn pdf(&self, x: f64) -> f64 {
        normal_pdf(x - self.mean, self.sigma())
    }
}

/// Density of `N(0, sigma²)` at `dx`.
pub fn normal_pdf(dx: f64, sigma: f64) -> f64 {
    let z = dx / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

/// Bayesian fusion of two Gaussian estimates under a uniform prior.
pub fn bayes_fuse_gaussian(g1: &Gaussian1D, g2: &Gaussian1D) -> Gaussian1D {
    let (v1, v2) = (g1.variance, g2.variance);
    if v1 == v2 {
        // equal spreads: same formulas, evaluated without rounding drift
        return Gaussian1D {
            mean: 0.5 * (g1.mean + g2.mean),
            variance: 0.5 * v1,
        };
    }
    let variance = v1 * v2 / (v1 + v2);
    Gaussian1D {
        mean: variance * (g1.mean / v1 + g2.mean / v2),
        variance,
    }
}

/// Density sampled on a uniform grid over `[lo, hi]`, normalized under the
/// trapezoidal rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity1D {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl GridDensity1D {
    /// Validates and normalizes `values`.
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        check_bounds(lo, hi, values.len())?;
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidParameter(format!("grid value {v}")));
        }
        let mut d = Self { lo, hi, values };
        let mass = d.integral();
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter("grid density has no mass".into()));
        }
        d.scale(1.0 / mass);
        Ok(d)
    }

    /// Evaluates `f` at `n` equally spaced points and normalizes.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_bounds(lo, hi, n)?;
        let step = (hi - lo) / (n - 1) as f64;
        Self::new(lo, hi, (0..n).map(|i| f(lo + step * i as f64)).collect())
    }

    pub fn from_gaussian(g: &Gaussian1D, lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::from_fn(lo, hi, n, |x| g.pdf(x))
    }

    /// Demo grid covering every Gaussian out to eight of the largest sigmas,
    /// with 4001 points.
    pub fn demo_bounds(gs: &[Gaussian1D]) -> (f64, f64, usize) {
        let smax = gs.iter().map(|g| g.sigma()).fold(0.0, f64::max);
        let lo = gs.iter().map(|g| g.mean).fold(f64::INFINITY, f64::min);
        let hi = gs.iter().map(|g| g.mean).fold(f64::NEG_INFINITY, f64::max);
        (
            lo - DEFAULT_GRID_SIGMAS * smax,
            hi + DEFAULT_GRID_SIGMAS * smax,
            DEFAULT_GRID_POINTS,
        )
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.len() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.lo + self.step() * i as f64
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.x(i))
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.step())
    }

    /// Trapezoidal integral of `f(x) p(x)`.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        let weighted: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * f(self.x(i)))
            .collect();
        trapezoid(&weighted, self.step())
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expectation(|x| (x - m) * (x - m))
    }

    /// Cumulative trapezoidal mass at each grid point.
    pub fn cdf(&self) -> Vec<f64> {
        let h = self.step();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        out.push(0.0);
        for w in self.values.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            out.push(acc);
        }
        out
    }

    /// Mass below `x`, interpolating linearly inside a cell.
    pub fn mass_below(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return self.integral();
        }
        let cdf = self.cdf();
        let h = self.step();
        let pos = (x - self.lo) / h;
        let i = (pos.floor() as usize).min(self.len() - 2);
        let t = pos - i as f64;
        // exact integral of the linear interpolant over the partial cell
        let (a, b) = (self.values[i], self.values[i + 1]);
        cdf[i] + h * (a * t + 0.5 * (b - a) * t * t)
    }

    /// Strict local maxima above `rel_floor` times the peak value.
    /// Flat tops count once.
    pub fn local_maxima(&self, rel_floor: f64) -> Vec<usize> {
        let v = &self.values;
        let peak = v.iter().cloned().fold(0.0, f64::max);
        let floor = peak * rel_floor;
        let mut out = Vec::new();
        let mut i = 1;
        while i + 1 < v.len() {
            if v[i] > v[i - 1] && v[i] > floor {
                let mut j = i;
                while j + 1 < v.len() && v[j + 1] == v[i] {
                    j += 1;
                }
                if j + 1 < v.len() && v[j + 1] < v[i] {
                    out.push(i);
                }
                i = j + 1;
            } else {
                i += 1;
            }
        }
        out
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi || self.len() != other.len() {
            return Err(Error::GridMismatch(format!(
                "[{}, {}]x{} vs [{}, {}]x{}",
                self.lo,
                self.hi,
                self.len(),
                other.lo,
                other.hi,
                other.len()
            )));
        }
        Ok(())
    }

    fn scale(&mut self, k: f64) {
        self.values.iter_mut().for_each(|v| *v *= k);
    }
}

fn check_bounds(lo: f64, hi: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidParameter(format!("grid bounds [{lo}, {hi}]")));
    }
    Ok(())
}

/// Composite trapezoidal rule on a uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => step * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Pointwise product, renormalized.
pub fn grid_bayes_fuse(d1: &GridDensity1D, d2: &GridDensity1D) -> Result<GridDensity1D> {
    d1.same_grid(d2)?;
    let values: Vec<f64> = d1.values.iter().zip(&d2.values).map(|(a, b)| a * b).collect();
    let mass = trapezoid(&values, d1.step());
    if !(mass >= 1e-12) {
        return Err(Error::DegenerateFusion(mass));
    }
    let mut out = GridDensity1D {
        lo: d1.lo,
        hi: d1.hi,
        values,
    };
    out.scale(1.0 / mass);
    Ok(out)
}

/// Result of the quadrature p-PCR5 fusion.
#[derive(Debug, Clone)]
pub struct Pcr5GridFusion {
    /// Fused density, renormalized to unit mass.
    pub density: GridDensity1D,
    /// Integral of the fused density before renormalization, minus one.
    pub defect: f64,
}

/// Continuous p-PCR5 by quadrature: `p12(x) = p1(x) I1(x) + p2(x) I2(x)`
/// with `I_s(x) = ∫ p_s(x) p_t(y) / (p_s(x) + p_t(y)) dy`. The integrand is
/// zero where both densities vanish.
pub fn grid_pcr5_fuse(d1: &GridDensity1D, d2: &GridDensity1D) -> Result<Pcr5GridFusion> {
    d1.same_grid(d2)?;
    let h = d1.step();
    let n = d1.len();
    let trap_w: Vec<f64> = (0..n)
        .map(|j| if j == 0 || j == n - 1 { 0.5 * h } else { h })
        .collect();
    let (p1, p2) = (&d1.values, &d2.values);
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (p1[i], p2[i]);
            let mut i1 = 0.0;
            let mut i2 = 0.0;
            for j in 0..n {
                let den1 = a + p2[j];
                if den1 > 0.0 {
                    i1 += trap_w[j] * a * p2[j] / den1;
                }
                let den2 = b + p1[j];
                if den2 > 0.0 {
                    i2 += trap_w[j] * b * p1[j] / den2;
                }
            }
            a * i1 + b * i2
        })
        .collect();
    let mass = trapezoid(&values, h);
    let mut density = GridDensity1D {
        lo: d1.lo,
        hi: d1.hi,
        values,
    };
    density.scale(1.0 / mass);
    Ok(Pcr5GridFusion {
        density,
        defect: mass - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(g: &Gaussian1D) -> GridDensity1D {
        GridDensity1D::from_gaussian(g, -10.0, 10.0, 4001).unwrap()
    }

    #[test]
    fn gaussian_bayes_closed_form() {
        let f = bayes_fuse_gaussian(
            &Gaussian1D::new(0.0, 1.0).unwrap(),
            &Gaussian1D::new(1.0, 1.0).unwrap(),
        );
        assert_eq!(f.mean(), 0.5);
        assert_eq!(f.variance(), 0.5);

        let g = Gaussian1D::new(3.0, 2.0).unwrap();
        let f = bayes_fuse_gaussian(&g, &g);
        assert_eq!(f.mean(), 3.0);
        assert_eq!(f.variance(), 2.0);
    }

    #[test]
    fn gaussian_bayes_against_grid_product() {
        let g1 = Gaussian1D::new(0.0, 1.0).unwrap();
        let g2 = Gaussian1D::new(3.0, 2.0).unwrap();
        let f = bayes_fuse_gaussian(&g1, &g2);
        assert!((f.variance() - 0.8).abs() < 1e-15);
        assert!((f.mean() - 0.6).abs() < 1e-15);
        // independent route: normalize the pointwise product numerically
        let n = 20001;
        let (lo, hi) = (-15.0, 15.0);
        let h = (hi - lo) / (n - 1) as f64;
        let prod: Vec<f64> = (0..n)
            .map(|i| {
                let x = lo + h * i as f64;
                g1.pdf(x) * g2.pdf(x)
            })
            .collect();
        let z = trapezoid(&prod, h);
        let m = trapezoid(
            &prod.iter().enumerate().map(|(i, p)| p * (lo + h * i as f64)).collect::<Vec<_>>(),
            h,
        ) / z;
        let v = trapezoid(
            &prod
                .iter()
                .enumerate()
                .map(|(i, p)| p * (lo + h * i as f64 - m).powi(2))
                .collect::<Vec<_>>(),
            h,
        ) / z;
        assert!((m - 0.6).abs() < 1e-9);
        assert!((v - 0.8).abs() < 1e-9);
    }

    #[test]
    fn invalid_gaussians() {
        assert!(Gaussian1D::new(0.0, 0.0).is_err());
        assert!(Gaussian1D::new(0.0, -1.0).is_err());
        assert!(Gaussian1D::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn grid_construction_normalizes() {
        let d = GridDensity1D::new(0.0, 2.0, vec![1.0, 1.0, 1.0]).unwrap();
        assert!((d.integral() - 1.0).abs() < 1e-15);
        assert!(GridDensity1D::new(0.0, 1.0, vec![1.0]).is_err());
        assert!(GridDensity1D::new(1.0, 0.0, vec![1.0, 1.0]).is_err());
        assert!(GridDensity1D::new(0.0, 1.0, vec![0.0, 0.0]).is_err());
        assert!(GridDensity1D::new(0.0, 1.0, vec![-1.0, 2.0]).is_err());
    }

    #[test]
    fn grid_bayes_matches_closed_form() {
        let g1 = Gaussian1D::new(0.0, 1.0).unwrap();
        let g2 = Gaussian1D::new(1.0, 1.0).unwrap();
        let fused = grid_bayes_fuse(&grid(&g1), &grid(&g2)).unwrap();
        let closed = bayes_fuse_gaussian(&g1, &g2);
        let max_err = fused
            .xs()
            .zip(fused.values())
            .map(|(x, v)| (v - closed.pdf(x)).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-6, "{max_err}");
    }

    #[test]
    fn grid_bayes_uniform_prior_is_absorbed() {
        let u = GridDensity1D::from_fn(-10.0, 10.0, 4001, |_| 1.0).unwrap();
        let d2 = grid(&Gaussian1D::new(2.0, 1.5).unwrap());
        let fused = grid_bayes_fuse(&u, &d2).unwrap();
        for (a, b) in fused.values().iter().zip(d2.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let uu = grid_bayes_fuse(&u, &u).unwrap();
        for v in uu.values() {
            assert!((v - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_bayes_rejects_disjoint_supports_and_mismatched_grids() {
        let d1 = GridDensity1D::new(0.0, 1.0, vec![1.0, 0.0, 0.0]).unwrap();
        let d2 = GridDensity1D::new(0.0, 1.0, vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(grid_bayes_fuse(&d1, &d2), Err(Error::DegenerateFusion(_))));
        let d3 = GridDensity1D::new(0.0, 2.0, vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(grid_bayes_fuse(&d1, &d3), Err(Error::GridMismatch(_))));
        assert!(grid_pcr5_fuse(&d1, &d3).is_err());
    }

    #[test]
    fn pcr5_identical_gaussians_integrate_to_one() {
        let d = grid(&Gaussian1D::new(0.0, 1.0).unwrap());
        let f = grid_pcr5_fuse(&d, &d).unwrap();
        assert!(f.defect.abs() < 1e-4, "{}", f.defect);
        assert!((f.density.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pcr5_keeps_distant_modes() {
        let g1 = Gaussian1D::new(0.0, 1.0).unwrap();
        let g2 = Gaussian1D::new(10.0, 1.0).unwrap();
        let (lo, hi, n) = GridDensity1D::demo_bounds(&[g1, g2]);
        let d1 = GridDensity1D::from_gaussian(&g1, lo, hi, n).unwrap();
        let d2 = GridDensity1D::from_gaussian(&g2, lo, hi, n).unwrap();
        let f = grid_pcr5_fuse(&d1, &d2).unwrap();
        let maxima = f.density.local_maxima(1e-9);
        assert_eq!(maxima.len(), 2);
        assert!(f.density.x(maxima[0]).abs() < 0.2);
        assert!((f.density.x(maxima[1]) - 10.0).abs() < 0.2);
        assert!(f.defect.abs() < 1e-4);
    }

    #[test]
    fn pcr5_close_gaussians_amplify_less_than_bayes() {
        let g1 = Gaussian1D::new(0.0, 1.0).unwrap();
        let g2 = Gaussian1D::new(1.0, 1.0).unwrap();
        let (lo, hi, n) = GridDensity1D::demo_bounds(&[g1, g2]);
        let d1 = GridDensity1D::from_gaussian(&g1, lo, hi, n).unwrap();
        let d2 = GridDensity1D::from_gaussian(&g2, lo, hi, n).unwrap();
        let f = grid_pcr5_fuse(&d1, &d2).unwrap();
        assert_eq!(f.density.local_maxima(1e-9).len(), 1);
        let v = f.density.variance();
        assert!(v > 0.5 && v < 1.0, "{v}");
    }

    #[test]
    fn pcr5_is_commutative_within_quadrature() {
        let g1 = Gaussian1D::new(-1.0, 0.7).unwrap();
        let g2 = Gaussian1D::new(2.0, 1.3).unwrap();
        let (lo, hi, _) = GridDensity1D::demo_bounds(&[g1, g2]);
        let d1 = GridDensity1D::from_gaussian(&g1, lo, hi, 801).unwrap();
        let d2 = GridDensity1D::from_gaussian(&g2, lo, hi, 801).unwrap();
        let a = grid_pcr5_fuse(&d1, &d2).unwrap().density;
        let b = grid_pcr5_fuse(&d2, &d1).unwrap().density;
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_below_interpolates() {
        let d = GridDensity1D::from_fn(0.0, 1.0, 11, |_| 1.0).unwrap();
        assert!((d.mass_below(0.35) - 0.35).abs() < 1e-12);
        assert_eq!(d.mass_below(-1.0), 0.0);
        assert!((d.mass_below(2.0) - 1.0).abs() < 1e-12);
    }
}
