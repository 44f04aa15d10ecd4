//! One-dimensional nonnegative delay laws.
//!
//! A [`DelayDistribution`] is either an analytic law from a small set of named
//! families (and mixtures of them), a discretized PDF on a uniform grid, or a
//! bag of empirical samples. Mean and variance are computed once at
//! construction.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::math;
use crate::queueing::ResponseTimeLaw;
use crate::{Error, Result};

/// Tail mass below which leading and trailing grid cells are dropped.
const TRIM_MASS: f64 = 1e-16;

/// Mass allowed beyond a grid's upper bound before discretization fails.
pub const MAX_OVERFLOW_MASS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AnalyticLaw {
    PointMass(f64),
    /// Normal law with negative outcomes clamped to zero.
    Gaussian {
        mean: f64,
        variance: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    ResponseTime(ResponseTimeLaw),
    /// Weighted components; weights sum to one.
    Mixture(Vec<(f64, AnalyticLaw)>),
}

impl AnalyticLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            AnalyticLaw::PointMass(v) => v.is_finite() && *v >= 0.0,
            AnalyticLaw::Gaussian { mean, variance } => {
                mean.is_finite() && variance.is_finite() && *variance >= 0.0
            }
            AnalyticLaw::Uniform { lo, hi } => {
                lo.is_finite() && hi.is_finite() && 0.0 <= *lo && lo <= hi
            }
            AnalyticLaw::Exponential { rate } => rate.is_finite() && *rate > 0.0,
            AnalyticLaw::ResponseTime(_) => true,
            AnalyticLaw::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(Error::Empty("mixture components"));
                }
                let total: f64 = parts.iter().map(|p| p.0).sum();
                for (w, law) in parts {
                    if !(w.is_finite() && *w >= 0.0) {
                        return Err(Error::invalid("mixture weight", "must be >= 0"));
                    }
                    law.validate()?;
                }
                (total - 1.0).abs() < 1e-9
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "law",
                alloc::format!("invalid parameters in {self:?}"),
            ))
        }
    }

    pub fn point_mass(&self) -> Option<f64> {
        match self {
            AnalyticLaw::PointMass(v) => Some(*v),
            AnalyticLaw::Gaussian { mean, variance } if *variance == 0.0 => Some(mean.max(0.0)),
            AnalyticLaw::Uniform { lo, hi } if lo == hi => Some(*lo),
            _ => None,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            AnalyticLaw::PointMass(v) => *v,
            AnalyticLaw::Gaussian { mean, variance } => clamped_normal_moments(*mean, *variance).0,
            AnalyticLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            AnalyticLaw::Exponential { rate } => 1.0 / rate,
            AnalyticLaw::ResponseTime(law) => law.mean(),
            AnalyticLaw::Mixture(parts) => math::sum(parts.iter().map(|(w, l)| w * l.mean())),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            AnalyticLaw::PointMass(_) => 0.0,
            AnalyticLaw::Gaussian { mean, variance } => {
                let (m1, m2) = clamped_normal_moments(*mean, *variance);
                (m2 - m1 * m1).max(0.0)
            }
            AnalyticLaw::Uniform { lo, hi } => math::sq(hi - lo) / 12.0,
            AnalyticLaw::Exponential { rate } => 1.0 / (rate * rate),
            AnalyticLaw::ResponseTime(law) => law.variance(),
            AnalyticLaw::Mixture(parts) => {
                let mean = self.mean();
                let second = math::sum(
                    parts
                        .iter()
                        .map(|(w, l)| w * (l.variance() + math::sq(l.mean()))),
                );
                (second - mean * mean).max(0.0)
            }
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        1.0 - self.survival(t)
    }

    /// Pr(X > t).
    pub fn survival(&self, t: f64) -> f64 {
        match self {
            AnalyticLaw::PointMass(v) => {
                if t >= *v {
                    0.0
                } else {
                    1.0
                }
            }
            AnalyticLaw::Gaussian { mean, variance } => {
                if t < 0.0 {
                    1.0
                } else if *variance == 0.0 {
                    if t >= *mean {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    math::norm_cdf((mean - t) / math::sqrt(*variance))
                }
            }
            AnalyticLaw::Uniform { lo, hi } => {
                if t >= *hi {
                    0.0
                } else if t < *lo {
                    1.0
                } else {
                    (hi - t) / (hi - lo)
                }
            }
            AnalyticLaw::Exponential { rate } => {
                if t <= 0.0 {
                    1.0
                } else {
                    math::exp(-rate * t)
                }
            }
            AnalyticLaw::ResponseTime(law) => law.survival(t),
            AnalyticLaw::Mixture(parts) => math::sum(parts.iter().map(|(w, l)| w * l.survival(t))),
        }
    }

    /// Inverse CDF: the smallest t with F(t) ≥ q.
    pub fn quantile(&self, q: f64) -> f64 {
        match self {
            AnalyticLaw::PointMass(v) => *v,
            AnalyticLaw::Uniform { lo, hi } => lo + q * (hi - lo),
            AnalyticLaw::Exponential { rate } => -math::ln_1p(-q) / rate,
            _ => {
                if let Some(v) = self.point_mass() {
                    return v;
                }
                let mut hi = self.mean() + 10.0 * math::sqrt(self.variance()) + 1.0;
                while self.cdf(hi) < q {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                if self.cdf(lo) >= q {
                    return 0.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) >= q {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo <= 1e-12 * hi.max(1.0) {
                        break;
                    }
                }
                hi
            }
        }
    }

    /// Cell masses on [i·step, (i+1)·step) for i in 0..cells.
    fn cell_masses(&self, step: f64, cells: usize) -> Vec<f64> {
        match self {
            AnalyticLaw::Mixture(parts) => {
                let mut out = alloc::vec![0.0; cells];
                for (w, law) in parts {
                    for (o, m) in out.iter_mut().zip(law.cell_masses(step, cells)) {
                        *o += w * m;
                    }
                }
                out
            }
            _ => {
                if let Some(v) = self.point_mass() {
                    // Split between the two nearest cell centres, preserving the mean.
                    let mut out = alloc::vec![0.0; cells];
                    let pos = (v / step - 0.5).max(0.0);
                    let k = math::floor(pos) as usize;
                    let frac = pos - k as f64;
                    if k < cells {
                        out[k] += 1.0 - frac;
                    }
                    if frac > 0.0 && k + 1 < cells {
                        out[k + 1] += frac;
                    }
                    return out;
                }
                let mut out = Vec::with_capacity(cells);
                let mut prev = 1.0;
                for i in 0..cells {
                    let next = self.survival((i + 1) as f64 * step);
                    out.push((prev - next).max(0.0));
                    prev = next;
                }
                out
            }
        }
    }
}

/// First two raw moments of max(X, 0) with X ~ N(mean, variance).
fn clamped_normal_moments(mean: f64, variance: f64) -> (f64, f64) {
    if variance == 0.0 {
        let m = mean.max(0.0);
        return (m, m * m);
    }
    let sd = math::sqrt(variance);
    let z = mean / sd;
    let cdf = math::norm_cdf(z);
    let pdf = math::exp(-0.5 * z * z) / math::sqrt(2.0 * math::PI);
    let m1 = mean * cdf + sd * pdf;
    let m2 = (mean * mean + variance) * cdf + mean * sd * pdf;
    (m1, m2)
}

/// Grid resolution used when discretizing and convolving.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GridSpec {
    pub step_ms: f64,
    pub upper_bound_ms: f64,
}

impl GridSpec {
    pub const DEFAULT_STEP_MS: f64 = 0.05;
    pub const MIN_UPPER_BOUND_MS: f64 = 10_000.0;

    /// Default step with bound max(10 s, 20 × `mean_ms`).
    pub fn for_mean(mean_ms: f64) -> Self {
        Self {
            step_ms: Self::DEFAULT_STEP_MS,
            upper_bound_ms: Self::MIN_UPPER_BOUND_MS.max(20.0 * mean_ms),
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::model::positive("step_ms", self.step_ms)?;
        crate::model::positive("upper_bound_ms", self.upper_bound_ms)?;
        if self.upper_bound_ms < self.step_ms {
            return Err(Error::invalid("upper_bound_ms", "smaller than one step"));
        }
        Ok(())
    }

    fn cells(&self) -> usize {
        math::ceil(self.upper_bound_ms / self.step_ms) as usize
    }
}

/// Probability masses on uniformly spaced nodes.
///
/// Node `i` sits at `origin + i·step` and its mass is spread evenly over
/// `[node − step/2, node + step/2)`, so the CDF is piecewise linear.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct GridPdf {
    origin: f64,
    step: f64,
    masses: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(skip))]
    cumulative: Vec<f64>,
}

impl GridPdf {
    /// Builds a grid from raw masses; they are normalized to sum to one.
    pub fn from_masses(origin: f64, step: f64, masses: Vec<f64>) -> Result<Self> {
        crate::model::positive("step", step)?;
        if masses.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::invalid("masses", "must be finite and >= 0"));
        }
        let total = math::sum(masses.iter().copied());
        if total.is_nan() || total <= 0.0 {
            return Err(Error::Empty("grid masses"));
        }
        let mut grid = Self {
            origin,
            step,
            masses,
            cumulative: Vec::new(),
        };
        grid.trim_and_normalize(total);
        Ok(grid)
    }

    fn trim_and_normalize(&mut self, total: f64) {
        let threshold = TRIM_MASS * total;
        let mut acc = 0.0;
        let mut first = 0;
        for (i, m) in self.masses.iter().enumerate() {
            if acc + m > threshold {
                first = i;
                break;
            }
            acc += m;
        }
        let mut acc = 0.0;
        let mut last = self.masses.len() - 1;
        for (i, m) in self.masses.iter().enumerate().rev() {
            if acc + m > threshold {
                last = i;
                break;
            }
            acc += m;
        }
        let kept = &self.masses[first..=last];
        let kept_total = math::sum(kept.iter().copied());
        self.origin += first as f64 * self.step;
        self.masses = kept.iter().map(|m| m / kept_total).collect();
        self.rebuild_cumulative();
    }

    fn rebuild_cumulative(&mut self) {
        let mut acc = 0.0;
        self.cumulative = self
            .masses
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn density(&self, i: usize) -> f64 {
        self.masses[i] / self.step
    }

    /// Right edge of the support.
    pub fn upper(&self) -> f64 {
        self.node(self.len() - 1) + 0.5 * self.step
    }

    pub fn lower(&self) -> f64 {
        self.origin - 0.5 * self.step
    }

    pub fn shifted(mut self, offset: f64) -> Self {
        self.origin += offset;
        self
    }

    pub fn mean(&self) -> f64 {
        math::sum(
            self.masses
                .iter()
                .enumerate()
                .map(|(i, m)| m * self.node(i)),
        )
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        math::sum(
            self.masses
                .iter()
                .enumerate()
                .map(|(i, m)| m * math::sq(self.node(i) - mean)),
        ) + self.step * self.step / 12.0
    }

    pub fn cdf(&self, t: f64) -> f64 {
        let u = (t - self.lower()) / self.step;
        if u <= 0.0 {
            return 0.0;
        }
        let k = math::floor(u) as usize;
        if k >= self.len() {
            return 1.0;
        }
        let before = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        (before + (u - k as f64) * self.masses[k]).min(1.0)
    }

    pub fn quantile(&self, q: f64) -> f64 {
        let k = self
            .cumulative
            .partition_point(|&c| c < q)
            .min(self.len() - 1);
        let before = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        let m = self.masses[k];
        let frac = if m > 0.0 {
            ((q - before) / m).clamp(0.0, 1.0)
        } else {
            0.0
        };
        self.lower() + (k as f64 + frac) * self.step
    }

    /// Convolution of two grids with the same step. Fixed summation order.
    pub fn convolve(&self, other: &GridPdf) -> Result<GridPdf> {
        if (self.step - other.step).abs() > 1e-12 * self.step {
            return Err(Error::GridMismatch(self.step, other.step));
        }
        let (a, b) = if self.len() >= other.len() {
            (&self.masses, &other.masses)
        } else {
            (&other.masses, &self.masses)
        };
        let mut out = alloc::vec![0.0; a.len() + b.len() - 1];
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            for (o, &ai) in out[j..j + a.len()].iter_mut().zip(a.iter()) {
                *o += ai * bj;
            }
        }
        GridPdf::from_masses(self.origin + other.origin, self.step, out)
    }

    /// Rows of (time_ms, density, cumulative) at each node.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.len()).map(move |i| (self.node(i), self.density(i), self.cdf(self.node(i))))
    }
}

/// Sorted nonnegative samples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Empirical {
    sorted: Vec<f64>,
}

impl Empirical {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("samples"));
        }
        if samples.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::invalid("samples", "must be finite and >= 0"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= t) as f64 / self.len() as f64
    }

    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.len();
        let rank = math::ceil(q * n as f64) as usize;
        self.sorted[rank.clamp(1, n) - 1]
    }

    fn histogram(&self, step: f64, cells: usize) -> Result<Vec<f64>> {
        let mut out = alloc::vec![0.0; cells];
        let w = 1.0 / self.len() as f64;
        let mut beyond = 0usize;
        for &x in &self.sorted {
            let k = math::floor(x / step) as usize;
            if k < cells {
                out[k] += w;
            } else {
                beyond += 1;
            }
        }
        let mass_beyond = beyond as f64 * w;
        if mass_beyond > MAX_OVERFLOW_MASS {
            return Err(Error::GridOverflow {
                mass_beyond,
                upper_bound_ms: cells as f64 * step,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Representation {
    Analytic(AnalyticLaw),
    Grid(GridPdf),
    Empirical(Empirical),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayDistribution {
    repr: Representation,
    mean: f64,
    variance: f64,
}

impl DelayDistribution {
    pub fn analytic(law: AnalyticLaw) -> Result<Self> {
        law.validate()?;
        Ok(Self::from_repr(Representation::Analytic(law)))
    }

    pub fn point_mass(v: f64) -> Result<Self> {
        Self::analytic(AnalyticLaw::PointMass(v))
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        Self::analytic(AnalyticLaw::Gaussian { mean, variance })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::analytic(AnalyticLaw::Uniform { lo, hi })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::analytic(AnalyticLaw::Exponential { rate })
    }

    pub fn response_time(law: ResponseTimeLaw) -> Self {
        Self::from_repr(Representation::Analytic(AnalyticLaw::ResponseTime(law)))
    }

    pub fn grid(grid: GridPdf) -> Self {
        Self::from_repr(Representation::Grid(grid))
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        Ok(Self::from_repr(Representation::Empirical(Empirical::new(
            samples,
        )?)))
    }

    fn from_repr(repr: Representation) -> Self {
        let (mean, variance) = match &repr {
            Representation::Analytic(law) => (law.mean(), law.variance()),
            Representation::Grid(g) => (g.mean(), g.variance()),
            Representation::Empirical(e) => {
                let n = e.len() as f64;
                let mean = math::sum(e.samples().iter().copied()) / n;
                let var = math::sum(e.samples().iter().map(|x| math::sq(x - mean))) / n;
                (mean, var)
            }
        };
        Self {
            repr,
            mean,
            variance,
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn as_grid(&self) -> Option<&GridPdf> {
        match &self.repr {
            Representation::Grid(g) => Some(g),
            _ => None,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn as_point_mass(&self) -> Option<f64> {
        match &self.repr {
            Representation::Analytic(law) => law.point_mass(),
            _ => None,
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match &self.repr {
            Representation::Analytic(law) => law.cdf(t),
            Representation::Grid(g) => g.cdf(t),
            Representation::Empirical(e) => e.cdf(t),
        }
    }

    /// Inverse CDF for q in (0, 1).
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::QuantileOutOfRange(q));
        }
        Ok(match &self.repr {
            Representation::Analytic(law) => law.quantile(q),
            Representation::Grid(g) => g.quantile(q),
            Representation::Empirical(e) => e.quantile(q),
        })
    }

    /// Discretize onto cells `[i·step, (i+1)·step)` below `spec.upper_bound_ms`.
    pub fn to_grid(&self, spec: &GridSpec) -> Result<GridPdf> {
        spec.validate()?;
        let cells = spec.cells();
        let upper = cells as f64 * spec.step_ms;
        match &self.repr {
            Representation::Analytic(law) => {
                let mass_beyond = law.survival(upper);
                if mass_beyond > MAX_OVERFLOW_MASS {
                    return Err(Error::GridOverflow {
                        mass_beyond,
                        upper_bound_ms: upper,
                    });
                }
                let cells = match law.point_mass() {
                    Some(_) => cells,
                    None => cells_needed(law, spec.step_ms, cells),
                };
                GridPdf::from_masses(
                    0.5 * spec.step_ms,
                    spec.step_ms,
                    law.cell_masses(spec.step_ms, cells),
                )
            }
            Representation::Empirical(e) => GridPdf::from_masses(
                0.5 * spec.step_ms,
                spec.step_ms,
                e.histogram(spec.step_ms, cells)?,
            ),
            Representation::Grid(g) => {
                if (g.step() - spec.step_ms).abs() > 1e-12 * spec.step_ms {
                    return Err(Error::GridMismatch(g.step(), spec.step_ms));
                }
                if g.upper() > upper + 1e-9 {
                    let mass_beyond = 1.0 - g.cdf(upper);
                    if mass_beyond > MAX_OVERFLOW_MASS {
                        return Err(Error::GridOverflow {
                            mass_beyond,
                            upper_bound_ms: upper,
                        });
                    }
                }
                Ok(g.clone())
            }
        }
    }
}

/// Smallest cell count (at most `max_cells`) past which the law's survival is negligible.
fn cells_needed(law: &AnalyticLaw, step: f64, max_cells: usize) -> usize {
    if law.survival(max_cells as f64 * step) >= TRIM_MASS {
        return max_cells;
    }
    let (mut lo, mut hi) = (0usize, max_cells);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if law.survival(mid as f64 * step) < TRIM_MASS {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_cdf_and_quantile() {
        let d = DelayDistribution::point_mass(155.0).unwrap();
        assert_eq!(d.cdf(200.0), 1.0);
        assert_eq!(d.cdf(154.9), 0.0);
        for q in [0.01, 0.5, 0.99] {
            assert_eq!(d.quantile(q).unwrap(), 155.0);
        }
        assert_eq!(d.mean(), 155.0);
        assert_eq!(d.variance(), 0.0);
    }

    #[test]
    fn uniform_and_exponential_quantiles() {
        let u = DelayDistribution::uniform(20.0, 40.0).unwrap();
        assert!((u.cdf(30.0) - 0.5).abs() < 1e-15);
        assert!((u.quantile(0.25).unwrap() - 25.0).abs() < 1e-12);
        let e = DelayDistribution::exponential(1.0 / 100.0).unwrap();
        assert!((e.quantile(0.5).unwrap() - 100.0 * core::f64::consts::LN_2).abs() < 1e-9);
        assert!((e.quantile(0.5).unwrap() - 69.31).abs() < 0.01);
    }

    #[test]
    fn quantile_domain() {
        let u = DelayDistribution::uniform(20.0, 40.0).unwrap();
        for q in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(u.quantile(q).is_err());
        }
    }

    #[test]
    fn clamped_gaussian_moments_by_quadrature() {
        // Mean of max(X, 0) for X ~ N(0.5, 1): integrate t·φ over t > 0.
        let (mean, var) = (0.5, 1.0);
        let law = AnalyticLaw::Gaussian {
            mean,
            variance: var,
        };
        let n = 200_000;
        let h = 20.0 / n as f64;
        let (mut m1, mut m2) = (0.0, 0.0);
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            let pdf = math::exp(-0.5 * (t - mean).powi(2)) / math::sqrt(2.0 * math::PI);
            m1 += t * pdf * h;
            m2 += t * t * pdf * h;
        }
        assert!((law.mean() - m1).abs() < 1e-8);
        assert!((law.variance() - (m2 - m1 * m1)).abs() < 1e-8);
    }

    #[test]
    fn generic_quantile_inverts_cdf() {
        let law = AnalyticLaw::Mixture(alloc::vec![
            (0.3, AnalyticLaw::Exponential { rate: 0.1 }),
            (
                0.7,
                AnalyticLaw::Gaussian {
                    mean: 50.0,
                    variance: 25.0
                }
            ),
        ]);
        for q in [0.05, 0.3, 0.5, 0.9, 0.999] {
            let t = law.quantile(q);
            assert!((law.cdf(t) - q).abs() < 1e-9, "q={q}");
        }
    }

    #[test]
    fn grid_discretization_preserves_moments() {
        let d = DelayDistribution::exponential(1.0 / 120.0).unwrap();
        let g = d.to_grid(&GridSpec::for_mean(120.0)).unwrap();
        let total: f64 = g.masses().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((g.mean() - 120.0).abs() < 1e-3, "{}", g.mean());
        assert!((g.variance() / 14_400.0 - 1.0).abs() < 1e-4);
        assert!(g.masses().iter().all(|&m| m >= 0.0));
    }

    #[test]
    fn grid_point_mass_is_split_around_value() {
        let d = DelayDistribution::point_mass(4.862).unwrap();
        let g = d.to_grid(&GridSpec::for_mean(5.0)).unwrap();
        assert!((g.mean() - 4.862).abs() < 1e-12);
        assert!(g.len() <= 2);
    }

    #[test]
    fn grid_overflow_is_reported() {
        let d = DelayDistribution::exponential(1.0 / 1000.0).unwrap();
        let spec = GridSpec {
            step_ms: 0.5,
            upper_bound_ms: 5_000.0,
        };
        assert!(matches!(d.to_grid(&spec), Err(Error::GridOverflow { .. })));
    }

    #[test]
    fn grid_cdf_and_quantile_are_inverse() {
        let d = DelayDistribution::gaussian(50.0, 30.0).unwrap();
        let g = d.to_grid(&GridSpec::for_mean(50.0)).unwrap();
        for q in [0.001, 0.1, 0.5, 0.77, 0.999] {
            assert!((g.cdf(g.quantile(q)) - q).abs() < 1e-12);
        }
        assert_eq!(g.cdf(g.lower() - 1.0), 0.0);
        assert_eq!(g.cdf(g.upper() + 1.0), 1.0);
    }

    #[test]
    fn grid_convolution_of_uniforms_is_triangular() {
        let spec = GridSpec {
            step_ms: 0.01,
            upper_bound_ms: 10.0,
        };
        let u = DelayDistribution::uniform(0.0, 1.0)
            .unwrap()
            .to_grid(&spec)
            .unwrap();
        let sum = u.convolve(&u).unwrap();
        assert!((sum.mean() - 1.0).abs() < 1e-9);
        // Triangular CDF at 0.5 is 0.125.
        assert!((sum.cdf(0.5) - 0.125).abs() < 1e-3);
        assert!((sum.cdf(1.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn grid_step_mismatch() {
        let a = GridPdf::from_masses(0.0, 0.1, alloc::vec![1.0]).unwrap();
        let b = GridPdf::from_masses(0.0, 0.2, alloc::vec![1.0]).unwrap();
        assert!(matches!(a.convolve(&b), Err(Error::GridMismatch(..))));
    }

    #[test]
    fn empirical_cdf_and_quantile() {
        let d = DelayDistribution::empirical(alloc::vec![3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(d.cdf(2.0), 0.5);
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.quantile(0.5).unwrap(), 2.0);
        assert_eq!(d.quantile(0.51).unwrap(), 3.0);
        assert_eq!(d.mean(), 2.5);
        assert!(DelayDistribution::empirical(alloc::vec![]).is_err());
        assert!(DelayDistribution::empirical(alloc::vec![-1.0]).is_err());
    }

    #[test]
    fn mixture_weights_validated() {
        let bad = AnalyticLaw::Mixture(alloc::vec![(0.5, AnalyticLaw::PointMass(1.0))]);
        assert!(DelayDistribution::analytic(bad).is_err());
    }
}
