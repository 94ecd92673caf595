//! Nonparametric estimate of the market noise law from binary feedback.
//!
//! Given pairs `(u, y)` with `u = p − xᵀθ̂`, the share of non-purchases among
//! points with `u ∈ [v − w, v + w]` estimates `F(v)`. Difference quotients of
//! that estimate on an evenly spaced grid give density values, which are
//! extended to a wider grid (so the mass left and right of zero balances) and
//! smoothed with Gaussian kernels into a closed-form mixture.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::market::{Component, NoiseDistribution, NoiseKind};

/// Sorted `(u, y)` sample supporting fast window counts.
#[derive(Debug, Clone)]
pub struct WindowedCdf {
    u: Vec<f64>,
    /// `no_buy[i]` = number of non-purchases among the first `i` sorted points.
    no_buy: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub value: f64,
    pub count: usize,
}

impl WindowedCdf {
    /// `data` holds `(u, purchased)` pairs.
    pub fn new(data: &[(f64, bool)]) -> Result<Self> {
        if data.iter().any(|(u, _)| !u.is_finite()) {
            return Err(PricingError::NonFinite("windowed CDF input"));
        }
        let mut sorted = data.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut no_buy = Vec::with_capacity(sorted.len() + 1);
        no_buy.push(0);
        for (_, y) in &sorted {
            no_buy.push(no_buy.last().unwrap() + usize::from(!*y));
        }
        Ok(Self { u: sorted.into_iter().map(|(u, _)| u).collect(), no_buy })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Share of non-purchases with `u ∈ [v − w, v + w]`; `None` for an empty window.
    pub fn estimate(&self, v: f64, w: f64) -> Option<WindowEstimate> {
        let lo = self.u.partition_point(|&u| u < v - w);
        let hi = self.u.partition_point(|&u| u <= v + w);
        let count = hi - lo;
        (count > 0).then(|| WindowEstimate { value: (self.no_buy[hi] - self.no_buy[lo]) as f64 / count as f64, count })
    }
}

pub fn windowed_cdf(data: &[(f64, bool)], v: f64, w: f64) -> Option<f64> {
    let inside: Vec<bool> = data.iter().filter(|(u, _)| (v - w..=v + w).contains(u)).map(|(_, y)| *y).collect();
    (!inside.is_empty()).then(|| inside.iter().filter(|y| !**y).count() as f64 / inside.len() as f64)
}

/// `(F̃_w(v + w) − F̃_w(v − w)) / 2w`, clamped at zero. Either window holding
/// fewer than `min_count` points makes the estimate undefined.
pub fn difference_quotient_pdf(cdf: &WindowedCdf, v: f64, w: f64, min_count: usize) -> Option<f64> {
    let hi = cdf.estimate(v + w, w).filter(|e| e.count >= min_count.max(1))?;
    let lo = cdf.estimate(v - w, w).filter(|e| e.count >= min_count.max(1))?;
    Some(((hi.value - lo.value) / (2.0 * w)).max(0.0))
}

/// Grid `v_i = origin + spacing·i`; density is measured for `i` in
/// `measured` and the estimate is extended to `extended`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: f64,
    pub spacing: f64,
    pub measured: (i32, i32),
    pub extended: (i32, i32),
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { origin: -7.5, spacing: 5.0, measured: (1, 7), extended: (-8, 9) }
    }
}

impl GridSpec {
    pub fn point(&self, i: i32) -> f64 {
        self.origin + self.spacing * f64::from(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingOptions {
    pub window: f64,
    pub sigma: f64,
    pub min_count: usize,
    /// Ratio between consecutive extension values moving away from the data.
    pub decay: f64,
    pub grid: GridSpec,
}

impl Default for SmoothingOptions {
    fn default() -> Self {
        Self { window: 2.0, sigma: 3.0, min_count: 50, decay: 0.5, grid: GridSpec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub index: i32,
    pub v: f64,
    pub density: f64,
    pub measured: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedNoiseEstimate {
    pub points: Vec<GridPoint>,
    pub window: f64,
    pub sigma: f64,
    pub weights: Vec<f64>,
    pub distribution: NoiseDistribution,
}

impl SmoothedNoiseEstimate {
    /// Rows `(v, F̂(v), f̂(v))` on an even grid over `[lo, hi]`.
    pub fn grid_dump(&self, lo: f64, hi: f64, steps: usize) -> Vec<(f64, f64, f64)> {
        let steps = steps.max(1);
        (0..=steps)
            .map(|k| {
                let v = lo + (hi - lo) * k as f64 / steps as f64;
                (v, self.distribution.cdf(v), self.distribution.pdf(v))
            })
            .collect()
    }
}

/// Density estimates at the measured grid points; undefined points are dropped.
pub fn grid_estimates(cdf: &WindowedCdf, opts: &SmoothingOptions) -> Vec<(i32, f64)> {
    let (a, b) = opts.grid.measured;
    (a..=b)
        .filter_map(|i| {
            let v = opts.grid.point(i);
            let est = difference_quotient_pdf(cdf, v, opts.window, opts.min_count);
            if est.is_none() {
                warn!("dropping grid point v = {v}: fewer than {} samples in a window", opts.min_count);
            }
            est.map(|f| (i, f))
        })
        .collect()
}

/// Extends measured grid densities and smooths them into a Gaussian mixture.
///
/// Beyond the largest measured index the values decay geometrically from the
/// last measurement. Below the smallest measured index they decay
/// geometrically from the first measurement and are then rescaled so that
/// the densities left of zero sum to the densities right of zero.
pub fn smooth_and_symmetrize(measured: &[(i32, f64)], opts: &SmoothingOptions) -> Result<SmoothedNoiseEstimate> {
    if measured.is_empty() || measured.iter().all(|(_, f)| *f <= 0.0) {
        return Err(PricingError::Estimation("all density estimates are zero".into()));
    }
    if measured.iter().any(|(_, f)| !f.is_finite() || *f < 0.0) {
        return Err(PricingError::Estimation("density estimates must be finite and nonnegative".into()));
    }
    if !(opts.sigma > 0.0 && opts.decay > 0.0 && opts.decay < 1.0) {
        return Err(PricingError::InvalidParameter("need sigma > 0 and decay in (0, 1)".into()));
    }
    let grid = opts.grid;
    let mut sorted = measured.to_vec();
    sorted.sort_by_key(|(i, _)| *i);
    let (first_i, first_f) = sorted[0];
    let (last_i, last_f) = *sorted.last().unwrap();
    let (lo, hi) = (grid.extended.0.min(first_i), grid.extended.1.max(last_i));

    let mut points: Vec<GridPoint> =
        sorted.iter().map(|&(i, f)| GridPoint { index: i, v: grid.point(i), density: f, measured: true }).collect();
    let mut f = last_f;
    for i in last_i + 1..=hi {
        f *= opts.decay;
        points.push(GridPoint { index: i, v: grid.point(i), density: f, measured: false });
    }
    let mut lower = Vec::new();
    let mut f = first_f;
    for i in (lo..first_i).rev() {
        f *= opts.decay;
        lower.push(GridPoint { index: i, v: grid.point(i), density: f, measured: false });
    }

    let side_sum = |pts: &[GridPoint], neg: bool| -> f64 {
        pts.iter().filter(|p| if neg { p.v < 0.0 } else { p.v > 0.0 }).map(|p| p.density).sum()
    };
    let pos = side_sum(&points, false) + side_sum(&lower, false);
    let neg_measured = side_sum(&points, true);
    let neg_ext = side_sum(&lower, true);
    let deficit = pos - neg_measured;
    if deficit > 0.0 && neg_ext > 0.0 {
        let k = deficit / neg_ext;
        for p in lower.iter_mut().filter(|p| p.v < 0.0) {
            p.density *= k;
        }
    } else if neg_measured + neg_ext > 0.0 {
        // Measured mass already exceeds the right side (or there is no room to
        // extend): shrink the whole left side instead.
        let k = pos / (neg_measured + neg_ext);
        for p in points.iter_mut().chain(lower.iter_mut()).filter(|p| p.v < 0.0) {
            p.density *= k;
        }
    } else {
        warn!("no grid points left of zero; the estimate cannot be balanced");
    }
    points.extend(lower);
    points.sort_by_key(|p| p.index);

    let total: f64 = points.iter().map(|p| p.density).sum();
    let weights: Vec<f64> = points.iter().map(|p| p.density / total).collect();
    let residual = 1.0 - weights.iter().sum::<f64>();
    let mut comps: Vec<Component> =
        points.iter().zip(&weights).map(|(p, &w)| Component::new(w, p.v, opts.sigma)).collect();
    // Push rounding residue onto the heaviest component so weights sum to one.
    if let Some(c) = comps.iter_mut().max_by(|a, b| a.weight.total_cmp(&b.weight)) {
        c.weight += residual;
    }
    let distribution = NoiseDistribution::new(NoiseKind::EmpiricalSmoothed, comps)?;
    let weights = distribution.components().iter().map(|c| c.weight).collect();
    Ok(SmoothedNoiseEstimate { points, window: opts.window, sigma: opts.sigma, weights, distribution })
}

/// Full pipeline from `(u, purchased)` pairs to a smoothed mixture.
pub fn estimate_noise(data: &[(f64, bool)], opts: &SmoothingOptions) -> Result<SmoothedNoiseEstimate> {
    let cdf = WindowedCdf::new(data)?;
    smooth_and_symmetrize(&grid_estimates(&cdf, opts), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{open_unit, stream, Substream};
    use rand::Rng;

    fn sample(noise: &NoiseDistribution, n: usize, lo: f64, hi: f64, seed: u64) -> Vec<(f64, bool)> {
        let mut rng = stream(seed, 0, Substream::Data);
        (0..n)
            .map(|_| {
                let u = rng.random_range(lo..hi);
                (u, open_unit(&mut rng) >= noise.cdf(u))
            })
            .collect()
    }

    #[test]
    fn window_extremes() {
        let none: Vec<(f64, bool)> = (0..10).map(|i| (i as f64 * 0.1, false)).collect();
        let all: Vec<(f64, bool)> = (0..10).map(|i| (i as f64 * 0.1, true)).collect();
        assert_eq!(windowed_cdf(&none, 0.5, 1.0), Some(1.0));
        assert_eq!(windowed_cdf(&all, 0.5, 1.0), Some(0.0));
        assert_eq!(windowed_cdf(&all, 50.0, 1.0), None);
        let c = WindowedCdf::new(&none).unwrap();
        assert_eq!(c.estimate(0.5, 1.0).unwrap().value, 1.0);
        assert!(c.estimate(50.0, 1.0).is_none());
    }

    #[test]
    fn sorted_windows_agree_with_direct_count() {
        let noise = NoiseDistribution::gaussian(0.0, 2.0).unwrap();
        let data = sample(&noise, 5000, -8.0, 8.0, 4);
        let c = WindowedCdf::new(&data).unwrap();
        for v in [-6.0, -1.3, 0.0, 2.2, 7.9] {
            let e = c.estimate(v, 1.5).unwrap().value;
            assert!((e - windowed_cdf(&data, v, 1.5).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn windowed_cdf_tracks_truth() {
        let noise = NoiseDistribution::gaussian_mixture_var(&[(0.5, -4.0, 6.0), (0.5, 4.0, 6.0)]).unwrap();
        let data = sample(&noise, 200_000, -12.0, 12.0, 5);
        let c = WindowedCdf::new(&data).unwrap();
        for v in [-7.5, -2.5, 0.0, 2.5, 7.5] {
            let e = c.estimate(v, 2.0).unwrap().value;
            assert!((e - noise.cdf(v)).abs() <= 0.03, "v={v}: {e} vs {}", noise.cdf(v));
        }
        let f0 = difference_quotient_pdf(&c, 0.0, 2.0, 50).unwrap();
        assert!((f0 - noise.pdf(0.0)).abs() <= 0.02, "{f0} vs {}", noise.pdf(0.0));
    }

    #[test]
    fn difference_quotient_of_constant_and_linear() {
        let constant: Vec<(f64, bool)> = (0..4000).map(|i| (i as f64 / 100.0, i % 2 == 0)).collect();
        let c = WindowedCdf::new(&constant).unwrap();
        assert!(difference_quotient_pdf(&c, 20.0, 2.0, 10).unwrap() < 0.01);
        // Non-purchase share rising linearly in u at slope 1/40 over [0, 40].
        let linear: Vec<(f64, bool)> = (0..40_000)
            .map(|i| {
                let u = i as f64 / 1000.0;
                let k = i % 1000;
                (u, (k as f64) >= 1000.0 * u / 40.0)
            })
            .collect();
        let c = WindowedCdf::new(&linear).unwrap();
        let s = difference_quotient_pdf(&c, 20.0, 2.0, 10).unwrap();
        assert!((s - 1.0 / 40.0).abs() < 2e-3, "{s}");
        assert!(difference_quotient_pdf(&c, 20.0, 2.0, 1_000_000).is_none());
    }

    #[test]
    fn default_grid_arithmetic() {
        let g = GridSpec::default();
        assert_eq!(g.point(1), -2.5);
        assert_eq!(g.point(7), 27.5);
        assert_eq!(g.point(-8), -47.5);
        assert_eq!(g.point(9), 37.5);
    }

    #[test]
    fn symmetric_input_extends_to_mirror_image() {
        let opts = SmoothingOptions {
            grid: GridSpec { origin: 0.0, spacing: 5.0, measured: (-2, 2), extended: (-5, 5) },
            ..Default::default()
        };
        let measured = [(-2, 0.02), (-1, 0.05), (0, 0.08), (1, 0.05), (2, 0.02)];
        let est = smooth_and_symmetrize(&measured, &opts).unwrap();
        let n = est.points.len();
        for k in 0..n {
            assert!((est.points[k].density - est.points[n - 1 - k].density).abs() < 1e-15);
            assert_eq!(est.points[k].v, -est.points[n - 1 - k].v);
        }
        assert!(est.distribution.median().unwrap().abs() < 1e-9);
    }

    #[test]
    fn half_sums_balance_and_weights_are_probabilities() {
        let measured: Vec<(i32, f64)> = (1..=7).map(|i| (i, 0.1 / f64::from(i))).collect();
        let est = smooth_and_symmetrize(&measured, &SmoothingOptions::default()).unwrap();
        let neg: f64 = est.points.iter().filter(|p| p.v < 0.0).map(|p| p.density).sum();
        let pos: f64 = est.points.iter().filter(|p| p.v > 0.0).map(|p| p.density).sum();
        assert!((neg - pos).abs() < 1e-12);
        assert_eq!(est.points.first().unwrap().index, -8);
        assert_eq!(est.points.last().unwrap().index, 9);
        assert!((est.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(est.weights.iter().all(|w| *w >= 0.0));
        // extension decays away from the data on the left
        let left: Vec<f64> = est.points.iter().filter(|p| !p.measured && p.v < 0.0).map(|p| p.density).collect();
        assert!(left.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn left_heavy_input_is_shrunk() {
        let measured = [(1, 0.5), (2, 0.01)];
        let est = smooth_and_symmetrize(&measured, &SmoothingOptions::default()).unwrap();
        let neg: f64 = est.points.iter().filter(|p| p.v < 0.0).map(|p| p.density).sum();
        let pos: f64 = est.points.iter().filter(|p| p.v > 0.0).map(|p| p.density).sum();
        assert!((neg - pos).abs() < 1e-12);
    }

    #[test]
    fn cdf_and_pdf_are_consistent() {
        let measured: Vec<(i32, f64)> = (1..=7).map(|i| (i, 0.05 + 0.01 * f64::from(i))).collect();
        let est = smooth_and_symmetrize(&measured, &SmoothingOptions::default()).unwrap();
        let h = 1e-4;
        for k in 0..200 {
            let v = -40.0 + 0.4 * f64::from(k);
            let d = (est.distribution.cdf(v + h) - est.distribution.cdf(v - h)) / (2.0 * h);
            assert!((d - est.distribution.pdf(v)).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_all_zero() {
        assert!(smooth_and_symmetrize(&[(1, 0.0), (2, 0.0)], &SmoothingOptions::default()).is_err());
        assert!(smooth_and_symmetrize(&[], &SmoothingOptions::default()).is_err());
    }
}
