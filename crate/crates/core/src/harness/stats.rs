//! Curve summaries: pointwise means with normal-approximation intervals and
//! log-log slopes.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCi {
    pub mean: f64,
    pub sd: f64,
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
}

/// Sample mean with a 95% interval `mean ± z·sd/√n`. A single sample has
/// width zero.
pub fn mean_ci(values: &[f64]) -> Result<MeanCi> {
    let n = values.len();
    if n == 0 {
        return Err(PricingError::InvalidParameter("mean of no values".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let half = Z_95 * sd / (n as f64).sqrt();
    Ok(MeanCi { mean, sd, lower: mean - half, upper: mean + half, n })
}

/// Pointwise mean and interval over equally long curves.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveBand {
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

pub fn curve_band(curves: &[&[f64]]) -> Result<CurveBand> {
    let Some(first) = curves.first() else {
        return Err(PricingError::InvalidParameter("no curves to aggregate".into()));
    };
    let len = first.len();
    if curves.iter().any(|c| c.len() != len) {
        return Err(PricingError::InvalidParameter("curves differ in length".into()));
    }
    let mut band = CurveBand {
        mean: Vec::with_capacity(len),
        lower: Vec::with_capacity(len),
        upper: Vec::with_capacity(len),
    };
    let mut column = vec![0.0; curves.len()];
    for t in 0..len {
        for (slot, c) in column.iter_mut().zip(curves) {
            *slot = c[t];
        }
        let ci = mean_ci(&column)?;
        band.mean.push(ci.mean);
        band.lower.push(ci.lower);
        band.upper.push(ci.upper);
    }
    Ok(band)
}

/// OLS slope of `log₂ y` on `log₂ x`. Points with a nonpositive coordinate
/// are dropped with a warning.
pub fn loglog_slope_xy(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(PricingError::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log2(), y.log2()))
        .collect();
    if pts.len() < xs.len() {
        warn!("dropped {} nonpositive points from a log-log fit", xs.len() - pts.len());
    }
    if pts.len() < 2 {
        return Err(PricingError::InvalidParameter("log-log fit needs two positive points".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(PricingError::InvalidParameter("log-log fit over a single abscissa".into()));
    }
    Ok(sxy / sxx)
}

/// Slope of `log₂ curve[t−1]` on `log₂ t` over the trailing `window`
/// fraction of the curve (index `t` is 1-based).
pub fn loglog_slope(curve: &[f64], window: f64) -> Result<f64> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(PricingError::InvalidParameter(format!("window {window} outside (0, 1]")));
    }
    let n = curve.len();
    let start = n - ((n as f64 * window).ceil() as usize).min(n);
    let xs: Vec<f64> = (start + 1..=n).map(|t| t as f64).collect();
    loglog_slope_xy(&xs, &curve[start..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_power_curves() {
        let lin: Vec<f64> = (1..=5000).map(|t| 3.0 * t as f64).collect();
        assert!((loglog_slope(&lin, 0.5).unwrap() - 1.0).abs() < 1e-6);
        let pow: Vec<f64> = (1..=5000).map(|t| 2.0 * (t as f64).powf(2.0 / 3.0)).collect();
        assert!((loglog_slope(&pow, 0.5).unwrap() - 0.667).abs() < 1e-3);
    }

    #[test]
    fn nonpositive_points_are_skipped() {
        let ys = [0.0, -1.0, 4.0, 16.0];
        let xs = [1.0, 2.0, 2.0, 4.0];
        assert!((loglog_slope_xy(&xs, &ys).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope_xy(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn single_replication_has_zero_width() {
        let ci = mean_ci(&[4.2]).unwrap();
        assert_eq!((ci.lower, ci.upper), (4.2, 4.2));
        let band = curve_band(&[&[1.0, 2.0]]).unwrap();
        assert_eq!(band.lower, band.upper);
    }

    #[test]
    fn interval_uses_sample_sd() {
        let ci = mean_ci(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((ci.sd - sd).abs() < 1e-12);
        assert!((ci.upper - 2.5 - Z_95 * sd / 2.0).abs() < 1e-12);
    }
}
