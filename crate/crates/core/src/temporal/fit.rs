//! Decay-model fitting for recency series.
//!
//! Three tools: least-squares R2 of straight-line fits on transformed
//! binned counts (a quick visual-style check), a continuous maximum
//! likelihood power-law fit with the tail threshold chosen by minimizing
//! the Kolmogorov-Smirnov distance, and a Vuong-style log-likelihood ratio
//! test between the power-law and exponential models on the same tail.

use log::warn;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

use super::{BinnedCounts, RecencySeries};

/// Axis transform for the straight-line fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitScale {
    /// ln(bin) vs ln(count): a straight line indicates a power law.
    LogLog,
    /// bin vs ln(count): a straight line indicates an exponential.
    LogLinear,
}

/// Maximum-likelihood power-law tail fit.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub x_min: f64,
    pub alpha: f64,
    /// Samples at or above `x_min`.
    pub n_tail: usize,
    /// KS distance between the empirical and fitted tail CDFs.
    pub ks_distance: f64,
}

/// Vuong-style log-likelihood ratio between power law and exponential.
/// `ratio > 0` favors the power law.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VuongReport {
    pub ratio: f64,
    pub p_value: f64,
}

/// Everything the decay analysis reports for one series.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub r2_loglog: f64,
    pub r2_loglinear: f64,
    pub power: PowerLawFit,
    pub loglik_ratio_r: f64,
    pub p_value: f64,
}

/// Fits a complete [`FitReport`] for a series.
pub fn fit_report(series: &RecencySeries) -> Result<FitReport> {
    let bins = series.binned();
    let r2_loglog = fit_linear_r2(&bins, FitScale::LogLog)?;
    let r2_loglinear = fit_linear_r2(&bins, FitScale::LogLinear)?;
    let power = fit_power_law(&series.samples)?;
    let vuong = loglik_ratio_power_vs_exp(&series.samples, power.x_min)?;
    Ok(FitReport {
        r2_loglog,
        r2_loglinear,
        power,
        loglik_ratio_r: vuong.ratio,
        p_value: vuong.p_value,
    })
}

/// Coefficient of determination of an ordinary least-squares line through
/// the transformed (bin, count) pairs. Requires at least three non-empty
/// bins.
pub fn fit_linear_r2(bins: &BinnedCounts, scale: FitScale) -> Result<f64> {
    if bins.pairs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "linear fit needs >= 3 non-empty bins, got {}",
            bins.pairs.len()
        )));
    }
    let points: Vec<(f64, f64)> = bins
        .pairs
        .iter()
        .map(|&(bin, count)| {
            let x = match scale {
                FitScale::LogLog => (bin as f64).ln(),
                FitScale::LogLinear => bin as f64,
            };
            (x, (count as f64).ln())
        })
        .collect();

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if syy == 0.0 {
        return Ok(1.0); // constant counts: the flat line fits exactly
    }
    if sxx == 0.0 {
        return Err(Error::Degenerate("all bins identical".into()));
    }
    let ss_res = syy - sxy * sxy / sxx;
    Ok((1.0 - ss_res / syy).clamp(0.0, 1.0))
}

/// Continuous power-law MLE over the tail `x >= x_min`:
/// `alpha = 1 + n / sum(ln(x_i / x_min))`.
pub fn fit_power_law_at(samples: &[f64], x_min: f64) -> Result<PowerLawFit> {
    let tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    fit_tail(&sorted(tail), x_min)
}

/// Fits the power law with `x_min` chosen over candidate sample values by
/// minimizing the KS distance of the fitted tail (at most 500 candidates,
/// quantile-thinned). Series under 50 samples are fit anyway but flagged
/// with a warning.
pub fn fit_power_law(samples: &[f64]) -> Result<PowerLawFit> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs >= 2 samples, got {}",
            samples.len()
        )));
    }
    if samples.len() < 50 {
        warn!(
            "power-law fit on only {} samples; estimates are low-confidence",
            samples.len()
        );
    }
    let xs = sorted(samples.to_vec());
    if xs[0] == xs[xs.len() - 1] {
        return Err(Error::Degenerate("all samples identical".into()));
    }

    let mut distinct: Vec<f64> = xs.clone();
    distinct.dedup();
    distinct.pop(); // the largest value leaves no tail to fit
    const MAX_CANDIDATES: usize = 500;
    let stride = distinct.len().div_ceil(MAX_CANDIDATES);
    let candidates = distinct.iter().copied().step_by(stride.max(1));

    let mut best: Option<PowerLawFit> = None;
    for x_min in candidates {
        let start = xs.partition_point(|&x| x < x_min);
        let Ok(fit) = fit_tail(&xs[start..], x_min) else {
            continue;
        };
        if best.is_none() || fit.ks_distance < best.unwrap().ks_distance {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| Error::Degenerate("no viable x_min candidate".into()))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("recency samples are finite"));
    v
}

/// MLE + KS for one tail; `tail` must be ascending and all >= x_min.
fn fit_tail(tail: &[f64], x_min: f64) -> Result<PowerLawFit> {
    let n = tail.len();
    if n < 2 {
        return Err(Error::InsufficientData("tail needs >= 2 samples".into()));
    }
    if x_min.is_nan() || x_min <= 0.0 {
        return Err(Error::InvalidConfig("x_min must be positive".into()));
    }
    let log_sum: f64 = tail.iter().map(|&x| (x / x_min).ln()).sum();
    if log_sum <= 0.0 {
        return Err(Error::Degenerate("tail samples all equal x_min".into()));
    }
    let alpha = 1.0 + n as f64 / log_sum;

    let mut ks: f64 = 0.0;
    for (i, &x) in tail.iter().enumerate() {
        let fitted = 1.0 - (x / x_min).powf(1.0 - alpha);
        let lo = i as f64 / n as f64;
        let hi = (i + 1) as f64 / n as f64;
        ks = ks.max((fitted - lo).abs()).max((hi - fitted).abs());
    }
    Ok(PowerLawFit {
        x_min,
        alpha,
        n_tail: n,
        ks_distance: ks,
    })
}

/// Vuong log-likelihood ratio between the fitted power law and the
/// exponential MLE (`lambda = 1 / (mean - x_min)`) over the same tail.
/// The p-value is two-sided from the normalized ratio against a standard
/// normal.
pub fn loglik_ratio_power_vs_exp(samples: &[f64], x_min: f64) -> Result<VuongReport> {
    let tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    let n = tail.len();
    if n < 2 {
        return Err(Error::InsufficientData(
            "ratio test needs >= 2 tail samples".into(),
        ));
    }
    let power = fit_tail(&sorted(tail.clone()), x_min)?;
    let mean: f64 = tail.iter().sum::<f64>() / n as f64;
    if mean <= x_min {
        return Err(Error::Degenerate("tail mean equals x_min".into()));
    }
    let lambda = 1.0 / (mean - x_min);

    let ln_pl_norm = (power.alpha - 1.0).ln() - x_min.ln();
    let ln_exp_norm = lambda.ln();
    let pointwise: Vec<f64> = tail
        .iter()
        .map(|&x| {
            let lp = ln_pl_norm - power.alpha * (x / x_min).ln();
            let le = ln_exp_norm - lambda * (x - x_min);
            lp - le
        })
        .collect();
    let ratio: f64 = pointwise.iter().sum();
    let mean_l = ratio / n as f64;
    let var = pointwise.iter().map(|l| (l - mean_l).powi(2)).sum::<f64>() / n as f64;
    let p_value = if var == 0.0 {
        if ratio == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        let z = ratio / (var.sqrt() * (n as f64).sqrt());
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        2.0 * normal.cdf(-z.abs())
    };
    Ok(VuongReport { ratio, p_value })
}
