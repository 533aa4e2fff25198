// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{domain, Result};

/// Stream reserved for bootstrap resampling.
const BOOTSTRAP_STREAM: u64 = u64::MAX;

/// Sample quantile with linear interpolation between order statistics.
/// Infinite entries are allowed and propagate to the interpolated value.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        return a;
    }
    if a.is_infinite() || b.is_infinite() {
        return f64::INFINITY;
    }
    a + (b - a) * (h - lo as f64)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Deterministic resampling indices: `resamples` draws of `len` indices.
pub fn bootstrap_indices(len: usize, resamples: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(BOOTSTRAP_STREAM);
    (0..resamples).map(|_| (0..len).map(|_| rng.random_range(0..len)).collect()).collect()
}

/// Mean with a percentile bootstrap interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanCi {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Bootstrap standard error.
    pub se: f64,
}

/// 95% percentile interval of the mean.
pub fn bootstrap_mean(values: &[f64], indices: &[Vec<usize>]) -> Result<MeanCi> {
    if values.is_empty() {
        return domain("no samples");
    }
    let means: Vec<f64> = indices.iter().map(|ix| ix.iter().map(|&i| values[i]).sum::<f64>() / ix.len() as f64).collect();
    let se = std_dev(&means);
    let s = sorted(means);
    Ok(MeanCi { mean: mean(values), ci_low: quantile(&s, 0.025), ci_high: quantile(&s, 0.975), se })
}

/// Weighted least squares `y ≈ a + b x`; returns `(a, b)`.
pub fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 2 || x.len() != y.len() || x.len() != w.len() {
        return domain("a line fit needs at least two matching points");
    }
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - xm) * (a - xm)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - xm) * (c - ym)).sum();
    if !(sxx > 0.0) {
        return domain("degenerate abscissae");
    }
    let slope = sxy / sxx;
    Ok((ym - slope * xm, slope))
}

/// `mean(d) ≈ A e^{−η d}` fitted on log-means.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub eta: f64,
    pub log_amplitude: f64,
    /// Bootstrap standard error of `η`.
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Distances entering the fit.
    pub distances: Vec<u64>,
}

/// Fits the decay rate of disorder means.
///
/// `samples[r][k]` is realization `r` at `distances[k]`. Weights are inverse
/// delta-method variances of the log-means (unit weights when any variance
/// vanishes); the uncertainty comes from refitting on joint resamples of the
/// realizations with the weights held fixed.
pub fn fit_decay(distances: &[u64], samples: &[Vec<f64>], indices: &[Vec<usize>]) -> Result<DecayFit> {
    let cols = distances.len();
    if cols < 2 || samples.is_empty() || samples.iter().any(|s| s.len() != cols) {
        return domain("decay fit needs at least two distances and rectangular samples");
    }
    let column = |k: usize| samples.iter().map(|s| s[k]).collect::<Vec<_>>();
    let stats = (0..cols).map(|k| bootstrap_mean(&column(k), indices)).collect::<Result<Vec<_>>>()?;
    if stats.iter().any(|s| !(s.mean > 0.0)) {
        return domain("decay fit needs positive means");
    }
    let x: Vec<f64> = distances.iter().map(|&d| d as f64).collect();
    let y: Vec<f64> = stats.iter().map(|s| s.mean.ln()).collect();
    let rel: Vec<f64> = stats.iter().map(|s| s.se / s.mean).collect();
    let w: Vec<f64> = if rel.iter().all(|&r| r > 0.0) { rel.iter().map(|r| 1.0 / (r * r)).collect() } else { vec![1.0; cols] };
    let (a, b) = weighted_line(&x, &y, &w)?;
    let mut etas = Vec::with_capacity(indices.len());
    for ix in indices {
        let (mut xs, mut ys, mut ws) = (Vec::new(), Vec::new(), Vec::new());
        for k in 0..cols {
            let m = ix.iter().map(|&i| samples[i][k]).sum::<f64>() / ix.len() as f64;
            if m > 0.0 {
                xs.push(x[k]);
                ys.push(m.ln());
                ws.push(w[k]);
            }
        }
        if let Ok((_, s)) = weighted_line(&xs, &ys, &ws) {
            etas.push(-s);
        }
    }
    let se = std_dev(&etas);
    let s = sorted(etas);
    let (ci_low, ci_high) = if s.is_empty() { (-b, -b) } else { (quantile(&s, 0.025), quantile(&s, 0.975)) };
    Ok(DecayFit { eta: -b, log_amplitude: a, se, ci_low, ci_high, distances: distances.to_vec() })
}
