// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, ModelSpec};
use super::emit::{num, Report, Table};
use super::stats::weighted_line;
use crate::dynamics::eigendecompose;
use crate::error::{config, Result};

/// Gaps below this are recorded as zero-gap events.
pub const ZERO_GAP: f64 = 1e-13;

/// `P(min gap < δ) ≈ C δ^ν` on the small-`δ` tail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub nu: f64,
    pub c: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapStatistics {
    /// Number of sites in the interval.
    pub length: usize,
    pub min_gaps: Vec<f64>,
    pub zero_gap_events: usize,
    pub deltas: Vec<f64>,
    /// `P̂(min gap < δ)` at each `δ`.
    pub curve: Vec<f64>,
    pub fit: Option<PowerLawFit>,
}

/// `min_{α≠β} |λ_α − λ_β|` of an ascending spectrum; `+∞` for one level.
pub fn min_gap(energies: &[f64]) -> f64 {
    energies.windows(2).map(|w| (w[1] - w[0]).abs()).fold(f64::INFINITY, f64::min)
}

/// Fraction of samples strictly below each threshold.
pub fn empirical_cdf(samples: &[f64], deltas: &[f64]) -> Vec<f64> {
    deltas.iter().map(|&d| samples.iter().filter(|&&g| g < d).count() as f64 / samples.len() as f64).collect()
}

/// Least-squares fit of `ln P = ln C + ν ln δ` on the `tail` smallest
/// thresholds with `0 < P < 1`.
pub fn fit_power_law(deltas: &[f64], curve: &[f64], tail: usize) -> Option<PowerLawFit> {
    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .zip(curve)
        .filter(|(_, &p)| p > 0.0 && p < 1.0)
        .map(|(&d, &p)| (d.ln(), p.ln()))
        .take(tail)
        .collect();
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (a, b) = weighted_line(&x, &y, &vec![1.0; x.len()]).ok()?;
    let ym = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - ym) * (v - ym)).sum();
    let ss_res: f64 = x.iter().zip(&y).map(|(xi, yi)| (yi - a - b * xi).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(PowerLawFit { nu: b, c: a.exp(), r_squared, points: x.len() })
}

/// Minimum level spacing of the Ising chain over the ensemble.
pub fn run_gap_statistics(cfg: &ExperimentConfig) -> Result<GapStatistics> {
    if !matches!(cfg.model, ModelSpec::Ising { .. }) {
        return config("gap statistics need an Ising model");
    }
    let spec = cfg.gaps.clone().unwrap_or(super::config::GapSpec { deltas: None, tail_points: 8 });
    let n = cfg.model.n();
    let min_gaps = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| realization_gap(cfg, n, r))
        .collect::<Result<Vec<_>>>()?;
    let zero_gap_events = min_gaps.iter().filter(|&&g| g < ZERO_GAP).count();
    let deltas = spec.deltas();
    if deltas.iter().any(|d| !(*d > 0.0)) || deltas.windows(2).any(|w| w[1] <= w[0]) {
        return config("gap thresholds must be positive and increasing");
    }
    let curve = empirical_cdf(&min_gaps, &deltas);
    let fit = fit_power_law(&deltas, &curve, spec.tail_points);
    Ok(GapStatistics { length: n + 1, min_gaps, zero_gap_events, deltas, curve, fit })
}

/// Minimum gap of one realization on `[0, n]`.
pub fn realization_gap(cfg: &ExperimentConfig, n: usize, realization: u64) -> Result<f64> {
    let (_, h) = cfg.build(n, realization)?;
    let es = eigendecompose(&h)?;
    Ok(min_gap(es.energies()))
}

impl Report for GapStatistics {
    fn tables(&self) -> Vec<Table> {
        let curve = Table {
            name: "gap_curve".into(),
            header: vec!["delta", "probability"],
            rows: self.deltas.iter().zip(&self.curve).map(|(d, p)| vec![num(*d), num(*p)]).collect(),
        };
        let raw = Table {
            name: "gap_raw".into(),
            header: vec!["realization", "min_gap", "zero_gap"],
            rows: self
                .min_gaps
                .iter()
                .enumerate()
                .map(|(r, g)| vec![r.to_string(), num(*g), (*g < ZERO_GAP).to_string()])
                .collect(),
        };
        let mut fit = Table { name: "gap_fit".into(), header: vec!["nu", "c", "r_squared", "points"], rows: vec![] };
        if let Some(f) = &self.fit {
            fit.rows.push(vec![num(f.nu), num(f.c), num(f.r_squared), f.points.to_string()]);
        }
        vec![curve, fit, raw]
    }
}
