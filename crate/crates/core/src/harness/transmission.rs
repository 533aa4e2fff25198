// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::config::{EpsilonSchedule, ExperimentConfig};
use super::emit::{num, Report, Table};
use super::stats::{quantile, weighted_line};
use crate::dynamics::{eigendecompose, transmission_time};
use crate::error::{Error, Result};

/// Transmission-time distribution at one chain size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransmissionRow {
    pub n: usize,
    pub epsilon: f64,
    /// Censored runs count as `+∞` in the quantiles.
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub censored_fraction: f64,
    pub realizations: usize,
    pub fully_censored: bool,
}

/// Finite-size growth diagnostics on the medians. These are proxies only;
/// no asymptotic statement is tested.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthDiagnostics {
    /// Largest `|median − fit| / median` of an affine fit `a + b n` over the
    /// sizes with finite medians.
    pub linear_max_rel_dev: Option<f64>,
    pub linear_slope: Option<f64>,
    /// Consecutive sizes with `median_{n'}/n' > median_n/n`.
    pub ratio_increases: usize,
    pub ratio_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransmissionReport {
    pub schedule: EpsilonSchedule,
    pub horizon: f64,
    pub rows: Vec<TransmissionRow>,
    /// `raw[k][r]`: size `k`, realization `r`; `None` when censored.
    pub raw: Vec<Vec<Option<f64>>>,
    pub growth: GrowthDiagnostics,
    pub warnings: Vec<String>,
}

/// `t_n(ε_n)` between the ends of `[0, n]` over the ensemble, for each size.
pub fn run_transmission_scaling(cfg: &ExperimentConfig, schedule: EpsilonSchedule) -> Result<TransmissionReport> {
    let spec = cfg.transmission.as_ref().ok_or_else(|| Error::Config("missing [transmission] section".into()))?;
    for &n in &spec.sizes {
        super::config::check_cap(n)?;
    }
    let grid = cfg.grid.times();
    let horizon = cfg.grid.t_max;
    let jobs: Vec<(usize, u64)> =
        spec.sizes.iter().flat_map(|&n| (0..cfg.realizations as u64).map(move |r| (n, r))).collect();
    let flat = jobs
        .par_iter()
        .map(|&(n, r)| {
            let (_, h) = cfg.build(n, r)?;
            let es = eigendecompose(&h)?;
            Ok(transmission_time(&es, schedule.at(n), &grid, horizon)?.t_est)
        })
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<Vec<Option<f64>>> = flat.chunks(cfg.realizations).map(|c| c.to_vec()).collect();
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (&n, times) in spec.sizes.iter().zip(&raw) {
        let mut v: Vec<f64> = times.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
        v.sort_by(f64::total_cmp);
        let censored = times.iter().filter(|t| t.is_none()).count();
        let fully = censored == times.len();
        if fully {
            warnings.push(format!("n = {n}: every realization censored; excluded from growth fit"));
        }
        rows.push(TransmissionRow {
            n,
            epsilon: schedule.at(n),
            median: quantile(&v, 0.5),
            q1: quantile(&v, 0.25),
            q3: quantile(&v, 0.75),
            censored_fraction: censored as f64 / times.len() as f64,
            realizations: times.len(),
            fully_censored: fully,
        });
    }
    let growth = growth_diagnostics(&rows);
    Ok(TransmissionReport { schedule, horizon, rows, raw, growth, warnings })
}

/// Growth diagnostics of the median column.
pub fn growth_diagnostics(rows: &[TransmissionRow]) -> GrowthDiagnostics {
    let usable: Vec<&TransmissionRow> = rows.iter().filter(|r| !r.fully_censored).collect();
    let finite: Vec<&TransmissionRow> = usable.iter().copied().filter(|r| r.median.is_finite()).collect();
    let x: Vec<f64> = finite.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = finite.iter().map(|r| r.median).collect();
    let (linear_max_rel_dev, linear_slope) = match weighted_line(&x, &y, &vec![1.0; x.len()]) {
        Ok((a, b)) => {
            let dev = x.iter().zip(&y).map(|(&n, &t)| ((a + b * n) - t).abs() / t).fold(0.0, f64::max);
            (Some(dev), Some(b))
        }
        Err(_) => (None, None),
    };
    let ratios: Vec<f64> = usable.iter().map(|r| r.median / r.n as f64).collect();
    let ratio_increases = ratios.windows(2).filter(|w| w[1] > w[0]).count();
    GrowthDiagnostics { linear_max_rel_dev, linear_slope, ratio_increases, ratio_steps: ratios.len().saturating_sub(1) }
}

impl Report for TransmissionReport {
    fn tables(&self) -> Vec<Table> {
        let summary = Table {
            name: "transmission".into(),
            header: vec!["n", "epsilon", "median", "q1", "q3", "censored_fraction", "R"],
            rows: self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        num(r.epsilon),
                        num(r.median),
                        num(r.q1),
                        num(r.q3),
                        num(r.censored_fraction),
                        r.realizations.to_string(),
                    ]
                })
                .collect(),
        };
        let mut raw = Table { name: "transmission_raw".into(), header: vec!["n", "realization", "t", "censored"], rows: vec![] };
        for (row, times) in self.rows.iter().zip(&self.raw) {
            for (r, t) in times.iter().enumerate() {
                let (tv, c) = match t {
                    Some(t) => (num(*t), "false"),
                    None => (String::new(), "true"),
                };
                raw.rows.push(vec![row.n.to_string(), r.to_string(), tv, c.into()]);
            }
        }
        vec![summary, raw]
    }

    fn warnings(&self) -> Vec<String> {
        self.warnings.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, median: f64) -> TransmissionRow {
        TransmissionRow {
            n,
            epsilon: 0.1,
            median,
            q1: median,
            q3: median,
            censored_fraction: 0.0,
            realizations: 1,
            fully_censored: false,
        }
    }

    #[test]
    fn linear_medians_have_zero_deviation() {
        let rows: Vec<_> = (4..=8).map(|n| row(n, 0.5 * n as f64 + 1.0)).collect();
        let g = growth_diagnostics(&rows);
        assert!(g.linear_max_rel_dev.unwrap() < 1e-12);
        assert!((g.linear_slope.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(g.ratio_increases, 0);
    }

    #[test]
    fn exponential_medians_increase_ratio() {
        let rows: Vec<_> = (4..=9).map(|n| row(n, (n as f64).exp())).collect();
        let g = growth_diagnostics(&rows);
        assert_eq!((g.ratio_increases, g.ratio_steps), (5, 5));
    }
}
