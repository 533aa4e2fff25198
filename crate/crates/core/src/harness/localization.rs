// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Engine, ExperimentConfig, LocalizationSpec, ModelSpec};
use super::emit::{num, Report, Table};
use super::stats::{bootstrap_indices, bootstrap_mean, fit_decay, DecayFit};
use crate::dynamics::{eigendecompose, CommutatorProbe};
use crate::error::{config, Error, Result};
use crate::freefermion::{build_m, localization_kernel_rows, xy_manybody_surrogate_bound, MANY_BODY_TIME_SCALE};
use crate::operator::Site;

/// Disorder mean of the estimator at one distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceRow {
    pub distance: u64,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub realizations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub engine: Engine,
    pub n: usize,
    pub x: Site,
    pub rows: Vec<DistanceRow>,
    /// Distances with zero mean, left out of the fit.
    pub dropped: Vec<u64>,
    pub fit: Option<DecayFit>,
    /// `raw[r][k]`: realization `r` at distance `k`.
    pub raw: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

fn spec_of(cfg: &ExperimentConfig) -> Result<&LocalizationSpec> {
    cfg.localization.as_ref().ok_or_else(|| Error::Config("missing [localization] section".into()))
}

/// Estimates `E sup_t C_{X,Y}(t)` against distance and fits its decay rate.
pub fn run_localization_experiment(cfg: &ExperimentConfig) -> Result<LocalizationReport> {
    let spec = spec_of(cfg)?;
    let n = spec.n.unwrap_or(cfg.model.n());
    let raw = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| localization_sample(cfg, r))
        .collect::<Result<Vec<_>>>()?;
    let indices = bootstrap_indices(raw.len(), spec.bootstrap, cfg.seed);
    let mut rows = Vec::new();
    let (mut kept, mut dropped, mut warnings) = (Vec::new(), Vec::new(), Vec::new());
    for (k, &d) in spec.distances.iter().enumerate() {
        let col: Vec<f64> = raw.iter().map(|s| s[k]).collect();
        let m = bootstrap_mean(&col, &indices)?;
        rows.push(DistanceRow { distance: d, mean: m.mean, ci_low: m.ci_low, ci_high: m.ci_high, realizations: raw.len() });
        if m.mean > 0.0 {
            kept.push(k);
        } else {
            dropped.push(d);
            warnings.push(format!("distance {d}: all-zero mean, dropped from the fit"));
        }
    }
    let fit = if kept.len() >= 2 {
        let ds: Vec<u64> = kept.iter().map(|&k| spec.distances[k]).collect();
        let sub: Vec<Vec<f64>> = raw.iter().map(|s| kept.iter().map(|&k| s[k]).collect()).collect();
        Some(fit_decay(&ds, &sub, &indices)?)
    } else {
        warnings.push("fewer than two distances with positive mean; no fit".into());
        None
    };
    Ok(LocalizationReport { engine: spec.engine, n, x: spec.x, rows, dropped, fit, raw, warnings })
}

/// Per-distance values of one realization.
pub fn localization_sample(cfg: &ExperimentConfig, realization: u64) -> Result<Vec<f64>> {
    let spec = spec_of(cfg)?;
    let n = spec.n.unwrap_or(cfg.model.n());
    let ys: Vec<Site> = spec.distances.iter().map(|&d| spec.x + d as Site).collect();
    if spec.x < 0 || ys.iter().any(|&y| y > n as Site) {
        return config(format!("probe sites {} + distances leave [0, {n}]", spec.x));
    }
    let chi = spec.chi.value(1);
    let grid = cfg.grid.times();
    match spec.engine {
        Engine::ManyBody => {
            let (_, h) = cfg.build(n, realization)?;
            let es = eigendecompose(&h)?;
            let probe = CommutatorProbe::new(&es, &[spec.x])?;
            let sets: Vec<Vec<Site>> = ys.iter().map(|&y| vec![y]).collect();
            let mut best = vec![0.0; ys.len()];
            for &t in &grid {
                let w = chi * (1.0 + t.abs().powf(spec.beta));
                for (b, v) in best.iter_mut().zip(probe.estimate_many(t, &sets)?) {
                    *b = f64::max(*b, v / w);
                }
            }
            Ok(best)
        }
        Engine::OneBody => {
            if !matches!(cfg.model, ModelSpec::Xy { .. }) || cfg.perturbation.is_some() {
                return config("the one-body engine needs an unperturbed XY chain");
            }
            if spec.beta != 0.0 {
                return config("the one-body engine supports beta = 0 only");
            }
            let m = build_m(&cfg.model.xy_params(n, cfg.seed, realization)?)?;
            let one_body: Vec<f64> = grid.iter().map(|t| t * MANY_BODY_TIME_SCALE).collect();
            let k = localization_kernel_rows(&m, &one_body, &[spec.x as usize], spec.refine)?;
            ys.iter().map(|&y| Ok(xy_manybody_surrogate_bound(&k, &[spec.x], &[y])? / (4.0 * chi))).collect()
        }
    }
}

impl Report for LocalizationReport {
    fn tables(&self) -> Vec<Table> {
        let summary = Table {
            name: "localization".into(),
            header: vec!["distance", "mean", "ci_low", "ci_high", "R"],
            rows: self
                .rows
                .iter()
                .map(|r| vec![r.distance.to_string(), num(r.mean), num(r.ci_low), num(r.ci_high), r.realizations.to_string()])
                .collect(),
        };
        let mut raw = Table { name: "localization_raw".into(), header: vec!["realization", "distance", "value"], rows: vec![] };
        for (r, vals) in self.raw.iter().enumerate() {
            for (row, v) in self.rows.iter().zip(vals) {
                raw.rows.push(vec![r.to_string(), row.distance.to_string(), num(*v)]);
            }
        }
        let mut fit = Table {
            name: "localization_fit".into(),
            header: vec!["eta", "se", "ci_low", "ci_high", "log_amplitude"],
            rows: vec![],
        };
        if let Some(f) = &self.fit {
            fit.rows.push(vec![num(f.eta), num(f.se), num(f.ci_low), num(f.ci_high), num(f.log_amplitude)]);
        }
        vec![summary, fit, raw]
    }

    fn warnings(&self) -> Vec<String> {
        self.warnings.clone()
    }
}
