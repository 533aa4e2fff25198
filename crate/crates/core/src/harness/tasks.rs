// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Single-realization runs behind the `build`, `evolve`, `lioms` and
//! `lrbound` subcommands.

use serde::Serialize;

use super::config::{Chi, ExperimentConfig};
use super::emit::{num, Report, Table};
use crate::dynamics::{commutator_trace, eigendecompose, sup_over_time, CommutatorTrace};
use crate::error::{config, Error, Result};
use crate::lioms::{build_lioms_second_kind, liom_first_kind_decompose};
use crate::lrbounds::{contract, integrand_i, interaction_picture_terms, lr_bound_value, InteractionPictureProbe};
use crate::operator::{operator_norm, Site};

fn sites_label(s: &[Site]) -> String {
    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermSummary {
    pub support: Vec<Site>,
    pub norm: f64,
}

/// The Hamiltonian of one realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BuildReport {
    pub n: usize,
    pub realization: u64,
    pub dimension: usize,
    pub terms: Vec<TermSummary>,
    pub energy_min: f64,
    pub energy_max: f64,
}

pub fn run_build(cfg: &ExperimentConfig, realization: u64) -> Result<BuildReport> {
    let n = cfg.model.n();
    let (inter, h) = cfg.build(n, realization)?;
    let es = eigendecompose(&h)?;
    let terms = inter
        .terms()
        .iter()
        .map(|(z, op)| Ok(TermSummary { support: z.clone(), norm: operator_norm(op)? }))
        .collect::<Result<Vec<_>>>()?;
    let e = es.energies();
    Ok(BuildReport {
        n,
        realization,
        dimension: es.source_dim(),
        terms,
        energy_min: e[0],
        energy_max: *e.last().expect("nonempty spectrum"),
    })
}

impl Report for BuildReport {
    fn tables(&self) -> Vec<Table> {
        vec![Table {
            name: "terms".into(),
            header: vec!["support", "norm"],
            rows: self.terms.iter().map(|t| vec![sites_label(&t.support), num(t.norm)]).collect(),
        }]
    }
}

/// The Pauli commutator estimator of one realization on the time grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolveReport {
    pub realization: u64,
    pub trace: CommutatorTrace<f64>,
    pub sup: f64,
}

pub fn run_evolve(cfg: &ExperimentConfig, realization: u64, x: &[Site], y: &[Site], beta: f64, chi: Chi) -> Result<EvolveReport> {
    let (_, h) = cfg.build(cfg.model.n(), realization)?;
    let es = eigendecompose(&h)?;
    let trace = commutator_trace(&es, x, y, &cfg.grid.times(), beta, chi.value(x.len()))?;
    let sup = sup_over_time(&trace);
    Ok(EvolveReport { realization, trace, sup })
}

impl Report for EvolveReport {
    fn tables(&self) -> Vec<Table> {
        let tr = &self.trace;
        vec![Table {
            name: "trace".into(),
            header: vec!["t", "estimator", "normalized"],
            rows: tr
                .time_grid
                .iter()
                .zip(&tr.values)
                .map(|(&t, &v)| vec![num(t), num(v), num(v / (tr.chi_of_x * (1.0 + t.abs().powf(tr.beta))))])
                .collect(),
        }]
    }
}

/// Second-kind profiles and the first-kind two-point kernel of one
/// realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiomReport {
    pub realization: u64,
    pub supports: Vec<Vec<Site>>,
    /// `profiles[k][r]` for the `k`-th local term.
    pub profiles: Vec<Vec<f64>>,
    /// `two_point[x][y]` by site offset.
    pub two_point: Vec<Vec<f64>>,
}

pub fn run_lioms(cfg: &ExperimentConfig, realization: u64) -> Result<LiomReport> {
    let n = cfg.model.n();
    let (inter, h) = cfg.build(n, realization)?;
    let es = eigendecompose(&h)?;
    let terms = inter.site_terms()?;
    let second = build_lioms_second_kind(&es, &terms)?;
    let first = liom_first_kind_decompose(&es, inter.chain())?;
    Ok(LiomReport {
        realization,
        supports: terms.iter().map(|t| t.support().to_vec()).collect(),
        profiles: second.profiles,
        two_point: first.two_point.outer_iter().map(|r| r.to_vec()).collect(),
    })
}

impl Report for LiomReport {
    fn tables(&self) -> Vec<Table> {
        let mut prof = Table { name: "liom_profiles".into(), header: vec!["term", "support", "r", "defect"], rows: vec![] };
        for (k, (s, p)) in self.supports.iter().zip(&self.profiles).enumerate() {
            for (r, v) in p.iter().enumerate() {
                prof.rows.push(vec![k.to_string(), sites_label(s), r.to_string(), num(*v)]);
            }
        }
        let mut tp = Table { name: "liom_two_point".into(), header: vec!["x", "y", "value"], rows: vec![] };
        for (x, row) in self.two_point.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                tp.rows.push(vec![x.to_string(), y.to_string(), num(*v)]);
            }
        }
        vec![prof, tp]
    }
}

/// Interaction-picture commutator against the contracted-lattice bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LrBoundRow {
    pub t: f64,
    pub measured: f64,
    pub integral: f64,
    pub quadrature_error: Option<f64>,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LrBoundReport {
    pub realization: u64,
    pub delta: Vec<u8>,
    pub rows: Vec<LrBoundRow>,
    pub max_residual: f64,
}

impl LrBoundReport {
    /// Grid points where the measured value exceeds the bound by more than
    /// `slack`.
    pub fn violations(&self, slack: f64) -> usize {
        self.rows.iter().filter(|r| r.measured > r.bound + slack).count()
    }
}

pub fn run_lrbound(cfg: &ExperimentConfig, realization: u64) -> Result<LrBoundReport> {
    let spec = cfg.lrbound.as_ref().ok_or_else(|| Error::Config("missing [lrbound] section".into()))?;
    let pert_spec = cfg.perturbation.as_ref().ok_or_else(|| Error::Config("lrbound needs a [perturbation] section".into()))?;
    let n = cfg.model.n();
    let mut base_cfg = cfg.clone();
    base_cfg.perturbation = None;
    let (_, h0) = base_cfg.build(n, realization)?;
    let (_, h) = cfg.build(n, realization)?;
    let pert = pert_spec.draw(n, cfg.seed, realization)?;
    let es0 = eigendecompose(&h0)?;
    let es = eigendecompose(&h)?;
    let times = cfg.grid.times();
    if times.first() != Some(&0.0) {
        return config("lrbound grid must start at 0");
    }
    let terms = interaction_picture_terms(&es0, &pert, &times)?;
    let cl = contract(n as Site, &spec.intervals)?.with_metric(spec.metric);
    let probe = InteractionPictureProbe::new(&es, &es0, &spec.x)?;
    let mut rows = Vec::with_capacity(times.len());
    for &t in &times {
        let est = integrand_i(&terms, &spec.f, &cl, (0.0, t))?;
        rows.push(LrBoundRow {
            t,
            measured: probe.estimate(t, &spec.y)?,
            integral: est.value,
            quadrature_error: est.error,
            bound: lr_bound_value(&spec.f, &cl, &spec.x, &spec.y, est.value)?,
        });
    }
    Ok(LrBoundReport { realization, delta: pert.delta, rows, max_residual: terms.max_residual() })
}

impl Report for LrBoundReport {
    fn tables(&self) -> Vec<Table> {
        vec![Table {
            name: "lrbound".into(),
            header: vec!["t", "measured", "integral", "quadrature_error", "bound"],
            rows: self
                .rows
                .iter()
                .map(|r| {
                    vec![num(r.t), num(r.measured), num(r.integral), r.quadrature_error.map(num).unwrap_or_default(), num(r.bound)]
                })
                .collect(),
        }]
    }
}
