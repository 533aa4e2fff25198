// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Configuration-driven experiments over disorder ensembles.
//!
//! Every realization is generated from `(seed, realization)` alone and the
//! results are collected in realization order, so outputs do not depend on
//! the number of worker threads.

mod config;
mod constraint;
mod emit;
mod gaps;
mod localization;
mod stats;
mod tasks;
mod transmission;

pub use config::{
    check_cap, Chi, Engine, EpsilonSchedule, ExperimentConfig, GapSpec, GridKind, GridSpec, LiomSpec, LocalizationSpec,
    LrBoundSpec, ModelSpec, OutputSpec, PerturbationSpec, ScalingParams, TransmissionSpec,
};
pub use constraint::{constraint_holds, constraint_report, gamma_max, ConstraintReport, ConstraintStatus};
pub use emit::{emit_results, num, write_csv, Manifest, OutputFormat, Report, Table};
pub use gaps::{empirical_cdf, fit_power_law, min_gap, realization_gap, run_gap_statistics, GapStatistics, PowerLawFit, ZERO_GAP};
pub use localization::{localization_sample, run_localization_experiment, DistanceRow, LocalizationReport};
pub use stats::{bootstrap_indices, bootstrap_mean, fit_decay, quantile, weighted_line, DecayFit, MeanCi};
pub use tasks::{
    run_build, run_evolve, run_lioms, run_lrbound, BuildReport, EvolveReport, LiomReport, LrBoundReport, LrBoundRow,
    TermSummary,
};
pub use transmission::{growth_diagnostics, run_transmission_scaling, GrowthDiagnostics, TransmissionReport, TransmissionRow};
