// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact Heisenberg evolution, commutator estimators and transmission
//! times.

mod eigen;
mod estimators;
mod grid;
mod transmission;

pub use eigen::{
    eigendecompose, eigendecompose_with, heisenberg_evolve, EigenOptions, EigenSystem, EvolutionPlan, SpectralBlock,
    DEFAULT_DIM_CAP,
};
pub use estimators::{
    chi_four_pow, commutator_trace, max_pauli_commutator, neighborhood, pauli_commutator_estimator, quasi_locality_estimator, sup_over_time,
    CommutatorProbe, CommutatorTrace,
};
pub(crate) use estimators::check_geometry;
pub use grid::{default_grid, linear_grid, log_grid};
pub use transmission::{transmission_time, transmission_time_with, TransmissionTimeResult, BRACKET_TOL};
