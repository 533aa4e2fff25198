// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Local integrals of motion: time averages and dephasing of local terms,
//! and spin-configuration labeling of eigenvectors with σ^z-product
//! couplings.

mod first_kind;
mod second_kind;

pub use first_kind::{
    character_transform, coupling_constant, empirical_envelope, liom_first_kind_decompose,
    unitary_quasilocality_profile, verify_liom_bound, walsh_hadamard, LiomBoundCheck, LiomFirstKind,
};
pub use second_kind::{
    build_lioms_second_kind, default_gap_tol, dephase, finite_time_average, locality_defect, locality_profile,
    redephase, DephasedOperator, SecondKindLioms, DEFAULT_GAP_TOL_REL,
};
