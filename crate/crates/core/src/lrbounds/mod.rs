// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Lieb–Robinson bounds on contracted lattices for the interaction-picture
//! dynamics of sparsely perturbed chains.

mod contraction;
mod ffunction;
mod interaction_picture;

pub use contraction::{contract, contracted_interaction, ContractedInteraction, ContractedLattice, MetricMode};
pub use ffunction::{f_constants, FBase, FConstants, FFunction, FiniteMetric};
pub use interaction_picture::{
    collar, integrand_i, integrand_value, interaction_picture_terms, lr_bound_value, pair_interaction_bound,
    pair_interaction_norm, static_integrand, IntegralEstimate, InteractionPictureProbe, InteractionPictureTerms,
};
