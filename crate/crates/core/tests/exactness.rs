// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;

fn check(name: &str) {
    let (_, tol, f) = EXACTNESS.iter().find(|c| c.0 == name).expect("known check");
    let worst = f(INSTANCES);
    assert!(worst <= *tol, "{name}: residual {worst:e} above {tol:e}");
}

#[test]
fn embedding_is_a_homomorphism() {
    check("embedding homomorphism");
}

#[test]
fn conditional_expectation_is_an_idempotent_contraction() {
    check("conditional expectation");
}

#[test]
fn heisenberg_dynamics_preserves_norms() {
    check("heisenberg norm preservation");
}

#[test]
fn one_body_propagator_is_a_unitary_group() {
    check("propagator unitarity and group law");
}

#[test]
fn character_transform_roundtrips() {
    check("walsh character roundtrip");
}

#[test]
fn telescoping_pieces_sum_to_the_evolved_term() {
    check("telescoping identity");
}
