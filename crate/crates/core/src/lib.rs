// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact-diagonalization diagnostics for dynamical localization in
//! disordered quantum spin chains.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`). The aliases below fix the precision; the experiment
//! harness runs in `f64`.

pub mod error;
pub mod linalg;
pub mod operator;
pub mod scalar;

pub mod dynamics;
pub mod freefermion;
pub mod harness;
pub mod lioms;
pub mod lrbounds;
pub mod models;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Operator = operator::LocalOperator<f64>;
pub type Operator32 = operator::LocalOperator<f32>;
pub type EigenSystem64 = dynamics::EigenSystem<f64>;
pub type EigenSystem32 = dynamics::EigenSystem<f32>;
pub type Interaction64 = models::Interaction<f64>;
pub type Interaction32 = models::Interaction<f32>;
pub type XyParams64 = models::XyParams<f64>;
pub type XyParams32 = models::XyParams<f32>;
pub type IsingParams64 = models::IsingParams<f64>;
pub type IsingParams32 = models::IsingParams<f32>;
pub type OneBodyMatrix64 = freefermion::OneBodyMatrix<f64>;
pub type OneBodyMatrix32 = freefermion::OneBodyMatrix<f32>;
