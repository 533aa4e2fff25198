// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::eigen::EigenSystem;
use super::estimators::CommutatorProbe;
use crate::error::{domain, Result};
use crate::scalar::Real;

/// Bisection stops once the bracket is this narrow.
pub const BRACKET_TOL: f64 = 1e-3;

/// `t(ε)` between the chain endpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransmissionTimeResult<T: Real> {
    pub epsilon: T,
    /// Midpoint of the final bracket; `None` when censored.
    pub t_est: Option<T>,
    /// `(t_low, t_high)` with `estimator(t_low) <= ε < estimator(t_high)`.
    pub bracket: Option<(T, T)>,
    pub horizon: T,
}

impl<T: Real> TransmissionTimeResult<T> {
    pub fn censored(&self) -> bool {
        self.t_est.is_none()
    }
}

/// First time the Pauli estimator between the two chain ends exceeds `eps`.
///
/// Scans `grid` (ascending, starting at 0) up to `t_max`, then bisects the
/// first crossing interval down to [`BRACKET_TOL`].
pub fn transmission_time<T: Real>(es: &EigenSystem<T>, eps: T, grid: &[T], t_max: T) -> Result<TransmissionTimeResult<T>> {
    let sites = es.sites();
    let (x, y) = (sites[0], *sites.last().expect("nonempty"));
    if x == y {
        return domain("transmission time needs at least two sites");
    }
    let probe = CommutatorProbe::new(es, &[x])?;
    transmission_time_with(&probe, y, eps, grid, t_max)
}

/// [`transmission_time`] with a prepared probe on `X = {x}` and target `y`.
pub fn transmission_time_with<T: Real>(
    probe: &CommutatorProbe<'_, T>,
    y: crate::operator::Site,
    eps: T,
    grid: &[T],
    t_max: T,
) -> Result<TransmissionTimeResult<T>> {
    if eps <= T::zero() {
        return domain("epsilon must be positive");
    }
    if grid.first() != Some(&T::zero()) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return domain("grid must be strictly ascending and start at 0");
    }
    let censored = TransmissionTimeResult { epsilon: eps, t_est: None, bracket: None, horizon: t_max };
    let mut prev = T::zero();
    for &t in grid.iter().skip(1).take_while(|&&t| t <= t_max) {
        if probe.exceeds(t, &[y], eps)? {
            let (mut lo, mut hi) = (prev, t);
            let tol = T::lit(BRACKET_TOL);
            while hi - lo > tol {
                let mid = (lo + hi) / T::lit(2.0);
                if probe.exceeds(mid, &[y], eps)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(TransmissionTimeResult {
                epsilon: eps,
                t_est: Some((lo + hi) / T::lit(2.0)),
                bracket: Some((lo, hi)),
                horizon: t_max,
            });
        }
        prev = t;
    }
    Ok(censored)
}
