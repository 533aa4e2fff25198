// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::operator::Site;
use crate::scalar::Real;

/// Base profile `r ↦ F(r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FBase {
    /// `(1 + r)^{-exponent}`.
    PowerLaw { exponent: f64 },
    /// `e^{-rate · r}`.
    Exponential { rate: f64 },
    /// Tabulated values; `values[r]` for `r` in range, the last entry beyond.
    Custom { values: Vec<f64> },
}

impl Default for FBase {
    fn default() -> Self {
        FBase::PowerLaw { exponent: 4.0 }
    }
}

/// `F_μ(r) = e^{-μ r} F(r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FFunction {
    pub base: FBase,
    pub mu: f64,
}

impl Default for FFunction {
    fn default() -> Self {
        Self { base: FBase::default(), mu: 0.0 }
    }
}

impl FFunction {
    pub fn new(base: FBase, mu: f64) -> Result<Self> {
        let f = Self { base, mu };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return domain(format!("μ must be finite and nonnegative, got {}", self.mu));
        }
        match &self.base {
            FBase::PowerLaw { exponent } if !(*exponent > 0.0) => domain("power-law exponent must be positive"),
            FBase::Exponential { rate } if !(*rate >= 0.0) => domain("exponential rate must be nonnegative"),
            FBase::Custom { values } => {
                if values.is_empty() {
                    return domain("tabulated F needs at least one value");
                }
                if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return domain("F must be positive");
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return domain("F must be nonincreasing");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The base profile without exponential weight.
    pub fn unweighted(&self) -> Self {
        Self { base: self.base.clone(), mu: 0.0 }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { base: self.base.clone(), mu }
    }

    pub fn base_value<T: Real>(&self, r: u64) -> T {
        let r = r as f64;
        let v = match &self.base {
            FBase::PowerLaw { exponent } => (1.0 + r).powf(-exponent),
            FBase::Exponential { rate } => (-rate * r).exp(),
            FBase::Custom { values } => values[(r as usize).min(values.len() - 1)],
        };
        T::lit(v)
    }

    /// `F_μ(r)`.
    pub fn value<T: Real>(&self, r: u64) -> T {
        self.base_value::<T>(r) * T::lit((-self.mu * r as f64).exp())
    }
}

/// A finite metric space with integer distances.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    dist: Array2<u64>,
}

impl FiniteMetric {
    /// Points on a line at the given integer positions.
    pub fn from_positions(pos: &[Site]) -> Self {
        let n = pos.len();
        Self { dist: Array2::from_shape_fn((n, n), |(i, j)| pos[i].abs_diff(pos[j])) }
    }

    /// `{0, 1, ..., len − 1}` with the usual metric.
    pub fn path(len: usize) -> Self {
        let pos: Vec<Site> = (0..len as Site).collect();
        Self::from_positions(&pos)
    }

    pub fn len(&self) -> usize {
        self.dist.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn d(&self, i: usize, j: usize) -> u64 {
        self.dist[[i, j]]
    }
}

/// `‖F‖ = sup_x Σ_y F(d(x,y))` and
/// `C_F = sup_{x,y} Σ_z F(d(x,z)) F(d(z,y)) / F(d(x,y))` on `lattice`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FConstants<T: Real> {
    pub norm: T,
    pub conv: T,
}

/// Exact lattice sums for `F_μ`.
pub fn f_constants<T: Real>(f: &FFunction, lattice: &FiniteMetric) -> Result<FConstants<T>> {
    f.validate()?;
    let n = lattice.len();
    if n == 0 {
        return domain("lattice must be nonempty");
    }
    let fv = Array2::from_shape_fn((n, n), |(i, j)| f.value::<T>(lattice.d(i, j)));
    if fv.iter().any(|v| !(*v > T::zero())) {
        return domain("F underflows to a nonpositive value on this lattice");
    }
    let norm = (0..n).map(|x| (0..n).map(|y| fv[[x, y]]).sum::<T>()).fold(T::zero(), T::max);
    let mut conv = T::zero();
    for x in 0..n {
        for y in 0..n {
            let s: T = (0..n).map(|z| fv[[x, z]] * fv[[z, y]]).sum();
            conv = conv.max(s / fv[[x, y]]);
        }
    }
    Ok(FConstants { norm, conv })
}
