// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::config::ScalingParams;
use super::emit::{num, Report, Table};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintStatus {
    Satisfied,
    Violated,
    /// `p = 1`: the right side vanishes.
    Unconstrained,
    /// `α ≥ 1/3`.
    OutOfScope,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub params: ScalingParams,
    pub status: ConstraintStatus,
    pub satisfied: bool,
    /// `None` when unconstrained or out of scope.
    pub gamma_max: Option<f64>,
    /// `η(1−3α)/(1−α)`.
    pub lhs: f64,
    /// `2[(β+1)γ−1] log(1/p)`.
    pub rhs: f64,
}

/// The inequality `η(1−3α)/(1−α) > 2[(β+1)γ−1] log(1/p)` evaluated directly.
pub fn constraint_holds(alpha: f64, beta: f64, gamma: f64, eta: f64, p: f64) -> bool {
    eta * (1.0 - 3.0 * alpha) / (1.0 - alpha) > 2.0 * ((beta + 1.0) * gamma - 1.0) * (1.0 / p).ln()
}

/// `γ_max = (1/(β+1)) (1 + η(1−3α) / ((1−α) 2 log(1/p)))` for `p < 1`.
pub fn gamma_max(alpha: f64, beta: f64, eta: f64, p: f64) -> Option<f64> {
    if p >= 1.0 {
        return None;
    }
    Some((1.0 + eta * (1.0 - 3.0 * alpha) / ((1.0 - alpha) * 2.0 * (1.0 / p).ln())) / (beta + 1.0))
}

pub fn constraint_report(sp: &ScalingParams) -> Result<ConstraintReport> {
    sp.validate()?;
    let (a, b, g, e, p) = (sp.alpha, sp.beta, sp.gamma, sp.eta, sp.p_zero);
    let lhs = e * (1.0 - 3.0 * a) / (1.0 - a);
    let rhs = 2.0 * ((b + 1.0) * g - 1.0) * (1.0 / p).ln();
    let (status, gamma_max) = if a >= 1.0 / 3.0 {
        (ConstraintStatus::OutOfScope, None)
    } else if p >= 1.0 {
        (ConstraintStatus::Unconstrained, None)
    } else {
        let gm = gamma_max(a, b, e, p).expect("p < 1");
        (if g < gm { ConstraintStatus::Satisfied } else { ConstraintStatus::Violated }, Some(gm))
    };
    let satisfied = matches!(status, ConstraintStatus::Satisfied | ConstraintStatus::Unconstrained);
    Ok(ConstraintReport { params: sp.clone(), status, satisfied, gamma_max, lhs, rhs })
}

impl Report for ConstraintReport {
    fn tables(&self) -> Vec<Table> {
        let status = serde_json::to_value(self.status).expect("status").as_str().unwrap_or_default().to_string();
        let p = &self.params;
        vec![Table {
            name: "constraint".into(),
            header: vec!["alpha", "beta", "gamma", "eta", "p_zero", "lhs", "rhs", "gamma_max", "status"],
            rows: vec![vec![
                num(p.alpha),
                num(p.beta),
                num(p.gamma),
                num(p.eta),
                num(p.p_zero),
                num(self.lhs),
                num(self.rhs),
                self.gamma_max.map(num).unwrap_or_default(),
                status,
            ]],
        }]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(alpha: f64, gamma: f64, p: f64) -> ScalingParams {
        ScalingParams {
            alpha,
            beta: 0.0,
            gamma,
            eta: 2.0,
            p_zero: p,
            theta: None,
            sigma: None,
            lambda_split: None,
            nu: None,
            xi: None,
            kappa: None,
        }
    }

    #[test]
    fn unit_p_is_unconstrained() {
        let r = constraint_report(&sp(0.1, 50.0, 1.0)).unwrap();
        assert_eq!(r.status, ConstraintStatus::Unconstrained);
        assert!(r.satisfied && r.gamma_max.is_none());
    }

    #[test]
    fn third_limit_and_scope() {
        let g = gamma_max(1.0 / 3.0 - 1e-12, 1.0, 2.0, 0.5).unwrap();
        assert!((g - 0.5).abs() < 1e-9);
        assert_eq!(constraint_report(&sp(0.4, 1.0, 0.5)).unwrap().status, ConstraintStatus::OutOfScope);
    }
}
