// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ffunction::FiniteMetric;
use crate::error::{domain, Result};
use crate::linalg::czero;
use crate::models::Interaction;
use crate::operator::{accumulate_embedded, LocalOperator, Site};
use crate::scalar::Real;

/// Metric used on the contracted lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricMode {
    /// The integer metric restricted to the contracted sites.
    #[default]
    Restricted,
    /// Consecutive contracted sites at unit distance.
    Collapsed,
}

/// `Γ_I = ∪_j [a_j, b_j) ∪ {n}` with the map `C` collapsing each collar
/// `[b_{j−1}, a_j]` (with `b_0 = 0`, `a_{m+1} = n`) onto `a_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractedLattice {
    n: Site,
    intervals: Vec<(Site, Site)>,
    gamma: Vec<Site>,
    cmap: Vec<Site>,
    mode: MetricMode,
}

/// Builds the contracted lattice of `[0, n]` for disjoint ordered intervals.
pub fn contract(n: Site, intervals: &[(Site, Site)]) -> Result<ContractedLattice> {
    if n < 0 {
        return domain("n must be nonnegative");
    }
    for (k, &(a, b)) in intervals.iter().enumerate() {
        if !(0 <= a && a < b && b <= n) {
            return domain(format!("interval {k} = [{a}, {b}] must satisfy 0 <= a < b <= n"));
        }
        if k > 0 && intervals[k - 1].1 >= a {
            return domain("intervals must be disjoint and ordered with b_j < a_{j+1}");
        }
    }
    let mut cmap: Vec<Site> = (0..=n).collect();
    let mut prev_b = 0;
    let mut ends: Vec<Site> = intervals.iter().map(|iv| iv.0).collect();
    ends.push(n);
    for (j, &a) in ends.iter().enumerate() {
        for x in prev_b..=a {
            cmap[x as usize] = a;
        }
        if j < intervals.len() {
            prev_b = intervals[j].1;
        }
    }
    let mut gamma = cmap.clone();
    gamma.sort_unstable();
    gamma.dedup();
    Ok(ContractedLattice { n, intervals: intervals.to_vec(), gamma, cmap, mode: MetricMode::Restricted })
}

impl ContractedLattice {
    pub fn with_metric(mut self, mode: MetricMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn n(&self) -> Site {
        self.n
    }

    pub fn intervals(&self) -> &[(Site, Site)] {
        &self.intervals
    }

    /// Contracted sites in ascending order.
    pub fn gamma(&self) -> &[Site] {
        &self.gamma
    }

    pub fn mode(&self) -> MetricMode {
        self.mode
    }

    /// `C(x)`.
    pub fn map(&self, x: Site) -> Result<Site> {
        if !(0..=self.n).contains(&x) {
            return domain(format!("site {x} outside [0, {}]", self.n));
        }
        Ok(self.cmap[x as usize])
    }

    /// `C(X)`, sorted and deduplicated.
    pub fn map_set(&self, xs: &[Site]) -> Result<Vec<Site>> {
        let mut out = xs.iter().map(|&x| self.map(x)).collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Position of a contracted site in the chosen metric.
    fn position(&self, x: Site) -> Site {
        match self.mode {
            MetricMode::Restricted => x,
            MetricMode::Collapsed => self.gamma.binary_search(&x).expect("site in Γ") as Site,
        }
    }

    /// Index of a contracted site in [`Self::gamma`].
    pub fn index(&self, x: Site) -> Option<usize> {
        self.gamma.binary_search(&x).ok()
    }

    /// Distance between two contracted sites.
    pub fn distance(&self, x: Site, y: Site) -> u64 {
        self.position(x).abs_diff(self.position(y))
    }

    /// `min d(x, y)` over contracted sets.
    pub fn set_distance(&self, xs: &[Site], ys: &[Site]) -> u64 {
        xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| self.distance(x, y)).min().unwrap_or(0)
    }

    /// `(Γ_I, d)` as a finite metric space, indexed like [`Self::gamma`].
    pub fn metric(&self) -> FiniteMetric {
        let pos: Vec<Site> = self.gamma.iter().map(|&x| self.position(x)).collect();
        FiniteMetric::from_positions(&pos)
    }
}

/// `Φ̃(X) = Σ_{C(Z) = X} Φ(Z)`, keyed by the contracted support `X`. Each
/// operator acts on the union of the original supports it collects.
#[derive(Clone, Debug)]
pub struct ContractedInteraction<T: Real> {
    pub terms: BTreeMap<Vec<Site>, LocalOperator<T>>,
}

impl<T: Real> ContractedInteraction<T> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Regroups the terms of `phi` by contracted support.
pub fn contracted_interaction<T: Real>(phi: &Interaction<T>, cl: &ContractedLattice) -> Result<ContractedInteraction<T>> {
    let chain = phi.chain();
    let mut groups: BTreeMap<Vec<Site>, Vec<&LocalOperator<T>>> = BTreeMap::new();
    for (z, op) in phi.terms() {
        if z.iter().any(|&x| !(0..=cl.n).contains(&x)) {
            return domain(format!("term support {z:?} outside the lattice"));
        }
        groups.entry(cl.map_set(z)?).or_default().push(op);
    }
    let mut terms = BTreeMap::new();
    for (x, ops) in groups {
        let mut support: Vec<Site> = ops.iter().flat_map(|o| o.support().iter().copied()).collect();
        support.sort_unstable();
        support.dedup();
        let dims = chain.dims_of(&support)?;
        let d: usize = dims.iter().product();
        let mut m = ndarray::Array2::from_elem((d, d), czero::<T>());
        for op in ops {
            accumulate_embedded(&mut m, &support, &dims, op, crate::linalg::cone())?;
        }
        terms.insert(x, LocalOperator::new(support, dims, m)?);
    }
    Ok(ContractedInteraction { terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_chain_interval_is_identity_map() {
        let cl = contract(6, &[(0, 6)]).unwrap();
        assert_eq!(cl.gamma(), &[0, 1, 2, 3, 4, 5, 6]);
        for x in 0..=6 {
            assert_eq!(cl.map(x).unwrap(), x);
        }
    }

    #[test]
    fn two_intervals_table() {
        let cl = contract(10, &[(2, 4), (7, 9)]).unwrap();
        let table: Vec<Site> = (0..=10).map(|x| cl.map(x).unwrap()).collect();
        assert_eq!(table, vec![2, 2, 2, 3, 7, 7, 7, 7, 8, 10, 10]);
        assert_eq!(cl.gamma(), &[2, 3, 7, 8, 10]);
        for x in 0..=10 {
            let c = cl.map(x).unwrap();
            assert_eq!(cl.map(c).unwrap(), c);
        }
        let col = cl.clone().with_metric(MetricMode::Collapsed);
        assert_eq!(col.distance(3, 7), 1);
        assert_eq!(cl.distance(3, 7), 4);
    }

    #[test]
    fn bad_intervals_are_rejected() {
        assert!(contract(10, &[(4, 6), (5, 8)]).is_err());
        assert!(contract(10, &[(6, 8), (1, 3)]).is_err());
        assert!(contract(10, &[(2, 2)]).is_err());
        assert!(contract(10, &[(2, 11)]).is_err());
        assert!(contract(10, &[(2, 4), (4, 6)]).is_err());
    }
}
