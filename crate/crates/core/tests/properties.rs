// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::*;
use proptest::prelude::*;
use spinloc::dynamics::{eigendecompose, linear_grid, transmission_time, CommutatorProbe};
use spinloc::harness::{empirical_cdf, quantile};
use spinloc::linalg::{self, frobenius_diff};
use spinloc::lrbounds::contract;
use spinloc::models::{build_xy_hamiltonian, XyParams};
use spinloc::operator::{conditional_expectation, LocalOperator, Site};

fn small_xy() -> impl Strategy<Value = XyParams<f64>> {
    (1usize..=3, any::<u64>()).prop_map(|(n, seed)| random_xy(&mut rng(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_is_monotone_and_bounded(mut v in prop::collection::vec(-1e3f64..1e3, 1..40), q1 in 0.0f64..1.0, q2 in 0.0f64..1.0) {
        v.sort_by(f64::total_cmp);
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let (a, b) = (quantile(&v, lo), quantile(&v, hi));
        prop_assert!(a <= b);
        prop_assert!(v[0] <= a && b <= v[v.len() - 1]);
    }

    #[test]
    fn empirical_cdf_is_a_distribution_function(v in prop::collection::vec(0.0f64..1.0, 1..50), mut d in prop::collection::vec(0.0f64..1.2, 1..20)) {
        d.sort_by(f64::total_cmp);
        let c = empirical_cdf(&v, &d);
        prop_assert!(c.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!(c.windows(2).all(|w| w[0] <= w[1]));
    }

    /// Raising `ε` never moves the crossing to an earlier grid interval.
    #[test]
    fn larger_threshold_never_transmits_earlier(p in small_xy(), e1 in 0.01f64..1.9, e2 in 0.01f64..1.9) {
        let (_, h) = build_xy_hamiltonian(&p).unwrap();
        let es = eigendecompose(&h).unwrap();
        let grid = linear_grid(6.0, 25);
        let (small, large) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = transmission_time(&es, small, &grid, 6.0).unwrap();
        let b = transmission_time(&es, large, &grid, 6.0).unwrap();
        match (a.t_est, b.t_est) {
            (None, Some(_)) => prop_assert!(false, "smaller threshold censored, larger not"),
            (Some(ta), Some(tb)) => prop_assert!(tb >= ta - grid[1]),
            _ => {}
        }
    }

    #[test]
    fn pauli_estimator_is_at_most_two(p in small_xy(), t in -20.0f64..20.0) {
        let (_, h) = build_xy_hamiltonian(&p).unwrap();
        let es = eigendecompose(&h).unwrap();
        let v = CommutatorProbe::new(&es, &[0]).unwrap().estimate(t, &[p.n as Site]).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&v));
    }

    #[test]
    fn conditional_expectation_preserves_hermiticity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let chain = random_chain(&mut r);
        let d = chain.total_dim().unwrap();
        let a = LocalOperator::new(chain.sites(), chain.dims().to_vec(), random_hermitian(&mut r, d)).unwrap();
        let keep = random_support(&mut r, &chain);
        let pi = conditional_expectation(&a, &keep, &chain).unwrap();
        prop_assert!(frobenius_diff(pi.matrix().view(), linalg::adjoint(pi.matrix().view()).view()) < 1e-13);
    }

    #[test]
    fn contraction_map_is_idempotent(n in 3i64..20, cut in 0.0f64..1.0, sites in prop::collection::vec(0i64..20, 1..5)) {
        let a = 1 + ((n - 2) as f64 * cut) as i64;
        let cl = contract(n, &[(0, a), (a + 1, n)]).unwrap();
        let x: Vec<Site> = sites.into_iter().filter(|s| *s <= n).collect();
        prop_assume!(!x.is_empty());
        let once = cl.map_set(&x).unwrap();
        prop_assert_eq!(cl.map_set(&once).unwrap(), once);
    }
}
