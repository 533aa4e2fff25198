// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Library results against independent brute-force computations.

mod common;

use common::*;
use ndarray::{array, Array2};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use spinloc::dynamics::{
    eigendecompose, linear_grid, quasi_locality_estimator, transmission_time, CommutatorProbe,
};
use spinloc::freefermion::{build_m, localization_kernel_rows, propagator, xy_manybody_surrogate_bound, MANY_BODY_TIME_SCALE};
use spinloc::harness::{constraint_holds, empirical_cdf, gamma_max, min_gap, realization_gap, run_gap_statistics, ExperimentConfig};
use spinloc::linalg::{self, frobenius_diff, spectral_norm};
use spinloc::lioms::{
    dephase, empirical_envelope, finite_time_average, liom_first_kind_decompose, unitary_quasilocality_profile,
    verify_liom_bound,
};
use spinloc::lrbounds::{
    contract, contracted_interaction, f_constants, integrand_i, interaction_picture_terms, lr_bound_value, FBase,
    FFunction, FiniteMetric,
};
use spinloc::models::{
    apply_sparse_perturbation, build_ising_hamiltonian, build_xy_hamiltonian, longest_zero_run, sample_sequence,
    DisorderSpec, Distribution, IsingParams, SparsePerturbation, XyParams,
};
use spinloc::operator::{conditional_expectation, embed, operator_norm, pauli_strings, Chain, LocalOperator, Pauli, Site};
use spinloc::C;

fn c(re: f64) -> C<f64> {
    Complex::new(re, 0.0)
}

fn kron(a: &Array2<C<f64>>, b: &Array2<C<f64>>) -> Array2<C<f64>> {
    let (p, q) = (a.nrows(), b.nrows());
    Array2::from_shape_fn((p * q, p * q), |(i, j)| a[[i / q, j / q]] * b[[i % q, j % q]])
}

/// `σ` at position `k` of `len` qubits, identity elsewhere.
fn single(p: Pauli, k: usize, len: usize) -> Array2<C<f64>> {
    (0..len).fold(Array2::eye(1), |acc, i| kron(&acc, &if i == k { p.matrix() } else { Pauli::I.matrix() }))
}

fn zero(d: usize) -> Array2<C<f64>> {
    Array2::from_elem((d, d), c(0.0))
}

#[test]
fn conditional_expectation_matches_pauli_averaging() {
    let mut r = rng(201);
    let chain = Chain::qubits(0, 1).unwrap();
    for _ in 0..20 {
        let a = LocalOperator::qubit(vec![0, 1], random_matrix(&mut r, 4)).unwrap();
        let mut oracle = zero(4);
        for p in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            let u = kron(&Pauli::I.matrix(), &p.matrix());
            let m = linalg::matmul(linalg::matmul(u.view(), a.matrix().view()).view(), u.view());
            oracle = oracle + m.mapv(|z| z * 0.25);
        }
        let pi = embed(&conditional_expectation(&a, &[0], &chain).unwrap(), &chain).unwrap();
        assert!(frobenius_diff(pi.matrix().view(), oracle.view()) < 1e-13);
    }
}

#[test]
fn spectral_norm_matches_power_iteration() {
    let mut r = rng(202);
    for _ in 0..10 {
        let a = random_matrix(&mut r, 8);
        let g = linalg::matmul_op(a.view(), spinloc::scalar::Op::Adjoint, a.view(), spinloc::scalar::Op::None);
        let mut v: Vec<C<f64>> = (0..8).map(|k| c(1.0 + k as f64)).collect();
        let mut lambda = 0.0;
        for _ in 0..20_000 {
            let w: Vec<C<f64>> = (0..8).map(|i| (0..8).map(|j| g[[i, j]] * v[j]).sum()).collect();
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            lambda = norm / v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v = w.iter().map(|z| z / norm).collect();
        }
        let s = spectral_norm(a.view()).unwrap();
        assert!((s - lambda.sqrt()).abs() < 1e-9, "{s} vs {}", lambda.sqrt());
    }
}

#[test]
fn uniform_stream_is_frozen() {
    let spec = DisorderSpec { distribution: Distribution::Uniform { a: 0.0, b: 1.0 }, seed: 42, stream_id: 0 };
    let got = sample_sequence(&spec, 5).unwrap().values;
    let frozen = [0.5140492957650241, 0.4101988062348858, 0.09781386633443878, 0.16741662677052205, 0.16315255492515823];
    assert_eq!(got, frozen);
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    rng.set_stream(0);
    let direct: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
    assert_eq!(got, direct);
}

#[test]
fn xy_hamiltonian_matches_brute_force_assembly() {
    let mut r = rng(203);
    for n in 1..=3 {
        let p = random_xy(&mut r, n);
        let len = n + 1;
        let mut h = zero(1 << len);
        for j in 0..n {
            let xx = linalg::matmul(single(Pauli::X, j, len).view(), single(Pauli::X, j + 1, len).view());
            let yy = linalg::matmul(single(Pauli::Y, j, len).view(), single(Pauli::Y, j + 1, len).view());
            h = h + xx.mapv(|z| z * p.mu[j] * (1.0 + p.gamma[j])) + yy.mapv(|z| z * p.mu[j] * (1.0 - p.gamma[j]));
        }
        for j in 0..len {
            h = h + single(Pauli::Z, j, len).mapv(|z| z * p.lambda * p.omega[j]);
        }
        let (_, got) = build_xy_hamiltonian(&p).unwrap();
        assert!(frobenius_diff(got.matrix().view(), h.view()) < 1e-13);
    }
}

fn ising_oracle(p: &IsingParams<f64>) -> Array2<C<f64>> {
    let len = p.h.len();
    let mut h = zero(1 << len);
    for (k, &j) in p.j.iter().enumerate() {
        h = h + linalg::matmul(single(Pauli::Z, k, len).view(), single(Pauli::Z, k + 1, len).view()).mapv(|z| z * j);
    }
    for k in 0..len {
        h = h + single(Pauli::X, k, len).mapv(|z| z * p.gamma_scale * p.transverse[k]);
        h = h + single(Pauli::Z, k, len).mapv(|z| z * p.h[k]);
    }
    h
}

fn random_ising(r: &mut ChaCha20Rng, len: usize, gamma_scale: f64) -> IsingParams<f64> {
    IsingParams {
        a: 0,
        b: len as Site - 1,
        j: random_fields(r, len - 1),
        transverse: random_fields(r, len),
        gamma_scale,
        h: random_fields(r, len),
    }
}

#[test]
fn ising_hamiltonian_matches_brute_force_assembly() {
    let mut r = rng(204);
    let p = random_ising(&mut r, 3, 0.7);
    let (_, got) = build_ising_hamiltonian(&p).unwrap();
    assert!(frobenius_diff(got.matrix().view(), ising_oracle(&p).view()) < 1e-13);
}

#[test]
fn sparse_perturbation_replays_manual_insertion() {
    let n = 4;
    let p = XyParams::isotropic(vec![0.3, -0.7, 0.1, 0.9, -0.4], 2.0);
    let (base, h0) = build_xy_hamiltonian(&p).unwrap();
    let spec = DisorderSpec { distribution: Distribution::Bernoulli { p_zero: 0.5 }, seed: 9, stream_id: 16 };
    let mask = sample_sequence(&spec, n).unwrap();
    let delta: Vec<u8> = mask.values.iter().map(|&v| v as u8).collect();
    let pert = SparsePerturbation::zz(&p.chain(), delta.clone(), 0.5, 0.8).unwrap();
    let h = apply_sparse_perturbation(&base, &pert).unwrap().hamiltonian().unwrap();
    let mut oracle = h0.matrix().clone();
    for (x, &d) in delta.iter().enumerate() {
        if d == 1 {
            let zz = linalg::matmul(single(Pauli::Z, x, n + 1).view(), single(Pauli::Z, x + 1, n + 1).view());
            oracle = oracle + zz.mapv(|z| z * 0.8);
        }
    }
    assert!(frobenius_diff(h.matrix().view(), oracle.view()) < 1e-13);
    let replay = sample_sequence(&mask.spec, n).unwrap();
    assert_eq!(replay, mask);
}

#[test]
fn longest_zero_run_matches_linear_scan() {
    for seed in 0..5 {
        let spec = DisorderSpec { distribution: Distribution::Bernoulli { p_zero: 0.5 }, seed, stream_id: 0 };
        let v: Vec<u8> = sample_sequence(&spec, 1000).unwrap().values.iter().map(|&x| x as u8).collect();
        let (mut best, mut cur) = (0, 0);
        for &b in &v {
            cur = if b == 0 { cur + 1 } else { 0 };
            best = best.max(cur);
        }
        assert_eq!(longest_zero_run(&v).unwrap(), best);
    }
}

#[test]
fn propagator_matches_taylor_series() {
    let p = XyParams { n: 1, mu: vec![0.9], gamma: vec![0.4], omega: vec![0.3, -0.6], lambda: 1.5 };
    let m = build_m(&p).unwrap();
    let t = 0.7;
    let a = m.m.mapv(|x| Complex::new(0.0, -t * x));
    let (mut term, mut sum) = (Array2::<C<f64>>::eye(4), Array2::<C<f64>>::eye(4));
    for k in 1..40 {
        term = linalg::matmul(term.view(), a.view()).mapv(|z| z / k as f64);
        sum = sum + &term;
    }
    assert!(frobenius_diff(propagator(&m, t).unwrap().view(), sum.view()) < 1e-8);
}

#[test]
fn one_body_kernel_decays_off_diagonal() {
    let mut r = rng(205);
    let p = XyParams::isotropic(random_fields(&mut r, 51), 8.0);
    let m = build_m(&p).unwrap();
    let k = localization_kernel_rows(&m, &linear_grid(20.0, 101), &[25], true).unwrap();
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        (1..=10).map(|d| (d as f64, (0.5 * (k.value(25, 25 - d).unwrap() * k.value(25, 25 + d).unwrap())).ln())).unzip();
    let (_, slope) = spinloc::harness::weighted_line(&xs, &ys, &vec![1.0; xs.len()]).unwrap();
    assert!(-slope > 0.0, "fitted decay rate {}", -slope);
}

/// `σ^x_0 = c_0 + c_0†` evolves linearly in the fermions, so
/// `‖[τ_t(σ^x_0), σ^z_y]‖ ≤ 4 (|U_{0,y}| + |U_{0,n+1+y}|)` at one-body time
/// `2t`.
#[test]
fn edge_fermion_commutator_is_bounded_by_kernel_entries() {
    let mut r = rng(206);
    let n = 6;
    let p = random_xy(&mut r, n);
    let (_, h) = build_xy_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let chain = p.chain();
    let m = build_m(&p).unwrap();
    let a = embed(&Pauli::X.at(0), &chain).unwrap();
    for t in [0.3, 1.1, 4.0] {
        let k = localization_kernel_rows(&m, &[0.0, t * MANY_BODY_TIME_SCALE], &[0], false).unwrap();
        let at = spinloc::dynamics::heisenberg_evolve(&es, &a, t).unwrap();
        for y in 1..=n {
            let b = embed(&Pauli::Z.at(y as Site), &chain).unwrap();
            let lhs = operator_norm(&spinloc::operator::commutator(&at, &b).unwrap()).unwrap();
            let rhs = 4.0 * k.value(0, y).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-12, "t = {t}, y = {y}: {lhs} > {rhs}");
            assert!(xy_manybody_surrogate_bound(&k, &[0], &[y as Site]).unwrap() == rhs);
        }
    }
}

#[test]
fn random_hermitian_is_reconstructed() {
    let mut r = rng(207);
    let h = LocalOperator::qubit(vec![0, 1, 2, 3], random_hermitian(&mut r, 16)).unwrap();
    let es = eigendecompose(&h).unwrap();
    let u = es.basis();
    let d = Array2::from_shape_fn((16, 16), |(i, j)| if i == j { c(es.energies()[i]) } else { c(0.0) });
    let rebuilt = linalg::matmul_op(linalg::matmul(u.view(), d.view()).view(), spinloc::scalar::Op::None, u.view(), spinloc::scalar::Op::Adjoint);
    assert!(frobenius_diff(rebuilt.view(), h.matrix().view()) < 1e-10);
}

/// Random element of SU(2).
fn random_unitary(r: &mut ChaCha20Rng) -> Array2<C<f64>> {
    let q: Vec<f64> = (0..4).map(|_| r.random_range(-1.0..1.0)).collect();
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (Complex::new(q[0], q[1]) / norm, Complex::new(q[2], q[3]) / norm);
    array![[a, -b.conj()], [b, a.conj()]]
}

/// The Pauli maximum is attained by explicit Pauli pairs, and expanding
/// unitaries in Pauli words bounds the unit-ball supremum by `4` times it.
#[test]
fn pauli_estimator_brackets_unit_ball_search_on_two_sites() {
    let p = XyParams { n: 1, mu: vec![0.8], gamma: vec![0.3], omega: vec![0.4, -0.2], lambda: 1.0 };
    let (_, h) = build_xy_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let chain = p.chain();
    let t = 0.5;
    let pauli = CommutatorProbe::new(&es, &[0]).unwrap().estimate(t, &[1]).unwrap();
    let comm = |a: &Array2<C<f64>>, b: &Array2<C<f64>>| {
        let a = embed(&LocalOperator::qubit(vec![0], a.clone()).unwrap(), &chain).unwrap();
        let b = embed(&LocalOperator::qubit(vec![1], b.clone()).unwrap(), &chain).unwrap();
        let at = spinloc::dynamics::heisenberg_evolve(&es, &a, t).unwrap();
        operator_norm(&spinloc::operator::commutator(&at, &b).unwrap()).unwrap()
    };
    let mut pairs: f64 = 0.0;
    for a in Pauli::NONTRIVIAL {
        for b in Pauli::NONTRIVIAL {
            pairs = pairs.max(comm(&a.matrix(), &b.matrix()));
        }
    }
    assert!((pairs - pauli).abs() < 1e-12);
    let mut r = rng(208);
    let mut best: f64 = 0.0;
    for _ in 0..2000 {
        best = best.max(comm(&random_unitary(&mut r), &random_unitary(&mut r)));
    }
    assert!(best <= 4.0 * pauli + 1e-9, "{best} vs {pauli}");
}

#[test]
fn quasi_locality_profile_dominates_commutators() {
    let mut r = rng(209);
    let n = 6;
    let p = XyParams::isotropic(random_fields(&mut r, n + 1), 8.0);
    let (_, h) = build_xy_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let probe = CommutatorProbe::new(&es, &[0]).unwrap();
    for t in [1.0, 5.0] {
        for radius in 0..n as i64 {
            let d = Pauli::NONTRIVIAL
                .iter()
                .map(|&a| quasi_locality_estimator(&es, &a.at(0), radius, t).unwrap())
                .fold(0.0f64, f64::max);
            for y in (radius + 1)..=n as i64 {
                assert!(probe.estimate(t, &[y]).unwrap() <= 2.0 * d + 1e-10);
            }
        }
        assert!(quasi_locality_estimator(&es, &Pauli::X.at(0), n as i64, t).unwrap() == 0.0);
    }
}

#[test]
fn transmission_time_matches_dense_grid_scan() {
    let p = XyParams::isotropic(vec![0.0, 0.0], 0.0);
    let (_, h) = build_xy_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let eps = 0.1;
    let res = transmission_time(&es, eps, &linear_grid(5.0, 51), 5.0).unwrap();
    let probe = CommutatorProbe::new(&es, &[0]).unwrap();
    let steps = 100_000;
    let oracle = (0..=steps)
        .map(|k| 5.0 * k as f64 / steps as f64)
        .find(|&t| probe.estimate(t, &[1]).unwrap() > eps)
        .expect("crossing within the horizon");
    let got = res.t_est.expect("not censored");
    assert!((got - oracle).abs() <= 1e-3, "{got} vs {oracle}");
}

#[test]
fn long_time_average_approaches_dephasing() {
    let mut r = rng(210);
    for _ in 0..5 {
        let h = LocalOperator::qubit(vec![0], random_hermitian(&mut r, 2)).unwrap();
        let es = eigendecompose(&h).unwrap();
        let a = LocalOperator::qubit(vec![0], random_matrix(&mut r, 2)).unwrap();
        let avg = finite_time_average(&es, &a, 1e6).unwrap();
        let dep = dephase(&es, &a, 0.0).unwrap().to_operator(&es).unwrap();
        assert!(frobenius_diff(avg.matrix().view(), dep.matrix().view()) < 1e-5);
    }
}

#[test]
fn first_kind_couplings_match_character_sums() {
    let mut r = rng(211);
    let p = random_ising(&mut r, 2, 0.3);
    let (_, h) = build_ising_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let lf = liom_first_kind_decompose(&es, &p.chain()).unwrap();
    let diag: Vec<f64> = lf.assignment.iter().map(|&g| es.energies()[g]).collect();
    for (mask, sites) in [(0usize, vec![]), (1, vec![0]), (2, vec![1]), (3, vec![0, 1])] {
        let mut oracle = 0.0;
        for (b, &db) in diag.iter().enumerate() {
            let flips = sites.iter().filter(|&&s: &&Site| b >> (1 - s) & 1 == 1).count();
            oracle += db * if flips % 2 == 0 { 1.0 } else { -1.0 } / 4.0;
        }
        assert!((lf.phi[mask] - oracle).abs() < 1e-12);
        assert!((lf.phi_of(&sites).unwrap() - oracle).abs() < 1e-12);
    }
}

/// `2^{−|S|} Σ_P P A P` over Pauli strings `P` on the sites `S` outside `keep`.
fn brute_force_pi(a: &Array2<C<f64>>, len: usize, keep: &[usize]) -> Array2<C<f64>> {
    let out: Vec<usize> = (0..len).filter(|k| !keep.contains(k)).collect();
    let mut acc = zero(1 << len);
    let strings = pauli_strings(out.len());
    let w = 1.0 / strings.len() as f64;
    for s in strings {
        let u = (0..len).fold(Array2::eye(1), |m, k| {
            let p = out.iter().position(|&o| o == k).map(|i| s[i]).unwrap_or(Pauli::I);
            kron(&m, &p.matrix())
        });
        acc = acc + linalg::matmul(linalg::matmul(u.view(), a.view()).view(), u.view()).mapv(|z| z * w);
    }
    acc
}

#[test]
fn unitary_profile_matches_brute_force_conditional_expectation() {
    let mut r = rng(212);
    let p = XyParams::isotropic(random_fields(&mut r, 5), 8.0);
    let (_, h) = build_xy_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let chain = p.chain();
    let lf = liom_first_kind_decompose(&es, &chain).unwrap();
    let profile = unitary_quasilocality_profile(lf.u.view(), &chain).unwrap();
    let len = 5;
    for x in 0..len {
        for radius in 0..len {
            let keep: Vec<usize> = (0..len).filter(|k: &usize| k.abs_diff(x) <= radius).collect();
            let mut oracle: f64 = 0.0;
            for a in Pauli::NONTRIVIAL {
                let s = single(a, x, len);
                let conj = linalg::matmul(
                    linalg::matmul_op(lf.u.view(), spinloc::scalar::Op::Adjoint, s.view(), spinloc::scalar::Op::None).view(),
                    lf.u.view(),
                );
                let diff = &conj - &brute_force_pi(&conj, len, &keep);
                oracle = oracle.max(spectral_norm(diff.view()).unwrap());
            }
            assert!((profile[[x, radius]] - oracle).abs() < 1e-10);
        }
    }
}

#[test]
fn first_kind_bound_holds_on_a_localized_draw() {
    let mut r = rng(213);
    let p = random_ising(&mut r, 9, 0.1);
    let (_, h) = build_ising_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let lf = liom_first_kind_decompose(&es, &p.chain()).unwrap();
    let f = empirical_envelope(&lf.two_point);
    let checks = verify_liom_bound(&lf, &es, &[0], &[8], &[0.5, 2.0, 8.0], 0.25, &f).unwrap();
    assert!(checks.iter().all(|c| !c.violated && c.lhs <= c.rhs));
}

#[test]
fn f_constants_match_triple_sums() {
    let f = FFunction::new(FBase::Exponential { rate: 1.0 }, 0.0).unwrap();
    let got = f_constants::<f64>(&f, &FiniteMetric::path(3)).unwrap();
    let fv = |a: i32, b: i32| (-((a - b).abs() as f64)).exp();
    let mut norm: f64 = 0.0;
    let mut conv: f64 = 0.0;
    for x in 0..3 {
        norm = norm.max((0..3).map(|y| fv(x, y)).sum());
        for y in 0..3 {
            conv = conv.max((0..3).map(|z| fv(x, z) * fv(z, y)).sum::<f64>() / fv(x, y));
        }
    }
    assert!((got.norm - norm).abs() < 1e-14 && (got.conv - conv).abs() < 1e-14);
}

#[test]
fn contraction_regroups_terms() {
    let mut r = rng(214);
    let p = random_xy(&mut r, 5);
    let (inter, h) = build_xy_hamiltonian(&p).unwrap();
    let cl = contract(5, &[(2, 4)]).unwrap();
    let ci = contracted_interaction(&inter, &cl).unwrap();
    let chain = p.chain();
    let mut total = zero(64);
    for (x, op) in &ci.terms {
        let members: f64 = inter
            .terms()
            .iter()
            .filter(|(z, _)| cl.map_set(z).unwrap() == *x)
            .map(|(_, o)| operator_norm(o).unwrap())
            .sum();
        assert!(operator_norm(op).unwrap() <= members + 1e-12);
        total = total + embed(op, &chain).unwrap().matrix();
    }
    assert!(frobenius_diff(total.view(), h.matrix().view()) < 1e-12);
}

#[test]
fn interaction_picture_pieces_decay_with_collar() {
    let mut r = rng(215);
    let n = 7;
    let p = XyParams::isotropic(random_fields(&mut r, n + 1), 8.0);
    let (_, h) = build_xy_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let pert = SparsePerturbation::zz(&p.chain(), vec![0, 0, 0, 1, 0, 0, 0], 0.9, 1.0).unwrap();
    let terms = interaction_picture_terms(&es, &pert, &[0.0, 0.5, 2.0]).unwrap();
    assert!(terms.max_residual() < 1e-10);
    for k in 1..3 {
        let pieces = &terms.piece_norms[k][3];
        assert!(pieces.last().unwrap() < &pieces[1], "{pieces:?}");
    }
}

#[test]
fn lr_bound_matches_hand_assembled_formula() {
    let cl = contract(10, &[(0, 3), (6, 10)]).unwrap();
    let f = FFunction::new(FBase::PowerLaw { exponent: 3.0 }, 0.4).unwrap();
    let metric = cl.metric();
    let norm = f_constants::<f64>(&f.unweighted(), &metric).unwrap().norm;
    let conv = f_constants::<f64>(&f, &metric).unwrap().conv;
    let (x, y, i_t) = ([0, 1], [9], 0.3);
    let (cx, cy) = (cl.map_set(&x).unwrap(), cl.map_set(&y).unwrap());
    let dist = cx.iter().flat_map(|a| cy.iter().map(move |b| (a - b).unsigned_abs())).min().unwrap() as f64;
    let want = 2.0 * norm / conv * cx.len().min(cy.len()) as f64 * ((2.0 * conv * i_t).exp() - 1.0) * (-0.4 * dist).exp();
    let got = lr_bound_value(&f, &cl, &x, &y, i_t).unwrap();
    assert!((got - want).abs() <= 1e-12 * want);
}

#[test]
fn integral_agrees_with_refined_quadrature() {
    let mut r = rng(216);
    let n = 7;
    let p = XyParams::isotropic(random_fields(&mut r, n + 1), 4.0);
    let (_, h) = build_xy_hamiltonian(&p).unwrap();
    let es = eigendecompose(&h).unwrap();
    let pert = SparsePerturbation::zz(&p.chain(), vec![1, 0, 1, 0, 0, 1, 0], 0.5, 0.5).unwrap();
    let cl = contract(n as Site, &[(0, n as Site)]).unwrap();
    let f = FFunction::default().with_mu(0.5);
    let coarse = interaction_picture_terms(&es, &pert, &linear_grid(1.0, 5)).unwrap();
    let fine = interaction_picture_terms(&es, &pert, &linear_grid(1.0, 41)).unwrap();
    let a = integrand_i(&coarse, &f, &cl, (0.0, 1.0)).unwrap().value;
    let b = integrand_i(&fine, &f, &cl, (0.0, 1.0)).unwrap().value;
    assert!(a <= 2.0 * b && b <= 2.0 * a, "{a} vs {b}");
}

#[test]
fn gap_cdf_matches_direct_diagonalization() {
    let cfg = ExperimentConfig::from_toml_str(
        "name = \"g\"\nseed = 31\nrealizations = 500\n[model]\nkind = \"ising\"\nn = 1\ngamma_scale = 0.5\n[gaps]\n",
    )
    .unwrap();
    let stats = run_gap_statistics(&cfg).unwrap();
    for r in (0..500).step_by(50) {
        let p = cfg.model.ising_params(1, cfg.seed, r as u64).unwrap();
        let e = f64::eigvalsh_checked(&ising_oracle(&p));
        assert!((stats.min_gaps[r] - min_gap(&e)).abs() < 1e-12);
        assert_eq!(stats.min_gaps[r], realization_gap(&cfg, 1, r as u64).unwrap());
    }
    let direct: Vec<f64> = stats
        .deltas
        .iter()
        .map(|d| stats.min_gaps.iter().filter(|g| **g < *d).count() as f64 / 500.0)
        .collect();
    assert_eq!(direct, stats.curve);
    assert_eq!(empirical_cdf(&stats.min_gaps, &stats.deltas), stats.curve);
}

trait Eigvalsh {
    fn eigvalsh_checked(m: &Array2<C<f64>>) -> Vec<f64>;
}

impl Eigvalsh for f64 {
    fn eigvalsh_checked(m: &Array2<C<f64>>) -> Vec<f64> {
        <f64 as spinloc::Real>::eigvalsh(m.view()).unwrap()
    }
}

#[test]
fn gamma_max_matches_grid_scan() {
    let (eta, alpha, beta, p) = (2.0, 0.1, 0.0, 0.5);
    let gm = gamma_max(alpha, beta, eta, p).expect("p < 1");
    for k in 1..=400 {
        let g = gm * k as f64 / 200.0;
        if (g - gm).abs() > 1e-9 {
            assert_eq!(constraint_holds(alpha, beta, g, eta, p), g < gm, "gamma = {g}");
        }
    }
}
