// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded generators and the exactness checks shared by the integration
//! test targets. Every check returns the largest residual it saw.

#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use spinloc::dynamics::{eigendecompose, heisenberg_evolve};
use spinloc::freefermion::{build_m, Propagator};
use spinloc::linalg::{self, frobenius_diff};
use spinloc::lioms::character_transform;
use spinloc::lrbounds::interaction_picture_terms;
use spinloc::models::{build_xy_hamiltonian, SparsePerturbation, XyParams};
use spinloc::operator::{conditional_expectation, embed, operator_norm, Chain, LocalOperator, Site};
use spinloc::C;

pub const INSTANCES: usize = 100;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, d: usize) -> Array2<C<f64>> {
    Array2::from_shape_fn((d, d), |_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> Array2<C<f64>> {
    let m = random_matrix(rng, d);
    (&m + &linalg::adjoint(m.view())).mapv(|z| z * 0.5)
}

/// Random chain of 2 to 4 sites with local dimensions 2 or 3.
pub fn random_chain(rng: &mut impl Rng) -> Chain {
    let len = rng.random_range(2..=4);
    let dims: Vec<usize> = (0..len).map(|_| if rng.random_bool(0.7) { 2 } else { 3 }).collect();
    Chain::new(rng.random_range(-2..=2), dims).unwrap()
}

/// Random nonempty subset of the chain's sites.
pub fn random_support(rng: &mut impl Rng, chain: &Chain) -> Vec<Site> {
    loop {
        let s: Vec<Site> = chain.sites().into_iter().filter(|_| rng.random_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn random_operator(rng: &mut impl Rng, chain: &Chain, support: &[Site]) -> LocalOperator<f64> {
    let dims = chain.dims_of(support).unwrap();
    let d = dims.iter().product();
    LocalOperator::new(support.to_vec(), dims, random_matrix(rng, d)).unwrap()
}

pub fn random_fields(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Random anisotropic XY parameters on `[0, n]`.
pub fn random_xy(rng: &mut impl Rng, n: usize) -> XyParams<f64> {
    XyParams {
        n,
        mu: (0..n).map(|_| rng.random_range(0.2..1.5)).collect(),
        gamma: (0..n).map(|_| rng.random_range(-0.8..0.8)).collect(),
        omega: random_fields(rng, n + 1),
        lambda: rng.random_range(0.0..4.0),
    }
}

/// `embed(AB) = embed(A) embed(B)`, `embed(A + B) = embed(A) + embed(B)`
/// and `embed(A†) = embed(A)†`.
pub fn embedding_homomorphism(instances: usize) -> f64 {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let chain = random_chain(&mut r);
        let (sa, sb) = (random_support(&mut r, &chain), random_support(&mut r, &chain));
        let a = random_operator(&mut r, &chain, &sa);
        let b = random_operator(&mut r, &chain, &sb);
        let (ea, eb) = (embed(&a, &chain).unwrap(), embed(&b, &chain).unwrap());
        let prod = embed(&a.mul(&b).unwrap(), &chain).unwrap();
        let direct = linalg::matmul(ea.matrix().view(), eb.matrix().view());
        worst = worst.max(frobenius_diff(prod.matrix().view(), direct.view()));
        let sum = embed(&a.add(&b).unwrap(), &chain).unwrap();
        worst = worst.max(frobenius_diff(sum.matrix().view(), (ea.matrix() + eb.matrix()).view()));
        let adj = embed(&a.adjoint(), &chain).unwrap();
        worst = worst.max(frobenius_diff(adj.matrix().view(), linalg::adjoint(ea.matrix().view()).view()));
    }
    worst
}

/// `Π(Π(A)) = Π(A)`, `‖Π(A)‖ ≤ ‖A‖`, and `Π(B A C) = B Π(A) C` for `B, C`
/// supported on the kept sites. Contractivity enters as
/// `max(0, ‖Π(A)‖ − ‖A‖)`.
pub fn conditional_expectation_laws(instances: usize) -> f64 {
    let mut r = rng(102);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let chain = random_chain(&mut r);
        let all = chain.sites();
        let a = random_operator(&mut r, &chain, &all);
        let keep = random_support(&mut r, &chain);
        let p = conditional_expectation(&a, &keep, &chain).unwrap();
        let pp = conditional_expectation(&p, &keep, &chain).unwrap();
        worst = worst.max(frobenius_diff(p.matrix().view(), pp.matrix().view()));
        worst = worst.max(operator_norm(&p).unwrap() - operator_norm(&a).unwrap());
        let b = random_operator(&mut r, &chain, &keep);
        let c = random_operator(&mut r, &chain, &keep);
        let lhs = conditional_expectation(&b.mul(&a).unwrap().mul(&c).unwrap(), &keep, &chain).unwrap();
        let rhs = b.mul(&p).unwrap().mul(&c).unwrap();
        worst = worst.max(frobenius_diff(lhs.matrix().view(), rhs.matrix().view()));
    }
    worst
}

/// `‖τ_t(A)‖ = ‖A‖` and `τ_s ∘ τ_t = τ_{s+t}` for random Hermitian `H`.
pub fn heisenberg_norm_preservation(instances: usize) -> f64 {
    let mut r = rng(103);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let chain = random_chain(&mut r);
        let all = chain.sites();
        let d = chain.total_dim().unwrap();
        let h = LocalOperator::new(all.clone(), chain.dims().to_vec(), random_hermitian(&mut r, d)).unwrap();
        let es = eigendecompose(&h).unwrap();
        let sa = random_support(&mut r, &chain);
        let a = embed(&random_operator(&mut r, &chain, &sa), &chain).unwrap();
        let (s, t) = (r.random_range(-5.0..5.0), r.random_range(-5.0..5.0));
        let at = heisenberg_evolve(&es, &a, t).unwrap();
        worst = worst.max((operator_norm(&at).unwrap() - operator_norm(&a).unwrap()).abs());
        let ast = heisenberg_evolve(&es, &at, s).unwrap();
        let direct = heisenberg_evolve(&es, &a, s + t).unwrap();
        worst = worst.max(frobenius_diff(ast.matrix().view(), direct.matrix().view()));
    }
    worst
}

/// `e^{−itM}` is unitary and `V(s + t) = V(s) V(t)`.
pub fn propagator_laws(instances: usize) -> f64 {
    let mut r = rng(104);
    let mut worst: f64 = 0.0;
    for k in 0..instances {
        let n = r.random_range(1..=12);
        let mut p = random_xy(&mut r, n);
        if k % 4 == 0 {
            p.gamma.iter_mut().for_each(|g| *g = 0.0);
        }
        let prop = Propagator::new(&build_m(&p).unwrap()).unwrap();
        let (s, t) = (r.random_range(-10.0..10.0), r.random_range(-10.0..10.0));
        let (vs, vt, vst) = (prop.at(s), prop.at(t), prop.at(s + t));
        worst = worst.max(linalg::unitarity_defect(vs.view()));
        worst = worst.max(frobenius_diff(vst.view(), linalg::matmul(vs.view(), vt.view()).view()));
    }
    worst
}

/// `χ_X(b) = Π_{i ∈ X} (−1)^{b_i}` with site `i` at bit `N − 1 − i` of the
/// basis index.
pub fn character(mask: usize, b: usize, n: usize) -> f64 {
    let ones = (0..n).filter(|i| mask >> i & 1 == 1 && b >> (n - 1 - i) & 1 == 1).count();
    if ones % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `D_b = Σ_X φ(X) χ_X(b)` rebuilt term by term from the fast transform.
pub fn walsh_roundtrip(instances: usize) -> f64 {
    let mut r = rng(105);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = r.random_range(1..=6);
        let diag: Vec<f64> = (0..1usize << n).map(|_| r.random_range(-3.0..3.0)).collect();
        let phi = character_transform(&diag).unwrap();
        for (b, &db) in diag.iter().enumerate() {
            let back: f64 = phi.iter().enumerate().map(|(m, &p)| p * character(m, b, n)).sum();
            worst = worst.max((back - db).abs());
        }
    }
    worst
}

/// `Σ_m ψ^{(m)}_x(t) = τ_t^{H⁰}(ψ_x)` for every active bond and time.
pub fn telescoping_identity(instances: usize) -> f64 {
    let mut r = rng(106);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let n = r.random_range(2..=5);
        let p = XyParams::isotropic(random_fields(&mut r, n + 1), r.random_range(0.0..6.0));
        let (_, h) = build_xy_hamiltonian(&p).unwrap();
        let es = eigendecompose(&h).unwrap();
        let delta: Vec<u8> = (0..n).map(|_| r.random_range(0..=1)).collect();
        let pert = SparsePerturbation::zz(&p.chain(), delta, 0.5, r.random_range(0.1..2.0)).unwrap();
        let times = [0.0, r.random_range(0.0..3.0), r.random_range(3.0..20.0)];
        worst = worst.max(interaction_picture_terms(&es, &pert, &times).unwrap().max_residual());
    }
    worst
}

/// Name, residual bound and check of each exactness item.
pub type ExactnessCheck = (&'static str, f64, fn(usize) -> f64);

pub const EXACTNESS: [ExactnessCheck; 6] = [
    ("embedding homomorphism", 1e-12, embedding_homomorphism),
    ("conditional expectation", 1e-12, conditional_expectation_laws),
    ("heisenberg norm preservation", 1e-10, heisenberg_norm_preservation),
    ("propagator unitarity and group law", 1e-10, propagator_laws),
    ("walsh character roundtrip", 1e-12, walsh_roundtrip),
    ("telescoping identity", 1e-10, telescoping_identity),
];
