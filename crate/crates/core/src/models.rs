// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Disordered XY and Ising chains, sparse Bernoulli perturbations, and
//! reproducible disorder sampling.
//!
//! # Seeding
//!
//! Every sequence is drawn from ChaCha20 keyed by the master seed
//! (`seed_from_u64`) on stream `stream_id`. Experiments derive
//! `stream_id = (realization << 8) | family` via [`stream_id`], so each
//! realization and each parameter family is an independent stream. The
//! base-disorder families and the Bernoulli mask family are disjoint, which
//! realizes the product of the two disorder spaces.

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::linalg::{creal, czero};
use crate::operator::{self, kron, Chain, LocalOperator, Pauli, Site};
use crate::scalar::{Real, C};

/// Parameter families with their own random streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum StreamFamily {
    Couplings = 0,
    Anisotropy = 1,
    Fields = 2,
    IsingCouplings = 3,
    TransverseFields = 4,
    LongitudinalFields = 5,
    /// The Bernoulli mask of the sparse perturbation.
    Mask = 16,
}

/// Stream number of `family` in realization `realization`.
pub fn stream_id(realization: u64, family: StreamFamily) -> u64 {
    (realization << 8) | family as u64
}

/// Law of an i.i.d. sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    Constant { c: f64 },
    Uniform { a: f64, b: f64 },
    /// Takes the value 0 with probability `p_zero`, else 1.
    Bernoulli { p_zero: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Constant { c } if !c.is_finite() => config("constant must be finite"),
            Distribution::Uniform { a, b } if !(a < b && a.is_finite() && b.is_finite()) => {
                config(format!("uniform({a}, {b}) needs a < b"))
            }
            Distribution::Bernoulli { p_zero } if !(0.0..=1.0).contains(&p_zero) => {
                config(format!("bernoulli p_zero={p_zero} outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub distribution: Distribution,
    pub seed: u64,
    pub stream_id: u64,
}

/// A drawn sequence together with the spec that replays it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub spec: DisorderSpec,
    pub values: Vec<f64>,
}

/// Draws `length` i.i.d. values.
///
/// Uniform values are `a + (b - a) u` with `u` the next 53-bit double of the
/// stream; Bernoulli values are `0` when `u < p_zero`.
pub fn sample_sequence(spec: &DisorderSpec, length: usize) -> Result<Realization> {
    if length == 0 {
        return config("sequence length must be at least 1");
    }
    spec.distribution.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    rng.set_stream(spec.stream_id);
    let values = (0..length)
        .map(|_| match spec.distribution {
            Distribution::Constant { c } => c,
            Distribution::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            Distribution::Bernoulli { p_zero } => {
                if rng.random::<f64>() < p_zero {
                    0.0
                } else {
                    1.0
                }
            }
        })
        .collect();
    Ok(Realization { spec: *spec, values })
}

/// Finite-range interaction: a map from site sets to local terms.
#[derive(Clone, Debug)]
pub struct Interaction<T: Real> {
    chain: Chain,
    terms: BTreeMap<Vec<Site>, LocalOperator<T>>,
}

impl<T: Real> Interaction<T> {
    pub fn new(chain: Chain) -> Self {
        Self { chain, terms: BTreeMap::new() }
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Site>, LocalOperator<T>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, support: &[Site]) -> Option<&LocalOperator<T>> {
        self.terms.get(support)
    }

    /// Adds `op` to the term on its support.
    pub fn add_term(&mut self, op: LocalOperator<T>) -> Result<()> {
        if op.support().iter().any(|&x| !self.chain.contains(x)) {
            return config(format!("term support {:?} leaves the chain", op.support()));
        }
        if self.chain.dims_of(op.support())? != op.dims() {
            return config("term dimensions disagree with the chain");
        }
        let key = op.support().to_vec();
        let merged = match self.terms.remove(&key) {
            Some(old) => old.add(&op)?,
            None => op,
        };
        self.terms.insert(key, merged);
        Ok(())
    }

    /// `H = Σ_X Φ(X)` as a dense operator on the whole chain.
    pub fn hamiltonian(&self) -> Result<LocalOperator<T>> {
        let sites = self.chain.sites();
        let d = self.chain.total_dim()?;
        let mut h = Array2::from_elem((d, d), czero());
        for op in self.terms.values() {
            operator::accumulate_embedded(&mut h, &sites, self.chain.dims(), op, creal(T::one()))?;
        }
        LocalOperator::new(sites, self.chain.dims().to_vec(), h)?.with_hermitian_hint(true)
    }

    /// Groups terms by their leftmost site: `h_x = Σ_{min X = x} Φ(X)`.
    /// Sites without terms get a zero operator, so `Σ_x h_x = H`.
    pub fn site_terms(&self) -> Result<Vec<LocalOperator<T>>> {
        let mut out = Vec::with_capacity(self.chain.len());
        for x in self.chain.sites() {
            let mut acc = LocalOperator::zeros(vec![x], self.chain.dims_of(&[x])?)?;
            for (k, op) in &self.terms {
                if k.first() == Some(&x) {
                    acc = acc.add(op)?;
                }
            }
            out.push(acc);
        }
        Ok(out)
    }
}

fn real_op<T: Real>(support: Vec<Site>, m: Array2<C<T>>, scale: T) -> LocalOperator<T> {
    LocalOperator::qubit(support, m.mapv(|z| z * scale)).expect("qubit term").with_hermitian_hint(true).expect("Hermitian")
}

fn two_site<T: Real>(a: Pauli, b: Pauli) -> Array2<C<T>> {
    kron(a.matrix::<T>().view(), b.matrix::<T>().view())
}

/// Anisotropic XY chain on `[0, n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct XyParams<T: Real> {
    pub n: usize,
    /// `μ_0, ..., μ_{n-1}`.
    pub mu: Vec<T>,
    /// `γ_0, ..., γ_{n-1}`.
    pub gamma: Vec<T>,
    /// `ω_0, ..., ω_n`.
    pub omega: Vec<T>,
    pub lambda: T,
}

impl<T: Real> XyParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.mu.len() != self.n || self.gamma.len() != self.n || self.omega.len() != self.n + 1 {
            return config(format!(
                "XY lengths (mu {}, gamma {}, omega {}) do not fit n = {}",
                self.mu.len(),
                self.gamma.len(),
                self.omega.len(),
                self.n
            ));
        }
        Ok(())
    }

    /// Isotropic chain with unit couplings.
    pub fn isotropic(omega: Vec<T>, lambda: T) -> Self {
        let n = omega.len().saturating_sub(1);
        Self { n, mu: vec![T::one(); n], gamma: vec![T::zero(); n], omega, lambda }
    }

    pub fn chain(&self) -> Chain {
        Chain::qubits(0, self.n as Site).expect("n >= 0")
    }
}

/// `H = Σ_j μ_j[(1+γ_j) X_j X_{j+1} + (1−γ_j) Y_j Y_{j+1}] + λ Σ_j ω_j Z_j`.
pub fn build_xy_hamiltonian<T: Real>(p: &XyParams<T>) -> Result<(Interaction<T>, LocalOperator<T>)> {
    p.validate()?;
    let mut inter = Interaction::new(p.chain());
    for j in 0..p.n {
        let (mu, g) = (p.mu[j], p.gamma[j]);
        if mu == T::zero() {
            continue;
        }
        let m = two_site::<T>(Pauli::X, Pauli::X).mapv(|z| z * (mu * (T::one() + g)))
            + two_site::<T>(Pauli::Y, Pauli::Y).mapv(|z| z * (mu * (T::one() - g)));
        let x = j as Site;
        inter.add_term(real_op(vec![x, x + 1], m, T::one()))?;
    }
    for j in 0..=p.n {
        let f = p.lambda * p.omega[j];
        if f != T::zero() {
            inter.add_term(real_op(vec![j as Site], Pauli::Z.matrix(), f))?;
        }
    }
    let h = inter.hamiltonian()?;
    Ok((inter, h))
}

/// Quantum Ising chain on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingParams<T: Real> {
    pub a: Site,
    pub b: Site,
    /// `J_a, ..., J_{b-1}`.
    pub j: Vec<T>,
    /// `Γ_a, ..., Γ_b`.
    pub transverse: Vec<T>,
    pub gamma_scale: T,
    /// `h_a, ..., h_b`.
    pub h: Vec<T>,
}

impl<T: Real> IsingParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.b < self.a {
            return config("Ising interval is empty");
        }
        let len = (self.b - self.a + 1) as usize;
        if self.j.len() != len - 1 || self.transverse.len() != len || self.h.len() != len {
            return config(format!(
                "Ising lengths (J {}, Gamma {}, h {}) do not fit [{}, {}]",
                self.j.len(),
                self.transverse.len(),
                self.h.len(),
                self.a,
                self.b
            ));
        }
        Ok(())
    }

    pub fn chain(&self) -> Chain {
        Chain::qubits(self.a, self.b).expect("validated interval")
    }
}

/// `H = Σ_x J_x Z_x Z_{x+1} + Σ_x (γ Γ_x X_x + h_x Z_x)`.
pub fn build_ising_hamiltonian<T: Real>(p: &IsingParams<T>) -> Result<(Interaction<T>, LocalOperator<T>)> {
    p.validate()?;
    let mut inter = Interaction::new(p.chain());
    for (k, &jx) in p.j.iter().enumerate() {
        if jx != T::zero() {
            let x = p.a + k as Site;
            inter.add_term(real_op(vec![x, x + 1], two_site(Pauli::Z, Pauli::Z), jx))?;
        }
    }
    for k in 0..p.h.len() {
        let x = p.a + k as Site;
        let g = p.gamma_scale * p.transverse[k];
        if g != T::zero() {
            inter.add_term(real_op(vec![x], Pauli::X.matrix(), g))?;
        }
        if p.h[k] != T::zero() {
            inter.add_term(real_op(vec![x], Pauli::Z.matrix(), p.h[k]))?;
        }
    }
    let h = inter.hamiltonian()?;
    Ok((inter, h))
}

/// `Σ_x δ_x ψ_x` with `ψ_x` supported on `{x, x+1}`.
#[derive(Clone, Debug)]
pub struct SparsePerturbation<T: Real> {
    /// `δ_x` for the bonds `x = start, ..., end - 1` of the chain.
    pub delta: Vec<u8>,
    pub p_zero: f64,
    /// `ψ_x`, one per bond.
    pub psi: Vec<LocalOperator<T>>,
    /// `sup_x ‖ψ_x‖`.
    pub psi_bound: T,
}

impl<T: Real> SparsePerturbation<T> {
    /// `ψ_x = Δ Z_x Z_{x+1}` on every bond of `chain`.
    pub fn zz(chain: &Chain, delta: Vec<u8>, p_zero: f64, strength: T) -> Result<Self> {
        let blocks = vec![two_site::<T>(Pauli::Z, Pauli::Z).mapv(|z| z * strength); chain.len() - 1];
        Self::custom(chain, delta, p_zero, blocks)
    }

    /// User-supplied Hermitian 4×4 blocks, one per bond.
    pub fn custom(chain: &Chain, delta: Vec<u8>, p_zero: f64, blocks: Vec<Array2<C<T>>>) -> Result<Self> {
        let bonds = chain.len() - 1;
        if delta.len() != bonds || blocks.len() != bonds {
            return config(format!("need {bonds} mask entries and blocks, got {} and {}", delta.len(), blocks.len()));
        }
        if delta.iter().any(|&d| d > 1) {
            return config("mask entries must be 0 or 1");
        }
        let mut psi = Vec::with_capacity(bonds);
        let mut bound = T::zero();
        for (k, m) in blocks.into_iter().enumerate() {
            let x = chain.start() + k as Site;
            let op = LocalOperator::new(vec![x, x + 1], chain.dims_of(&[x, x + 1])?, m)?
                .with_hermitian_hint(true)
                .map_err(|e| Error::Config(format!("perturbation block {k}: {e}")))?;
            bound = bound.max(operator::operator_norm(&op)?);
            psi.push(op);
        }
        Ok(Self { delta, p_zero, psi, psi_bound: bound })
    }
}

/// Adds `δ_x ψ_x` to `base` for every bond with `δ_x = 1`.
pub fn apply_sparse_perturbation<T: Real>(base: &Interaction<T>, pert: &SparsePerturbation<T>) -> Result<Interaction<T>> {
    let mut out = base.clone();
    for (d, psi) in pert.delta.iter().zip(&pert.psi) {
        if psi.support().iter().any(|&x| !base.chain().contains(x)) {
            return config(format!("perturbation support {:?} leaves the chain", psi.support()));
        }
        if *d == 1 {
            out.add_term(psi.clone())?;
        }
    }
    Ok(out)
}

/// Length of the longest block of consecutive zeros.
pub fn longest_zero_run(delta: &[u8]) -> Result<usize> {
    if delta.is_empty() {
        return domain("empty sequence");
    }
    let (mut best, mut cur) = (0, 0);
    for &d in delta {
        cur = if d == 0 { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    Ok(best)
}
