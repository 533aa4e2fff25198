// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::linalg::{self, czero};
use crate::operator::{LocalOperator, Site};
use crate::scalar::{Op, Real, C};

/// Default cap on the Hilbert-space dimension accepted by
/// [`eigendecompose`].
pub const DEFAULT_DIM_CAP: usize = 1 << 13;

/// Components smaller than this are pooled so the block count stays small.
const MIN_GROUP: usize = 16;

/// Diagonalization options.
#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    pub dim_cap: usize,
    /// Split `H` into the connected components of its nonzero pattern in
    /// the computational basis before diagonalizing.
    pub detect_blocks: bool,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { dim_cap: DEFAULT_DIM_CAP, detect_blocks: true }
    }
}

/// An invariant subspace spanned by computational basis states, with the
/// eigenvectors of `H` restricted to it.
#[derive(Clone, Debug)]
pub struct SpectralBlock<T: Real> {
    pub states: Vec<usize>,
    pub energies: Vec<T>,
    /// Columns are eigenvectors, rows indexed like `states`.
    pub vectors: Array2<C<T>>,
    /// Position of each local eigenvector in the ascending global order.
    pub global: Vec<usize>,
}

/// Spectral decomposition `H = U diag(E) U†`.
#[derive(Clone, Debug)]
pub struct EigenSystem<T: Real> {
    sites: Vec<Site>,
    dims: Vec<usize>,
    energies: Vec<T>,
    blocks: Vec<SpectralBlock<T>>,
    h_norm: T,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn components<T: Real>(h: ArrayView2<'_, C<T>>) -> Vec<Vec<usize>> {
    let d = h.nrows();
    let mut parent: Vec<usize> = (0..d).collect();
    for i in 0..d {
        for j in (i + 1)..d {
            let z = h[[i, j]];
            if z.re != T::zero() || z.im != T::zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..d {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().push(i);
    }
    by_root.into_values().collect()
}

/// Diagonalizes a Hermitian operator with default options.
pub fn eigendecompose<T: Real>(h: &LocalOperator<T>) -> Result<EigenSystem<T>> {
    eigendecompose_with(h, EigenOptions::default())
}

pub fn eigendecompose_with<T: Real>(h: &LocalOperator<T>, opts: EigenOptions) -> Result<EigenSystem<T>> {
    let d = h.dim();
    if d > opts.dim_cap {
        return Err(Error::Resource(format!("dimension {d} exceeds the cap {}", opts.dim_cap)));
    }
    let m = h.matrix().view();
    let defect = linalg::antihermitian_part_norm(m);
    if defect > T::lit(T::STRUCTURE_TOL) * linalg::frobenius(m) {
        return domain(format!("Hamiltonian is not Hermitian (defect {defect:e})"));
    }
    let comps = if opts.detect_blocks { components(m) } else { vec![(0..d).collect()] };

    // Diagonalize each component, then pool the small ones.
    let mut parts: Vec<(Vec<usize>, Vec<T>, Array2<C<T>>)> = Vec::with_capacity(comps.len());
    for states in comps {
        let sub = Array2::from_shape_fn((states.len(), states.len()), |(a, b)| m[[states[a], states[b]]]);
        let (e, v) = T::eigh(sub.view())?;
        parts.push((states, e, v));
    }
    let groups = pool(parts);

    let mut order: Vec<(T, usize, usize)> = Vec::with_capacity(d);
    for (b, (_, e, _)) in groups.iter().enumerate() {
        for (l, &x) in e.iter().enumerate() {
            order.push((x, b, l));
        }
    }
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut blocks: Vec<SpectralBlock<T>> = groups
        .into_iter()
        .map(|(states, energies, vectors)| {
            let n = states.len();
            SpectralBlock { states, energies, vectors, global: vec![0; n] }
        })
        .collect();
    let mut energies = Vec::with_capacity(d);
    for (g, &(x, b, l)) in order.iter().enumerate() {
        blocks[b].global[l] = g;
        energies.push(x);
    }
    let h_norm = energies.iter().fold(T::zero(), |acc, e| acc.max(e.abs()));
    Ok(EigenSystem { sites: h.support().to_vec(), dims: h.dims().to_vec(), energies, blocks, h_norm })
}

type Part<T> = (Vec<usize>, Vec<T>, Array2<C<T>>);

fn pool<T: Real>(parts: Vec<Part<T>>) -> Vec<Part<T>> {
    let mut out: Vec<Part<T>> = Vec::new();
    let mut pending: Vec<Part<T>> = Vec::new();
    let mut pending_size = 0;
    let flush = |pending: &mut Vec<Part<T>>, out: &mut Vec<Part<T>>| {
        if pending.is_empty() {
            return;
        }
        let n: usize = pending.iter().map(|p| p.0.len()).sum();
        let mut states = Vec::with_capacity(n);
        let mut energies = Vec::with_capacity(n);
        let mut vectors = Array2::from_elem((n, n), czero());
        let mut off = 0;
        for (s, e, v) in pending.drain(..) {
            let k = s.len();
            vectors.slice_mut(ndarray::s![off..off + k, off..off + k]).assign(&v);
            states.extend(s);
            energies.extend(e);
            off += k;
        }
        out.push((states, energies, vectors));
    };
    for p in parts {
        if p.0.len() >= MIN_GROUP {
            out.push(p);
            continue;
        }
        pending_size += p.0.len();
        pending.push(p);
        if pending_size >= MIN_GROUP {
            flush(&mut pending, &mut out);
            pending_size = 0;
        }
    }
    flush(&mut pending, &mut out);
    out
}

impl<T: Real> EigenSystem<T> {
    /// Ascending eigenvalues.
    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn blocks(&self) -> &[SpectralBlock<T>] {
        &self.blocks
    }

    pub fn source_dim(&self) -> usize {
        self.energies.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `max |E|`, the operator norm of `H`.
    pub fn h_norm(&self) -> T {
        self.h_norm
    }

    /// Dense unitary whose column `g` is the eigenvector of `energies()[g]`.
    pub fn basis(&self) -> Array2<C<T>> {
        let d = self.source_dim();
        let mut u = Array2::from_elem((d, d), czero());
        for b in &self.blocks {
            for (l, &g) in b.global.iter().enumerate() {
                for (r, &s) in b.states.iter().enumerate() {
                    u[[s, g]] = b.vectors[[r, l]];
                }
            }
        }
        u
    }

    /// Expresses `a` (on the full support, or on a subset that is then
    /// embedded) as a dense matrix on the full support.
    pub fn full_matrix(&self, a: &LocalOperator<T>) -> Result<Array2<C<T>>> {
        if a.support() == self.sites.as_slice() {
            if a.dims() != self.dims.as_slice() {
                return domain("operator dimensions disagree with the Hamiltonian");
            }
            return Ok(a.matrix().clone());
        }
        Ok(a.embed_into(&self.sites, &self.dims)?.into_matrix())
    }

    pub(crate) fn check_dim(&self, m: ArrayView2<'_, C<T>>) -> Result<()> {
        if m.dim() != (self.source_dim(), self.source_dim()) {
            return domain(format!("matrix shape {:?} does not match dimension {}", m.dim(), self.source_dim()));
        }
        Ok(())
    }

    /// `U† A U`, indexed in the ascending global eigen order.
    pub fn to_eigenbasis(&self, a: ArrayView2<'_, C<T>>) -> Result<Array2<C<T>>> {
        self.check_dim(a)?;
        let d = self.source_dim();
        let mut out = Array2::from_elem((d, d), czero());
        for (bi, bj, t) in self.couplings(a) {
            let (gi, gj) = (&self.blocks[bi].global, &self.blocks[bj].global);
            for (p, &i) in gi.iter().enumerate() {
                for (q, &j) in gj.iter().enumerate() {
                    out[[i, j]] = t[[p, q]];
                }
            }
        }
        Ok(out)
    }

    /// `U Ã U†` for `Ã` in the global eigen order.
    pub fn from_eigenbasis(&self, a: ArrayView2<'_, C<T>>) -> Result<Array2<C<T>>> {
        self.check_dim(a)?;
        let d = self.source_dim();
        let mut out = Array2::from_elem((d, d), czero());
        for bi in &self.blocks {
            for bj in &self.blocks {
                let sub = Array2::from_shape_fn((bi.global.len(), bj.global.len()), |(p, q)| a[[bi.global[p], bj.global[q]]]);
                if sub.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
                    continue;
                }
                let x = linalg::matmul(bi.vectors.view(), sub.view());
                let y = linalg::matmul_op(x.view(), Op::None, bj.vectors.view(), Op::Adjoint);
                scatter(&mut out, &bi.states, &bj.states, &y);
            }
        }
        Ok(out)
    }

    /// Nonzero block pairs of `a` transformed to the local eigenbases.
    fn couplings(&self, a: ArrayView2<'_, C<T>>) -> Vec<(usize, usize, Array2<C<T>>)> {
        let mut out = Vec::new();
        for (i, bi) in self.blocks.iter().enumerate() {
            for (j, bj) in self.blocks.iter().enumerate() {
                let sub = Array2::from_shape_fn((bi.states.len(), bj.states.len()), |(p, q)| a[[bi.states[p], bj.states[q]]]);
                if sub.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
                    continue;
                }
                let x = linalg::matmul_op(bi.vectors.view(), Op::Adjoint, sub.view(), Op::None);
                out.push((i, j, linalg::matmul(x.view(), bj.vectors.view())));
            }
        }
        out
    }
}

fn scatter<T: Real>(out: &mut Array2<C<T>>, rows: &[usize], cols: &[usize], m: &Array2<C<T>>) {
    for (p, &i) in rows.iter().enumerate() {
        let src = m.row(p);
        let mut dst = out.row_mut(i);
        for (q, &j) in cols.iter().enumerate() {
            dst[j] = src[q];
        }
    }
}

/// Precomputed Heisenberg evolution of one operator:
/// `τ_t(A) = e^{itH} A e^{-itH}`.
#[derive(Clone, Debug)]
pub struct EvolutionPlan<'a, T: Real> {
    es: &'a EigenSystem<T>,
    pairs: Vec<(usize, usize, Array2<C<T>>)>,
}

impl<'a, T: Real> EvolutionPlan<'a, T> {
    pub fn new(es: &'a EigenSystem<T>, a: ArrayView2<'_, C<T>>) -> Result<Self> {
        es.check_dim(a)?;
        Ok(Self { es, pairs: es.couplings(a) })
    }

    pub fn for_operator(es: &'a EigenSystem<T>, a: &LocalOperator<T>) -> Result<Self> {
        let m = es.full_matrix(a)?;
        Self::new(es, m.view())
    }

    pub fn eigensystem(&self) -> &'a EigenSystem<T> {
        self.es
    }

    /// `τ_t(A)` on the full support.
    pub fn at(&self, t: T) -> Array2<C<T>> {
        let d = self.es.source_dim();
        let mut out = Array2::from_elem((d, d), czero());
        for (bi, bj, c) in &self.pairs {
            let (ei, ej) = (&self.es.blocks[*bi], &self.es.blocks[*bj]);
            let pi: Vec<C<T>> = ei.energies.iter().map(|&e| Complex::from_polar(T::one(), e * t)).collect();
            let pj: Vec<C<T>> = ej.energies.iter().map(|&e| Complex::from_polar(T::one(), -(e * t))).collect();
            let mut tmp = c.clone();
            for ((p, q), z) in tmp.indexed_iter_mut() {
                *z = *z * pi[p] * pj[q];
            }
            let x = linalg::matmul(ei.vectors.view(), tmp.view());
            let y = linalg::matmul_op(x.view(), Op::None, ej.vectors.view(), Op::Adjoint);
            scatter(&mut out, &ei.states, &ej.states, &y);
        }
        out
    }
}

/// `τ_t(A)` as an operator on the full support.
pub fn heisenberg_evolve<T: Real>(es: &EigenSystem<T>, a: &LocalOperator<T>, t: T) -> Result<LocalOperator<T>> {
    let plan = EvolutionPlan::for_operator(es, a)?;
    let out = LocalOperator::new(es.sites.clone(), es.dims.clone(), plan.at(t))?;
    match a.hermitian_hint() {
        Some(true) => Ok(out.assume_hermitian()),
        _ => Ok(out),
    }
}
