// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense operators with explicit support on a finite chain.
//!
//! Tensor factors are ordered by increasing site label: the smallest site
//! is the leftmost factor, i.e. the most significant digit of a basis
//! index. For qubits, the basis state `b` on sites `s_0 < s_1 < ... < s_k`
//! has bit `b_{s_i}` at position `k - i` (counting from the least
//! significant bit), and `b_x = 0` is the `+1` eigenvector of `σ^z_x`.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::linalg::{self, cone, czero};
use crate::scalar::{Op, Real, C};

/// Integer site label.
pub type Site = i64;

/// A contiguous interval of sites `[start, start + dims.len() - 1]` with a
/// local dimension per site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    start: Site,
    dims: Vec<usize>,
}

impl Chain {
    pub fn new(start: Site, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return domain("a chain needs at least one site");
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return domain(format!("local dimension {d} < 2"));
        }
        Ok(Self { start, dims })
    }

    /// Spin-1/2 chain on `[a, b]`.
    pub fn qubits(a: Site, b: Site) -> Result<Self> {
        if b < a {
            return domain(format!("empty interval [{a}, {b}]"));
        }
        Self::new(a, vec![2; (b - a + 1) as usize])
    }

    pub fn start(&self) -> Site {
        self.start
    }

    pub fn end(&self) -> Site {
        self.start + self.dims.len() as Site - 1
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn sites(&self) -> Vec<Site> {
        (self.start..=self.end()).collect()
    }

    pub fn contains(&self, x: Site) -> bool {
        x >= self.start && x <= self.end()
    }

    pub fn dim_of(&self, x: Site) -> Option<usize> {
        self.contains(x).then(|| self.dims[(x - self.start) as usize])
    }

    /// Product of the local dimensions.
    pub fn total_dim(&self) -> Result<usize> {
        self.dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::Resource("chain dimension overflows usize".into()))
    }

    /// Local dimensions of `sites`, which must lie in the chain.
    pub fn dims_of(&self, sites: &[Site]) -> Result<Vec<usize>> {
        sites
            .iter()
            .map(|&x| self.dim_of(x).ok_or_else(|| Error::Domain(format!("site {x} not in chain"))))
            .collect()
    }

    pub fn is_qubit_chain(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }
}

/// A dense operator acting on the tensor product of its support sites.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator<T: Real> {
    support: Vec<Site>,
    dims: Vec<usize>,
    matrix: Array2<C<T>>,
    hermitian_hint: Option<bool>,
}

impl<T: Real> LocalOperator<T> {
    pub fn new(support: Vec<Site>, dims: Vec<usize>, matrix: Array2<C<T>>) -> Result<Self> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return domain("support must be strictly increasing");
        }
        if support.len() != dims.len() {
            return domain("one local dimension per support site");
        }
        if dims.iter().any(|&d| d < 2) {
            return domain("local dimensions must be at least 2");
        }
        let dim: usize = dims.iter().product();
        if matrix.dim() != (dim, dim) {
            return domain(format!("matrix shape {:?} does not match dimension {dim}", matrix.dim()));
        }
        Ok(Self { support, dims, matrix, hermitian_hint: None })
    }

    /// Operator on qubit sites.
    pub fn qubit(support: Vec<Site>, matrix: Array2<C<T>>) -> Result<Self> {
        let dims = vec![2; support.len()];
        Self::new(support, dims, matrix)
    }

    pub fn identity(support: Vec<Site>, dims: Vec<usize>) -> Result<Self> {
        let d = dims.iter().product();
        Self::new(support, dims, linalg::identity(d)).map(|o| o.assume_hermitian())
    }

    pub fn zeros(support: Vec<Site>, dims: Vec<usize>) -> Result<Self> {
        let d = dims.iter().product();
        Self::new(support, dims, Array2::from_elem((d, d), czero())).map(|o| o.assume_hermitian())
    }

    /// Records that the matrix is Hermitian, checking it to the structural
    /// tolerance (Frobenius norms on both sides).
    pub fn with_hermitian_hint(mut self, hermitian: bool) -> Result<Self> {
        if hermitian {
            let defect = linalg::antihermitian_part_norm(self.matrix.view());
            let scale = linalg::frobenius(self.matrix.view());
            if defect > T::lit(T::STRUCTURE_TOL) * scale {
                return domain(format!("matrix is not Hermitian (defect {defect:e})"));
            }
        }
        self.hermitian_hint = Some(hermitian);
        Ok(self)
    }

    pub(crate) fn assume_hermitian(mut self) -> Self {
        self.hermitian_hint = Some(true);
        self
    }

    pub fn support(&self) -> &[Site] {
        &self.support
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C<T>> {
        self.matrix
    }

    pub fn hermitian_hint(&self) -> Option<bool> {
        self.hermitian_hint
    }

    /// Frobenius check of `A = A†` at the structural tolerance.
    pub fn is_hermitian(&self) -> bool {
        let defect = linalg::antihermitian_part_norm(self.matrix.view());
        defect <= T::lit(T::STRUCTURE_TOL) * linalg::frobenius(self.matrix.view()).max(T::one())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            support: self.support.clone(),
            dims: self.dims.clone(),
            matrix: linalg::adjoint(self.matrix.view()),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn scaled(&self, c: C<T>) -> Self {
        let real = c.im == T::zero();
        Self {
            support: self.support.clone(),
            dims: self.dims.clone(),
            matrix: self.matrix.mapv(|z| z * c),
            hermitian_hint: if real { self.hermitian_hint } else { None },
        }
    }

    /// Same operator re-expressed on a superset of its support.
    pub fn embed_into(&self, support: &[Site], dims: &[usize]) -> Result<Self> {
        if support == self.support.as_slice() {
            return Ok(self.clone());
        }
        check_subset(&self.support, &self.dims, support, dims)?;
        let split = Split::new(support, dims, &self.support);
        let d = split.d_sub * split.d_rest;
        let mut out = Array2::from_elem((d, d), czero());
        for r in 0..split.d_rest {
            let rows = split.block(r);
            for (p, &i) in rows.iter().enumerate() {
                for (q, &j) in rows.iter().enumerate() {
                    out[[i, j]] = self.matrix[[p, q]];
                }
            }
        }
        Ok(Self {
            support: support.to_vec(),
            dims: dims.to_vec(),
            matrix: out,
            hermitian_hint: self.hermitian_hint,
        })
    }

    /// `self + other`, embedded on the union of the supports.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (support, dims) = union_support(self, other)?;
        let mut a = self.embed_into(&support, &dims)?;
        let b = other.embed_into(&support, &dims)?;
        a.matrix += &b.matrix;
        a.hermitian_hint = match (self.hermitian_hint, other.hermitian_hint) {
            (Some(true), Some(true)) => Some(true),
            _ => None,
        };
        Ok(a)
    }

    /// `self * other`, embedded on the union of the supports.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (support, dims) = union_support(self, other)?;
        let a = self.embed_into(&support, &dims)?;
        let b = other.embed_into(&support, &dims)?;
        Self::new(support, dims, linalg::matmul(a.matrix.view(), b.matrix.view()))
    }
}

fn check_subset(sub: &[Site], sub_dims: &[usize], sup: &[Site], sup_dims: &[usize]) -> Result<()> {
    for (x, d) in sub.iter().zip(sub_dims) {
        match sup.iter().position(|y| y == x) {
            Some(k) if sup_dims[k] == *d => {}
            Some(_) => return domain(format!("local dimension mismatch at site {x}")),
            None => return domain(format!("site {x} outside the target support")),
        }
    }
    Ok(())
}

fn union_support<T: Real>(a: &LocalOperator<T>, b: &LocalOperator<T>) -> Result<(Vec<Site>, Vec<usize>)> {
    let mut map: BTreeMap<Site, usize> = BTreeMap::new();
    for (x, d) in a.support.iter().zip(&a.dims).chain(b.support.iter().zip(&b.dims)) {
        if let Some(old) = map.insert(*x, *d) {
            if old != *d {
                return domain(format!("incompatible local dimensions at site {x}"));
            }
        }
    }
    Ok(map.into_iter().unzip())
}

/// Index layout of a sub-support inside an ordered support.
///
/// `table[r * d_sub + p]` is the full basis index whose digits on the
/// sub-support form `p` and whose remaining digits form `r`.
#[derive(Clone, Debug)]
pub(crate) struct Split {
    pub table: Vec<usize>,
    pub d_sub: usize,
    pub d_rest: usize,
}

impl Split {
    pub fn new(sites: &[Site], dims: &[usize], sub: &[Site]) -> Self {
        let in_sub: Vec<bool> = sites.iter().map(|x| sub.contains(x)).collect();
        let d_sub: usize = dims.iter().zip(&in_sub).filter(|(_, s)| **s).map(|(d, _)| d).product();
        let total: usize = dims.iter().product();
        let d_rest = total / d_sub;
        let mut table = vec![0usize; total];
        let mut digits = vec![0usize; sites.len()];
        for i in 0..total {
            let (mut p, mut r) = (0usize, 0usize);
            for (k, &d) in dims.iter().enumerate() {
                if in_sub[k] {
                    p = p * d + digits[k];
                } else {
                    r = r * d + digits[k];
                }
            }
            table[r * d_sub + p] = i;
            for k in (0..dims.len()).rev() {
                digits[k] += 1;
                if digits[k] < dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        Self { table, d_sub, d_rest }
    }

    #[inline]
    pub fn block(&self, r: usize) -> &[usize] {
        &self.table[r * self.d_sub..(r + 1) * self.d_sub]
    }
}

/// Normalized partial trace of `m` (on `sites`) onto `keep`.
pub(crate) fn partial_trace_normalized<T: Real>(
    m: ArrayView2<'_, C<T>>,
    sites: &[Site],
    dims: &[usize],
    keep: &[Site],
) -> Array2<C<T>> {
    partial_trace_normalized_with(&Split::new(sites, dims, keep), m)
}

/// `Π_keep(m) ⊗ 1`, returned on the same support as `m`.
pub(crate) fn conditional_expectation_full<T: Real>(
    m: ArrayView2<'_, C<T>>,
    sites: &[Site],
    dims: &[usize],
    keep: &[Site],
) -> Array2<C<T>> {
    let split = Split::new(sites, dims, keep);
    let reduced = partial_trace_normalized_with(&split, m);
    let d = m.nrows();
    let mut out = Array2::from_elem((d, d), czero());
    for r in 0..split.d_rest {
        let idx = split.block(r);
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                out[[i, j]] = reduced[[p, q]];
            }
        }
    }
    out
}

fn partial_trace_normalized_with<T: Real>(split: &Split, m: ArrayView2<'_, C<T>>) -> Array2<C<T>> {
    let mut out = Array2::from_elem((split.d_sub, split.d_sub), czero());
    for r in 0..split.d_rest {
        let idx = split.block(r);
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                out[[p, q]] += m[[i, j]];
            }
        }
    }
    let w = T::one() / T::from_usize(split.d_rest).expect("dimension");
    out.mapv_inplace(|z| z * w);
    out
}

/// `dst += coeff * (op ⊗ 1)` where `dst` lives on `sites`.
pub(crate) fn accumulate_embedded<T: Real>(
    dst: &mut Array2<C<T>>,
    sites: &[Site],
    dims: &[usize],
    op: &LocalOperator<T>,
    coeff: C<T>,
) -> Result<()> {
    check_subset(&op.support, &op.dims, sites, dims)?;
    let split = Split::new(sites, dims, &op.support);
    for r in 0..split.d_rest {
        let idx = split.block(r);
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                let v = op.matrix[[p, q]];
                if v.re != T::zero() || v.im != T::zero() {
                    dst[[i, j]] += coeff * v;
                }
            }
        }
    }
    Ok(())
}

/// Embeds `op` on every site of `chain` (identity elsewhere).
pub fn embed<T: Real>(op: &LocalOperator<T>, chain: &Chain) -> Result<LocalOperator<T>> {
    if op.support.iter().any(|&x| !chain.contains(x)) {
        return domain("operator support is not contained in the chain");
    }
    op.embed_into(&chain.sites(), chain.dims())
}

/// `[a, b] = ab - ba` on the union of the supports.
pub fn commutator<T: Real>(a: &LocalOperator<T>, b: &LocalOperator<T>) -> Result<LocalOperator<T>> {
    let (support, dims) = union_support(a, b)?;
    let ea = a.embed_into(&support, &dims)?;
    let eb = b.embed_into(&support, &dims)?;
    let mut m = linalg::matmul(ea.matrix.view(), eb.matrix.view());
    T::gemm(m.view_mut(), true, eb.matrix.view(), Op::None, ea.matrix.view(), Op::None, -cone::<T>());
    LocalOperator::new(support, dims, m)
}

/// Operator norm (largest singular value).
pub fn operator_norm<T: Real>(a: &LocalOperator<T>) -> Result<T> {
    linalg::spectral_norm(a.matrix.view())
}

/// Normalized partial trace onto `keep`, returned as an operator supported
/// on `keep` (identity on sites of `keep` outside the support of `a`).
pub fn conditional_expectation<T: Real>(a: &LocalOperator<T>, keep: &[Site], chain: &Chain) -> Result<LocalOperator<T>> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&x| !chain.contains(x)) {
        return domain("kept sites are not contained in the chain");
    }
    let op_dims = chain.dims_of(&a.support)?;
    if op_dims != a.dims {
        return domain("operator dimensions disagree with the chain");
    }
    let inside: Vec<Site> = a.support.iter().copied().filter(|x| keep.contains(x)).collect();
    let reduced = partial_trace_normalized(a.matrix.view(), &a.support, &a.dims, &inside);
    let inside_dims = chain.dims_of(&inside)?;
    let out = LocalOperator {
        support: inside,
        dims: inside_dims,
        matrix: reduced,
        hermitian_hint: a.hermitian_hint,
    };
    out.embed_into(&keep, &chain.dims_of(&keep)?)
}

/// Single-site generalized spin `S_m`: `+1` at the first diagonal entry,
/// `-1` at entry `m` (1-based), zero elsewhere.
pub fn build_s<T: Real>(m: usize, d: usize, site: Site) -> Result<LocalOperator<T>> {
    if !(2..=d).contains(&m) {
        return domain(format!("S_m needs 2 <= m <= d, got m={m}, d={d}"));
    }
    let mut a = Array2::from_elem((d, d), czero());
    a[[0, 0]] = cone();
    a[[m - 1, m - 1]] = -cone::<T>();
    LocalOperator::new(vec![site], vec![d], a).map(|o| o.assume_hermitian())
}

/// Single-qubit Pauli matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix<T: Real>(self) -> Array2<C<T>> {
        let (o, l, i) = (czero::<T>(), cone::<T>(), Complex::new(T::zero(), T::one()));
        let e = match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        };
        Array2::from_shape_fn((2, 2), |(r, c)| e[r][c])
    }

    pub fn at<T: Real>(self, site: Site) -> LocalOperator<T> {
        LocalOperator::qubit(vec![site], self.matrix()).expect("2x2").assume_hermitian()
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: ArrayView2<'_, C<T>>, b: ArrayView2<'_, C<T>>) -> Array2<C<T>> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

/// Tensor product of Paulis on `support` (in increasing site order).
pub fn pauli_word<T: Real>(support: &[Site], letters: &[Pauli]) -> Result<LocalOperator<T>> {
    if support.len() != letters.len() {
        return domain("one Pauli letter per site");
    }
    let mut m = linalg::identity::<T>(1);
    for p in letters {
        m = kron(m.view(), p.matrix::<T>().view());
    }
    LocalOperator::qubit(support.to_vec(), m).map(|o| o.assume_hermitian())
}

/// All letter strings of length `k` in lexicographic order `I < X < Y < Z`.
pub fn pauli_strings(k: usize) -> Vec<Vec<Pauli>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                Pauli::ALL.iter().map(move |p| {
                    let mut w = w.clone();
                    w.push(*p);
                    w
                })
            })
            .collect();
    }
    out
}

/// All `4^|support|` Pauli words on `support`; the first is the identity.
pub fn pauli_words<T: Real>(support: &[Site], chain: &Chain) -> Result<Vec<LocalOperator<T>>> {
    let mut support = support.to_vec();
    support.sort_unstable();
    support.dedup();
    for &x in &support {
        match chain.dim_of(x) {
            Some(2) => {}
            Some(d) => return Err(Error::UnsupportedDimension(format!("site {x} has dimension {d}"))),
            None => return domain(format!("site {x} not in chain")),
        }
    }
    pauli_strings(support.len()).iter().map(|w| pauli_word(&support, w)).collect()
}
