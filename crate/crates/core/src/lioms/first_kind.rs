// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;
use serde::Serialize;

use crate::dynamics::{check_geometry, pauli_commutator_estimator, EigenSystem};
use crate::error::{domain, Error, Result};
use crate::linalg::{self, czero};
use crate::operator::{pauli_strings, pauli_word, Chain, Pauli, Site};
use crate::scalar::{Op, Real, C};

/// Diagonalizing unitary with eigenvectors labeled by spin configurations,
/// and the σ^z-product couplings of the diagonalized Hamiltonian.
#[derive(Clone, Debug)]
pub struct LiomFirstKind<T: Real> {
    chain: Chain,
    /// `assignment[b]` is the global eigen index placed at basis state `b`.
    pub assignment: Vec<usize>,
    /// Column `b` is the eigenvector assigned to basis state `b`.
    pub u: Array2<C<T>>,
    /// `phi[mask]` with bit `i` of `mask` standing for site `start + i`.
    pub phi: Vec<T>,
    /// `two_point[x][y] = Σ_{X ∋ x, y} |φ(X)|`, indexed by chain position.
    pub two_point: Array2<T>,
}

impl<T: Real> LiomFirstKind<T> {
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    /// Coupling of the σ^z product over `sites`.
    pub fn phi_of(&self, sites: &[Site]) -> Result<T> {
        let mut mask = 0usize;
        for &s in sites {
            if !self.chain.contains(s) {
                return domain(format!("site {s} is not in the chain"));
            }
            mask |= 1 << (s - self.chain.start()) as usize;
        }
        Ok(self.phi[mask])
    }

    /// Diagonal `D_b = Σ_X φ(X) χ_X(b)` rebuilt from the couplings.
    pub fn reconstruct_diagonal(&self) -> Vec<T> {
        let n = self.chain.len();
        let mut d: Vec<T> = (0..1usize << n).map(|m| self.phi[site_to_basis_mask(m, n)]).collect();
        walsh_hadamard(&mut d);
        d
    }

    /// `(|x − y|, T_xy)` for all ordered pairs `x < y`.
    pub fn two_point_by_distance(&self) -> Vec<(usize, T)> {
        let n = self.chain.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in (x + 1)..n {
                out.push((y - x, self.two_point[[x, y]]));
            }
        }
        out
    }
}

/// In-place unnormalized Walsh–Hadamard transform.
pub fn walsh_hadamard<T: Real>(v: &mut [T]) {
    let n = v.len();
    assert!(n.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Maps a site mask (bit `i` = site `i`) to the basis-index bit layout
/// (site `i` at bit `n − 1 − i`). The map is an involution.
fn site_to_basis_mask(m: usize, n: usize) -> usize {
    let mut out = 0;
    for i in 0..n {
        if m >> i & 1 == 1 {
            out |= 1 << (n - 1 - i);
        }
    }
    out
}

/// `φ(X) = 2^{−N} Σ_b χ_X(b) D_b`, indexed by site mask.
pub fn character_transform<T: Real>(diag: &[T]) -> Result<Vec<T>> {
    let dim = diag.len();
    if !dim.is_power_of_two() || dim == 0 {
        return domain("diagonal length must be a power of two");
    }
    let n = dim.trailing_zeros() as usize;
    let mut v = diag.to_vec();
    walsh_hadamard(&mut v);
    let w = T::one() / T::from_usize(dim).expect("dimension");
    Ok((0..dim).map(|m| v[site_to_basis_mask(m, n)] * w).collect())
}

/// Greedy maximum-overlap matching of eigenvectors (columns of `u`) to
/// basis states; ties go to the lower basis index.
fn greedy_assignment<T: Real>(u: ArrayView2<'_, C<T>>) -> Vec<usize> {
    let d = u.nrows();
    let mut entries: Vec<(T, usize, usize)> = Vec::with_capacity(d * d);
    for ((b, g), z) in u.indexed_iter() {
        entries.push((z.norm_sqr(), b, g));
    }
    entries.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite").then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut basis_of = vec![usize::MAX; d];
    let mut used = vec![false; d];
    let mut left = d;
    for (_, b, g) in entries {
        if basis_of[b] == usize::MAX && !used[g] {
            basis_of[b] = g;
            used[g] = true;
            left -= 1;
            if left == 0 {
                break;
            }
        }
    }
    basis_of
}

/// Labels eigenvectors by spin configurations and decomposes the resulting
/// diagonal into σ^z products.
pub fn liom_first_kind_decompose<T: Real>(es: &EigenSystem<T>, chain: &Chain) -> Result<LiomFirstKind<T>> {
    if !chain.is_qubit_chain() {
        return Err(Error::UnsupportedDimension("first-kind decomposition needs qubit sites".into()));
    }
    if es.sites() != chain.sites().as_slice() || es.dims() != chain.dims() {
        return domain("eigensystem and chain disagree");
    }
    let basis = es.basis();
    let assignment = greedy_assignment(basis.view());
    let d = basis.nrows();
    let mut u = Array2::from_elem((d, d), czero());
    for (b, &g) in assignment.iter().enumerate() {
        let pivot = basis[[b, g]];
        let phase = if pivot.norm() > T::zero() { pivot.conj() / pivot.norm() } else { Complex::new(T::one(), T::zero()) };
        for s in 0..d {
            u[[s, b]] = basis[[s, g]] * phase;
        }
    }
    let diag: Vec<T> = assignment.iter().map(|&g| es.energies()[g]).collect();
    let phi = character_transform(&diag)?;
    let n = chain.len();
    let mut two_point = Array2::from_elem((n, n), T::zero());
    for (mask, &p) in phi.iter().enumerate() {
        if mask == 0 || p == T::zero() {
            continue;
        }
        let bits: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        for &x in &bits {
            for &y in &bits {
                two_point[[x, y]] += p.abs();
            }
        }
    }
    Ok(LiomFirstKind { chain: chain.clone(), assignment, u, phi, two_point })
}

/// Non-increasing envelope `F(r) = max_{|x−y| ≥ r} T_xy`, floored at the
/// smallest positive value (or 1 if all vanish).
pub fn empirical_envelope<T: Real>(two_point: &Array2<T>) -> Vec<T> {
    let n = two_point.nrows();
    let mut by_dist = vec![T::zero(); n];
    for ((x, y), &v) in two_point.indexed_iter() {
        let r = x.abs_diff(y);
        by_dist[r] = by_dist[r].max(v);
    }
    for r in (0..n.saturating_sub(1)).rev() {
        by_dist[r] = by_dist[r].max(by_dist[r + 1]);
    }
    let floor = by_dist.iter().copied().filter(|v| *v > T::zero()).fold(T::infinity(), T::min);
    let floor = if floor.is_finite() { floor } else { T::one() };
    by_dist.into_iter().map(|v| v.max(floor)).collect()
}

/// `G_x(r) = max_a ‖U† σ^a_x U − Π_{B_r(x)}(U† σ^a_x U)‖`, one row per site.
pub fn unitary_quasilocality_profile<T: Real>(u: ArrayView2<'_, C<T>>, chain: &Chain) -> Result<Array2<T>> {
    if !chain.is_qubit_chain() {
        return Err(Error::UnsupportedDimension("Pauli profiles need qubit sites".into()));
    }
    let d = chain.total_dim()?;
    if u.dim() != (d, d) {
        return domain("unitary shape does not match the chain");
    }
    if linalg::unitarity_defect(u) > T::lit(1e-8) {
        return domain("matrix is not unitary");
    }
    let sites = chain.sites();
    let n = sites.len();
    let mut out = Array2::from_elem((n, n), T::zero());
    for (i, &x) in sites.iter().enumerate() {
        for p in Pauli::NONTRIVIAL {
            let a = conjugate(u, &pauli_word::<T>(&[x], &[p])?.embed_into(&sites, chain.dims())?.into_matrix());
            for r in 0..n {
                let v = locality_defect_on(&sites, chain.dims(), a.view(), &[x], r as i64)?;
                out[[i, r]] = out[[i, r]].max(v);
            }
        }
    }
    Ok(out)
}

fn conjugate<T: Real>(u: ArrayView2<'_, C<T>>, a: &Array2<C<T>>) -> Array2<C<T>> {
    let x = linalg::matmul_op(u, Op::Adjoint, a.view(), Op::None);
    linalg::matmul(x.view(), u)
}

fn locality_defect_on<T: Real>(sites: &[Site], dims: &[usize], a: ArrayView2<'_, C<T>>, support: &[Site], r: i64) -> Result<T> {
    let keep = crate::dynamics::neighborhood(sites, support, r);
    if keep.len() == sites.len() {
        return Ok(T::zero());
    }
    let p = crate::operator::conditional_expectation_full(a, sites, dims, &keep);
    linalg::spectral_norm((&a.to_owned() - &p).view())
}

/// Both sides of the first-kind propagation bound at one time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiomBoundCheck<T: Real> {
    pub t: T,
    pub lhs: T,
    pub rhs: T,
    pub d_x: T,
    pub d_y: T,
    pub c_n: T,
    pub f_sum: T,
    pub violated: bool,
}

/// Sites within `radius` of `z`.
fn fattened(sites: &[Site], z: &[Site], radius: f64) -> Vec<Site> {
    sites.iter().copied().filter(|s| z.iter().any(|x| ((s - x).abs() as f64) <= radius)).collect()
}
/// `max_A ‖U†AU − Π_{Z}(U†AU)‖` over non-identity Pauli words on `support`.
fn pauli_defect<T: Real>(lf: &LiomFirstKind<T>, support: &[Site], keep: &[Site]) -> Result<T> {
    let sites = lf.chain.sites();
    let mut best = T::zero();
    for w in pauli_strings(support.len()).into_iter().skip(1) {
        let a = pauli_word::<T>(support, &w)?.embed_into(&sites, lf.chain.dims())?.into_matrix();
        let conj = conjugate(lf.u.view(), &a);
        if keep.len() == sites.len() {
            continue;
        }
        let p = crate::operator::conditional_expectation_full(conj.view(), &sites, lf.chain.dims(), keep);
        best = best.max(linalg::spectral_norm((&conj - &p).view())?);
    }
    Ok(best)
}

/// `C_n = max_{x,y} T_xy / F(|x − y|)`.
pub fn coupling_constant<T: Real>(two_point: &Array2<T>, f: &[T]) -> Result<T> {
    let n = two_point.nrows();
    if f.len() < n {
        return domain("decay function must cover every chain distance");
    }
    if f.iter().any(|v| !(*v > T::zero())) {
        return domain("decay function must be positive");
    }
    let mut c = T::zero();
    for ((x, y), &v) in two_point.indexed_iter() {
        c = c.max(v / f[x.abs_diff(y)]);
    }
    Ok(c)
}

/// Evaluates `2[D_X + D_Y + |t| C_n Σ_{x∈X_λ, y∈Y_λ} F(|x−y|)]` against the
/// measured Pauli commutator at each time. `f[r]` is the decay function.
pub fn verify_liom_bound<T: Real>(
    lf: &LiomFirstKind<T>,
    es: &EigenSystem<T>,
    x: &[Site],
    y: &[Site],
    times: &[T],
    lambda_frac: T,
    f: &[T],
) -> Result<Vec<LiomBoundCheck<T>>> {
    if !(lambda_frac > T::zero() && lambda_frac < T::lit(0.5)) {
        return domain(format!("λ must lie in (0, 1/2), got {lambda_frac}"));
    }
    let (mut x, mut y) = (x.to_vec(), y.to_vec());
    x.sort_unstable();
    x.dedup();
    y.sort_unstable();
    y.dedup();
    check_geometry(&x, &y)?;
    let sites = lf.chain.sites();
    let dist = x.iter().flat_map(|a| y.iter().map(move |b| (a - b).abs())).min().expect("nonempty");
    let radius = lambda_frac.to_f64().expect("finite") * dist as f64;
    let (xl, yl) = (fattened(&sites, &x, radius), fattened(&sites, &y, radius));
    let d_x = pauli_defect(lf, &x, &xl)?;
    let d_y = pauli_defect(lf, &y, &yl)?;
    let c_n = coupling_constant(&lf.two_point, f)?;
    let mut f_sum = T::zero();
    for a in &xl {
        for b in &yl {
            f_sum += f[(a - b).unsigned_abs() as usize];
        }
    }
    times
        .iter()
        .map(|&t| {
            let lhs = pauli_commutator_estimator(es, &x, &y, t)?;
            let rhs = T::lit(2.0) * (d_x + d_y + t.abs() * c_n * f_sum);
            Ok(LiomBoundCheck { t, lhs, rhs, d_x, d_y, c_n, f_sum, violated: lhs > rhs })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::eigendecompose;
    use crate::models::Interaction;
    use crate::operator::kron;

    fn zz(j: f64) -> crate::operator::LocalOperator<f64> {
        let z = Pauli::Z.matrix::<f64>();
        crate::operator::LocalOperator::qubit(vec![0, 1], kron(z.view(), z.view()).mapv(|v| v * j)).unwrap()
    }

    #[test]
    fn zz_coupling_is_recovered() {
        let chain = Chain::qubits(0, 1).unwrap();
        let mut it = Interaction::new(chain.clone());
        it.add_term(zz(0.8)).unwrap();
        let es = eigendecompose(&it.hamiltonian().unwrap()).unwrap();
        let lf = liom_first_kind_decompose(&es, &chain).unwrap();
        assert!((lf.phi_of(&[0, 1]).unwrap() - 0.8).abs() < 1e-12);
        assert!(lf.phi_of(&[0]).unwrap().abs() < 1e-12);
        assert!(lf.phi_of(&[1]).unwrap().abs() < 1e-12);
        assert!(lf.phi_of(&[]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn walsh_roundtrip() {
        let d: Vec<f64> = (0..16).map(|i| ((i * 7 + 3) % 11) as f64 - 4.5).collect();
        let phi = character_transform(&d).unwrap();
        let mut back: Vec<f64> = (0..16).map(|m| phi[site_to_basis_mask(m, 4)]).collect();
        walsh_hadamard(&mut back);
        for (a, b) in d.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_unitary_has_zero_profile() {
        let chain = Chain::qubits(0, 2).unwrap();
        let u = linalg::identity::<f64>(8);
        let g = unitary_quasilocality_profile(u.view(), &chain).unwrap();
        assert!(g.iter().all(|v| *v < 1e-12));
    }

    #[test]
    fn envelope_is_nonincreasing_and_positive() {
        let mut t = Array2::from_elem((4, 4), 0.0f64);
        t[[0, 1]] = 0.5;
        t[[1, 0]] = 0.5;
        t[[0, 3]] = 0.7;
        t[[3, 0]] = 0.7;
        let f = empirical_envelope(&t);
        assert_eq!(f, vec![0.7, 0.7, 0.7, 0.7]);
        assert!(coupling_constant(&t, &f).unwrap() <= 1.0);
    }
}
