// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;
use rayon::prelude::*;

use crate::dynamics::{neighborhood, EigenSystem};
use crate::error::{domain, Result};
use crate::linalg::{self, czero};
use crate::operator::{conditional_expectation_full, LocalOperator};
use crate::scalar::{Real, C};

/// Default degeneracy tolerance relative to `‖H‖`.
pub const DEFAULT_GAP_TOL_REL: f64 = 1e-9;

/// `(e^{ix} − 1) / (ix)`, with the removable singularity at 0 filled in.
fn average_kernel<T: Real>(x: T) -> C<T> {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        // Taylor series, truncated after the cubic term.
        return Complex::new(T::one() - x2 / T::lit(6.0), x / T::lit(2.0) - x2 * x / T::lit(24.0));
    }
    let num = Complex::new(x.cos() - T::one(), x.sin());
    num / Complex::new(T::zero(), x)
}

/// `(1/T) ∫_0^T τ_t(A) dt`, computed exactly in the eigenbasis.
pub fn finite_time_average<T: Real>(es: &EigenSystem<T>, a: &LocalOperator<T>, horizon: T) -> Result<LocalOperator<T>> {
    if !(horizon > T::zero()) {
        return domain(format!("averaging time must be positive, got {horizon}"));
    }
    let mut m = es.to_eigenbasis(es.full_matrix(a)?.view())?;
    let e = es.energies();
    for ((j, k), z) in m.indexed_iter_mut() {
        if j != k {
            *z = *z * average_kernel(horizon * (e[j] - e[k]));
        }
    }
    LocalOperator::new(es.sites().to_vec(), es.dims().to_vec(), es.from_eigenbasis(m.view())?)
}

/// An operator in the commutant of `H`, stored in the eigenbasis.
#[derive(Clone, Debug)]
pub struct DephasedOperator<T: Real> {
    matrix: Array2<C<T>>,
    gap_tol: T,
}

impl<T: Real> DephasedOperator<T> {
    /// Matrix in the ascending eigen order of the source system.
    pub fn eigen_matrix(&self) -> &Array2<C<T>> {
        &self.matrix
    }

    pub fn gap_tol(&self) -> T {
        self.gap_tol
    }

    /// The operator back in the computational basis.
    pub fn to_operator(&self, es: &EigenSystem<T>) -> Result<LocalOperator<T>> {
        LocalOperator::new(es.sites().to_vec(), es.dims().to_vec(), es.from_eigenbasis(self.matrix.view())?)
    }
}

/// `1e-9 · ‖H‖`.
pub fn default_gap_tol<T: Real>(es: &EigenSystem<T>) -> T {
    T::lit(DEFAULT_GAP_TOL_REL) * es.h_norm()
}

fn dephase_eigen<T: Real>(es: &EigenSystem<T>, m: &mut Array2<C<T>>, gap_tol: T) {
    let e = es.energies();
    for ((j, k), z) in m.indexed_iter_mut() {
        if (e[j] - e[k]).abs() > gap_tol {
            *z = czero();
        }
    }
}

/// Infinite-time average: drops eigenbasis entries between levels further
/// apart than `gap_tol`.
pub fn dephase<T: Real>(es: &EigenSystem<T>, a: &LocalOperator<T>, gap_tol: T) -> Result<DephasedOperator<T>> {
    if !(gap_tol >= T::zero()) {
        return domain(format!("gap tolerance must be nonnegative, got {gap_tol}"));
    }
    let mut m = es.to_eigenbasis(es.full_matrix(a)?.view())?;
    dephase_eigen(es, &mut m, gap_tol);
    Ok(DephasedOperator { matrix: m, gap_tol })
}

/// Dephases an operator that is already dephased (or any eigenbasis matrix).
pub fn redephase<T: Real>(es: &EigenSystem<T>, a: &DephasedOperator<T>, gap_tol: T) -> Result<DephasedOperator<T>> {
    es.check_dim(a.matrix.view())?;
    let mut m = a.matrix.clone();
    dephase_eigen(es, &mut m, gap_tol);
    Ok(DephasedOperator { matrix: m, gap_tol })
}

/// Second-kind LIOMs `h̃_x` together with their quasi-locality profiles.
#[derive(Clone, Debug)]
pub struct SecondKindLioms<T: Real> {
    pub lioms: Vec<DephasedOperator<T>>,
    /// `profiles[x][r] = ‖h̃_x − Π_{B_r}(h̃_x)‖` with `B_r` the radius-`r`
    /// neighborhood of `supp h_x`.
    pub profiles: Vec<Vec<T>>,
}

/// `H = U diag(E) U†` on the full support.
fn reconstruct_h<T: Real>(es: &EigenSystem<T>) -> Result<Array2<C<T>>> {
    let d = es.source_dim();
    let mut diag = Array2::from_elem((d, d), czero());
    for (i, &e) in es.energies().iter().enumerate() {
        diag[[i, i]] = Complex::new(e, T::zero());
    }
    es.from_eigenbasis(diag.view())
}

fn check_term_sum<T: Real>(es: &EigenSystem<T>, terms: &[LocalOperator<T>]) -> Result<()> {
    let h = reconstruct_h(es)?;
    let d = es.source_dim();
    let mut sum = Array2::from_elem((d, d), czero());
    for t in terms {
        let m = es.full_matrix(t)?;
        sum += &m;
    }
    let diff = linalg::frobenius_diff(sum.view(), h.view());
    let scale = linalg::frobenius(h.view()).max(T::one());
    if diff > T::lit(T::STRUCTURE_TOL) * scale {
        return domain(format!("terms do not sum to the Hamiltonian (Frobenius residual {diff:e})"));
    }
    Ok(())
}

/// `‖A − Π_{B_r}(A)‖` for `r = 0, 1, ..., len − 1`, with `B_r` the
/// neighborhood of `support`; `a` is Hermitian on the full support.
pub fn locality_profile<T: Real>(es: &EigenSystem<T>, a: ArrayView2<'_, C<T>>, support: &[crate::operator::Site]) -> Result<Vec<T>> {
    let n = es.sites().len() as i64;
    (0..n).map(|r| locality_defect(es, a, support, r)).collect()
}

/// `‖A − Π_{B_r}(A)‖` for one radius.
pub fn locality_defect<T: Real>(
    es: &EigenSystem<T>,
    a: ArrayView2<'_, C<T>>,
    support: &[crate::operator::Site],
    r: i64,
) -> Result<T> {
    if r < 0 {
        return domain("radius must be nonnegative");
    }
    let keep = neighborhood(es.sites(), support, r);
    if keep.len() == es.sites().len() {
        return Ok(T::zero());
    }
    let p = conditional_expectation_full(a, es.sites(), es.dims(), &keep);
    let diff = &a - &p;
    let diff = (&diff + &linalg::adjoint(diff.view())).mapv(|z| z * T::lit(0.5));
    linalg::hermitian_norm(diff.view())
}

/// Dephases each local term and records its locality profile.
pub fn build_lioms_second_kind<T: Real>(es: &EigenSystem<T>, terms: &[LocalOperator<T>]) -> Result<SecondKindLioms<T>> {
    if terms.iter().any(|t| !t.is_hermitian()) {
        return domain("local terms must be Hermitian");
    }
    check_term_sum(es, terms)?;
    let gap_tol = default_gap_tol(es);
    let lioms = terms.iter().map(|t| dephase(es, t, gap_tol)).collect::<Result<Vec<_>>>()?;
    let profiles = lioms
        .par_iter()
        .zip(terms.par_iter())
        .map(|(l, t)| {
            let m = es.from_eigenbasis(l.matrix.view())?;
            locality_profile(es, m.view(), t.support())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SecondKindLioms { lioms, profiles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{eigendecompose, heisenberg_evolve};
    use crate::operator::Pauli;

    #[test]
    fn kernel_series_matches_closed_form_near_switch() {
        for &x in &[0.9e-4f64, 1.1e-4] {
            let closed = Complex::new(x.cos() - 1.0, x.sin()) / Complex::new(0.0, x);
            assert!((average_kernel(x) - closed).norm() < 1e-12);
        }
    }

    #[test]
    fn average_of_precessing_spin_matches_quadrature() {
        let h = Pauli::Z.at::<f64>(0);
        let es = eigendecompose(&h).unwrap();
        let a = Pauli::X.at::<f64>(0);
        let t_end = std::f64::consts::PI;
        let avg = finite_time_average(&es, &a, t_end).unwrap();
        // Composite Simpson rule on a fine grid.
        let steps = 2000;
        let dt = t_end / steps as f64;
        let mut acc = Array2::from_elem((2, 2), czero::<f64>());
        for k in 0..=steps {
            let w = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let m = heisenberg_evolve(&es, &a, k as f64 * dt).unwrap();
            acc.scaled_add(Complex::new(w * dt / 3.0 / t_end, 0.0), m.matrix());
        }
        assert!(linalg::frobenius_diff(acc.view(), avg.matrix().view()) < 1e-8);
    }

    #[test]
    fn dephase_is_idempotent_and_commutes() {
        let h = Pauli::Z.at::<f64>(0).scaled(Complex::new(0.7, 0.0));
        let es = eigendecompose(&h).unwrap();
        let a = Pauli::X.at::<f64>(0).add(&Pauli::Z.at(0)).unwrap();
        let d = dephase(&es, &a, 0.0).unwrap();
        let again = redephase(&es, &d, 0.0).unwrap();
        assert!(linalg::frobenius_diff(d.eigen_matrix().view(), again.eigen_matrix().view()) < 1e-14);
        let op = d.to_operator(&es).unwrap();
        assert!(linalg::frobenius_diff(op.matrix().view(), Pauli::Z.matrix::<f64>().view()) < 1e-12);
    }

    #[test]
    fn negative_inputs_are_rejected() {
        let es = eigendecompose(&Pauli::Z.at::<f64>(0)).unwrap();
        let a = Pauli::X.at::<f64>(0);
        assert!(finite_time_average(&es, &a, 0.0).is_err());
        assert!(dephase(&es, &a, -1.0).is_err());
    }
}
