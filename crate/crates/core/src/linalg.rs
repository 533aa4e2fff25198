// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense helpers shared by the operator and dynamics layers.

use ndarray::{Array2, ArrayView2, ArrayViewMut2, Zip};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Op, Real, C};

/// Largest dimension for which operator norms use a full SVD.
pub const DENSE_NORM_MAX_DIM: usize = 256;

/// Iteration cap for Lanczos norm estimation.
pub const LANCZOS_MAX_ITER: usize = 600;

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Identity matrix of size `n`.
pub fn identity<T: Real>(n: usize) -> Array2<C<T>> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { cone() } else { czero() })
}

/// `op_a(a) * op_b(b)`.
pub fn matmul_op<T: Real>(a: ArrayView2<'_, C<T>>, op_a: Op, b: ArrayView2<'_, C<T>>, op_b: Op) -> Array2<C<T>> {
    let m = if op_a == Op::None { a.nrows() } else { a.ncols() };
    let n = if op_b == Op::None { b.ncols() } else { b.nrows() };
    let mut out = Array2::from_elem((m, n), czero());
    T::gemm(out.view_mut(), false, a, op_a, b, op_b, cone());
    out
}

/// `a * b`.
pub fn matmul<T: Real>(a: ArrayView2<'_, C<T>>, b: ArrayView2<'_, C<T>>) -> Array2<C<T>> {
    matmul_op(a, Op::None, b, Op::None)
}

/// Conjugate transpose.
pub fn adjoint<T: Real>(a: ArrayView2<'_, C<T>>) -> Array2<C<T>> {
    a.t().mapv(|z| z.conj())
}

/// Frobenius norm.
pub fn frobenius<T: Real>(a: ArrayView2<'_, C<T>>) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Frobenius norm of `a - b`.
pub fn frobenius_diff<T: Real>(a: ArrayView2<'_, C<T>>, b: ArrayView2<'_, C<T>>) -> T {
    Zip::from(a).and(b).fold(T::zero(), |acc, x, y| acc + (*x - *y).norm_sqr()).sqrt()
}

/// Frobenius norm of `a - a†`.
pub fn antihermitian_part_norm<T: Real>(a: ArrayView2<'_, C<T>>) -> T {
    let n = a.nrows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            s += (a[[i, j]] - a[[j, i]].conj()).norm_sqr();
        }
    }
    s.sqrt()
}

/// Frobenius distance of `u u†` from the identity.
pub fn unitarity_defect<T: Real>(u: ArrayView2<'_, C<T>>) -> T {
    let p = matmul_op(u, Op::None, u, Op::Adjoint);
    frobenius_diff(p.view(), identity::<T>(u.nrows()).view())
}

/// `dst += alpha * src`.
pub fn axpy<T: Real>(mut dst: ArrayViewMut2<'_, C<T>>, alpha: C<T>, src: ArrayView2<'_, C<T>>) {
    Zip::from(&mut dst).and(&src).for_each(|d, s| *d += alpha * *s);
}

/// Largest singular value.
///
/// Dense SVD up to [`DENSE_NORM_MAX_DIM`], Lanczos on `a† a` above.
pub fn spectral_norm<T: Real>(a: ArrayView2<'_, C<T>>) -> Result<T> {
    spectral_norm_with(a, DENSE_NORM_MAX_DIM)
}

/// Operator norm of a Hermitian matrix, `max |λ|`.
pub fn hermitian_norm<T: Real>(a: ArrayView2<'_, C<T>>) -> Result<T> {
    if a.is_empty() {
        return Err(Error::Domain("norm of an empty matrix".into()));
    }
    if a.nrows() <= DENSE_NORM_MAX_DIM {
        let w = T::eigvalsh(a)?;
        return Ok(w.iter().fold(T::zero(), |m, &x| m.max(x.abs())));
    }
    spectral_norm(a)
}

/// Largest singular value with a custom dense cutoff.
pub fn spectral_norm_with<T: Real>(a: ArrayView2<'_, C<T>>, dense_max: usize) -> Result<T> {
    if a.is_empty() {
        return Err(Error::Domain("norm of an empty matrix".into()));
    }
    if a.nrows().max(a.ncols()) <= dense_max {
        return Ok(T::singular_values(a)?[0]);
    }
    if a.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
        return Ok(T::zero());
    }
    let (m, n) = a.dim();
    let mut tmp = vec![czero::<T>(); m];
    let top = lanczos_top(n, |x, y| {
        let xv = ArrayView2::from_shape((n, 1), x).expect("shape");
        let tv = ndarray::ArrayViewMut2::from_shape((m, 1), &mut tmp[..]).expect("shape");
        T::gemm(tv, false, a, Op::None, xv, Op::None, cone());
        let tv = ArrayView2::from_shape((m, 1), &tmp[..]).expect("shape");
        let yv = ndarray::ArrayViewMut2::from_shape((n, 1), y).expect("shape");
        T::gemm(yv, false, a, Op::Adjoint, tv, Op::None, cone());
    })?;
    Ok(top.max(T::zero()).sqrt())
}

fn start_vector<T: Real>(n: usize) -> Vec<C<T>> {
    // splitmix64 stream, fixed so norms are reproducible
    let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = || {
        s = s.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        T::lit((z >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
    };
    (0..n).map(|_| Complex::new(next(), next())).collect()
}

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(czero(), |acc, (x, y)| acc + x.conj() * *y)
}

fn norm2<T: Real>(a: &[C<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Largest eigenvalue of a positive semidefinite Hermitian operator given
/// by its action, via Lanczos with full reorthogonalization.
///
/// Stops when the Ritz residual drops below a relative tolerance or the
/// Krylov space is exhausted.
pub fn lanczos_top<T: Real>(dim: usize, mut apply: impl FnMut(&[C<T>], &mut [C<T>])) -> Result<T> {
    let tol = T::lit(T::STRUCTURE_TOL * 10.0);
    let mut q = start_vector::<T>(dim);
    let nq = norm2(&q);
    q.iter_mut().for_each(|z| *z = *z / nq);
    let mut basis: Vec<Vec<C<T>>> = vec![q];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut w = vec![czero::<T>(); dim];
    let cap = dim.min(LANCZOS_MAX_ITER);
    for k in 0..cap {
        apply(&basis[k], &mut w);
        let a = dot(&basis[k], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let h = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= h * *y);
            }
        }
        let b = norm2(&w);
        let check = k < 40 || k % 4 == 0 || k + 1 == cap;
        let exhausted = k + 1 == dim;
        if check || exhausted {
            let (theta, s_last) = tridiagonal_top(&alpha, &beta)?;
            let scale = theta.abs().max(T::min_positive_value());
            if b * s_last.abs() <= tol * scale || b <= T::epsilon() * scale || exhausted {
                return Ok(theta);
            }
        }
        beta.push(b);
        basis.push(w.iter().map(|z| *z / b).collect());
    }
    Err(Error::Numerical(format!("Lanczos did not converge in {cap} iterations")))
}

/// Largest eigenvalue of the symmetric tridiagonal matrix and the last
/// component of its normalized eigenvector.
fn tridiagonal_top<T: Real>(alpha: &[T], beta: &[T]) -> Result<(T, T)> {
    let k = alpha.len();
    let mut t = Array2::<T>::zeros((k, k));
    for i in 0..k {
        t[[i, i]] = alpha[i];
        if i + 1 < k {
            t[[i, i + 1]] = beta[i];
            t[[i + 1, i]] = beta[i];
        }
    }
    let (vals, vecs) = T::eigh_real(t.view())?;
    Ok((vals[k - 1], vecs[[k - 1, k - 1]]))
}
