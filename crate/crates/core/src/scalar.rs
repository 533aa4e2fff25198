// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction.
//!
//! All numerical code is generic over [`Real`], implemented for `f32` and
//! `f64`. Matrices are stored as row-major `ndarray` arrays of
//! `Complex<T>`; the dense kernels below hand them to `faer` as zero-copy
//! views.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use faer::linalg::matmul::matmul;
use faer::{Accum, MatMut, MatRef, Par, Side};
use ndarray::{Array2, ArrayView2, ArrayViewMut2, ScalarOperand};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

use crate::error::{Error, Result};

/// Complex scalar over the real type `T`.
pub type C<T> = Complex<T>;

/// How an operand enters a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    /// Use the matrix as is.
    None,
    /// Use the conjugate transpose.
    Adjoint,
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for f32 {}
    impl Sealed for f64 {}
}

/// Real floating-point type supported by the dense backend.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + ScalarOperand
    + Send
    + Sync
    + 'static
    + sealed::Sealed
{
    /// Relative tolerance for structural checks (Hermiticity, unitarity).
    const STRUCTURE_TOL: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// `dst = alpha * op_a(a) * op_b(b) + (accumulate ? dst : 0)`.
    fn gemm(
        dst: ArrayViewMut2<'_, C<Self>>,
        accumulate: bool,
        a: ArrayView2<'_, C<Self>>,
        op_a: Op,
        b: ArrayView2<'_, C<Self>>,
        op_b: Op,
        alpha: C<Self>,
    );

    /// Eigen decomposition of a Hermitian matrix; eigenvalues ascending,
    /// eigenvectors in the columns of the returned matrix.
    fn eigh(m: ArrayView2<'_, C<Self>>) -> Result<(Vec<Self>, Array2<C<Self>>)>;

    /// Eigenvalues of a Hermitian matrix, ascending.
    fn eigvalsh(m: ArrayView2<'_, C<Self>>) -> Result<Vec<Self>>;

    /// Eigen decomposition of a real symmetric matrix.
    fn eigh_real(m: ArrayView2<'_, Self>) -> Result<(Vec<Self>, Array2<Self>)>;

    /// Singular values, descending.
    fn singular_values(m: ArrayView2<'_, C<Self>>) -> Result<Vec<Self>>;
}

fn standard<'a, T: Clone>(m: ArrayView2<'a, T>) -> std::borrow::Cow<'a, [T]> {
    match m.to_slice() {
        Some(s) => std::borrow::Cow::Borrowed(s),
        None => std::borrow::Cow::Owned(m.iter().cloned().collect()),
    }
}

/// Row-major copy scaled to unit max-entry magnitude, with the scale.
/// Tiny inputs otherwise stall the iterative eigensolvers.
fn unit_scaled<T: Copy, R: num_traits::Float>(m: ArrayView2<'_, T>, mag: impl Fn(&T) -> R, div: impl Fn(T, R) -> T) -> (Vec<T>, R) {
    let scale = m.iter().map(&mag).fold(R::zero(), R::max);
    if scale == R::zero() || scale == R::one() {
        return (standard(m).into_owned(), scale);
    }
    (m.iter().map(|&z| div(z, scale)).collect(), scale)
}

fn cmag<R: num_traits::Float>(z: &Complex<R>) -> R {
    z.re.abs().max(z.im.abs())
}

/// Solver attempts in order: lower triangle, upper triangle, and the lower
/// triangle after a diagonal phase similarity. The faer complex solver
/// occasionally fails to converge on sparse, highly degenerate inputs.
const HERMITIAN_ATTEMPTS: [(Side, bool); 3] = [(Side::Lower, false), (Side::Upper, false), (Side::Lower, true)];

const PHASE_STEP: f64 = 0.618_033_988_749_894_9;

/// `D M D†` with `D = diag(e^{i k θ})`.
fn phase_conjugate<R: num_traits::Float + FloatConst>(s: &[Complex<R>], n: usize) -> Vec<Complex<R>> {
    let step = R::from(PHASE_STEP).expect("representable");
    s.iter()
        .enumerate()
        .map(|(idx, &z)| {
            let (i, j) = (idx / n, idx % n);
            z * Complex::from_polar(R::one(), R::from(i as f64 - j as f64).expect("index") * step)
        })
        .collect()
}

fn from_faer<T: Copy + Default>(m: MatRef<'_, T>) -> Array2<T> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

macro_rules! impl_real {
    ($t:ty, $tol:expr) => {
        impl Real for $t {
            const STRUCTURE_TOL: f64 = $tol;

            fn gemm(
                mut dst: ArrayViewMut2<'_, C<$t>>,
                accumulate: bool,
                a: ArrayView2<'_, C<$t>>,
                op_a: Op,
                b: ArrayView2<'_, C<$t>>,
                op_b: Op,
                alpha: C<$t>,
            ) {
                let (m, n) = dst.dim();
                let a_s = standard(a.view());
                let b_s = standard(b.view());
                let av = MatRef::from_row_major_slice(&a_s, a.nrows(), a.ncols());
                let bv = MatRef::from_row_major_slice(&b_s, b.nrows(), b.ncols());
                let accum = if accumulate { Accum::Add } else { Accum::Replace };
                let run = |out: MatMut<'_, C<$t>>| match (op_a, op_b) {
                    (Op::None, Op::None) => matmul(out, accum, av, bv, alpha, Par::Seq),
                    (Op::Adjoint, Op::None) => matmul(out, accum, av.adjoint(), bv, alpha, Par::Seq),
                    (Op::None, Op::Adjoint) => matmul(out, accum, av, bv.adjoint(), alpha, Par::Seq),
                    (Op::Adjoint, Op::Adjoint) => {
                        matmul(out, accum, av.adjoint(), bv.adjoint(), alpha, Par::Seq)
                    }
                };
                match dst.as_slice_mut() {
                    Some(s) => run(MatMut::from_row_major_slice_mut(s, m, n)),
                    None => {
                        let mut tmp: Vec<C<$t>> = dst.iter().cloned().collect();
                        run(MatMut::from_row_major_slice_mut(&mut tmp, m, n));
                        for (d, v) in dst.iter_mut().zip(tmp) {
                            *d = v;
                        }
                    }
                }
            }

            fn eigh(m: ArrayView2<'_, C<$t>>) -> Result<(Vec<$t>, Array2<C<$t>>)> {
                let n = m.nrows();
                let (s, scale) = unit_scaled(m.view(), cmag, |z, r| z / r);
                if scale == 0.0 {
                    return Ok((vec![0.0; n], Array2::from_shape_fn(m.dim(), |(i, j)| C::new(if i == j { 1.0 } else { 0.0 }, 0.0))));
                }
                let mut last = None;
                for (side, phased) in HERMITIAN_ATTEMPTS {
                    let buf = if phased { phase_conjugate(&s, n) } else { s.clone() };
                    match MatRef::from_row_major_slice(&buf, n, n).self_adjoint_eigen(side) {
                        Ok(ev) => {
                            let vals = (0..n).map(|i| ev.S()[i].re * scale).collect();
                            let mut u = from_faer(ev.U());
                            if phased {
                                for (i, mut row) in u.rows_mut().into_iter().enumerate() {
                                    let ph = Complex::from_polar(1.0, -(i as $t) * PHASE_STEP as $t);
                                    row.mapv_inplace(|z| z * ph);
                                }
                            }
                            return Ok((vals, u));
                        }
                        Err(e) => last = Some(e),
                    }
                }
                Err(Error::Numerical(format!("Hermitian eigensolver: {last:?}")))
            }

            fn eigvalsh(m: ArrayView2<'_, C<$t>>) -> Result<Vec<$t>> {
                let n = m.nrows();
                let (s, scale) = unit_scaled(m.view(), cmag, |z, r| z / r);
                if scale == 0.0 {
                    return Ok(vec![0.0; n]);
                }
                let mut last = None;
                for (side, phased) in HERMITIAN_ATTEMPTS {
                    let buf = if phased { phase_conjugate(&s, n) } else { s.clone() };
                    match MatRef::from_row_major_slice(&buf, n, n).self_adjoint_eigenvalues(side) {
                        Ok(w) => return Ok(w.into_iter().map(|x| x * scale).collect()),
                        Err(e) => last = Some(e),
                    }
                }
                Err(Error::Numerical(format!("Hermitian eigensolver: {last:?}")))
            }

            fn eigh_real(m: ArrayView2<'_, $t>) -> Result<(Vec<$t>, Array2<$t>)> {
                let (s, scale) = unit_scaled(m.view(), |x: &$t| x.abs(), |x, r| x / r);
                if scale == 0.0 {
                    return Ok((vec![0.0; m.nrows()], Array2::from_shape_fn(m.dim(), |(i, j)| if i == j { 1.0 } else { 0.0 })));
                }
                let v = MatRef::from_row_major_slice(&s, m.nrows(), m.ncols());
                let ev = v
                    .self_adjoint_eigen(Side::Lower)
                    .map_err(|e| Error::Numerical(format!("symmetric eigensolver: {e:?}")))?;
                let s = ev.S();
                let vals = (0..m.nrows()).map(|i| s[i] * scale).collect();
                Ok((vals, from_faer(ev.U())))
            }

            fn singular_values(m: ArrayView2<'_, C<$t>>) -> Result<Vec<$t>> {
                if m.is_empty() {
                    return Ok(Vec::new());
                }
                let (s, scale) = unit_scaled(m.view(), cmag, |z, r| z / r);
                if scale == 0.0 {
                    return Ok(vec![0.0; m.nrows().min(m.ncols())]);
                }
                let v = MatRef::from_row_major_slice(&s, m.nrows(), m.ncols());
                let mut sv: Vec<$t> = v
                    .singular_values()
                    .map_err(|e| Error::Numerical(format!("SVD: {e:?}")))?
                    .into_iter()
                    .map(|x| x * scale)
                    .collect();
                sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
                Ok(sv)
            }
        }
    };
}

impl_real!(f64, 1e-12);
impl_real!(f32, 1e-5);

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn gemm_matches_naive_product_for_each_op() {
        let a = array![[c(1., 2.), c(0., -1.)], [c(3., 0.), c(-2., 1.)]];
        let b = array![[c(0., 1.), c(2., 0.)], [c(1., 1.), c(0., -3.)]];
        for (oa, ob) in [
            (Op::None, Op::None),
            (Op::Adjoint, Op::None),
            (Op::None, Op::Adjoint),
            (Op::Adjoint, Op::Adjoint),
        ] {
            let la = if oa == Op::Adjoint { a.t().mapv(|z| z.conj()) } else { a.clone() };
            let lb = if ob == Op::Adjoint { b.t().mapv(|z| z.conj()) } else { b.clone() };
            let mut out = Array2::from_elem((2, 2), c(1., 1.));
            f64::gemm(out.view_mut(), true, a.view(), oa, b.view(), ob, c(2., 0.));
            for i in 0..2 {
                for j in 0..2 {
                    let mut want = c(1., 1.);
                    for k in 0..2 {
                        want += la[[i, k]] * lb[[k, j]] * 2.0;
                    }
                    assert!((out[[i, j]] - want).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn eigh_of_pauli_y() {
        let y = array![[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]];
        let (vals, vecs) = f64::eigh(y.view()).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        for k in 0..2 {
            let v = vecs.column(k);
            let yv = y.dot(&v);
            for i in 0..2 {
                assert!((yv[i] - v[i] * vals[k]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn f32_backend_runs() {
        let m = array![[C::new(2.0f32, 0.), C::new(0., 1.)], [C::new(0., -1.), C::new(2.0f32, 0.)]];
        let vals = f32::eigvalsh(m.view()).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-5 && (vals[1] - 3.0).abs() < 1e-5);
        let sv = f32::singular_values(m.view()).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-5);
    }
}
