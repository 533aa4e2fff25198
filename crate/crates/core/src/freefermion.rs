// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

//! Jordan–Wigner reduction of the XY chain.
//!
//! The chain maps to the one-body matrix `M = [[A, B], [−B, −A]]` acting on
//! `(c_0, ..., c_n, c_0†, ..., c_n†)`. With `H = C† M C` the fermion
//! operators evolve with `e^{−2itM}` up to complex conjugation, so
//! many-body time `t` corresponds to one-body time `2t`
//! (see [`MANY_BODY_TIME_SCALE`]).

use ndarray::{s, Array2};
use num_complex::Complex;

use crate::error::{domain, Result};
use crate::linalg::{self, czero};
use crate::models::XyParams;
use crate::operator::Site;
use crate::scalar::{Real, C};

/// One-body time per unit of many-body time.
pub const MANY_BODY_TIME_SCALE: f64 = 2.0;

/// Maxima refined by golden-section search per kernel entry.
pub const REFINED_MAXIMA: usize = 5;

const GOLDEN_STEPS: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct OneBodyMatrix<T: Real> {
    pub n: usize,
    /// Diagonal `λω_j`, off-diagonal `−μ_j`.
    pub a: Array2<T>,
    /// `B_{j,j+1} = −μ_jγ_j`, `B_{j+1,j} = μ_jγ_j`.
    pub b: Array2<T>,
    pub m: Array2<T>,
}

pub fn build_m<T: Real>(p: &XyParams<T>) -> Result<OneBodyMatrix<T>> {
    p.validate()?;
    let n1 = p.n + 1;
    let mut a = Array2::<T>::zeros((n1, n1));
    let mut b = Array2::<T>::zeros((n1, n1));
    for j in 0..n1 {
        a[[j, j]] = p.lambda * p.omega[j];
    }
    for j in 0..p.n {
        a[[j, j + 1]] = -p.mu[j];
        a[[j + 1, j]] = -p.mu[j];
        b[[j, j + 1]] = -(p.mu[j] * p.gamma[j]);
        b[[j + 1, j]] = p.mu[j] * p.gamma[j];
    }
    let mut m = Array2::<T>::zeros((2 * n1, 2 * n1));
    m.slice_mut(s![..n1, ..n1]).assign(&a);
    m.slice_mut(s![..n1, n1..]).assign(&b);
    m.slice_mut(s![n1.., ..n1]).assign(&b.mapv(|x| -x));
    m.slice_mut(s![n1.., n1..]).assign(&a.mapv(|x| -x));
    Ok(OneBodyMatrix { n: p.n, a, b, m })
}

/// Spectral form of `e^{−itM}`.
///
/// When `B = 0` only `A` is diagonalized and the propagator is
/// `diag(e^{−itA}, e^{itA})`.
#[derive(Clone, Debug)]
pub struct Propagator<T: Real> {
    n1: usize,
    decoupled: bool,
    values: Vec<T>,
    vectors: Array2<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(m: &OneBodyMatrix<T>) -> Result<Self> {
        let decoupled = m.b.iter().all(|&x| x == T::zero());
        let src = if decoupled { &m.a } else { &m.m };
        let (values, vectors) = T::eigh_real(src.view())?;
        Ok(Self { n1: m.n + 1, decoupled, values, vectors })
    }

    /// `e^{−itM}` as a dense `2(n+1)` square matrix.
    pub fn at(&self, t: T) -> Array2<C<T>> {
        let w = self.vectors.mapv(|x| Complex::new(x, T::zero()));
        let mut wp = w.clone();
        for (k, &e) in self.values.iter().enumerate() {
            let ph = Complex::from_polar(T::one(), -(e * t));
            wp.column_mut(k).mapv_inplace(|z| z * ph);
        }
        let u = linalg::matmul_op(wp.view(), crate::scalar::Op::None, w.view(), crate::scalar::Op::Adjoint);
        if !self.decoupled {
            return u;
        }
        let n1 = self.n1;
        let mut full = Array2::from_elem((2 * n1, 2 * n1), czero());
        full.slice_mut(s![..n1, ..n1]).assign(&u);
        full.slice_mut(s![n1.., n1..]).assign(&u.mapv(|z| z.conj()));
        full
    }

    /// `f_{jk}(t) = |U_{j,k}| + |U_{j,n+1+k}|` for all `k` and each time.
    fn row_profile(&self, j: usize, times: &[T]) -> Array2<T> {
        let n1 = self.n1;
        let dim = self.values.len();
        let w = self.vectors.mapv(|x| Complex::new(x, T::zero()));
        let mut phases = Array2::from_elem((dim, times.len()), czero());
        for (a, &e) in self.values.iter().enumerate() {
            let wja = self.vectors[[j, a]];
            for (g, &t) in times.iter().enumerate() {
                phases[[a, g]] = Complex::from_polar(wja, -(e * t));
            }
        }
        let rows = linalg::matmul(w.view(), phases.view());
        let mut out = Array2::<T>::zeros((times.len(), n1));
        for g in 0..times.len() {
            for k in 0..n1 {
                out[[g, k]] = if self.decoupled { rows[[k, g]].norm() } else { rows[[k, g]].norm() + rows[[n1 + k, g]].norm() };
            }
        }
        out
    }

    fn entry_profile(&self, j: usize, k: usize, t: T) -> T {
        let n1 = self.n1;
        let (mut u1, mut u2) = (czero::<T>(), czero::<T>());
        for (a, &e) in self.values.iter().enumerate() {
            let ph = Complex::from_polar(self.vectors[[j, a]], -(e * t));
            u1 += ph * self.vectors[[k, a]];
            if !self.decoupled {
                u2 += ph * self.vectors[[n1 + k, a]];
            }
        }
        u1.norm() + u2.norm()
    }
}

/// `e^{−itM}`.
pub fn propagator<T: Real>(m: &OneBodyMatrix<T>, t: T) -> Result<Array2<C<T>>> {
    Ok(Propagator::new(m)?.at(t))
}

/// Time-sup transition magnitudes on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationKernel<T: Real> {
    /// Row `r` holds `K_{rows[r], k}` for `k = 0..=n`.
    pub k: Array2<T>,
    pub rows: Vec<usize>,
    pub time_grid: Vec<T>,
    pub refined: bool,
}

impl<T: Real> LocalizationKernel<T> {
    /// `K_{jk}`, or `None` if row `j` was not computed.
    pub fn value(&self, j: usize, k: usize) -> Option<T> {
        self.rows.iter().position(|&r| r == j).map(|r| self.k[[r, k]])
    }
}

/// `K_{jk} = max_t |U_{j,k}(t)| + |U_{j,n+1+k}(t)|` over all rows.
pub fn localization_kernel<T: Real>(m: &OneBodyMatrix<T>, grid: &[T], refine: bool) -> Result<LocalizationKernel<T>> {
    let rows: Vec<usize> = (0..=m.n).collect();
    localization_kernel_rows(m, grid, &rows, refine)
}

/// [`localization_kernel`] restricted to the given rows.
///
/// With `refine`, the largest [`REFINED_MAXIMA`] local grid maxima of each
/// entry are polished by golden-section search; values only increase.
pub fn localization_kernel_rows<T: Real>(
    m: &OneBodyMatrix<T>,
    grid: &[T],
    rows: &[usize],
    refine: bool,
) -> Result<LocalizationKernel<T>> {
    if grid.is_empty() {
        return domain("time grid is empty");
    }
    if !grid.iter().any(|&t| t == T::zero()) {
        return domain("time grid must contain 0");
    }
    if rows.iter().any(|&j| j > m.n) {
        return domain("kernel row outside [0, n]");
    }
    let prop = Propagator::new(m)?;
    let n1 = m.n + 1;
    let mut k = Array2::<T>::zeros((rows.len(), n1));
    for (r, &j) in rows.iter().enumerate() {
        let prof = prop.row_profile(j, grid);
        for c in 0..n1 {
            let col = prof.column(c);
            let mut best = col.iter().fold(T::zero(), |a, &b| a.max(b));
            if refine && grid.len() >= 3 {
                for g in top_local_maxima(&col.to_vec()) {
                    let (lo, hi) = (grid[g.saturating_sub(1)], grid[(g + 1).min(grid.len() - 1)]);
                    best = best.max(golden_max(|t| prop.entry_profile(j, c, t), lo, hi));
                }
            }
            k[[r, c]] = best;
        }
    }
    Ok(LocalizationKernel { k, rows: rows.to_vec(), time_grid: grid.to_vec(), refined: refine })
}

fn top_local_maxima<T: Real>(v: &[T]) -> Vec<usize> {
    let n = v.len();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| (i == 0 || v[i] >= v[i - 1]) && (i + 1 == n || v[i] >= v[i + 1]))
        .collect();
    peaks.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    peaks.truncate(REFINED_MAXIMA);
    peaks
}

fn golden_max<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let r = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.max(fd);
    for _ in 0..GOLDEN_STEPS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
            best = best.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
            best = best.max(fd);
        }
    }
    best
}

/// `4^{|X|} Σ_{j∈X, k∈Y} K_{jk}`, a diagnostic surrogate for the many-body
/// estimator.
pub fn xy_manybody_surrogate_bound<T: Real>(k: &LocalizationKernel<T>, x: &[Site], y: &[Site]) -> Result<T> {
    if x.iter().any(|s| y.contains(s)) {
        return domain("X and Y overlap");
    }
    let mut sum = T::zero();
    for &j in x {
        for &c in y {
            let v = usize::try_from(j)
                .ok()
                .zip(usize::try_from(c).ok())
                .and_then(|(j, c)| if c < k.k.ncols() { k.value(j, c) } else { None })
                .ok_or_else(|| crate::Error::Domain(format!("kernel entry ({j}, {c}) unavailable")))?;
            sum += v;
        }
    }
    Ok(T::lit(4.0).powi(x.len() as i32) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, gamma: f64) -> XyParams<f64> {
        XyParams {
            n,
            mu: (0..n).map(|j| 1.0 + 0.1 * j as f64).collect(),
            gamma: vec![gamma; n],
            omega: (0..=n).map(|j| ((j * 7) % 5) as f64 / 5.0 - 0.4).collect(),
            lambda: 1.3,
        }
    }

    #[test]
    fn displayed_blocks() {
        let p = XyParams { n: 1, mu: vec![1.0], gamma: vec![0.0], omega: vec![0.3, -0.2], lambda: 1.0 };
        let m = build_m(&p).unwrap();
        assert_eq!(m.a, ndarray::array![[0.3, -1.0], [-1.0, -0.2]]);
        assert!(m.b.iter().all(|&x| x == 0.0));
        let p = XyParams { gamma: vec![1.0], ..p };
        let m = build_m(&p).unwrap();
        assert_eq!(m.b, ndarray::array![[0.0, -1.0], [1.0, 0.0]]);
        assert_eq!(m.m, m.m.t());
    }

    #[test]
    fn decoupled_and_full_paths_agree() {
        let p = params(4, 0.0);
        let m = build_m(&p).unwrap();
        let fast = Propagator::new(&m).unwrap();
        assert!(fast.decoupled);
        let (values, vectors) = f64::eigh_real(m.m.view()).unwrap();
        let slow = Propagator { n1: 5, decoupled: false, values, vectors };
        let (a, b) = (fast.at(0.9), slow.at(0.9));
        assert!(linalg::frobenius_diff(a.view(), b.view()) < 1e-12);
    }

    #[test]
    fn kernel_at_time_zero_is_identity_pattern() {
        let m = build_m(&params(3, 0.4)).unwrap();
        let k = localization_kernel(&m, &[0.0], false).unwrap();
        for j in 0..4 {
            for c in 0..4 {
                let want = if j == c { 1.0 } else { 0.0 };
                assert!((k.k[[j, c]] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn surrogate_prefactor() {
        let m = build_m(&params(3, 0.0)).unwrap();
        let k = localization_kernel(&m, &[0.0, 0.5, 1.0], true).unwrap();
        let s = xy_manybody_surrogate_bound(&k, &[0], &[2]).unwrap();
        assert!((s - 4.0 * k.k[[0, 2]]).abs() < 1e-15);
        assert!(xy_manybody_surrogate_bound(&k, &[0], &[0]).is_err());
    }
}
