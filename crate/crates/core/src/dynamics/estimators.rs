// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;
use serde::Serialize;

use super::eigen::{EigenSystem, EvolutionPlan};
use crate::error::{domain, Error, Result};
use crate::linalg::{self, czero};
use crate::operator::{self, pauli_strings, pauli_word, LocalOperator, Site, Split};
use crate::scalar::{Op, Real, C};

/// Below this half-dimension the single-site norms use a dense SVD.
const DENSE_HALF_DIM: usize = 64;

/// `‖[M, σ^a_k]‖` for `a = x, y, z` at the site in position `pos`.
///
/// With `M = [[P, Q], [Q†-like, R]]` in the 2×2 block form of site `k`,
/// `‖[M, σ^z]‖ = 2‖Q‖`, `‖[M, σ^x]‖ = ‖P − R − Q + Q_{10}‖` and
/// `‖[M, σ^y]‖ = ‖P − R − i(Q + Q_{10})‖`, where `Q_{10}` is the lower-left
/// block. Each is a norm of a half-size matrix.
pub(crate) struct SiteBlocks<T: Real> {
    nx: Array2<C<T>>,
    ny: Array2<C<T>>,
    q: Array2<C<T>>,
}

impl<T: Real> SiteBlocks<T> {
    pub fn new(m: ArrayView2<'_, C<T>>, split: &Split) -> Self {
        let (i0, i1) = (split.block(0), split.block(1));
        let h = i0.len();
        let mut nx = Array2::from_elem((h, h), czero());
        let mut ny = Array2::from_elem((h, h), czero());
        let mut q = Array2::from_elem((h, h), czero());
        let mi = Complex::new(T::zero(), -T::one());
        for p in 0..h {
            let (r0, r1) = (m.row(i0[p]), m.row(i1[p]));
            for s in 0..h {
                let pp = r0[i0[s]];
                let qq = r0[i1[s]];
                let q10 = r1[i0[s]];
                let rr = r1[i1[s]];
                nx[[p, s]] = pp - rr - qq + q10;
                ny[[p, s]] = pp - rr + mi * (qq + q10);
                q[[p, s]] = qq;
            }
        }
        Self { nx, ny, q }
    }

    fn matrices(&self) -> [(&Array2<C<T>>, T); 3] {
        [(&self.nx, T::one()), (&self.ny, T::one()), (&self.q, T::lit(2.0))]
    }

    pub fn norms(&self) -> Result<[T; 3]> {
        let mut out = [T::zero(); 3];
        for (k, (m, f)) in self.matrices().into_iter().enumerate() {
            out[k] = f * linalg::spectral_norm_with(m.view(), DENSE_HALF_DIM)?;
        }
        Ok(out)
    }

    /// Whether any of the three norms exceeds `eps`, deciding by Frobenius
    /// bounds when they are conclusive.
    pub fn any_exceeds(&self, eps: T) -> Result<bool> {
        let mut undecided = Vec::new();
        for (m, f) in self.matrices() {
            let fro = f * linalg::frobenius(m.view());
            let lower = fro / T::from_usize(m.nrows()).expect("dim").sqrt();
            if lower > eps {
                return Ok(true);
            }
            if fro > eps {
                undecided.push((m, f));
            }
        }
        for (m, f) in undecided {
            if f * linalg::spectral_norm_with(m.view(), DENSE_HALF_DIM)? > eps {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn check_qubits<T: Real>(es: &EigenSystem<T>, set: &[Site], what: &str) -> Result<Vec<usize>> {
    set.iter()
        .map(|x| match es.sites().iter().position(|y| y == x) {
            Some(p) if es.dims()[p] == 2 => Ok(p),
            Some(_) => Err(Error::UnsupportedDimension(format!("site {x} is not a qubit"))),
            None => Err(Error::Domain(format!("{what} site {x} outside the chain"))),
        })
        .collect()
}

fn normalized(set: &[Site]) -> Vec<Site> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Checks `X, Y` nonempty, disjoint, and `Y` outside `[min X, max X]`.
pub(crate) fn check_geometry(x: &[Site], y: &[Site]) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return domain("X and Y must be nonempty");
    }
    let (lo, hi) = (x[0], *x.last().expect("nonempty"));
    if y.iter().any(|&s| s >= lo && s <= hi) {
        return domain("Y must lie outside [min X, max X]");
    }
    Ok(())
}

/// Evolved non-identity Pauli words on a fixed set `X`, reusable across
/// times and probe sets `Y`.
pub struct CommutatorProbe<'a, T: Real> {
    es: &'a EigenSystem<T>,
    x: Vec<Site>,
    plans: Vec<EvolutionPlan<'a, T>>,
}

impl<'a, T: Real> CommutatorProbe<'a, T> {
    pub fn new(es: &'a EigenSystem<T>, x: &[Site]) -> Result<Self> {
        let x = normalized(x);
        if x.is_empty() {
            return domain("X must be nonempty");
        }
        check_qubits(es, &x, "X")?;
        let plans = pauli_strings(x.len())
            .into_iter()
            .skip(1)
            .map(|w| EvolutionPlan::for_operator(es, &pauli_word(&x, &w)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { es, x, plans })
    }

    pub fn x(&self) -> &[Site] {
        &self.x
    }

    /// `max_{A,B} ‖[τ_t(A), B]‖` over non-identity Pauli words.
    pub fn estimate(&self, t: T, y: &[Site]) -> Result<T> {
        Ok(self.estimate_many(t, &[y.to_vec()])?[0])
    }

    /// [`Self::estimate`] for several `Y` sharing the evolved operators.
    pub fn estimate_many(&self, t: T, ys: &[Vec<Site>]) -> Result<Vec<T>> {
        let probes = self.prepare(ys)?;
        let mut best = vec![T::zero(); ys.len()];
        for plan in &self.plans {
            let m = plan.at(t);
            for (k, probe) in probes.iter().enumerate() {
                best[k] = best[k].max(probe.max_norm(m.view())?);
            }
        }
        Ok(best)
    }

    /// Whether the estimator at time `t` exceeds `eps` for the set `y`.
    pub fn exceeds(&self, t: T, y: &[Site], eps: T) -> Result<bool> {
        let probe = self.prepare(&[y.to_vec()])?.pop().expect("one probe");
        for plan in &self.plans {
            let m = plan.at(t);
            if probe.exceeds(m.view(), eps)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn prepare(&self, ys: &[Vec<Site>]) -> Result<Vec<YProbe<T>>> {
        ys.iter()
            .map(|y| {
                let y = normalized(y);
                check_geometry(&self.x, &y)?;
                check_qubits(self.es, &y, "Y")?;
                if y.len() == 1 {
                    let sub: Vec<Site> = self.es.sites().iter().copied().filter(|s| *s != y[0]).collect();
                    Ok(YProbe::Single(Split::new(self.es.sites(), self.es.dims(), &sub)))
                } else {
                    let words = pauli_strings(y.len())
                        .into_iter()
                        .skip(1)
                        .map(|w| self.es.full_matrix(&pauli_word(&y, &w)?))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(YProbe::Words(words))
                }
            })
            .collect()
    }
}

enum YProbe<T: Real> {
    Single(Split),
    Words(Vec<Array2<C<T>>>),
}

impl<T: Real> YProbe<T> {
    fn max_norm(&self, m: ArrayView2<'_, C<T>>) -> Result<T> {
        match self {
            YProbe::Single(split) => {
                let n = SiteBlocks::new(m, split).norms()?;
                Ok(n[0].max(n[1]).max(n[2]))
            }
            YProbe::Words(ws) => {
                let mut best = T::zero();
                for b in ws {
                    best = best.max(linalg::spectral_norm(commute(m, b.view()).view())?);
                }
                Ok(best)
            }
        }
    }

    fn exceeds(&self, m: ArrayView2<'_, C<T>>, eps: T) -> Result<bool> {
        match self {
            YProbe::Single(split) => SiteBlocks::new(m, split).any_exceeds(eps),
            YProbe::Words(_) => Ok(self.max_norm(m)? > eps),
        }
    }
}

fn commute<T: Real>(a: ArrayView2<'_, C<T>>, b: ArrayView2<'_, C<T>>) -> Array2<C<T>> {
    let mut m = linalg::matmul(a, b);
    T::gemm(m.view_mut(), true, b, Op::None, a, Op::None, Complex::new(-T::one(), T::zero()));
    m
}

/// `max ‖[τ_t(A), B]‖` over non-identity Pauli words `A` on `X`, `B` on `Y`.
pub fn pauli_commutator_estimator<T: Real>(es: &EigenSystem<T>, x: &[Site], y: &[Site], t: T) -> Result<T> {
    CommutatorProbe::new(es, x)?.estimate(t, y)
}

/// `max_B ‖[M, B]‖` over non-identity Pauli words `B` on `y`, for a
/// matrix `M` on `sites`.
pub fn max_pauli_commutator<T: Real>(sites: &[Site], dims: &[usize], m: ArrayView2<'_, C<T>>, y: &[Site]) -> Result<T> {
    let y = normalized(y);
    if y.is_empty() {
        return domain("Y must be nonempty");
    }
    for s in &y {
        match sites.iter().position(|z| z == s) {
            Some(p) if dims[p] == 2 => {}
            Some(_) => return Err(Error::UnsupportedDimension(format!("site {s} is not a qubit"))),
            None => return domain(format!("Y site {s} outside the chain")),
        }
    }
    let total: usize = dims.iter().product();
    if m.dim() != (total, total) {
        return domain("matrix shape does not match the sites");
    }
    let probe = if y.len() == 1 {
        let sub: Vec<Site> = sites.iter().copied().filter(|s| *s != y[0]).collect();
        YProbe::Single(Split::new(sites, dims, &sub))
    } else {
        let words = pauli_strings(y.len())
            .into_iter()
            .skip(1)
            .map(|w| Ok(pauli_word(&y, &w)?.embed_into(sites, dims)?.into_matrix()))
            .collect::<Result<Vec<_>>>()?;
        YProbe::Words(words)
    };
    probe.max_norm(m)
}

/// Sites within distance `r` of `support`, restricted to `sites`.
pub fn neighborhood(sites: &[Site], support: &[Site], r: i64) -> Vec<Site> {
    sites.iter().copied().filter(|s| support.iter().any(|x| (s - x).abs() <= r)).collect()
}

/// `D_r(t) = ‖τ_t(A) − Π_{B_r}(τ_t(A))‖` with `B_r` the radius-`r`
/// neighborhood of `supp A`.
pub fn quasi_locality_estimator<T: Real>(es: &EigenSystem<T>, a: &LocalOperator<T>, r: i64, t: T) -> Result<T> {
    if r < 0 {
        return domain("radius must be nonnegative");
    }
    let plan = EvolutionPlan::for_operator(es, a)?;
    let m = plan.at(t);
    let keep = neighborhood(es.sites(), a.support(), r);
    let p = operator::conditional_expectation_full(m.view(), es.sites(), es.dims(), &keep);
    linalg::spectral_norm((m - p).view())
}

/// Estimator values on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutatorTrace<T: Real> {
    pub time_grid: Vec<T>,
    pub values: Vec<T>,
    pub x: Vec<Site>,
    pub y: Vec<Site>,
    pub beta: T,
    pub chi_of_x: T,
}

/// Evaluates the Pauli estimator on `grid`.
pub fn commutator_trace<T: Real>(
    es: &EigenSystem<T>,
    x: &[Site],
    y: &[Site],
    grid: &[T],
    beta: T,
    chi_of_x: T,
) -> Result<CommutatorTrace<T>> {
    let probe = CommutatorProbe::new(es, x)?;
    let values = grid.iter().map(|&t| probe.estimate(t, y)).collect::<Result<Vec<_>>>()?;
    Ok(CommutatorTrace { time_grid: grid.to_vec(), values, x: normalized(x), y: normalized(y), beta, chi_of_x })
}

/// `max_t value / (χ(|X|) (1 + |t|^β))` over the grid.
pub fn sup_over_time<T: Real>(trace: &CommutatorTrace<T>) -> T {
    trace
        .time_grid
        .iter()
        .zip(&trace.values)
        .map(|(&t, &v)| v / (trace.chi_of_x * (T::one() + t.abs().powf(trace.beta))))
        .fold(T::zero(), T::max)
}

/// `χ(k) = 4^k`.
pub fn chi_four_pow<T: Real>(k: usize) -> T {
    T::lit(4.0).powi(k as i32)
}
