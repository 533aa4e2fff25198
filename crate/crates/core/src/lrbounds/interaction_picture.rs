// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use super::contraction::ContractedLattice;
use super::ffunction::{f_constants, FFunction};
use crate::dynamics::{max_pauli_commutator, EigenSystem, EvolutionPlan};
use crate::error::{domain, Error, Result};
use crate::linalg::{self, czero};
use crate::models::{Interaction, SparsePerturbation};
use crate::operator::{conditional_expectation_full, operator_norm, pauli_strings, pauli_word, Site};
use crate::scalar::{Real, C};

/// Norms of the telescoping pieces `ψ^{(m)}_x(t)` of `τ_t^{H⁰}(ψ_x)` and of
/// the assembled interaction `Φ(t)(X) = Σ_{Λ_x(m) = X} δ_x ψ^{(m)}_x(t)`.
///
/// Only bonds with `δ_x = 1` are expanded; the others do not enter `Φ`.
/// Operators are reduced to norms as soon as they are formed.
#[derive(Clone, Debug, Serialize)]
pub struct InteractionPictureTerms<T: Real> {
    pub sites: Vec<Site>,
    pub times: Vec<T>,
    pub delta: Vec<u8>,
    /// `‖ψ_x‖` per bond.
    pub psi_norms: Vec<T>,
    /// `piece_norms[k][x][m] = ‖ψ^{(m)}_x(times[k])‖`; empty for `δ_x = 0`.
    pub piece_norms: Vec<Vec<Vec<T>>>,
    /// `‖Σ_m ψ^{(m)}_x(t) − τ_t(ψ_x)‖` per time and bond.
    pub residuals: Vec<Vec<T>>,
    /// `‖Φ(times[k])(X)‖` keyed by the support `X`.
    pub phi_norms: Vec<BTreeMap<Vec<Site>, T>>,
}

/// `Λ_x(m) = {y : d(y, {x, x+1}) ≤ m}` within `sites`.
pub fn collar(sites: &[Site], x: Site, m: usize) -> Vec<Site> {
    let m = m as Site;
    sites.iter().copied().filter(|&y| y >= x - m && y <= x + 1 + m).collect()
}

/// Expands `τ_t^{H⁰}(ψ_x)` into nested conditional expectations for each
/// active bond and each sampled time.
pub fn interaction_picture_terms<T: Real>(
    es0: &EigenSystem<T>,
    pert: &SparsePerturbation<T>,
    times: &[T],
) -> Result<InteractionPictureTerms<T>> {
    let sites = es0.sites().to_vec();
    let dims = es0.dims().to_vec();
    if pert.psi.len() + 1 != sites.len() {
        return domain("perturbation and eigensystem live on different chains");
    }
    for psi in &pert.psi {
        if psi.support().iter().any(|s| !sites.contains(s)) {
            return domain("perturbation support leaves the chain");
        }
    }
    let psi_norms = pert.psi.iter().map(operator_norm).collect::<Result<Vec<_>>>()?;
    let active: Vec<usize> = (0..pert.psi.len()).filter(|&k| pert.delta[k] == 1).collect();
    let plans = active
        .iter()
        .map(|&k| EvolutionPlan::for_operator(es0, &pert.psi[k]))
        .collect::<Result<Vec<_>>>()?;
    let d = es0.source_dim();
    let per_time = times
        .par_iter()
        .map(|&t| {
            let mut pieces = vec![Vec::new(); pert.psi.len()];
            let mut residuals = vec![T::zero(); pert.psi.len()];
            let mut phi: BTreeMap<Vec<Site>, Array2<C<T>>> = BTreeMap::new();
            for (plan, &k) in plans.iter().zip(&active) {
                let x = pert.psi[k].support()[0];
                let tau = plan.at(t);
                let mut prev: Option<Array2<C<T>>> = None;
                let mut sum = Array2::from_elem((d, d), czero::<T>());
                for m in 0.. {
                    let region = collar(&sites, x, m);
                    let full = region.len() == sites.len();
                    let p = if full { tau.clone() } else { conditional_expectation_full(tau.view(), &sites, &dims, &region) };
                    let piece = match &prev {
                        None => p.clone(),
                        Some(q) => &p - q,
                    };
                    pieces[k].push(linalg::hermitian_norm(hermitian_part(&piece).view())?);
                    sum += &piece;
                    phi.entry(region).and_modify(|acc| *acc += &piece).or_insert(piece);
                    prev = Some(p);
                    if full {
                        break;
                    }
                }
                residuals[k] = linalg::hermitian_norm(hermitian_part(&(&sum - &tau)).view())?;
            }
            let norms = phi
                .into_iter()
                .map(|(z, m)| Ok((z, linalg::hermitian_norm(hermitian_part(&m).view())?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            Ok((pieces, residuals, norms))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = InteractionPictureTerms {
        sites,
        times: times.to_vec(),
        delta: pert.delta.clone(),
        psi_norms,
        piece_norms: Vec::with_capacity(times.len()),
        residuals: Vec::with_capacity(times.len()),
        phi_norms: Vec::with_capacity(times.len()),
    };
    for (p, r, n) in per_time {
        out.piece_norms.push(p);
        out.residuals.push(r);
        out.phi_norms.push(n);
    }
    Ok(out)
}

fn hermitian_part<T: Real>(m: &Array2<C<T>>) -> Array2<C<T>> {
    let h = m + &linalg::adjoint(m.view());
    h.mapv(|z| z * T::lit(0.5))
}

impl<T: Real> InteractionPictureTerms<T> {
    /// Index of the sampled time closest to `t`.
    pub fn nearest_time(&self, t: T) -> usize {
        let mut best = 0;
        for (k, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = k;
            }
        }
        best
    }

    /// Largest telescoping residual over all times and bonds.
    pub fn max_residual(&self) -> T {
        self.residuals.iter().flatten().copied().fold(T::zero(), T::max)
    }

    /// `(X, ‖Φ(t_k)(X)‖)` for every assembled support at sample `k`.
    pub fn support_norms(&self, k: usize) -> Vec<(Vec<Site>, T)> {
        self.phi_norms[k].iter().map(|(z, v)| (z.clone(), *v)).collect()
    }
}

/// `Σ_{X ∋ x, y} ‖Φ(t)(X)‖` at the sampled time nearest to `t`.
pub fn pair_interaction_norm<T: Real>(terms: &InteractionPictureTerms<T>, x: Site, y: Site, t: T) -> T {
    let k = terms.nearest_time(t);
    terms.phi_norms[k].iter().filter(|(z, _)| z.contains(&x) && z.contains(&y)).map(|(_, v)| *v).sum()
}

/// `Σ_z Σ_{m ≥ m_z} δ_z ‖ψ^{(m)}_z(t)‖` where `m_z` is the smallest `m`
/// with `x, y ∈ Λ_z(m)`; dominates [`pair_interaction_norm`].
pub fn pair_interaction_bound<T: Real>(terms: &InteractionPictureTerms<T>, x: Site, y: Site, t: T) -> T {
    let k = terms.nearest_time(t);
    let (lo, hi) = (x.min(y), x.max(y));
    let start = terms.sites[0];
    let mut total = T::zero();
    for (b, pieces) in terms.piece_norms[k].iter().enumerate() {
        if terms.delta[b] == 0 {
            continue;
        }
        let z = start + b as Site;
        let m_min = (z - lo).max(hi - z - 1).max(0) as usize;
        total += pieces.iter().skip(m_min).copied().sum::<T>();
    }
    total
}

/// `sup_{x,y ∈ Γ} Σ_{Z : x,y ∈ C(Z), |C(Z)| > 1} ‖Φ(Z)‖ / F_μ(d(x,y))`.
///
/// Bounds the contracted sum `Σ_{X ∋ x,y, |X|>1} ‖Φ̃(X)‖` from above by the
/// triangle inequality, so the resulting Lieb–Robinson bound stays valid.
pub fn integrand_value<T: Real>(support_norms: &[(Vec<Site>, T)], f: &FFunction, cl: &ContractedLattice) -> Result<T> {
    let g = cl.gamma();
    let n = g.len();
    let mut acc = Array2::from_elem((n, n), T::zero());
    for (z, v) in support_norms {
        let cz = cl.map_set(z)?;
        if cz.len() < 2 || *v == T::zero() {
            continue;
        }
        let idx: Vec<usize> = cz.iter().map(|&s| cl.index(s).expect("image lies in Γ")).collect();
        for &i in &idx {
            for &j in &idx {
                acc[[i, j]] += *v;
            }
        }
    }
    let mut best = T::zero();
    for i in 0..n {
        for j in 0..n {
            if acc[[i, j]] > T::zero() {
                best = best.max(acc[[i, j]] / f.value::<T>(cl.distance(g[i], g[j])));
            }
        }
    }
    Ok(best)
}

/// [`integrand_value`] for a time-independent interaction.
pub fn static_integrand<T: Real>(phi: &Interaction<T>, f: &FFunction, cl: &ContractedLattice) -> Result<T> {
    let norms = phi
        .terms()
        .iter()
        .map(|(z, op)| Ok((z.clone(), operator_norm(op)?)))
        .collect::<Result<Vec<_>>>()?;
    integrand_value(&norms, f, cl)
}

/// A quadrature value with its estimated error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralEstimate<T: Real> {
    pub value: T,
    /// Richardson estimate from halving the sample set; absent below three
    /// samples.
    pub error: Option<T>,
}

fn trapezoid<T: Real>(ts: &[T], ys: &[T]) -> T {
    ts.windows(2).zip(ys.windows(2)).map(|(t, y)| (t[1] - t[0]) * (y[0] + y[1]) / T::lit(2.0)).sum()
}

/// `∫_{t0}^{t1}` of the contracted integrand over the sampled times, by
/// the trapezoid rule. Both endpoints must be sampled.
pub fn integrand_i<T: Real>(
    terms: &InteractionPictureTerms<T>,
    f: &FFunction,
    cl: &ContractedLattice,
    interval: (T, T),
) -> Result<IntegralEstimate<T>> {
    let (t0, t1) = interval;
    if t1 < t0 {
        return domain("interval endpoints out of order");
    }
    if t1 == t0 {
        return Ok(IntegralEstimate { value: T::zero(), error: Some(T::zero()) });
    }
    let tol = T::lit(1e-12) * (T::one() + t0.abs().max(t1.abs()));
    let idx: Vec<usize> = (0..terms.times.len()).filter(|&k| terms.times[k] >= t0 - tol && terms.times[k] <= t1 + tol).collect();
    if idx.len() < 2 {
        return Err(Error::Resolution(format!("fewer than two samples in [{t0}, {t1}]")));
    }
    let (first, last) = (terms.times[idx[0]], terms.times[*idx.last().expect("nonempty")]);
    if (first - t0).abs() > tol || (last - t1).abs() > tol {
        return Err(Error::Resolution(format!("interval [{t0}, {t1}] endpoints are not sampled")));
    }
    if idx.windows(2).any(|w| terms.times[w[1]] <= terms.times[w[0]]) {
        return domain("sampled times must be strictly increasing");
    }
    let ts: Vec<T> = idx.iter().map(|&k| terms.times[k]).collect();
    let ys = idx
        .iter()
        .map(|&k| integrand_value(&terms.support_norms(k), f, cl))
        .collect::<Result<Vec<_>>>()?;
    let value = trapezoid(&ts, &ys);
    let error = if ts.len() >= 3 {
        let mut coarse: Vec<usize> = (0..ts.len()).step_by(2).collect();
        if *coarse.last().expect("nonempty") != ts.len() - 1 {
            coarse.push(ts.len() - 1);
        }
        let (ct, cy): (Vec<T>, Vec<T>) = coarse.iter().map(|&k| (ts[k], ys[k])).unzip();
        Some((value - trapezoid(&ct, &cy)).abs() / T::lit(3.0))
    } else {
        None
    };
    Ok(IntegralEstimate { value, error })
}

/// `(2‖F‖ / C_{F_μ}) · min(|C(X)|, |C(Y)|) · (e^{2 C_{F_μ} I} − 1) · e^{−μ d(C(X), C(Y))}`
/// with constants computed on the contracted lattice.
pub fn lr_bound_value<T: Real>(f: &FFunction, cl: &ContractedLattice, x: &[Site], y: &[Site], i_t: T) -> Result<T> {
    if !(i_t >= T::zero()) {
        return domain(format!("I(t) must be nonnegative, got {i_t}"));
    }
    let (cx, cy) = (cl.map_set(x)?, cl.map_set(y)?);
    if cx.is_empty() || cy.is_empty() {
        return domain("X and Y must be nonempty");
    }
    if cx.iter().any(|s| cy.contains(s)) {
        return domain("contracted supports of X and Y overlap");
    }
    let metric = cl.metric();
    let norm = f_constants::<T>(&f.unweighted(), &metric)?.norm;
    let conv = f_constants::<T>(f, &metric)?.conv;
    let size = T::from_usize(cx.len().min(cy.len())).expect("size");
    let dist = T::lit(cl.set_distance(&cx, &cy) as f64);
    let growth = (T::lit(2.0) * conv * i_t).exp_m1();
    Ok(T::lit(2.0) * norm / conv * size * growth * (-T::lit(f.mu) * dist).exp())
}

/// `max ‖[τ^I_t(A), B]‖` over non-identity Pauli words on `X` and `Y`, with
/// `τ^I_t = τ^H_t ∘ τ^{H⁰}_{−t}` the interaction-picture dynamics.
pub struct InteractionPictureProbe<'a, T: Real> {
    es: &'a EigenSystem<T>,
    plans0: Vec<EvolutionPlan<'a, T>>,
}

impl<'a, T: Real> InteractionPictureProbe<'a, T> {
    pub fn new(es: &'a EigenSystem<T>, es0: &'a EigenSystem<T>, x: &[Site]) -> Result<Self> {
        if es.sites() != es0.sites() || es.dims() != es0.dims() {
            return domain("the two eigensystems live on different chains");
        }
        let mut x = x.to_vec();
        x.sort_unstable();
        x.dedup();
        if x.is_empty() {
            return domain("X must be nonempty");
        }
        let plans0 = pauli_strings(x.len())
            .into_iter()
            .skip(1)
            .map(|w| EvolutionPlan::for_operator(es0, &pauli_word(&x, &w)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { es, plans0 })
    }

    pub fn estimate(&self, t: T, y: &[Site]) -> Result<T> {
        let mut best = T::zero();
        for p in &self.plans0 {
            let b = p.at(-t);
            let m = EvolutionPlan::new(self.es, b.view())?.at(t);
            best = best.max(max_pauli_commutator(self.es.sites(), self.es.dims(), m.view(), y)?);
        }
        Ok(best)
    }
}
