// Copyright 2026 The spinloc Authors
// SPDX-License-Identifier: Apache-2.0

use crate::scalar::Real;

/// `points` equally spaced times on `[0, t_max]`.
pub fn linear_grid<T: Real>(t_max: T, points: usize) -> Vec<T> {
    let n = points.max(2);
    (0..n).map(|k| t_max * T::from_usize(k).unwrap() / T::from_usize(n - 1).unwrap()).collect()
}

/// `0` followed by `points` log-spaced times on `[t_min, t_max]`.
pub fn log_grid<T: Real>(t_min: T, t_max: T, points: usize) -> Vec<T> {
    let n = points.max(2);
    let (a, b) = (t_min.ln(), t_max.ln());
    let mut out = vec![T::zero()];
    out.extend((0..n).map(|k| (a + (b - a) * T::from_usize(k).unwrap() / T::from_usize(n - 1).unwrap()).exp()));
    out
}

/// Linear on `[0, 1)` then log-spaced up to `t_max`, `points` in total.
pub fn default_grid<T: Real>(t_max: T, points: usize) -> Vec<T> {
    let lin = (points / 10).max(2);
    let mut out: Vec<T> = (0..lin).map(|k| T::from_usize(k).unwrap() / T::from_usize(lin).unwrap()).collect();
    if t_max > T::one() {
        let rest = points.saturating_sub(lin).max(2);
        out.extend(log_grid(T::one(), t_max, rest).into_iter().skip(1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = default_grid::<f64>(1e3, 1000);
        assert_eq!(g.len(), 1000);
        assert_eq!(g[0], 0.0);
        assert!((g[g.len() - 1] - 1e3).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
