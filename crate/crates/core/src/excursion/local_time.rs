//! Occupation-window local times.
//!
//! `L̂(x) = dt · #{k : |values[k] - x| < ε} / (2ε)` with `ε = c·√dt`,
//! `c = 2` by default. For a Brownian path the estimator error at a level
//! with local time `ℓ` has standard deviation close to `√(2ℓε/3)`.

use super::grid::PathGrid;
use crate::error::{domain, Result};
use std::fmt::Write as _;

pub const DEFAULT_WINDOW_FACTOR: f64 = 2.0;

/// Default half-width `2√dt`.
pub fn default_window(dt: f64) -> f64 {
    DEFAULT_WINDOW_FACTOR * dt.sqrt()
}

/// Approximate standard deviation of `L̂` around the true local time `ell`.
pub fn local_time_sd(ell: f64, window: f64) -> f64 {
    (2.0 * ell.max(0.0) * window / 3.0).sqrt()
}

/// Local time of `values` at `level` with half-width `window`.
pub fn window_local_time(values: &[f64], dt: f64, level: f64, window: f64) -> f64 {
    let count = values
        .iter()
        .filter(|&&v| (v - level).abs() < window)
        .count();
    count as f64 * dt / (2.0 * window)
}

/// `L̂` at `level` with the default window.
pub fn local_time_at(path: &PathGrid, level: f64) -> f64 {
    window_local_time(&path.values, path.dt, level, default_window(path.dt))
}

/// Estimated local time on a grid of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeProfile {
    pub levels: Vec<f64>,
    pub local_time: Vec<f64>,
    pub window: f64,
}

impl LocalTimeProfile {
    /// Linear interpolation; zero outside the level range.
    pub fn at(&self, x: f64) -> f64 {
        let n = self.levels.len();
        if n == 0 || x < self.levels[0] || x > self.levels[n - 1] {
            return 0.0;
        }
        let i = self.levels.partition_point(|&l| l <= x);
        if i == n {
            return self.local_time[n - 1];
        }
        let (x0, x1) = (self.levels[i - 1], self.levels[i]);
        let w = (x - x0) / (x1 - x0);
        self.local_time[i - 1] * (1.0 - w) + self.local_time[i] * w
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,local_time\n");
        for (l, z) in self.levels.iter().zip(&self.local_time) {
            let _ = writeln!(s, "{l},{z}");
        }
        s
    }
}

/// Profile at `levels` (strictly increasing) with the default window.
pub fn local_time_profile(path: &PathGrid, levels: &[f64]) -> Result<LocalTimeProfile> {
    local_time_profile_with(path, levels, default_window(path.dt))
}

pub fn local_time_profile_with(
    path: &PathGrid,
    levels: &[f64],
    window: f64,
) -> Result<LocalTimeProfile> {
    if !(window > 0.0) {
        return domain("window must be positive");
    }
    if levels.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("levels must be strictly increasing");
    }
    let mut sorted = path.values.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let scale = path.dt / (2.0 * window);
    let local_time = levels
        .iter()
        .map(|&x| {
            let lo = sorted.partition_point(|&v| v <= x - window);
            let hi = sorted.partition_point(|&v| v < x + window);
            hi.saturating_sub(lo) as f64 * scale
        })
        .collect();
    Ok(LocalTimeProfile {
        levels: levels.to_vec(),
        local_time,
        window,
    })
}

/// `n + 1` equally spaced levels on `[a, b]`.
pub fn level_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_path_occupation() {
        let g = PathGrid::new(0.01, vec![0.0; 101], 0).unwrap();
        let w = default_window(g.dt);
        let l = local_time_at(&g, 0.0);
        assert!((l * 2.0 * w - 101.0 * 0.01).abs() < 1e-12);
        assert_eq!(local_time_at(&g, 1.0), 0.0);
    }

    #[test]
    fn profile_matches_direct_count() {
        let vals: Vec<f64> = (0..1000).map(|k| ((k as f64) * 0.37).sin()).collect();
        let g = PathGrid::new(1e-4, vals, 0).unwrap();
        let levels = level_grid(-0.9, 0.9, 30);
        let p = local_time_profile(&g, &levels).unwrap();
        for (x, z) in levels.iter().zip(&p.local_time) {
            let direct = window_local_time(&g.values, g.dt, *x, p.window);
            assert!((direct - z).abs() < 1e-12);
        }
        assert!((p.at(levels[3]) - p.local_time[3]).abs() < 1e-15);
    }

    #[test]
    fn rejects_unsorted_levels() {
        let g = PathGrid::new(1.0, vec![0.0], 0).unwrap();
        assert!(local_time_profile(&g, &[0.0, 0.0]).is_err());
    }
}
