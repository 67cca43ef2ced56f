//! Pointed distances `Σ_{n≥1} 2^{-n} (1 ∧ d(B_X(p, n), B_Y(p, n)))`.
//!
//! For finite spaces the balls stop growing at `n₀ = ⌈max radius⌉` (at
//! least 1), and the tail `Σ_{n≥n₀} 2^{-n} = 2^{1-n₀}` is added in closed
//! form, so the sums are exact up to the per-ball terms.

use super::gh::{gh_bounds, gh_exact_with, Correspondence, DEFAULT_GH_CAP};
use super::prokhorov::prokhorov_general;
use super::Dendrogram;
use crate::error::{domain, Result};

/// Value of a pointed distance and whether every ball term was exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointedDistance {
    pub value: f64,
    pub exact: bool,
}

fn radius_from_point(d: &Dendrogram) -> f64 {
    (0..d.leaf_count)
        .map(|i| d.distance(d.point, i))
        .fold(0.0, f64::max)
}

fn series(
    x: &Dendrogram,
    y: &Dendrogram,
    mut term: impl FnMut(&Dendrogram, &Dendrogram) -> Result<(f64, bool)>,
) -> Result<PointedDistance> {
    let n0 = radius_from_point(x)
        .max(radius_from_point(y))
        .ceil()
        .max(1.0) as u32;
    let mut value = 0.0;
    let mut exact = true;
    for n in 1..=n0 {
        let bx = x.ball_around_point(n as f64);
        let by = y.ball_around_point(n as f64);
        let (t, e) = term(&bx, &by)?;
        exact &= e;
        let weight = if n == n0 {
            2f64.powi(1 - n as i32)
        } else {
            2f64.powi(-(n as i32))
        };
        value += weight * t.min(1.0);
    }
    Ok(PointedDistance { value, exact })
}

/// Pointed GH sum; ball terms use the exact solver when the two balls fit
/// under `cap` leaves and the greedy upper bound otherwise.
pub fn pointed_gh_with(x: &Dendrogram, y: &Dendrogram, cap: usize) -> Result<PointedDistance> {
    series(x, y, |bx, by| {
        if bx.leaf_count + by.leaf_count <= cap {
            Ok((gh_exact_with(bx, by, cap)?.0, true))
        } else {
            Ok((gh_bounds(bx, by).1, false))
        }
    })
}

pub fn pointed_gh(x: &Dendrogram, y: &Dendrogram) -> Result<f64> {
    Ok(pointed_gh_with(x, y, DEFAULT_GH_CAP)?.value)
}

/// Hausdorff plus Prokhorov distance after gluing `X` and `Y` along a
/// correspondence of distortion `dis`:
/// `d(x, y) = min_{(x',y') ∈ R} dX(x, x') + dis/2 + dY(y', y)`.
pub fn glued_hausdorff_prokhorov(
    x: &Dendrogram,
    y: &Dendrogram,
    corr: &Correspondence,
) -> Result<f64> {
    let (Some(mu), Some(nu)) = (&x.masses, &y.masses) else {
        return domain("GHP needs masses on both spaces");
    };
    let (a, b) = (x.leaf_count, y.leaf_count);
    let dx = x.distance_matrix();
    let dy = y.distance_matrix();
    let half = 0.5 * corr.distortion(&dx, &dy);
    let mut dist = vec![vec![0.0; a + b]; a + b];
    for i in 0..a {
        dist[i][..a].copy_from_slice(&dx[i]);
    }
    for j in 0..b {
        dist[a + j][a..].copy_from_slice(&dy[j]);
    }
    for i in 0..a {
        for j in 0..b {
            let v = corr
                .pairs
                .iter()
                .map(|&(p, q)| dx[i][p] + half + dy[q][j])
                .fold(f64::INFINITY, f64::min);
            dist[i][a + j] = v;
            dist[a + j][i] = v;
        }
    }
    let hx = (0..a)
        .map(|i| (0..b).map(|j| dist[i][a + j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let hy = (0..b)
        .map(|j| (0..a).map(|i| dist[i][a + j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(hx.max(hy) + prokhorov_general(&dist, mu, nu)?)
}

/// Pointed GHP sum; each ball term is the glued Hausdorff + Prokhorov
/// value along the optimal (or greedy) correspondence, an upper bound on
/// the GHP term.
pub fn pointed_ghp_with(x: &Dendrogram, y: &Dendrogram, cap: usize) -> Result<PointedDistance> {
    series(x, y, |bx, by| {
        let corr = if bx.leaf_count + by.leaf_count <= cap {
            gh_exact_with(bx, by, cap)?.1
        } else {
            let mut all = Vec::new();
            for i in 0..bx.leaf_count {
                for j in 0..by.leaf_count {
                    all.push((i, j));
                }
            }
            Correspondence { pairs: all }
        };
        Ok((glued_hausdorff_prokhorov(bx, by, &corr)?, false))
    })
}

pub fn pointed_ghp(x: &Dendrogram, y: &Dendrogram) -> Result<f64> {
    Ok(pointed_ghp_with(x, y, DEFAULT_GH_CAP)?.value)
}
