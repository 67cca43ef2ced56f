//! Gaussian random walks on a grid: two-sided Brownian motion, the
//! excursion straddling the origin and the excursion conditioned to hit 1.
//!
//! The downward legs of both excursions have heavy-tailed durations. They
//! are simulated reflected at a ceiling a few grid scales above the level
//! that matters (`0` for `W`, `1` for the conditioned excursion): the law
//! of the path below the ceiling, and so every local time and every depth
//! used downstream, is unchanged.

use super::grid::PathGrid;
use crate::error::{domain, Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Ceiling height in units of `√dt` above the top level of interest.
pub const CEILING_FACTOR: f64 = 8.0;

/// Controls for the adaptively extended walks.
#[derive(Debug, Clone, Copy)]
pub struct WalkOptions {
    /// Reflect above `level_of_interest + factor·√dt`; `None` disables it.
    pub ceiling_factor: Option<f64>,
    /// Maximum number of steps per walk before giving up.
    pub max_steps: usize,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions {
            ceiling_factor: Some(CEILING_FACTOR),
            max_steps: 60_000_000,
        }
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return domain(format!("dt must be positive, got {dt}"));
    }
    Ok(())
}

/// Two-sided Brownian motion on `[-T, T]` with `W(0) = 0`.
pub fn simulate_two_sided_bm<R: Rng + ?Sized>(t: f64, dt: f64, rng: &mut R) -> Result<PathGrid> {
    check_dt(dt)?;
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("horizon must be positive, got {t}"));
    }
    let n = (t / dt).ceil() as usize;
    let sd = dt.sqrt();
    let mut values = vec![0.0; 2 * n + 1];
    for k in (0..n).rev() {
        values[k] = values[k + 1] + sd * rng.sample::<f64, _>(StandardNormal);
    }
    for k in n + 1..=2 * n {
        values[k] = values[k - 1] + sd * rng.sample::<f64, _>(StandardNormal);
    }
    PathGrid::new(dt, values, n)
}

/// First indices at or below `level` on each side of the origin.
pub fn straddling_bounds(path: &PathGrid, level: f64) -> Result<(usize, usize)> {
    let o = path.origin_index;
    if !(path.values[o] > level) {
        return domain(format!("path at the origin is not above level {level}"));
    }
    let right = path.values[o..]
        .iter()
        .position(|&v| v <= level)
        .map(|k| o + k);
    let left = path.values[..o].iter().rposition(|&v| v <= level);
    match (left, right) {
        (Some(l), Some(r)) => Ok((l, r)),
        _ => Err(Error::Capacity(format!(
            "path does not cross level {level} on both sides"
        ))),
    }
}

/// The excursion above `level` containing the origin, shifted to start and
/// end at zero: `Y_t = W(t + τ₋) - level` on `[0, τ₊ - τ₋]`. The crossing
/// samples are clipped to zero.
pub fn straddling_excursion(path: &PathGrid, level: f64) -> Result<PathGrid> {
    let (l, r) = straddling_bounds(path, level)?;
    let mut values: Vec<f64> = path.values[l..=r].iter().map(|v| v - level).collect();
    values[0] = 0.0;
    *values.last_mut().expect("nonempty") = 0.0;
    let mut g = PathGrid::new(path.dt, values, path.origin_index - l)?;
    g.seed = path.seed;
    Ok(g)
}

/// Walk from `start` until it is at or below `level`, reflected at
/// `ceiling`. The returned samples include the start and the crossing.
fn walk_down<R: Rng + ?Sized>(
    start: f64,
    level: f64,
    ceiling: Option<f64>,
    dt: f64,
    max_steps: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let sd = dt.sqrt();
    let mut out = vec![start];
    let mut x = start;
    while x > level {
        if out.len() > max_steps {
            return Err(Error::Capacity(format!(
                "walk did not reach {level} within {max_steps} steps"
            )));
        }
        x += sd * rng.sample::<f64, _>(StandardNormal);
        if let Some(c) = ceiling {
            if x > c {
                x = 2.0 * c - x;
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// Two-sided walk from `W(0) = 0`, each side run until it first reaches
/// `level < 0`. The result contains both crossings, so
/// [`straddling_excursion`] applies directly.
pub fn simulate_straddling_w<R: Rng + ?Sized>(
    dt: f64,
    level: f64,
    opts: WalkOptions,
    rng: &mut R,
) -> Result<PathGrid> {
    check_dt(dt)?;
    if !(level < 0.0) {
        return domain(format!("level must be negative, got {level}"));
    }
    let ceiling = opts.ceiling_factor.map(|c| c * dt.sqrt());
    let left = walk_down(0.0, level, ceiling, dt, opts.max_steps, rng)?;
    let right = walk_down(0.0, level, ceiling, dt, opts.max_steps, rng)?;
    let origin = left.len() - 1;
    let mut values = left;
    values.reverse();
    values.extend_from_slice(&right[1..]);
    PathGrid::new(dt, values, origin)
}

/// Straddling excursion of `W` above `-1`, simulated adaptively.
pub fn simulate_straddling_excursion<R: Rng + ?Sized>(
    dt: f64,
    opts: WalkOptions,
    rng: &mut R,
) -> Result<PathGrid> {
    straddling_excursion(&simulate_straddling_w(dt, -1.0, opts, rng)?, -1.0)
}

/// Excursion from 0 conditioned to reach 1: a three-dimensional Bessel
/// path (norm of a Gaussian walk in `ℝ³`) run until it reaches 1, followed
/// by an independent walk from 1 killed at 0. The first sample at or above
/// 1 is set to exactly 1 and the last sample to 0.
pub fn conditioned_excursion<R: Rng + ?Sized>(dt: f64, rng: &mut R) -> Result<PathGrid> {
    conditioned_excursion_with(dt, WalkOptions::default(), rng)
}

pub fn conditioned_excursion_with<R: Rng + ?Sized>(
    dt: f64,
    opts: WalkOptions,
    rng: &mut R,
) -> Result<PathGrid> {
    check_dt(dt)?;
    let up = bessel3_to_one(dt, opts.max_steps, rng)?;
    let ceiling = opts.ceiling_factor.map(|c| 1.0 + c * dt.sqrt());
    let down = walk_down(1.0, 0.0, ceiling, dt, opts.max_steps, rng)?;
    let mut values = up;
    values.extend_from_slice(&down[1..]);
    *values.last_mut().expect("nonempty") = 0.0;
    PathGrid::new(dt, values, 0)
}

/// Norm of a 3-d Gaussian walk from the origin up to its first sample at
/// or above 1, which is replaced by 1.
pub fn bessel3_to_one<R: Rng + ?Sized>(dt: f64, max_steps: usize, rng: &mut R) -> Result<Vec<f64>> {
    let sd = dt.sqrt();
    let mut p = [0.0f64; 3];
    let mut out = vec![0.0];
    loop {
        if out.len() > max_steps {
            return Err(Error::Capacity(format!(
                "Bessel walk did not reach 1 within {max_steps} steps"
            )));
        }
        for c in &mut p {
            *c += sd * rng.sample::<f64, _>(StandardNormal);
        }
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if r >= 1.0 {
            out.push(1.0);
            return Ok(out);
        }
        out.push(r);
    }
}

/// `P(T ≤ t)` for the first passage of a three-dimensional Bessel process
/// from 0 to 1: `1 + 2 Σ_{k≥1} (-1)^k exp(-k²π²t/2)`, with the dual series
/// used for small `t`.
pub fn bessel3_hitting_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t < 0.25 {
        // Dual form from the Laplace transform √(2λ)/sinh√(2λ):
        // (4/√(2πt)) Σ_{k≥0} exp(-(2k+1)²/(2t)).
        let mut acc = 0.0;
        for k in 0..50 {
            let a = (2 * k + 1) as f64;
            let term = (-a * a / (2.0 * t)).exp();
            acc += term;
            if term < 1e-18 * acc {
                break;
            }
        }
        return 4.0 * acc / (2.0 * std::f64::consts::PI * t).sqrt();
    }
    let mut acc = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = 2.0 * (-kf * kf * std::f64::consts::PI.powi(2) * t / 2.0).exp();
        acc += if k % 2 == 1 { -term } else { term };
        if term < 1e-18 {
            break;
        }
    }
    acc
}

/// Brownian-bridge refinement: inserts `factor - 1` points in every step,
/// conditionally on the existing samples.
pub fn refine_bridge<R: Rng + ?Sized>(
    path: &PathGrid,
    factor: usize,
    rng: &mut R,
) -> Result<PathGrid> {
    if factor == 0 {
        return domain("refinement factor must be at least 1");
    }
    let fine = path.dt / factor as f64;
    let mut values = Vec::with_capacity((path.len() - 1) * factor + 1);
    values.push(path.values[0]);
    for w in path.values.windows(2) {
        let (mut x, b) = (w[0], w[1]);
        for i in 0..factor - 1 {
            let left = (factor - i) as f64;
            let mean = x + (b - x) / left;
            let var = fine * (left - 1.0) / left;
            x = mean + var.sqrt() * rng.sample::<f64, _>(StandardNormal);
            values.push(x);
        }
        values.push(b);
    }
    let mut g = PathGrid::new(fine, values, path.origin_index * factor)?;
    g.seed = path.seed;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn two_sided_increments() {
        let dt = 1e-3;
        let w = simulate_two_sided_bm(50.0, dt, &mut stream(3, "bm", 0)).unwrap();
        assert_eq!(w.values[w.origin_index], 0.0);
        let incs: Vec<f64> = w.values.windows(2).map(|p| p[1] - p[0]).collect();
        let n = incs.len() as f64;
        let var = incs.iter().map(|x| x * x).sum::<f64>() / n;
        // Sample variance of n Gaussians has sd dt·√(2/n).
        assert!((var - dt).abs() < 3.0 * dt * (2.0 / n).sqrt(), "{var}");
    }

    #[test]
    fn straddling_excursion_shape() {
        let mut rng = stream(3, "bm", 1);
        let y = simulate_straddling_excursion(1e-4, WalkOptions::default(), &mut rng).unwrap();
        assert_eq!(y.values[0], 0.0);
        assert_eq!(*y.values.last().unwrap(), 0.0);
        assert!(y.values[1..y.len() - 1].iter().all(|&v| v > 0.0));
        assert_eq!(y.values[y.origin_index], 1.0);
        assert!(y.max() <= 1.0 + CEILING_FACTOR * 1e-2 + 1e-12);
    }

    #[test]
    fn fixed_horizon_may_fail_to_cross() {
        let g = PathGrid::new(1e-3, vec![0.5, 0.0, 0.2], 1).unwrap();
        assert!(straddling_excursion(&g, -1.0).is_err());
    }

    #[test]
    fn conditioned_excursion_shape() {
        let mut rng = stream(3, "bm", 2);
        for _ in 0..5 {
            let x = conditioned_excursion(1e-4, &mut rng).unwrap();
            assert!(x.max() >= 1.0);
            assert_eq!(x.values[0], 0.0);
            assert_eq!(*x.values.last().unwrap(), 0.0);
            assert!(x.values[1..x.len() - 1].iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn bessel_cdf_series_agree_and_mean() {
        // Both series at the switch point.
        let t = 0.25;
        let mut long = 1.0;
        for k in 1..200 {
            let kf = k as f64;
            let term = 2.0 * (-kf * kf * std::f64::consts::PI.powi(2) * t / 2.0).exp();
            long += if k % 2 == 1 { -term } else { term };
        }
        assert!((bessel3_hitting_cdf(t - 1e-12) - long).abs() < 1e-9);
        // Mean first passage time 1/3.
        let h = 1e-4;
        let mean: f64 = (0..100_000)
            .map(|i| (1.0 - bessel3_hitting_cdf((i as f64 + 0.5) * h)) * h)
            .sum();
        assert!((mean - 1.0 / 3.0).abs() < 1e-6, "{mean}");
    }

    #[test]
    fn refinement_keeps_samples() {
        let mut rng = stream(3, "bm", 3);
        let w = simulate_two_sided_bm(1.0, 1e-2, &mut rng).unwrap();
        let f = refine_bridge(&w, 4, &mut rng).unwrap();
        assert_eq!(f.len(), (w.len() - 1) * 4 + 1);
        assert_eq!(f.origin_index, w.origin_index * 4);
        for (k, v) in w.values.iter().enumerate() {
            assert_eq!(f.values[4 * k], *v);
        }
        let incs: Vec<f64> = f.values.windows(2).map(|p| p[1] - p[0]).collect();
        let var = incs.iter().map(|x| x * x).sum::<f64>() / incs.len() as f64;
        assert!((var / f.dt - 1.0).abs() < 0.15, "{}", var / f.dt);
    }
}
