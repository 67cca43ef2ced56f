//! Time changes driven by the local-time profile of an excursion, and the
//! rescaled excursions near its top.

use super::grid::PathGrid;
use super::local_time::{default_window, window_local_time, LocalTimeProfile};
use crate::error::{domain, Error, Result};
use rand::Rng;

/// `V(t) = ∫_{1-t}^{1} 4 / Z_v dv` by the trapezoid rule on the profile's
/// levels, with interpolated end points.
pub fn time_change_v(profile: &LocalTimeProfile, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("t must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (a, b) = (1.0 - t, 1.0);
    let levels = &profile.levels;
    if levels.is_empty() || levels[0] > a + 1e-12 || *levels.last().expect("nonempty") < b - 1e-12 {
        return domain(format!("profile does not cover [{a}, {b}]"));
    }
    let mut knots = vec![a];
    knots.extend(levels.iter().copied().filter(|&x| x > a && x < b));
    knots.push(b);
    let mut total = 0.0;
    let mut prev = integrand(profile, a)?;
    for w in knots.windows(2) {
        let next = integrand(profile, w[1])?;
        total += 0.5 * (prev + next) * (w[1] - w[0]);
        prev = next;
    }
    Ok(total)
}

fn integrand(profile: &LocalTimeProfile, v: f64) -> Result<f64> {
    let z = profile.at(v);
    if z > 0.0 {
        Ok(4.0 / z)
    } else {
        domain(format!("no local time accumulated at level {v}"))
    }
}

/// `T_ε = max(4 / (ε Z_{1-√ε}), ε^{-1/2})`.
pub fn t_epsilon(profile: &LocalTimeProfile, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("ε must lie in (0,1), got {epsilon}"));
    }
    let z = profile.at(1.0 - epsilon.sqrt());
    if !(z > 0.0) {
        return domain("no local time at level 1 - √ε");
    }
    Ok((4.0 / (epsilon * z)).max(epsilon.powf(-0.5)))
}

/// Rescaled excursions `e_1, …, e_M` of `X_ε(t) = 1 + (X(t/T²) - 1)·T`
/// above 0 that reach 1, and the one selected with probability
/// proportional to its local time at 1.
#[derive(Debug, Clone)]
pub struct ScaledFamily {
    pub t_eps: f64,
    pub excursions: Vec<PathGrid>,
    /// `ℓ̂₁` of each excursion.
    pub local_times: Vec<f64>,
    pub selected: usize,
}

impl ScaledFamily {
    pub fn y_eps(&self) -> &PathGrid {
        &self.excursions[self.selected]
    }
}

pub fn scaled_excursion_family<R: Rng + ?Sized>(
    x: &PathGrid,
    epsilon: f64,
    profile: &LocalTimeProfile,
    rng: &mut R,
) -> Result<ScaledFamily> {
    let t = t_epsilon(profile, epsilon)?;
    let base = 1.0 - 1.0 / t;
    if base < x.min() {
        return domain(format!("level 1 - 1/T = {base} lies below the path"));
    }
    let dt = x.dt * t * t;
    let window = default_window(dt);
    let mut excursions = Vec::new();
    let mut local_times = Vec::new();
    let v = &x.values;
    let mut k = 0;
    while k < v.len() {
        if v[k] <= base {
            k += 1;
            continue;
        }
        let start = k;
        while k < v.len() && v[k] > base {
            k += 1;
        }
        // Samples start..k lie above the base level.
        if v[start..k].iter().any(|&u| u >= 1.0) {
            let mut vals = Vec::with_capacity(k - start + 2);
            vals.push(0.0);
            vals.extend(v[start..k].iter().map(|&u| 1.0 + (u - 1.0) * t));
            vals.push(0.0);
            let ell = window_local_time(&vals, dt, 1.0, window);
            excursions.push(PathGrid::new(dt, vals, 0)?);
            local_times.push(ell);
        }
    }
    if excursions.is_empty() {
        return Err(Error::Domain("no rescaled excursion reaches 1".into()));
    }
    let total: f64 = local_times.iter().sum();
    let mut selected = excursions.len() - 1;
    if total > 0.0 {
        let mut u = rng.random::<f64>() * total;
        for (i, l) in local_times.iter().enumerate() {
            if u < *l {
                selected = i;
                break;
            }
            u -= l;
        }
    } else {
        selected = rng.random_range(0..excursions.len());
    }
    Ok(ScaledFamily {
        t_eps: t,
        excursions,
        local_times,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excursion::local_time::level_grid;

    fn flat(z: f64) -> LocalTimeProfile {
        let levels = level_grid(0.0, 1.0, 100);
        let local_time = vec![z; levels.len()];
        LocalTimeProfile {
            levels,
            local_time,
            window: 0.01,
        }
    }

    #[test]
    fn constant_profile_closed_form() {
        let p = flat(2.5);
        assert_eq!(time_change_v(&p, 0.0).unwrap(), 0.0);
        for t in [0.013, 0.3, 0.77, 1.0] {
            assert!((time_change_v(&p, t).unwrap() - 4.0 * t / 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn v_increases() {
        let levels = level_grid(0.0, 1.0, 50);
        let local_time = levels.iter().map(|x| 1.0 + x * x).collect();
        let p = LocalTimeProfile {
            levels,
            local_time,
            window: 0.01,
        };
        let vs: Vec<f64> = (1..=20)
            .map(|i| time_change_v(&p, i as f64 / 20.0).unwrap())
            .collect();
        assert!(vs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_local_time_is_an_error() {
        let mut p = flat(1.0);
        p.local_time[95] = 0.0;
        assert!(time_change_v(&p, 0.1).is_err());
        assert!(time_change_v(&p, 0.01).is_ok());
    }

    #[test]
    fn t_epsilon_case_split() {
        for (z, eps) in [(0.5, 0.01), (30.0, 0.01), (3.0, 0.1)] {
            let p = flat(z);
            let t = t_epsilon(&p, eps).unwrap();
            if z <= eps.powf(-0.5) {
                assert!((t * eps * z - 4.0).abs() < 1e-12);
            } else {
                assert!(t >= eps.powf(-0.5));
            }
        }
    }
}
