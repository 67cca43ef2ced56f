//! Excursions below level 1 during a stretch of local time.
//!
//! With local time normalised as an occupation density, excursions of a
//! Brownian motion away from a level form a Poisson process in local time,
//! and those reaching depth `η` below it arrive at rate `1/(2η)`.

use crate::error::{domain, Result};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Itô rate of excursions below a level that reach depth `eta`.
pub fn below_level_intensity(eta: f64) -> f64 {
    1.0 / (2.0 * eta)
}

/// Frequency over `reps` draws of the event that no excursion below level
/// 1 within `ell_gap` units of local time reaches depth `eta`.
pub fn excursion_hausdorff_law<R: Rng + ?Sized>(
    ell_gap: f64,
    eta: f64,
    reps: usize,
    rng: &mut R,
) -> Result<f64> {
    if !(ell_gap >= 0.0) || !(eta > 0.0) || reps == 0 {
        return domain("need ell_gap ≥ 0, eta > 0 and reps ≥ 1");
    }
    let mean = ell_gap * below_level_intensity(eta);
    if mean == 0.0 {
        return Ok(1.0);
    }
    let counts = Poisson::new(mean).map_err(|e| crate::Error::Numeric(e.to_string()))?;
    let hits = (0..reps).filter(|_| counts.sample(rng) == 0.0).count();
    Ok(hits as f64 / reps as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn trivial_limits() {
        let mut rng = stream(1, "hd", 0);
        assert_eq!(
            excursion_hausdorff_law(0.0, 1.0, 10, &mut rng).unwrap(),
            1.0
        );
        assert_eq!(
            excursion_hausdorff_law(1.0, f64::INFINITY, 10, &mut rng).unwrap(),
            1.0
        );
        assert!(excursion_hausdorff_law(1.0, 0.0, 10, &mut rng).is_err());
    }

    #[test]
    fn matches_poisson_zero_probability() {
        let mut rng = stream(1, "hd", 1);
        let p = excursion_hausdorff_law(1.0, 1.0, 40_000, &mut rng).unwrap();
        assert!((p - (-0.5f64).exp()).abs() < 0.01, "{p}");
    }
}
