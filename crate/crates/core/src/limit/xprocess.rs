//! The mass process `X` of the limit: compound Poisson with jump rate
//! `2/t` and jump sizes exponential with mean `2t`.

use crate::error::{domain, Result};
use crate::path::JumpPath;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

/// Simulates `X` on `[t0, t1]`. The rate blows up at zero, so the path
/// starts at `t0 > 0` with `X(t0)` drawn from its Gamma(2, 2·t0) marginal.
pub fn simulate_x<R: Rng + ?Sized>(t0: f64, t1: f64, rng: &mut R) -> Result<JumpPath> {
    if !(t0 > 0.0) || !(t1 > t0) {
        return domain(format!("need 0 < t0 < t1, got t0={t0}, t1={t1}"));
    }
    let start = Gamma::new(2.0, 2.0 * t0).expect("valid gamma").sample(rng);
    let mut path = JumpPath::constant(t0, start);
    let mut x = start;
    // Cumulative rate 2 log(t/t0): the next epoch is t·exp(E/2).
    let mut t = t0;
    loop {
        let e: f64 = Exp1.sample(rng);
        t *= (0.5 * e).exp();
        if t > t1 {
            return Ok(path);
        }
        let size: f64 = Exp1.sample(rng);
        x += 2.0 * t * size;
        path.push(t, x);
    }
}

/// `P(X(t) ≤ x)` for the Gamma(2, scale 2t) marginal.
pub fn x_marginal_cdf(t: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let u = x / (2.0 * t);
    1.0 - (-u).exp() * (1.0 + u)
}

/// Mean of `X(t)`.
pub fn x_marginal_mean(t: f64) -> f64 {
    4.0 * t
}
