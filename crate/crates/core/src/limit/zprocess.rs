//! The limit ball-count process `Z` on `[0, 1)`.
//!
//! In the time `t = -log(1-r)` the process `Y_t = Z(1 - e^{-t})` is a
//! homogeneous chain with `rate(i → i+j) = A (i+j) c_j`. Splitting
//! `(i+j) c_j = i c_j + j c_j` writes the row as a mixture of two fixed
//! laws, so no per-state tables are needed.

use super::offspring::{tail_weight, Bias, OffspringDist};
use crate::error::{domain, Result};
use crate::lambda::LambdaModel;
use crate::path::JumpPath;
use crate::special::ln_gamma;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Table size used for the jump laws of [`ZSimulator`].
pub const DEFAULT_K_TRUNC: u64 = 4096;

/// One simulated path, with `capped` set if the state reached the cap and
/// the path was frozen there.
#[derive(Debug, Clone)]
pub struct ZSample {
    pub path: JumpPath,
    pub capped: bool,
}

/// Simulator for `Z` with parameters `(α, A)`.
#[derive(Debug, Clone)]
pub struct ZSimulator {
    pub alpha: f64,
    pub a_lambda: f64,
    /// `Σ_j c_j` and `Σ_j j c_j`; total rate in state `i` is `A (i C0 + C1)`.
    c0: f64,
    c1: f64,
    plain: OffspringDist,
    jump: OffspringDist,
}

impl ZSimulator {
    pub fn new(alpha: f64, a_lambda: f64) -> Result<Self> {
        Self::with_truncation(alpha, a_lambda, DEFAULT_K_TRUNC)
    }

    pub fn from_model(model: &LambdaModel) -> Result<Self> {
        Self::new(model.alpha, model.a_lambda)
    }

    pub fn with_truncation(alpha: f64, a_lambda: f64, k_trunc: u64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) || !(a_lambda > 0.0) {
            return domain("Z needs α in (1,2] and A > 0");
        }
        let (c0, c1, a) = if alpha == 2.0 {
            (1.0, 1.0, 1.0)
        } else {
            let s = (ln_gamma(2.0 - alpha)).exp() / alpha;
            (
                s * tail_weight(alpha, Bias::Plain, 1.0),
                s * tail_weight(alpha, Bias::Jump, 1.0),
                a_lambda,
            )
        };
        Ok(ZSimulator {
            alpha,
            a_lambda: a,
            c0,
            c1,
            plain: OffspringDist::new(alpha, Bias::Plain, k_trunc, 1.0)?,
            jump: OffspringDist::new(alpha, Bias::Jump, k_trunc, 1.0)?,
        })
    }

    /// Total jump rate of `Y` in state `i`.
    pub fn total_rate(&self, i: u64) -> f64 {
        self.a_lambda * (i as f64 * self.c0 + self.c1)
    }

    fn draw_jump<R: Rng + ?Sized>(&self, i: u64, rng: &mut R) -> u64 {
        if self.alpha == 2.0 {
            return 1;
        }
        let w_plain = i as f64 * self.c0;
        if rng.random::<f64>() * (w_plain + self.c1) < w_plain {
            self.plain.sample(rng)
        } else {
            self.jump.sample(rng)
        }
    }

    /// Simulates `Z` on `[0, r_max]` through the homogeneous chain `Y`.
    /// States at or above `cap` are absorbing.
    pub fn simulate<R: Rng + ?Sized>(&self, r_max: f64, cap: u64, rng: &mut R) -> Result<ZSample> {
        if !(0.0..1.0).contains(&r_max) {
            return domain(format!("r_max must lie in [0,1), got {r_max}"));
        }
        let t_max = -(-r_max).ln_1p();
        let mut path = JumpPath::constant(0.0, 1.0);
        let (mut i, mut t) = (1u64, 0.0f64);
        while i < cap {
            let e: f64 = Exp1.sample(rng);
            t += e / self.total_rate(i);
            if t > t_max {
                return Ok(ZSample {
                    path,
                    capped: false,
                });
            }
            i = i.saturating_add(self.draw_jump(i, rng)).min(cap);
            path.push(-(-t).exp_m1(), i as f64);
        }
        Ok(ZSample { path, capped: true })
    }

    /// Same law simulated directly in `r` by thinning the inhomogeneous
    /// rate `A (i C0 + C1) / (1-r)` against its value at `r_max`.
    pub fn simulate_thinning<R: Rng + ?Sized>(
        &self,
        r_max: f64,
        cap: u64,
        rng: &mut R,
    ) -> Result<ZSample> {
        if !(0.0..1.0).contains(&r_max) {
            return domain(format!("r_max must lie in [0,1), got {r_max}"));
        }
        let mut path = JumpPath::constant(0.0, 1.0);
        let (mut i, mut r) = (1u64, 0.0f64);
        while i < cap {
            let bound = self.total_rate(i) / (1.0 - r_max);
            let e: f64 = Exp1.sample(rng);
            r += e / bound;
            if r > r_max {
                return Ok(ZSample {
                    path,
                    capped: false,
                });
            }
            if rng.random::<f64>() * (1.0 - r) < 1.0 - r_max {
                i = i.saturating_add(self.draw_jump(i, rng)).min(cap);
                path.push(r, i as f64);
            }
        }
        Ok(ZSample { path, capped: true })
    }
}

/// Convenience wrapper: one path of `Z` up to `r_max` without a cap.
pub fn simulate_z<R: Rng + ?Sized>(
    alpha: f64,
    a_lambda: f64,
    r_max: f64,
    rng: &mut R,
) -> Result<JumpPath> {
    Ok(ZSimulator::new(alpha, a_lambda)?
        .simulate(r_max, u64::MAX, rng)?
        .path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{limit_jump_rate, LambdaModel};
    use crate::rng::stream;

    #[test]
    fn total_rate_matches_generator_sum() {
        let m = LambdaModel::beta(1.5).unwrap();
        let sim = ZSimulator::from_model(&m).unwrap();
        for i in [1u64, 3, 10] {
            let partial: f64 = (1..200_000u64)
                .map(|j| limit_jump_rate(i, j, 0.0, &m).unwrap())
                .sum();
            // Remaining terms ~ j^{-α}: bound by the Jump/Plain closed tails.
            let s = (ln_gamma(0.5)).exp() / 1.5;
            let rest = m.a_lambda
                * s
                * (i as f64 * tail_weight(1.5, Bias::Plain, 200_000.0)
                    + tail_weight(1.5, Bias::Jump, 200_000.0));
            assert!(
                (partial + rest - sim.total_rate(i)).abs() < 1e-9 * sim.total_rate(i),
                "i={i}"
            );
        }
    }

    #[test]
    fn kingman_unit_jumps_and_first_holding() {
        let sim = ZSimulator::new(2.0, 1.0).unwrap();
        let mut rng = stream(2, "zk", 0);
        let mut hold = 0.0;
        let reps = 20_000;
        for _ in 0..reps {
            let p = sim.simulate(0.999, u64::MAX, &mut rng).unwrap().path;
            assert!(p.jumps().all(|(_, d)| d == 1.0));
            // First jump time in t-scale.
            hold += p
                .times
                .get(1)
                .map_or(-(-0.999f64).ln_1p(), |&r| -(-r).ln_1p());
        }
        // Exp(2) truncated at t_max ≈ 6.9 has mean ≈ 0.5.
        assert!((hold / reps as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn cap_freezes_path() {
        let sim = ZSimulator::new(1.2, 1.0).unwrap();
        let s = sim.simulate(0.99, 5, &mut stream(1, "cap", 0)).unwrap();
        assert!(s.path.last_value() <= 5.0);
    }

    #[test]
    fn thinning_agrees_with_time_change() {
        let sim = ZSimulator::new(1.5, 1.0).unwrap();
        let reps = 40_000;
        let mut a = [0usize; 4];
        let mut b = [0usize; 4];
        let mut rng = stream(9, "zt", 0);
        for _ in 0..reps {
            let x = sim
                .simulate(0.5, 1 << 20, &mut rng)
                .unwrap()
                .path
                .last_value() as usize;
            let y = sim
                .simulate_thinning(0.5, 1 << 20, &mut rng)
                .unwrap()
                .path
                .last_value() as usize;
            a[x.min(4) - 1] += 1;
            b[y.min(4) - 1] += 1;
        }
        for k in 0..4 {
            let (pa, pb) = (a[k] as f64 / reps as f64, b[k] as f64 / reps as f64);
            let sd = (2.0 * pa * (1.0 - pa) / reps as f64).sqrt();
            assert!((pa - pb).abs() < 4.5 * sd, "state {}: {pa} vs {pb}", k + 1);
        }
    }
}
