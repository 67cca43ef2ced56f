//! Independent checks of closed forms and of the samplers against values
//! computed here from first principles.

use lambda_coalescent::excursion::{bessel3_hitting_cdf, bessel3_to_one};
use lambda_coalescent::harness::stats::{ks_one_sample, ks_two_sample};
use lambda_coalescent::lambda::{
    gamma_rate, generator_coefficient, lambda_rate, limit_jump_rate, total_rate, LambdaModel,
};
use lambda_coalescent::limit::{marginal_z_oracle, x_marginal_cdf, x_marginal_mean, ZSimulator};
use lambda_coalescent::rng::stream;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Gamma};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::gamma;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn beta_rates_match_beta_function_ratio() {
    for &alpha in &[1.1, 1.5, 1.9] {
        let model = LambdaModel::beta(alpha).unwrap();
        for n in [2u64, 3, 7, 40, 100] {
            for k in 2..=n {
                let kf = k as f64;
                let nf = n as f64;
                let want =
                    (ln_beta(kf - alpha, nf - kf + alpha) - ln_beta(2.0 - alpha, alpha)).exp();
                let got = lambda_rate(n, k, &model).unwrap();
                assert!(
                    rel(got, want) < 1e-10,
                    "α={alpha} n={n} k={k}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn total_rate_is_sum_of_gamma_rates() {
    let model = LambdaModel::beta(1.5).unwrap();
    for n in [2u64, 5, 33, 250] {
        let sum: f64 = (2..=n).map(|k| gamma_rate(n, k, &model).unwrap()).sum();
        assert!(rel(total_rate(n, &model).unwrap(), sum) < 1e-10);
    }
    let kingman = LambdaModel::kingman();
    for n in [2u64, 10, 1000] {
        let pairs = (n * (n - 1) / 2) as f64;
        assert!(rel(total_rate(n, &kingman).unwrap(), pairs) < 1e-12);
        assert_eq!(lambda_rate(n, 2, &kingman).unwrap(), 1.0);
    }
}

#[test]
fn limit_jump_rate_worked_values() {
    let model = LambdaModel::beta(1.5).unwrap();
    let a = 1.0 / (ln_beta(0.5, 1.5)).exp();
    assert!(rel(model.a_lambda, a) < 1e-12);
    // 2 · A Γ(1/2) Γ(1/2) / (1.5 · Γ(3))
    let want = 2.0 * a * gamma(0.5) * gamma(0.5) / (1.5 * 2.0);
    assert!(rel(want, 4.0 / 3.0) < 1e-12);
    assert!(rel(limit_jump_rate(1, 1, 0.0, &model).unwrap(), 4.0 / 3.0) < 1e-12);
    assert!(rel(limit_jump_rate(1, 1, 0.5, &model).unwrap(), 8.0 / 3.0) < 1e-12);

    let kingman = LambdaModel::kingman();
    assert_eq!(limit_jump_rate(1, 1, 0.0, &kingman).unwrap(), 2.0);
    assert_eq!(limit_jump_rate(3, 1, 0.5, &kingman).unwrap(), 8.0);
    assert_eq!(generator_coefficient(2, &kingman).unwrap(), 0.0);
}

#[test]
fn x_marginal_matches_statrs_gamma() {
    for &t in &[0.1, 1.0, 3.0] {
        let g = Gamma::new(2.0, 1.0 / (2.0 * t)).unwrap();
        for i in 0..200 {
            let x = i as f64 * 0.1 * t;
            assert!((x_marginal_cdf(t, x) - g.cdf(x)).abs() < 1e-12);
        }
        assert!((x_marginal_mean(t) - 4.0 * t).abs() < 1e-15);
    }
}

/// For `α = 2`, `Z + 1` run in time `-log(1-r)` is a Yule process from two
/// particles, so `P(Z(r) = k) = k (1-r)² r^{k-1}`.
#[test]
fn kingman_oracle_is_shifted_yule() {
    for &r in &[0.25, 0.5, 0.75] {
        let pmf = marginal_z_oracle(2.0, 1.0, r, 400, 1e-6).unwrap();
        for (i, p) in pmf.pmf.iter().enumerate().take(60) {
            let k = (i + 1) as f64;
            let want = k * (1.0 - r) * (1.0 - r) * r.powf(k - 1.0);
            assert!((p - want).abs() < 1e-7, "r={r} k={k}: {p} vs {want}");
        }
    }
}

#[test]
fn kingman_z_hits_yule_one_probability() {
    let sim = ZSimulator::from_model(&LambdaModel::kingman()).unwrap();
    let reps = 20_000;
    for &r in &[0.25, 0.5] {
        let ones = (0..reps)
            .filter(|&i| {
                let z = sim
                    .simulate(r, u64::MAX, &mut stream(7, "oracle-z", i))
                    .unwrap();
                z.path.value_at(r) == 1.0
            })
            .count() as f64
            / reps as f64;
        let p = (1.0 - r) * (1.0 - r);
        let sd = (p * (1.0 - p) / reps as f64).sqrt();
        assert!((ones - p).abs() < 4.0 * sd, "r={r}: {ones} vs {p}");
    }
}

#[test]
fn bessel_hitting_cdf_limits_and_mean() {
    assert!(bessel3_hitting_cdf(1e-3) < 1e-12);
    assert!((bessel3_hitting_cdf(20.0) - 1.0).abs() < 1e-12);
    // Both series agree where they switch.
    let a = bessel3_hitting_cdf(0.2499999);
    let b = bessel3_hitting_cdf(0.25);
    assert!((a - b).abs() < 1e-6);
    // E T = ∫ (1 - F) = 1/3.
    let h = 1e-4;
    let mean: f64 = (0..100_000)
        .map(|i| 1.0 - bessel3_hitting_cdf((i as f64 + 0.5) * h))
        .sum::<f64>()
        * h;
    assert!((mean - 1.0 / 3.0).abs() < 1e-6, "{mean}");
}

/// Brownian motion from `h` killed at 0, kept when it reaches 1 first, is
/// close in law to the Bessel-3 passage from 0 to 1 when `h` is small.
#[test]
fn bessel_walk_matches_rejection_and_exact_law() {
    let dt: f64 = 1e-5;
    let sd = dt.sqrt();
    let h = 0.02;
    let mut rng = stream(11, "oracle-bes-reject", 0);
    let mut rejected = Vec::new();
    while rejected.len() < 500 {
        let mut x = h;
        let mut steps = 0usize;
        while x > 0.0 && x < 1.0 {
            x += sd * rng.sample::<f64, _>(StandardNormal);
            steps += 1;
        }
        if x >= 1.0 {
            rejected.push(steps as f64 * dt);
        }
    }
    let walked: Vec<f64> = (0..500u64)
        .map(|i| {
            let v = bessel3_to_one(dt, 10_000_000, &mut stream(11, "oracle-bes-walk", i)).unwrap();
            (v.len() - 1) as f64 * dt
        })
        .collect();
    let d_exact = ks_one_sample(&walked, bessel3_hitting_cdf).unwrap();
    let d_two = ks_two_sample(&walked, &rejected).unwrap();
    assert!(d_exact < 0.07, "walk vs exact {d_exact}");
    assert!(d_two < 0.09, "walk vs rejection {d_two}");
}

/// Local time at 0 collected before a Brownian motion from 0 first reaches
/// `-η` is exponential with mean `2η` under the occupation-density
/// normalisation. A ceiling above 0 changes only the excursions above 0.
#[test]
fn below_level_excursions_arrive_at_rate_one_over_two_eta() {
    let dt: f64 = 1e-5;
    let sd = dt.sqrt();
    let w = 2.0 * sd;
    let (eta, ceiling, dl) = (1.0, 0.5, 1.0);
    let reps = 400u64;
    let mut beyond = 0usize;
    for i in 0..reps {
        let mut rng = stream(13, "oracle-ito", i);
        let mut x = 0.0f64;
        let mut near = 0usize;
        while x > -eta {
            if x.abs() < w {
                near += 1;
            }
            x += sd * rng.sample::<f64, _>(StandardNormal);
            if x > ceiling {
                x = 2.0 * ceiling - x;
            }
        }
        if near as f64 * dt / (2.0 * w) > dl {
            beyond += 1;
        }
    }
    let p = beyond as f64 / reps as f64;
    let half_rate = (-dl / (2.0 * eta)).exp();
    assert!((p - half_rate).abs() < 0.08, "{p} vs {half_rate}");
    assert!((p - (-dl / eta).exp()).abs() > 0.15, "{p}");
}
