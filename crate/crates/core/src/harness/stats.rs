//! Empirical statistics used by the verification suites.

use crate::error::{domain, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn sorted(a: &[f64]) -> Result<Vec<f64>> {
    if a.is_empty() {
        return domain("empty sample");
    }
    if a.iter().any(|x| x.is_nan()) {
        return domain("sample contains NaN");
    }
    let mut v = a.to_vec();
    v.sort_by(|x, y| x.total_cmp(y));
    Ok(v)
}

/// `sup_x |F_a(x) - F_b(x)|` over the two empirical CDFs; ties handled by
/// advancing both samples past each distinct value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// `sup_x |F_n(x) - F(x)|` for a continuous CDF `F`.
pub fn ks_one_sample(a: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let a = sorted(a)?;
    let n = a.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in a.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d)
}

/// Asymptotic Kolmogorov p-value for a statistic `d` with effective size `n`.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        p += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// `∫ |F_a - F_b|` between the empirical distributions.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> Result<f64> {
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut xs: Vec<f64> = a.iter().chain(&b).copied().collect();
    xs.sort_by(|x, y| x.total_cmp(y));
    let (mut i, mut j, mut w) = (0usize, 0usize, 0.0);
    for k in 0..xs.len() - 1 {
        while i < a.len() && a[i] <= xs[k] {
            i += 1;
        }
        while j < b.len() && b[j] <= xs[k] {
            j += 1;
        }
        w += (i as f64 / na - j as f64 / nb).abs() * (xs[k + 1] - xs[k]);
    }
    Ok(w)
}

/// Total variation `½ Σ |p_k - q_k|` between two probability vectors,
/// padding the shorter with zeros.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    0.5 * (0..n)
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Pearson goodness of fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Goodness of fit of nonnegative integer counts to Poisson(`mean`). Cells
/// are `{0}, {1}, …` with the upper tail lumped so that every expected cell
/// count is at least 5.
pub fn chi_square_poisson(counts: &[u64], mean: f64) -> Result<ChiSquare> {
    if counts.is_empty() || !(mean > 0.0) {
        return domain("need counts and a positive mean");
    }
    let n = counts.len() as f64;
    let mut probs = Vec::new();
    let mut p = (-mean).exp();
    let mut rest = 1.0;
    let mut k = 0u64;
    // Open cells while both this cell and the remaining tail expect ≥ 5.
    while n * p >= 5.0 && n * (rest - p) >= 5.0 {
        probs.push(p);
        rest -= p;
        k += 1;
        p *= mean / k as f64;
    }
    probs.push(rest.max(0.0));
    let cells = probs.len();
    if cells < 2 {
        return domain("too few observations for a chi-square test");
    }
    let mut observed = vec![0.0; cells];
    for &c in counts {
        observed[(c as usize).min(cells - 1)] += 1.0;
    }
    let statistic: f64 = observed
        .iter()
        .zip(&probs)
        .map(|(o, p)| (o - n * p).powi(2) / (n * p))
        .sum();
    let df = cells - 1;
    let chi = ChiSquared::new(df as f64).map_err(|e| crate::Error::Numeric(e.to_string()))?;
    Ok(ChiSquare {
        statistic,
        df,
        p_value: 1.0 - chi.cdf(statistic),
    })
}

pub fn mean(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() / a.len() as f64
}

pub fn median(a: &[f64]) -> Result<f64> {
    let v = sorted(a)?;
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn trivial_values() {
        let a = [0.3, 0.1, 0.2, 0.2];
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        assert_eq!(wasserstein1(&[0.0], &[1.0]).unwrap(), 1.0);
        assert!(ks_two_sample(&[], &a).is_err());
        assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap(), 1.0);
        assert_eq!(total_variation(&[0.5, 0.5], &[1.0]), 0.5);
    }

    #[test]
    fn ks_two_sample_with_ties() {
        // F_a jumps to 1/2 at 1 and F_b to 1/4 there.
        let a = [1.0, 1.0, 2.0, 2.0];
        let b = [1.0, 2.0, 2.0, 2.0];
        assert!((ks_two_sample(&a, &b).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ks_one_sample_exponential_critical_value() {
        let n = 400;
        let mut fails = 0;
        for rep in 0..200 {
            let mut rng = stream(11, "ks", rep);
            let x: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let d = ks_one_sample(&x, |t| 1.0 - (-t).exp()).unwrap();
            if d >= 1.36 / (n as f64).sqrt() {
                fails += 1;
            }
        }
        // About 5% of the trials exceed the 95% critical value.
        assert!(fails <= 20, "{fails}");
    }

    #[test]
    fn kolmogorov_p_value_at_critical_point() {
        let n: f64 = 1e6;
        assert!((ks_p_value(1.3581 / n.sqrt(), n) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn wasserstein_shift() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        assert!((wasserstein1(&a, &b).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chi_square_accepts_poisson_and_rejects_shift() {
        use rand_distr::{Distribution, Poisson};
        let mut rng = stream(2, "chi", 0);
        let good: Vec<u64> = (0..5000)
            .map(|_| Poisson::new(2.0).unwrap().sample(&mut rng) as u64)
            .collect();
        let bad: Vec<u64> = (0..5000)
            .map(|_| Poisson::new(2.3).unwrap().sample(&mut rng) as u64)
            .collect();
        assert!(chi_square_poisson(&good, 2.0).unwrap().p_value > 0.001);
        assert!(chi_square_poisson(&bad, 2.0).unwrap().p_value < 1e-6);
    }
}
