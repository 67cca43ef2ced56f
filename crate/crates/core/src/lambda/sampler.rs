//! Merger-size sampling for the Gillespie loop.

use super::{gamma_rate, lambda_rate, LambdaKind, LambdaModel};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

/// One row `{γ_{n,k}}_k` with its alias table.
pub struct RateRow {
    pub gamma: Vec<f64>,
    alias: WeightedAliasIndex<f64>,
}

/// Lazily filled, size-bounded cache of rate rows, safe to share between
/// threads. Eviction is first-in first-out.
pub struct RateCache {
    model: LambdaModel,
    capacity: usize,
    inner: Mutex<(HashMap<u64, Arc<RateRow>>, VecDeque<u64>)>,
}

impl RateCache {
    pub fn new(model: LambdaModel, capacity: usize) -> Self {
        RateCache {
            model,
            capacity: capacity.max(1),
            inner: Mutex::new((HashMap::new(), VecDeque::new())),
        }
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, n: u64) -> Result<Arc<RateRow>> {
        if let Some(r) = self.inner.lock().expect("cache lock").0.get(&n) {
            return Ok(r.clone());
        }
        // Build outside the lock; a concurrent duplicate build is harmless.
        let mut gamma = vec![0.0; n as usize + 1];
        for k in 2..=n {
            gamma[k as usize] = gamma_rate(n, k, &self.model)?;
        }
        let alias = WeightedAliasIndex::new(gamma[2..].to_vec())
            .map_err(|e| Error::Numeric(format!("alias table for n={n}: {e}")))?;
        let row = Arc::new(RateRow { gamma, alias });
        let mut guard = self.inner.lock().expect("cache lock");
        let (map, order) = &mut *guard;
        if !map.contains_key(&n) {
            while map.len() >= self.capacity {
                match order.pop_front() {
                    Some(old) => {
                        map.remove(&old);
                    }
                    None => break,
                }
            }
            map.insert(n, row.clone());
            order.push_back(n);
        }
        Ok(row)
    }
}

/// Draws holding times and merger sizes for block counts up to `n_max`.
pub struct MergerSampler {
    model: LambdaModel,
    /// `totals[b]` = total merger rate with `b` blocks.
    totals: Vec<f64>,
    /// `gamma2[b]` = `γ_{b,2}`, the first term of the Beta inversion.
    gamma2: Vec<f64>,
    cache: Option<RateCache>,
}

impl MergerSampler {
    pub fn new(model: &LambdaModel, n_max: u64, cache_rows: usize) -> Result<Self> {
        let n = n_max as usize;
        let mut totals = vec![0.0; n + 1];
        let mut gamma2 = vec![0.0; n + 1];
        let kingman = model.is_kingman();
        for b in 2..=n {
            let lam2 = if kingman {
                1.0
            } else {
                lambda_rate(b as u64, 2, model)?
            };
            let bf = b as f64;
            gamma2[b] = bf * (bf - 1.0) / 2.0 * lam2;
            // g(b) = g(b-1) + (b-1) λ_{b,2}
            totals[b] = totals[b - 1] + (bf - 1.0) * lam2;
        }
        let cache = match model.kind {
            LambdaKind::Tabulated { .. } => Some(RateCache::new(model.clone(), cache_rows)),
            _ => None,
        };
        Ok(MergerSampler {
            model: model.clone(),
            totals,
            gamma2,
            cache,
        })
    }

    pub fn n_max(&self) -> u64 {
        self.totals.len() as u64 - 1
    }

    pub fn total(&self, b: u64) -> f64 {
        self.totals[b as usize]
    }

    /// Draws `k` with probability `γ_{b,k} / total(b)`.
    pub fn sample_k<R: Rng + ?Sized>(&self, b: u64, rng: &mut R) -> Result<u64> {
        match &self.model.kind {
            LambdaKind::KingmanAtom => Ok(2),
            LambdaKind::Beta { alpha } => Ok(self.sample_beta(b, *alpha, rng)),
            LambdaKind::Tabulated { .. } => {
                let row = self.cache.as_ref().expect("tabulated cache").row(b)?;
                Ok(row.alias.sample(rng) as u64 + 2)
            }
        }
    }

    /// Sequential inversion using
    /// `γ_{b,k+1}/γ_{b,k} = (b-k)/(k+1) · (k-α)/(b-k-1+α)`; cost `O(k)`.
    fn sample_beta<R: Rng + ?Sized>(&self, b: u64, alpha: f64, rng: &mut R) -> u64 {
        let target = rng.random::<f64>() * self.totals[b as usize];
        let bf = b as f64;
        let mut g = self.gamma2[b as usize];
        let mut acc = g;
        let mut k = 2u64;
        while acc < target && k < b {
            let kf = k as f64;
            g *= (bf - kf) / (kf + 1.0) * (kf - alpha) / (bf - kf - 1.0 + alpha);
            acc += g;
            k += 1;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn beta_triple_frequency_small() {
        let m = LambdaModel::beta(1.5).unwrap();
        let s = MergerSampler::new(&m, 3, 16).unwrap();
        assert!((s.total(3) - 2.5).abs() < 1e-12);
        let mut rng = stream(1, "t", 0);
        let reps = 20_000;
        let triples = (0..reps)
            .filter(|_| s.sample_k(3, &mut rng).unwrap() == 3)
            .count();
        let f = triples as f64 / reps as f64;
        assert!((f - 0.1).abs() < 0.01, "{f}");
    }

    #[test]
    fn cache_is_bounded() {
        let beta = LambdaModel::beta(1.5).unwrap();
        let values: Vec<f64> = (1..=200)
            .map(|i| beta.density(i as f64 / 200.0).unwrap())
            .collect();
        let tab = LambdaModel::tabulated(values, 1.5, beta.a_lambda).unwrap();
        let cache = RateCache::new(tab, 3);
        for n in 2..10 {
            cache.row(n).unwrap();
        }
        assert_eq!(cache.len(), 3);
    }
}
