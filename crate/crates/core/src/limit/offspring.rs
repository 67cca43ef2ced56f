//! Jump-size laws of the limit process.
//!
//! With `w_j = Γ(j+1-α)/Γ(j+2)` the generator reads
//! `rate(i → i+j) = A (i+j) c_j / (1-r)`, `c_j = Γ(2-α) w_j / α`. Three laws
//! on `j ≥ 1` appear: weights `w_j` (offspring, `p_{j+1}`), `j w_j`, and
//! `(j+1) w_j` (size-biased, `q_{j+1}`). Their tails have closed forms from
//! `Σ_{k≥m} Γ(k+a)/Γ(k+b) = Γ(m+a) / ((b-a-1) Γ(m+b-1))`:
//!
//! * `Σ_{k≥m} w_k = Γ(m+1-α) / (α Γ(m+1))`
//! * `Σ_{k≥m} (k+1) w_k = Γ(m+1-α) / ((α-1) Γ(m))`
//! * `Σ_{k≥m} k w_k` is the difference of the two.

use crate::error::{domain, Error, Result};
use crate::special::ln_gamma;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

/// Which multiple of `w_j` a law is proportional to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bias {
    /// `w_j`
    Plain,
    /// `j w_j`
    Jump,
    /// `(j+1) w_j`
    Offspring,
}

/// Unnormalized tail `Σ_{k≥m} bias(k) w_k`, for real `m ≥ 1`.
pub fn tail_weight(alpha: f64, bias: Bias, m: f64) -> f64 {
    let t0 = (ln_gamma(m + 1.0 - alpha) - ln_gamma(m + 1.0)).exp() / alpha;
    let q = (ln_gamma(m + 1.0 - alpha) - ln_gamma(m)).exp() / (alpha - 1.0);
    match bias {
        Bias::Plain => t0,
        Bias::Offspring => q,
        Bias::Jump => q - t0,
    }
}

fn weight(alpha: f64, bias: Bias, j: u64) -> f64 {
    let jf = j as f64;
    let w = (ln_gamma(jf + 1.0 - alpha) - ln_gamma(jf + 2.0)).exp();
    match bias {
        Bias::Plain => w,
        Bias::Jump => jf * w,
        Bias::Offspring => (jf + 1.0) * w,
    }
}

/// A law on jump sizes `j ≥ 1`: exact table up to `k_trunc`, exact tail
/// inversion beyond.
#[derive(Debug, Clone)]
pub struct OffspringDist {
    pub alpha: f64,
    pub bias: Bias,
    /// `pmf[j-1] = P(J = j)` for `j ≤ k_trunc`.
    pub pmf: Vec<f64>,
    pub tail_mass: f64,
    /// Sum of the unnormalized weights.
    pub normalizer: f64,
    alias: Option<WeightedAliasIndex<f64>>,
}

/// Tail mass accepted by [`offspring_pmf`] and [`immigrant_pmf`].
pub const MAX_TAIL: f64 = 1e-9;

impl OffspringDist {
    /// Builds the law; fails when the mass beyond `k_trunc` exceeds
    /// `max_tail`, reporting the truncation that would be needed.
    pub fn new(alpha: f64, bias: Bias, k_trunc: u64, max_tail: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return domain(format!("jump laws need α in (1,2], got {alpha}"));
        }
        if k_trunc < 1 {
            return domain("k_trunc must be at least 1");
        }
        if alpha == 2.0 {
            return Ok(OffspringDist {
                alpha,
                bias,
                pmf: vec![1.0],
                tail_mass: 0.0,
                normalizer: 1.0,
                alias: None,
            });
        }
        let normalizer = tail_weight(alpha, bias, 1.0);
        let tail = tail_weight(alpha, bias, k_trunc as f64 + 1.0) / normalizer;
        if tail > max_tail {
            // Tails decay like m^{-α} (plain) or m^{1-α} (biased).
            let exponent = if bias == Bias::Plain {
                alpha
            } else {
                alpha - 1.0
            };
            let need = (k_trunc as f64 + 1.0) * (tail / max_tail).powf(1.0 / exponent);
            return domain(format!(
                "tail mass {tail:e} beyond k_trunc={k_trunc} exceeds {max_tail:e}; need k_trunc ≈ {need:.3e}"
            ));
        }
        let pmf: Vec<f64> = (1..=k_trunc)
            .map(|j| weight(alpha, bias, j) / normalizer)
            .collect();
        let alias = WeightedAliasIndex::new(pmf.clone())
            .map_err(|e| Error::Numeric(format!("alias table: {e}")))?;
        Ok(OffspringDist {
            alpha,
            bias,
            pmf,
            tail_mass: tail,
            normalizer,
            alias: Some(alias),
        })
    }

    pub fn k_trunc(&self) -> u64 {
        self.pmf.len() as u64
    }

    pub fn prob(&self, j: u64) -> f64 {
        if j == 0 {
            return 0.0;
        }
        if self.alpha == 2.0 {
            return if j == 1 { 1.0 } else { 0.0 };
        }
        weight(self.alpha, self.bias, j) / self.normalizer
    }

    /// Draws a jump size.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let Some(alias) = &self.alias else { return 1 };
        if self.tail_mass > 0.0 && rng.random::<f64>() < self.tail_mass {
            return self.sample_tail(rng.random::<f64>());
        }
        alias.sample(rng) as u64 + 1
    }

    /// Inverts `P(J ≥ m | J > K) = T(m)/T(K+1)` at `1 - u`.
    fn sample_tail(&self, u: f64) -> u64 {
        let (a, k0) = (self.alpha, self.k_trunc() as f64 + 1.0);
        let t = |m: f64| tail_weight(a, self.bias, m);
        let target = (1.0 - u).max(f64::MIN_POSITIVE) * t(k0);
        // Largest m ≥ k0 with T(m) ≥ target.
        let exponent = if self.bias == Bias::Plain { a } else { a - 1.0 };
        let scale = if self.bias == Bias::Plain { a } else { a - 1.0 };
        let guess = (target * scale).powf(-1.0 / exponent).floor().max(k0);
        let mut lo = k0;
        let mut hi = guess.max(k0 + 1.0);
        if t(hi) >= target {
            lo = hi;
            hi *= 2.0;
            while t(hi) >= target {
                lo = hi;
                hi *= 2.0;
            }
        }
        while hi - lo > 1.0 {
            let mid = (0.5 * (lo + hi)).floor();
            if mid <= lo || mid >= hi {
                break;
            }
            if t(mid) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo >= u64::MAX as f64 / 2.0 {
            u64::MAX / 2
        } else {
            lo as u64
        }
    }
}

/// Offspring law: jump `j` with probability `p_{j+1} ∝ Γ(j+1-α)/Γ(j+2)`.
pub fn offspring_pmf(alpha: f64, k_trunc: u64) -> Result<OffspringDist> {
    OffspringDist::new(alpha, Bias::Plain, k_trunc, MAX_TAIL)
}

/// Size-biased law `q_{j+1} ∝ (j+1) p_{j+1}`. Its tail decays like
/// `j^{1-α}`, so for `α < 2` the `1e-9` tail requirement needs enormous
/// tables; use [`OffspringDist::new`] with a looser bound, the tail sampler
/// being exact either way.
pub fn immigrant_pmf(alpha: f64, k_trunc: u64) -> Result<OffspringDist> {
    OffspringDist::new(alpha, Bias::Offspring, k_trunc, MAX_TAIL)
}

/// Branching description of the limit in the time `-log(1-r)`: every
/// particle branches at rate `β` into `J+1` particles with `J ~ p`, except
/// the ancestral line, which branches at rate `β m` with the size-biased law
/// `q` (`m` is the mean of `p`). Returns `(β, m)` for `α < 2`.
pub fn branching_parameters(alpha: f64, a_lambda: f64) -> Result<(f64, f64)> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return domain(format!("branching form needs α in (1,2), got {alpha}"));
    }
    let s0 = ln_gamma(2.0 - alpha).exp() / alpha;
    Ok((a_lambda * s0 * s0, alpha / (alpha - 1.0)))
}
