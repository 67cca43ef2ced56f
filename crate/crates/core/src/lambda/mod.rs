//! Λ measures and the rates they induce.
//!
//! `λ_{n,k} = ∫ p^{k-2} (1-p)^{n-k} Λ(dp)` is the rate at which a fixed set of
//! `k` blocks out of `n` merges; `γ_{n,k} = C(n,k) λ_{n,k}` is the rate of
//! some `k`-merger. Everything below is evaluated in log space.

mod sampler;

pub use sampler::{MergerSampler, RateCache};

use crate::error::{domain, numeric, Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{beta_reg, gamma_fn, ln_beta, ln_binomial, ln_gamma};
use serde::{Deserialize, Serialize};

/// Shape of the measure Λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LambdaKind {
    /// Λ = δ₀, the Kingman coalescent.
    KingmanAtom,
    /// Λ = Beta(2-α, α).
    Beta { alpha: f64 },
    /// Density sampled at `p_i = (i+1)/m`, `i = 0..m`. Below the first grid
    /// point the density is replaced by the declared head `A p^{1-α}`.
    Tabulated { values: Vec<f64> },
}

/// A finite measure on `[0,1]` together with its regular-variation data:
/// `f(p) ~ A p^{1-α}` as `p → 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaModel {
    pub kind: LambdaKind,
    pub alpha: f64,
    pub a_lambda: f64,
    pub total_mass: f64,
}

/// Relative quadrature tolerance for tabulated densities. Since every `λ_{n,k}`
/// is at most `Λ[0,1]`, this also bounds the absolute error by `1e-10 Λ[0,1]`.
const TAB_TOL: f64 = 1e-10;

impl LambdaModel {
    pub fn kingman() -> Self {
        LambdaModel {
            kind: LambdaKind::KingmanAtom,
            alpha: 2.0,
            a_lambda: 1.0,
            total_mass: 1.0,
        }
    }

    pub fn beta(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return domain(format!("Beta(2-α, α) requires α in (1,2), got {alpha}"));
        }
        Ok(LambdaModel {
            kind: LambdaKind::Beta { alpha },
            alpha,
            a_lambda: (-ln_beta(2.0 - alpha, alpha)).exp(),
            total_mass: 1.0,
        })
    }

    /// Tabulated density with declared head `(alpha, a_lambda)`.
    pub fn tabulated(values: Vec<f64>, alpha: f64, a_lambda: f64) -> Result<Self> {
        if values.len() < 2 {
            return domain("tabulated density needs at least two grid values");
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return domain("tabulated density values must be finite and nonnegative");
        }
        if !(alpha > 1.0 && alpha < 2.0) || !(a_lambda > 0.0) {
            return domain("tabulated density needs α in (1,2) and A > 0");
        }
        let mut model = LambdaModel {
            kind: LambdaKind::Tabulated { values },
            alpha,
            a_lambda,
            total_mass: 0.0,
        };
        // Λ[0,1] = λ_{2,2}.
        model.total_mass = model.tabulated_integral(0.0, 0.0)?;
        if !(model.total_mass > 0.0) {
            return domain("tabulated density has zero mass");
        }
        Ok(model)
    }

    pub fn is_kingman(&self) -> bool {
        matches!(self.kind, LambdaKind::KingmanAtom)
    }

    /// Density of Λ at `p ∈ (0,1]`; `None` for the atom.
    pub fn density(&self, p: f64) -> Option<f64> {
        match &self.kind {
            LambdaKind::KingmanAtom => None,
            LambdaKind::Beta { alpha } => {
                Some(self.a_lambda * p.powf(1.0 - alpha) * (1.0 - p).powf(alpha - 1.0))
            }
            LambdaKind::Tabulated { values } => Some(self.tabulated_density(values, p)),
        }
    }

    fn tabulated_density(&self, values: &[f64], p: f64) -> f64 {
        let m = values.len();
        let h = 1.0 / m as f64;
        if p < h {
            return self.a_lambda * p.powf(1.0 - self.alpha);
        }
        let x = p / h - 1.0;
        let i = (x.floor() as usize).min(m - 2);
        let w = x - i as f64;
        values[i] * (1.0 - w) + values[i + 1] * w
    }

    /// Worst relative mismatch between the first tabulated values and the
    /// declared head `A p^{1-α}` over the first `points` grid points.
    pub fn head_diagnostic(&self, points: usize) -> Option<f64> {
        let LambdaKind::Tabulated { values } = &self.kind else {
            return None;
        };
        let h = 1.0 / values.len() as f64;
        let worst = values
            .iter()
            .take(points.max(1))
            .enumerate()
            .map(|(i, v)| {
                let p = (i + 1) as f64 * h;
                let head = self.a_lambda * p.powf(1.0 - self.alpha);
                (v - head).abs() / head
            })
            .fold(0.0, f64::max);
        Some(worst)
    }

    /// `∫ p^{a} (1-p)^{b} Λ(dp)` for a tabulated density, with `a = k-2`, `b = n-k`.
    fn tabulated_integral(&self, a: f64, b: f64) -> Result<f64> {
        let LambdaKind::Tabulated { values } = &self.kind else {
            return domain("not a tabulated model");
        };
        let h = 1.0 / values.len() as f64;
        // Analytic head: A ∫_0^h p^{a+1-α} (1-p)^b dp.
        let (ha, hb) = (a + 2.0 - self.alpha, b + 1.0);
        let head = self.a_lambda * (ln_beta(ha, hb).exp()) * beta_reg(ha, hb, h);
        let f = |p: f64| {
            let base = if a == 0.0 { 1.0 } else { p.powf(a) };
            let tail = if b == 0.0 { 1.0 } else { (1.0 - p).powf(b) };
            base * tail * self.tabulated_density(values, p)
        };
        let tol = Tolerance {
            abs: 1e-300,
            rel: TAB_TOL,
            max_intervals: 20_000,
        };
        let body = integrate(f, h, 1.0, tol).map_err(|e| {
            Error::Numeric(format!(
                "tabulated rate quadrature failed (target {TAB_TOL:e}): {e}"
            ))
        })?;
        Ok(head + body)
    }
}

fn check_nk(n: u64, k: u64) -> Result<()> {
    if n < 2 || k < 2 || k > n {
        return domain(format!("need 2 ≤ k ≤ n, got n={n}, k={k}"));
    }
    Ok(())
}

/// `ln λ_{n,k}`; `-inf` when the rate vanishes.
pub fn ln_lambda_rate(n: u64, k: u64, model: &LambdaModel) -> Result<f64> {
    check_nk(n, k)?;
    match &model.kind {
        LambdaKind::KingmanAtom => Ok(if k == 2 { 0.0 } else { f64::NEG_INFINITY }),
        LambdaKind::Beta { alpha } => {
            let (n, k) = (n as f64, k as f64);
            Ok(ln_beta(k - alpha, n - k + alpha) - ln_beta(2.0 - alpha, *alpha))
        }
        LambdaKind::Tabulated { .. } => Ok(model
            .tabulated_integral((k - 2) as f64, (n - k) as f64)?
            .ln()),
    }
}

/// `λ_{n,k}`.
pub fn lambda_rate(n: u64, k: u64, model: &LambdaModel) -> Result<f64> {
    Ok(ln_lambda_rate(n, k, model)?.exp())
}

/// `γ_{n,k} = C(n,k) λ_{n,k}`.
pub fn gamma_rate(n: u64, k: u64, model: &LambdaModel) -> Result<f64> {
    let ln = ln_lambda_rate(n, k, model)? + ln_binomial(n, k);
    let v = ln.exp();
    if !v.is_finite() {
        return numeric(format!("γ_{{{n},{k}}} overflows (ln = {ln})"));
    }
    Ok(v)
}

/// Total merger rate with `n` blocks, through `g(b+1) = g(b) + b λ_{b+1,2}`.
pub fn total_rate(n: u64, model: &LambdaModel) -> Result<f64> {
    if n == 0 {
        return domain("total_rate needs n ≥ 1");
    }
    if model.is_kingman() {
        let n = n as f64;
        return Ok(n * (n - 1.0) / 2.0);
    }
    let mut g = 0.0;
    for b in 1..n {
        g += b as f64 * lambda_rate(b + 1, 2, model)?;
    }
    Ok(g)
}

/// `λ_{n,k}` for a Beta model by quadrature of its defining integral, kept
/// separate from the closed form so the two can be compared.
pub fn beta_rate_by_quadrature(n: u64, k: u64, alpha: f64) -> Result<f64> {
    check_nk(n, k)?;
    // Integrand p^{a-1} (1-p)^{b-1} / B(2-α, α) with a = k-α, b = n-k+α.
    let a = k as f64 - alpha;
    let b = (n - k) as f64 + alpha;
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-13,
        max_intervals: 10_000,
    };
    // Substitutions u = p^a on [0,1/2] and v = (1-p)^b on [1/2,1] remove the
    // endpoint singularities.
    let left = integrate(
        |u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0),
        0.0,
        0.5f64.powf(a),
        tol,
    )? / a;
    let right = integrate(
        |v: f64| (1.0 - v.powf(1.0 / b)).powf(a - 1.0),
        0.0,
        0.5f64.powf(b),
        tol,
    )? / b;
    Ok((left + right) * (-ln_beta(2.0 - alpha, alpha)).exp())
}

/// Dense table of `λ_{n,k}`, `γ_{n,k}` and totals for `2 ≤ k ≤ n ≤ n_max`.
#[derive(Debug, Clone)]
pub struct RateTable {
    pub n_max: u64,
    /// `lambda[n][k]`; rows `0` and `1` are empty.
    pub lambda: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
    pub total: Vec<f64>,
}

impl RateTable {
    pub fn new(n_max: u64, model: &LambdaModel) -> Result<Self> {
        let mut lambda = vec![Vec::new(), Vec::new()];
        let mut gamma = vec![Vec::new(), Vec::new()];
        let mut total = vec![0.0, 0.0];
        for n in 2..=n_max {
            let mut lr = vec![0.0; n as usize + 1];
            let mut gr = vec![0.0; n as usize + 1];
            for k in 2..=n {
                lr[k as usize] = lambda_rate(n, k, model)?;
                gr[k as usize] = gamma_rate(n, k, model)?;
            }
            total.push(gr.iter().sum());
            lambda.push(lr);
            gamma.push(gr);
        }
        Ok(RateTable {
            n_max,
            lambda,
            gamma,
            total,
        })
    }
}

/// `C_α = α / Γ(2-α)`.
pub fn cdi_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return domain(format!("C_α is defined for α in (1,2), got {alpha}"));
    }
    Ok(alpha / gamma_fn(2.0 - alpha))
}

/// Speed constant `c` in `t ≈ c N(t)^{1-α}` as derived from the rates,
/// `c = α / (A Γ(2-α))`. Equals `C_α` only when `A = 1`.
pub fn speed_constant(model: &LambdaModel) -> Result<f64> {
    Ok(cdi_constant(model.alpha)? / model.a_lambda)
}

/// Rate of the jump `i → i+j` of the limit process `Z` at time `r`:
/// `A (i+j) Γ(2-α) Γ(j+1-α) / ((1-r) α Γ(j+2))` for `α < 2`, and
/// `(i+1)/(1-r)` for `j = 1` when `α = 2`.
pub fn limit_jump_rate(i: u64, j: u64, r: f64, model: &LambdaModel) -> Result<f64> {
    if i < 1 || j < 1 {
        return domain("limit_jump_rate needs i ≥ 1, j ≥ 1");
    }
    if !(0.0..1.0).contains(&r) {
        return domain(format!("limit_jump_rate needs r in [0,1), got {r}"));
    }
    Ok((i + j) as f64 * generator_coefficient(j, model)? / (1.0 - r))
}

/// `c_j` with `rate(i → i+j) = (i+j) c_j / (1-r)`.
pub fn generator_coefficient(j: u64, model: &LambdaModel) -> Result<f64> {
    let alpha = model.alpha;
    if alpha >= 2.0 || model.is_kingman() {
        return Ok(if j == 1 { 1.0 } else { 0.0 });
    }
    if alpha <= 1.0 {
        return domain("no limit process for α ≤ 1");
    }
    let j = j as f64;
    let ln = ln_gamma(2.0 - alpha) + ln_gamma(j + 1.0 - alpha) - ln_gamma(j + 2.0) - alpha.ln();
    Ok(model.a_lambda * ln.exp())
}

/// `lim ε γ_{N,j+1} / N` at `N = N((1-r)ε)`, obtained by combining the
/// small-`p` asymptotics of `γ` with the speed `t ≈ α N^{1-α} / (A Γ(2-α))`:
/// `α Γ(j+1-α) / ((1-r) Γ(2-α) Γ(j+2))`. Independent of `A`.
pub fn rate_limit_from_speed(j: u64, r: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return domain("rate limit formula needs α in (1,2)");
    }
    let j = j as f64;
    let ln = alpha.ln() + ln_gamma(j + 1.0 - alpha) - ln_gamma(2.0 - alpha) - ln_gamma(j + 2.0);
    Ok(ln.exp() / (1.0 - r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kingman_rates() {
        let m = LambdaModel::kingman();
        assert_eq!(lambda_rate(3, 2, &m).unwrap(), 1.0);
        assert_eq!(lambda_rate(3, 3, &m).unwrap(), 0.0);
        assert!((gamma_rate(4, 2, &m).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(total_rate(1, &m).unwrap(), 0.0);
    }

    #[test]
    fn beta_small_cases() {
        let m = LambdaModel::beta(1.5).unwrap();
        assert!((lambda_rate(3, 2, &m).unwrap() - 0.75).abs() < 1e-13);
        assert!((lambda_rate(3, 3, &m).unwrap() - 0.25).abs() < 1e-13);
        assert!((gamma_rate(3, 2, &m).unwrap() - 2.25).abs() < 1e-12);
        assert_eq!(total_rate(1, &m).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let m = LambdaModel::beta(1.5).unwrap();
        assert!(lambda_rate(3, 1, &m).is_err());
        assert!(lambda_rate(3, 4, &m).is_err());
        assert!(limit_jump_rate(1, 1, 1.0, &m).is_err());
        assert!(cdi_constant(2.0).is_err());
        assert!(cdi_constant(1.0).is_err());
        assert!(LambdaModel::beta(2.0).is_err());
    }

    #[test]
    fn total_matches_row_sum() {
        for m in [LambdaModel::kingman(), LambdaModel::beta(1.3).unwrap()] {
            let t = RateTable::new(60, &m).unwrap();
            for n in 2..=60u64 {
                let rec = total_rate(n, &m).unwrap();
                assert!((rec - t.total[n as usize]).abs() <= 1e-12 * rec, "n={n}");
            }
        }
    }

    #[test]
    fn quadrature_route_small() {
        let v = beta_rate_by_quadrature(3, 2, 1.5).unwrap();
        assert!((v - 0.75).abs() < 1e-10);
    }

    #[test]
    fn kingman_limit_rates() {
        let m = LambdaModel::kingman();
        assert_eq!(limit_jump_rate(1, 1, 0.0, &m).unwrap(), 2.0);
        assert_eq!(limit_jump_rate(1, 2, 0.0, &m).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_beta_agrees_with_closed_form() {
        let alpha = 1.5;
        let beta = LambdaModel::beta(alpha).unwrap();
        let m = 4000;
        let values: Vec<f64> = (1..=m)
            .map(|i| beta.density(i as f64 / m as f64).unwrap())
            .collect();
        let tab = LambdaModel::tabulated(values, alpha, beta.a_lambda).unwrap();
        assert!((tab.total_mass - 1.0).abs() < 1e-3);
        for (n, k) in [(3, 2), (10, 4), (40, 2)] {
            let a = lambda_rate(n, k, &beta).unwrap();
            let b = lambda_rate(n, k, &tab).unwrap();
            assert!((a - b).abs() < 5e-3 * a, "n={n} k={k}: {a} vs {b}");
        }
        assert!(tab.head_diagnostic(3).unwrap() < 0.01);
    }
}
