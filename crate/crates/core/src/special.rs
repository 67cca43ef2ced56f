//! Thin wrappers over `statrs` special functions, in log space where it matters.

use statrs::function::gamma;

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma::gamma(x)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `ln C(n, k)` for integer arguments.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    statrs::function::beta::beta_reg(a, b, x)
}

/// `Γ(x + a) / Γ(x + b)` evaluated through log-gamma.
pub fn gamma_ratio(x: f64, a: f64, b: f64) -> f64 {
    (ln_gamma(x + a) - ln_gamma(x + b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert!((ln_binomial(5, 2).exp() - 10.0).abs() < 1e-12);
        assert!((ln_binomial(10, 0).exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn beta_matches_factorials() {
        // B(2, 3) = 1!2!/4! = 1/12
        assert!((ln_beta(2.0, 3.0).exp() - 1.0 / 12.0).abs() < 1e-14);
    }
}
