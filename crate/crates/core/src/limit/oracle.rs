//! Marginal law of `Z(r)` from the forward equations.
//!
//! In `t = -log(1-r)` the truncated generator on `{1..M}` is triangular:
//! `p'_k = A k Σ_{i<k} p_i c_{k-i} − A (k C0 + C1) p_k`. Jumps leaving
//! `{1..M}` are lost, and the lost mass is reported as the leak.

use super::offspring::{tail_weight, Bias};
use crate::error::{domain, numeric, Result};
use crate::special::ln_gamma;

/// `pmf[k-1] = P(Z(r) = k)` for `k ≤ M`, and the mass that left `{1..M}`.
#[derive(Debug, Clone)]
pub struct MarginalPmf {
    pub r: f64,
    pub pmf: Vec<f64>,
    pub leak: f64,
}

impl MarginalPmf {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("state,probability\n");
        for (k, p) in self.pmf.iter().enumerate() {
            s.push_str(&format!("{},{}\n", k + 1, p));
        }
        s
    }
}

/// Integrator tolerance (absolute and relative, max norm).
pub const ORACLE_TOL: f64 = 1e-9;

struct Generator {
    a: f64,
    /// `c[j]`, `j = 1..M-1`, with nonzero indices listed for sparse rows.
    c: Vec<f64>,
    nonzero: Vec<usize>,
    rate: Vec<f64>,
}

impl Generator {
    fn new(alpha: f64, a_lambda: f64, m: usize) -> Self {
        let (a, c, c0, c1) = if alpha == 2.0 {
            let mut c = vec![0.0; m];
            if m > 1 {
                c[1] = 1.0;
            }
            (1.0, c, 1.0, 1.0)
        } else {
            let s = ln_gamma(2.0 - alpha).exp() / alpha;
            let c = (0..m)
                .map(|j| {
                    if j == 0 {
                        0.0
                    } else {
                        s * (ln_gamma(j as f64 + 1.0 - alpha) - ln_gamma(j as f64 + 2.0)).exp()
                    }
                })
                .collect();
            (
                a_lambda,
                c,
                s * tail_weight(alpha, Bias::Plain, 1.0),
                s * tail_weight(alpha, Bias::Jump, 1.0),
            )
        };
        let nonzero = (1..m).filter(|&j| c[j] > 0.0).collect();
        let rate = (0..m).map(|idx| a * ((idx + 1) as f64 * c0 + c1)).collect();
        Generator {
            a,
            c,
            nonzero,
            rate,
        }
    }

    /// `inflow_k = A k Σ_{i<k} x_i c_{k-i}` using states `k = idx + 1`.
    fn inflow(&self, x: &[f64], idx: usize) -> f64 {
        let mut s = 0.0;
        for &j in &self.nonzero {
            if j > idx {
                break;
            }
            s += x[idx - j] * self.c[j];
        }
        self.a * (idx + 1) as f64 * s
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for idx in 0..x.len() {
            out[idx] = self.inflow(x, idx) - self.rate[idx] * x[idx];
        }
    }

    /// Solves `(I − θ L) x = b` by forward substitution.
    fn solve(&self, theta: f64, b: &[f64], x: &mut [f64]) {
        for idx in 0..b.len() {
            let inflow = self.inflow(x, idx);
            x[idx] = (b[idx] + theta * inflow) / (1.0 + theta * self.rate[idx]);
        }
    }

    /// One TR-BDF2 step of size `h`.
    fn step(&self, y: &[f64], h: f64, out: &mut [f64]) {
        let g = 2.0 - std::f64::consts::SQRT_2;
        let d = 0.5 * g;
        let m = y.len();
        let mut f = vec![0.0; m];
        self.apply(y, &mut f);
        let rhs: Vec<f64> = (0..m).map(|k| y[k] + d * h * f[k]).collect();
        let mut z = vec![0.0; m];
        self.solve(d * h, &rhs, &mut z);
        let (w1, w0) = (1.0 / (g * (2.0 - g)), (1.0 - g).powi(2) / (g * (2.0 - g)));
        let rhs: Vec<f64> = (0..m).map(|k| w1 * z[k] - w0 * y[k]).collect();
        self.solve(d * h, &rhs, out);
    }
}

/// Solves the forward equations of the generator truncated to `{1..M}` from
/// `Z(0) = 1` up to `r`. Fails when more than `max_leak` mass leaves the
/// truncation.
pub fn marginal_z_oracle(
    alpha: f64,
    a_lambda: f64,
    r: f64,
    m_trunc: usize,
    max_leak: f64,
) -> Result<MarginalPmf> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return domain("oracle needs α in (1,2]");
    }
    if !(0.0..1.0).contains(&r) || m_trunc < 1 {
        return domain("oracle needs r in [0,1) and M ≥ 1");
    }
    let gen = Generator::new(alpha, a_lambda, m_trunc);
    let t_end = -(-r).ln_1p();
    let mut y = vec![0.0; m_trunc];
    y[0] = 1.0;
    let (mut t, mut h) = (0.0, 1e-4f64.min(t_end.max(1e-300)));
    let mut full = vec![0.0; m_trunc];
    let mut half = vec![0.0; m_trunc];
    let mut half2 = vec![0.0; m_trunc];
    let mut steps = 0usize;
    while t < t_end {
        h = h.min(t_end - t);
        gen.step(&y, h, &mut full);
        gen.step(&y, 0.5 * h, &mut half);
        gen.step(&half, 0.5 * h, &mut half2);
        let err = (0..m_trunc)
            .map(|k| (half2[k] - full[k]).abs() / (ORACLE_TOL + ORACLE_TOL * half2[k].abs()))
            .fold(0.0, f64::max)
            / 3.0;
        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut half2);
        }
        let factor = if err == 0.0 {
            4.0
        } else {
            (0.9 * err.powf(-1.0 / 3.0)).clamp(0.2, 4.0)
        };
        h *= factor;
        steps += 1;
        if steps > 1_000_000 || h < 1e-14 {
            return numeric("forward-equation integrator stalled");
        }
    }
    let leak = (1.0 - y.iter().sum::<f64>()).max(0.0);
    if leak > max_leak {
        return domain(format!(
            "boundary leak {leak:e} exceeds {max_leak:e}; increase M_trunc beyond {m_trunc}"
        ));
    }
    Ok(MarginalPmf { r, pmf: y, leak })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_is_point_mass() {
        let p = marginal_z_oracle(1.5, 1.0, 0.0, 50, 1.0).unwrap();
        assert_eq!(p.pmf[0], 1.0);
        assert_eq!(p.leak, 0.0);
    }

    #[test]
    fn kingman_closed_form() {
        for r in [0.25, 0.5, 0.75] {
            let p = marginal_z_oracle(2.0, 1.0, r, 200, 1e-6).unwrap();
            for k in 1..=30usize {
                let exact = k as f64 * (1.0 - r) * (1.0 - r) * r.powi(k as i32 - 1);
                assert!((p.pmf[k - 1] - exact).abs() < 1e-6, "r={r} k={k}");
            }
        }
    }

    #[test]
    fn leak_guard() {
        assert!(marginal_z_oracle(1.5, 0.64, 0.5, 20, 1e-6).is_err());
    }
}
