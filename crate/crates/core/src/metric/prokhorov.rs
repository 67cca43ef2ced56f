//! Prokhorov distance between finite measures.
//!
//! `d_P(μ, ν) = inf{ε > 0 : μ(A) ≤ ν(A^ε) + ε and ν(A) ≤ μ(A^ε) + ε ∀A}` with
//! `A^ε` the open `ε`-neighbourhood. The excess `sup_A μ(A) − ν(A^ε)` only
//! changes when `ε` crosses a pairwise distance, so both routines scan the
//! distinct distances `h_0 = 0 < h_1 < …` and return
//! `min_k max(h_k, D_k)` over intervals `(h_k, h_{k+1}]` where the excess
//! `D_k ≤ h_{k+1}`.

use super::Dendrogram;
use crate::error::{domain, Result};

/// Combines per-interval excesses into the infimum.
fn infimum(thresholds: &[f64], excess: impl Fn(usize) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..thresholds.len() {
        let d = excess(k);
        let cand = d.max(thresholds[k]);
        let next = thresholds.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if cand <= next {
            best = best.min(cand);
        }
    }
    best
}

/// Prokhorov distance between the masses of `x` and `y`, which must carry
/// the same ultrametric on the same leaves. Optimal sets are unions of
/// balls, so the excess at scale `h_k` is `Σ_β (μ(β) − ν(β))⁺` over the
/// closed `h_k`-balls `β`.
pub fn prokhorov(x: &Dendrogram, y: &Dendrogram) -> Result<f64> {
    let (Some(mu), Some(nu)) = (&x.masses, &y.masses) else {
        return domain("both spaces need masses");
    };
    if x.leaf_count != y.leaf_count || x.merges != y.merges {
        return domain("measures must live on the same ultrametric space");
    }
    let mut thresholds: Vec<f64> = x.merges.iter().map(|m| m.height).collect();
    thresholds.push(0.0);
    thresholds.sort_by(|a, b| a.total_cmp(b));
    thresholds.dedup();
    let excess = |k: usize| {
        let (mut up, mut down) = (0.0f64, 0.0f64);
        for b in x.ball_nodes(thresholds[k]) {
            let leaves = x.leaves_under(b);
            let m: f64 = leaves.iter().map(|&l| mu[l]).sum();
            let n: f64 = leaves.iter().map(|&l| nu[l]).sum();
            up += (m - n).max(0.0);
            down += (n - m).max(0.0);
        }
        up.max(down)
    };
    Ok(infimum(&thresholds, excess))
}

/// Prokhorov distance between `mu` (on points `0..mu.len()`) and `nu` (on
/// points `mu.len()..`) in a finite metric space given by `dist`, using
/// max-flow for the excess.
pub fn prokhorov_general(dist: &[Vec<f64>], mu: &[f64], nu: &[f64]) -> Result<f64> {
    let (a, b) = (mu.len(), nu.len());
    if dist.len() != a + b || dist.iter().any(|r| r.len() != a + b) {
        return domain("distance matrix does not match the measures");
    }
    let mut thresholds = vec![0.0];
    for i in 0..a {
        for j in 0..b {
            thresholds.push(dist[i][a + j]);
        }
    }
    thresholds.sort_by(|p, q| p.total_cmp(q));
    thresholds.dedup();
    let (tm, tn): (f64, f64) = (mu.iter().sum(), nu.iter().sum());
    let excess = |k: usize| {
        let h = thresholds[k];
        // Open ε-neighbourhood for ε just above h: pairs at distance ≤ h.
        let adj: Vec<Vec<bool>> = (0..a)
            .map(|i| (0..b).map(|j| dist[i][a + j] <= h).collect())
            .collect();
        let f = max_flow_bipartite(mu, nu, &adj);
        (tm - f).max(tn - f).max(0.0)
    };
    Ok(infimum(&thresholds, excess))
}

/// Maximum flow from `source → i (cap μ_i) → j (if adj) → sink (cap ν_j)`.
fn max_flow_bipartite(mu: &[f64], nu: &[f64], adj: &[Vec<bool>]) -> f64 {
    let (a, b) = (mu.len(), nu.len());
    let n = a + b + 2;
    let (s, t) = (a + b, a + b + 1);
    let mut cap = vec![vec![0.0f64; n]; n];
    for i in 0..a {
        cap[s][i] = mu[i];
        for j in 0..b {
            if adj[i][j] {
                cap[i][a + j] = f64::INFINITY;
            }
        }
    }
    for j in 0..b {
        cap[a + j][t] = nu[j];
    }
    let scale = mu.iter().chain(nu).cloned().fold(0.0, f64::max);
    let tiny = 1e-15 * scale.max(1e-300);
    let mut flow = 0.0;
    loop {
        // Breadth-first augmenting path (Edmonds-Karp).
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > tiny {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut push = f64::INFINITY;
        let mut v = t;
        while v != s {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            cap[u][v] -= push;
            cap[v][u] += push;
            v = u;
        }
        flow += push;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Merge;

    fn two(a: f64, mu: [f64; 2]) -> Dendrogram {
        Dendrogram::new(
            2,
            0,
            Some(mu.to_vec()),
            vec![Merge {
                children: vec![0, 1],
                height: a,
            }],
        )
        .unwrap()
    }

    #[test]
    fn point_masses() {
        for a in [0.3, 0.99, 1.0, 2.5] {
            let d = prokhorov(&two(a, [1.0, 0.0]), &two(a, [0.0, 1.0])).unwrap();
            assert_eq!(d, a.min(1.0), "a={a}");
        }
        let same = prokhorov(&two(0.5, [0.3, 0.7]), &two(0.5, [0.3, 0.7])).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn general_matches_ultrametric_on_copies() {
        // Same space glued to itself at distance zero.
        let x = two(0.6, [0.7, 0.3]);
        let y = two(0.6, [0.2, 0.8]);
        let d0 = x.distance_matrix();
        let mut dist = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                dist[i][j] = d0[i % 2][j % 2];
            }
        }
        let g = prokhorov_general(&dist, &[0.7, 0.3], &[0.2, 0.8]).unwrap();
        assert!((g - prokhorov(&x, &y).unwrap()).abs() < 1e-15);
    }
}
