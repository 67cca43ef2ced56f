//! Gromov-Hausdorff distance between finite ultrametric spaces.
//!
//! `d_GH(X, Y) = ½ inf_R dis(R)` over correspondences `R ⊆ X × Y`. Every
//! correspondence contains one of the form `graph(f) ∪ graph(g)ᵀ` for maps
//! `f: X → Y`, `g: Y → X`, so the exact search runs over such pairs.

use super::Dendrogram;
use crate::error::{Error, Result};

/// Default cap on `|X| + |Y|` for the exact solver.
pub const DEFAULT_GH_CAP: usize = 16;

/// A relation between the leaves of two spaces covering both.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn is_valid(&self, nx: usize, ny: usize) -> bool {
        let mut sx = vec![false; nx];
        let mut sy = vec![false; ny];
        for &(x, y) in &self.pairs {
            if x >= nx || y >= ny {
                return false;
            }
            sx[x] = true;
            sy[y] = true;
        }
        sx.into_iter().all(|b| b) && sy.into_iter().all(|b| b)
    }

    /// `max |dX(x,x') - dY(y,y')|` over pairs of pairs.
    pub fn distortion(&self, dx: &[Vec<f64>], dy: &[Vec<f64>]) -> f64 {
        let mut worst = 0.0f64;
        for (i, &(x, y)) in self.pairs.iter().enumerate() {
            for &(x2, y2) in &self.pairs[i + 1..] {
                worst = worst.max((dx[x][x2] - dy[y][y2]).abs());
            }
        }
        worst
    }
}

/// Exact `d_cGH` (half the minimal distortion).
pub fn gh_exact(x: &Dendrogram, y: &Dendrogram) -> Result<f64> {
    Ok(gh_exact_with(x, y, DEFAULT_GH_CAP)?.0)
}

/// Exact `d_cGH` with an explicit cap, returning an optimal correspondence.
pub fn gh_exact_with(x: &Dendrogram, y: &Dendrogram, cap: usize) -> Result<(f64, Correspondence)> {
    let (nx, ny) = (x.leaf_count, y.leaf_count);
    if nx + ny > cap {
        return Err(Error::Capacity(format!(
            "exact GH limited to {cap} total leaves (got {}); use gh_bounds",
            nx + ny
        )));
    }
    let dx = x.distance_matrix();
    let dy = y.distance_matrix();
    let (ub, seed) = greedy_upper(x, y, &dx, &dy);
    let mut search = Search {
        dx: &dx,
        dy: &dy,
        nx,
        best: ub,
        best_pairs: seed.pairs,
        assigned: Vec::with_capacity(nx + ny),
        is_set: vec![false; nx + ny],
    };
    // Variables 0..nx are the images f(x); nx..nx+ny are the preimages g(y).
    let full_y: u32 = if ny == 32 { u32::MAX } else { (1u32 << ny) - 1 };
    let full_x: u32 = if nx == 32 { u32::MAX } else { (1u32 << nx) - 1 };
    let mut domains: Vec<u32> = (0..nx)
        .map(|_| full_y)
        .chain((0..ny).map(|_| full_x))
        .collect();
    // Strictly improving search from the greedy incumbent.
    search.run(&mut domains, 0.0);
    let corr = Correspondence {
        pairs: search.best_pairs,
    };
    Ok((0.5 * search.best, corr))
}

struct Search<'a> {
    dx: &'a [Vec<f64>],
    dy: &'a [Vec<f64>],
    nx: usize,
    best: f64,
    best_pairs: Vec<(usize, usize)>,
    assigned: Vec<(usize, usize)>,
    is_set: Vec<bool>,
}

impl Search<'_> {
    fn pair(&self, var: usize, val: usize) -> (usize, usize) {
        if var < self.nx {
            (var, val)
        } else {
            (val, var - self.nx)
        }
    }

    fn run(&mut self, domains: &mut [u32], current: f64) {
        // Pick the unassigned variable with the smallest domain.
        let mut pick = None;
        let mut size = u32::MAX;
        for (v, &d) in domains.iter().enumerate() {
            if !self.is_set[v] {
                let c = d.count_ones();
                if c < size {
                    size = c;
                    pick = Some(v);
                }
            }
        }
        let Some(var) = pick else {
            if self.assigned.len() == domains.len() && current < self.best {
                self.best = current;
                self.best_pairs = self.assigned.clone();
            }
            return;
        };
        let mut dom = domains[var];
        while dom != 0 {
            let val = dom.trailing_zeros() as usize;
            dom &= dom - 1;
            let (a, b) = self.pair(var, val);
            let mut worst = current;
            for &(a2, b2) in &self.assigned {
                worst = worst.max((self.dx[a][a2] - self.dy[b][b2]).abs());
                if worst >= self.best {
                    break;
                }
            }
            if worst >= self.best {
                continue;
            }
            // Forward check the remaining variables against the new pair.
            let mut next = domains.to_vec();
            next[var] = 1 << val;
            let mut dead = false;
            for (v, d) in next.iter_mut().enumerate() {
                if v == var || self.is_set[v] {
                    continue;
                }
                let mut keep = *d;
                let mut it = *d;
                while it != 0 {
                    let w = it.trailing_zeros() as usize;
                    it &= it - 1;
                    let (a2, b2) = self.pair(v, w);
                    if (self.dx[a][a2] - self.dy[b][b2]).abs() >= self.best {
                        keep &= !(1 << w);
                    }
                }
                if keep == 0 {
                    dead = true;
                    break;
                }
                *d = keep;
            }
            if dead {
                continue;
            }
            self.assigned.push((a, b));
            self.is_set[var] = true;
            self.run(&mut next, worst);
            self.is_set[var] = false;
            self.assigned.pop();
        }
    }
}

/// Lower and upper bounds on `d_cGH`, valid for any sizes.
pub fn gh_bounds(x: &Dendrogram, y: &Dendrogram) -> (f64, f64) {
    let lower = 0.5 * signature_gap(x, y).max(signature_gap(y, x));
    let dx = x.distance_matrix();
    let dy = y.distance_matrix();
    let (upper, _) = greedy_upper(x, y, &dx, &dy);
    (lower, 0.5 * upper.max(2.0 * lower))
}

/// Distinct heights with the number of closed balls at each.
fn ball_signature(d: &Dendrogram) -> Vec<(f64, usize)> {
    let mut hs: Vec<f64> = d.merges.iter().map(|m| m.height).collect();
    hs.push(0.0);
    hs.sort_by(|a, b| a.total_cmp(b));
    hs.dedup();
    hs.into_iter().map(|h| (h, d.ball_count(h))).collect()
}

/// If `dis(R) = D` then `c_Y(ρ) ≥ c_X(ρ + D)` for every radius `ρ`, where
/// `c` counts closed balls. Returns the smallest `D` compatible with that.
fn signature_gap(x: &Dendrogram, y: &Dendrogram) -> f64 {
    let sx = ball_signature(x);
    let sy = ball_signature(y);
    let h_x = |m: usize| {
        sx.iter()
            .find(|&&(_, c)| c <= m)
            .map_or(f64::INFINITY, |&(h, _)| h)
    };
    sy.iter()
        .map(|&(rho, c)| (h_x(c) - rho).max(0.0))
        .fold(0.0, f64::max)
}

/// Best distortion among a few hierarchical matchings and the trivial
/// all-pairs correspondence.
fn greedy_upper(
    x: &Dendrogram,
    y: &Dendrogram,
    dx: &[Vec<f64>],
    dy: &[Vec<f64>],
) -> (f64, Correspondence) {
    let mut best = Correspondence { pairs: Vec::new() };
    for i in 0..x.leaf_count {
        for j in 0..y.leaf_count {
            best.pairs.push((i, j));
        }
    }
    let mut best_d = x.diameter().max(y.diameter());
    for key in [SortKey::Size, SortKey::Height] {
        let mut pairs = Vec::new();
        match_nodes(x, y, x.root(), y.root(), key, &mut pairs);
        pairs.sort_unstable();
        pairs.dedup();
        let c = Correspondence { pairs };
        let d = c.distortion(dx, dy);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    (best_d, best)
}

#[derive(Clone, Copy)]
enum SortKey {
    Size,
    Height,
}

fn match_nodes(
    x: &Dendrogram,
    y: &Dendrogram,
    a: usize,
    b: usize,
    key: SortKey,
    out: &mut Vec<(usize, usize)>,
) {
    let (ca, cb) = (x.children(a), y.children(b));
    if ca.is_empty() || cb.is_empty() {
        for la in x.leaves_under(a) {
            for lb in y.leaves_under(b) {
                out.push((la, lb));
            }
        }
        return;
    }
    let sorted = |d: &Dendrogram, cs: &[usize]| {
        let mut v = cs.to_vec();
        match key {
            SortKey::Size => v.sort_by_key(|&c| std::cmp::Reverse(d.leaves_under(c).len())),
            SortKey::Height => v.sort_by(|&p, &q| d.height(q).total_cmp(&d.height(p))),
        }
        v
    };
    let sa = sorted(x, ca);
    let sb = sorted(y, cb);
    let k = sa.len().max(sb.len());
    for i in 0..k {
        let p = sa[i.min(sa.len() - 1)];
        let q = sb[i.min(sb.len() - 1)];
        match_nodes(x, y, p, q, key, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Merge;

    fn two(a: f64) -> Dendrogram {
        Dendrogram::new(
            2,
            0,
            None,
            vec![Merge {
                children: vec![0, 1],
                height: a,
            }],
        )
        .unwrap()
    }

    #[test]
    fn small_cases() {
        let s = Dendrogram::singleton(None);
        assert_eq!(gh_exact(&s, &s).unwrap(), 0.0);
        assert!((gh_exact(&two(1.0), &two(0.4)).unwrap() - 0.3).abs() < 1e-15);
        assert!((gh_exact(&two(0.8), &s).unwrap() - 0.4).abs() < 1e-15);
        let (lo, hi) = gh_bounds(&two(1.0), &two(0.4));
        assert!(lo <= 0.3 + 1e-15 && hi >= 0.3 - 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let big = Dendrogram::from_gaps(&[1.0; 9], 0, None).unwrap();
        assert!(matches!(gh_exact(&big, &big), Err(Error::Capacity(_))));
    }
}
