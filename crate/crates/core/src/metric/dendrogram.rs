//! Finite pointed ultrametric spaces stored as merge trees.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// An internal node: its children merge at `height`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub children: Vec<usize>,
    pub height: f64,
}

/// A finite ultrametric space with a distinguished leaf and optional leaf
/// masses. Leaves are nodes `0..leaf_count`; merge `m` is node
/// `leaf_count + m`. Every child id is smaller than its parent id and the
/// last merge is the root. `d(i, j)` is the height of the lowest common
/// ancestor of `i` and `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaf_count: usize,
    pub point: usize,
    pub masses: Option<Vec<f64>>,
    pub merges: Vec<Merge>,
    #[serde(skip)]
    parent: Vec<usize>,
}

const ROOT: usize = usize::MAX;

impl Dendrogram {
    /// Validates and builds a dendrogram. Heights must be positive and strictly
    /// increase from children to parents.
    pub fn new(
        leaf_count: usize,
        point: usize,
        masses: Option<Vec<f64>>,
        merges: Vec<Merge>,
    ) -> Result<Self> {
        Self::build(leaf_count, point, masses, merges, true)
    }

    fn build(
        leaf_count: usize,
        point: usize,
        masses: Option<Vec<f64>>,
        merges: Vec<Merge>,
        strict: bool,
    ) -> Result<Self> {
        if leaf_count == 0 {
            return domain("dendrogram needs at least one leaf");
        }
        if point >= leaf_count {
            return domain(format!(
                "point {point} out of range for {leaf_count} leaves"
            ));
        }
        if let Some(m) = &masses {
            if m.len() != leaf_count || m.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return domain("masses must be one finite nonnegative value per leaf");
            }
        }
        let nodes = leaf_count + merges.len();
        let mut parent = vec![ROOT; nodes];
        for (mi, m) in merges.iter().enumerate() {
            let id = leaf_count + mi;
            if m.children.len() < 2 {
                return domain(format!("merge {mi} has fewer than two children"));
            }
            if !(m.height.is_finite() && m.height >= 0.0) || (strict && m.height == 0.0) {
                return domain(format!("merge {mi} has invalid height {}", m.height));
            }
            for &c in &m.children {
                if c >= id {
                    return domain(format!("merge {mi} refers to a later node {c}"));
                }
                if parent[c] != ROOT {
                    return domain(format!("node {c} merged twice"));
                }
                if c >= leaf_count {
                    let hc = merges[c - leaf_count].height;
                    if hc > m.height || (strict && hc == m.height) {
                        return domain(format!("merge {mi} is not above its child {c}"));
                    }
                }
                parent[c] = id;
            }
        }
        let roots = parent.iter().filter(|&&p| p == ROOT).count();
        if roots != 1 {
            return domain(format!("merge tree has {roots} roots"));
        }
        Ok(Dendrogram {
            leaf_count,
            point,
            masses,
            merges,
            parent,
        })
    }

    pub fn singleton(mass: Option<f64>) -> Self {
        Dendrogram::new(1, 0, mass.map(|m| vec![m]), Vec::new()).expect("valid singleton")
    }

    pub fn node_count(&self) -> usize {
        self.leaf_count + self.merges.len()
    }

    pub fn root(&self) -> usize {
        self.node_count() - 1
    }

    pub fn height(&self, node: usize) -> f64 {
        if node < self.leaf_count {
            0.0
        } else {
            self.merges[node - self.leaf_count].height
        }
    }

    pub fn children(&self, node: usize) -> &[usize] {
        if node < self.leaf_count {
            &[]
        } else {
            &self.merges[node - self.leaf_count].children
        }
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        let p = self.parent[node];
        (p != ROOT).then_some(p)
    }

    pub fn diameter(&self) -> f64 {
        self.height(self.root())
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.as_ref().map_or(0.0, |m| m.iter().sum())
    }

    /// Ultrametric distance between two leaves.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        // Node ids grow towards the root, so step the smaller one up.
        let (mut a, mut b) = (i, j);
        while a != b {
            if a < b {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        self.height(a)
    }

    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.leaf_count;
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = self.distance(i, j);
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        d
    }

    /// Leaves below `node`, in left-to-right order.
    pub fn leaves_under(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x < self.leaf_count {
                out.push(x);
            } else {
                stack.extend(self.children(x).iter().rev());
            }
        }
        out
    }

    /// Maximal nodes of height `≤ radius`: the closed balls of that radius.
    pub fn ball_nodes(&self, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root()];
        while let Some(x) = stack.pop() {
            if self.height(x) <= radius {
                out.push(x);
            } else {
                stack.extend(self.children(x).iter().rev());
            }
        }
        out
    }

    /// Number of closed balls of radius `radius` partitioning the space.
    pub fn ball_count(&self, radius: f64) -> usize {
        self.ball_nodes(radius).len()
    }

    /// The node whose leaves form the closed ball `B(leaf, radius)`.
    pub fn ball_node(&self, leaf: usize, radius: f64) -> usize {
        let mut x = leaf;
        while let Some(p) = self.parent(x) {
            if self.height(p) > radius {
                break;
            }
            x = p;
        }
        x
    }

    /// Subtree rooted at `node` as a dendrogram. The point is kept when it
    /// lies in the subtree, otherwise the first leaf is used.
    pub fn subtree(&self, node: usize) -> Dendrogram {
        let leaves = self.leaves_under(node);
        let mut map = vec![usize::MAX; self.node_count()];
        for (i, &l) in leaves.iter().enumerate() {
            map[l] = i;
        }
        let mut merges = Vec::new();
        let mut internal: Vec<usize> = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x >= self.leaf_count {
                internal.push(x);
                stack.extend(self.children(x));
            }
        }
        internal.sort_unstable();
        for x in internal {
            map[x] = leaves.len() + merges.len();
            merges.push(Merge {
                children: self.children(x).iter().map(|&c| map[c]).collect(),
                height: self.height(x),
            });
        }
        let point = if map[self.point] != usize::MAX && self.point < self.leaf_count {
            map[self.point]
        } else {
            0
        };
        let masses = self
            .masses
            .as_ref()
            .map(|m| leaves.iter().map(|&l| m[l]).collect());
        Dendrogram::new(leaves.len(), point, masses, merges).expect("subtree of a valid tree")
    }

    /// Closed ball `B(point, radius)`.
    pub fn ball_around_point(&self, radius: f64) -> Dendrogram {
        self.subtree(self.ball_node(self.point, radius))
    }

    /// Multiplies all distances by `c > 0`.
    pub fn rescale(&self, c: f64) -> Result<Dendrogram> {
        if !(c > 0.0 && c.is_finite()) {
            return domain("rescale factor must be positive and finite");
        }
        let merges = self
            .merges
            .iter()
            .map(|m| Merge {
                children: m.children.clone(),
                height: m.height * c,
            })
            .collect();
        Dendrogram::new(self.leaf_count, self.point, self.masses.clone(), merges)
    }

    /// Quotient by the closed balls of radius `eta`: each ball becomes one
    /// leaf carrying the ball's mass, pointed at the ball of the point.
    pub fn coarsen(&self, eta: f64) -> Dendrogram {
        let balls = self.ball_nodes(eta);
        let mut map = vec![usize::MAX; self.node_count()];
        let mut masses = Vec::with_capacity(balls.len());
        let mut point = 0;
        for (i, &b) in balls.iter().enumerate() {
            map[b] = i;
            let leaves = self.leaves_under(b);
            if leaves.contains(&self.point) {
                point = i;
            }
            if let Some(m) = &self.masses {
                masses.push(leaves.iter().map(|&l| m[l]).sum());
            }
        }
        let mut merges = Vec::new();
        for x in self.leaf_count..self.node_count() {
            if self.height(x) > eta {
                map[x] = balls.len() + merges.len();
                merges.push(Merge {
                    children: self.children(x).iter().map(|&c| map[c]).collect(),
                    height: self.height(x),
                });
            }
        }
        let masses = self.masses.as_ref().map(|_| masses);
        Dendrogram::new(balls.len(), point, masses, merges).expect("coarsening of a valid tree")
    }

    /// Finest ball quotient with at most `m` points.
    pub fn coarsen_to(&self, m: usize) -> Result<Dendrogram> {
        if m == 0 {
            return domain("cannot coarsen to zero points");
        }
        if self.leaf_count <= m {
            return Ok(self.clone());
        }
        // Each merge at height ≤ h removes `children - 1` balls.
        let mut order: Vec<&Merge> = self.merges.iter().collect();
        order.sort_by(|a, b| a.height.total_cmp(&b.height));
        let mut count = self.leaf_count;
        let mut k = 0;
        while k < order.len() {
            let h = order[k].height;
            while k < order.len() && order[k].height == h {
                count -= order[k].children.len() - 1;
                k += 1;
            }
            if count <= m {
                return Ok(self.coarsen(h));
            }
        }
        Err(Error::Numeric(
            "coarsening never reached the target size".into(),
        ))
    }

    /// Collapses chains of equal heights into multifurcations. Two trees
    /// describing the same ultrametric have the same compact form up to
    /// the order of children.
    pub fn compact(&self) -> Dendrogram {
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); self.node_count()];
        let mut absorbed = vec![false; self.node_count()];
        for x in self.leaf_count..self.node_count() {
            let mut cs = Vec::new();
            for &c in self.children(x) {
                if c >= self.leaf_count && self.height(c) == self.height(x) {
                    absorbed[c] = true;
                    cs.extend(std::mem::take(&mut kids[c]));
                } else {
                    cs.push(c);
                }
            }
            kids[x] = cs;
        }
        let mut map = vec![usize::MAX; self.node_count()];
        map[..self.leaf_count].copy_from_slice(&(0..self.leaf_count).collect::<Vec<_>>());
        let mut merges = Vec::new();
        for x in self.leaf_count..self.node_count() {
            if !absorbed[x] {
                map[x] = self.leaf_count + merges.len();
                merges.push(Merge {
                    children: kids[x].iter().map(|&c| map[c]).collect(),
                    height: self.height(x),
                });
            }
        }
        Dendrogram::build(
            self.leaf_count,
            self.point,
            self.masses.clone(),
            merges,
            false,
        )
        .expect("compaction of a valid tree")
    }

    /// Builds the ultrametric `d(i, j) = max(gaps[i..j])` on leaves in a line.
    /// `gaps[k]` separates leaf `k` from leaf `k+1`. Equal adjacent maxima
    /// become one multifurcation.
    pub fn from_gaps(gaps: &[f64], point: usize, masses: Option<Vec<f64>>) -> Result<Dendrogram> {
        let n = gaps.len() + 1;
        if gaps.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return domain("gap depths must be finite and nonnegative");
        }
        if n == 1 {
            return Dendrogram::new(1, point, masses, Vec::new());
        }
        // Cartesian tree of the gaps (max at the root, ties go right).
        const NONE: usize = usize::MAX;
        let m = gaps.len();
        let (mut left, mut right) = (vec![NONE; m], vec![NONE; m]);
        let mut stack: Vec<usize> = Vec::new();
        for i in 0..m {
            let mut last = NONE;
            while let Some(&t) = stack.last() {
                if gaps[t] < gaps[i] {
                    last = t;
                    stack.pop();
                } else {
                    break;
                }
            }
            left[i] = last;
            if let Some(&t) = stack.last() {
                right[t] = i;
            }
            stack.push(i);
        }
        let root = stack[0];
        // Post-order emission so children get smaller ids.
        let mut id = vec![NONE; m];
        let mut merges = Vec::with_capacity(m);
        let mut work = vec![(root, false)];
        while let Some((k, expanded)) = work.pop() {
            if expanded {
                let l = if left[k] == NONE { k } else { id[left[k]] };
                let r = if right[k] == NONE {
                    k + 1
                } else {
                    id[right[k]]
                };
                id[k] = n + merges.len();
                merges.push(Merge {
                    children: vec![l, r],
                    height: gaps[k],
                });
            } else {
                work.push((k, true));
                if right[k] != NONE {
                    work.push((right[k], false));
                }
                if left[k] != NONE {
                    work.push((left[k], false));
                }
            }
        }
        let loose = Dendrogram::build(n, point, masses, merges, false)?;
        let tree = loose.compact();
        if tree.merges.iter().any(|m| m.height == 0.0) {
            return domain("zero gap: leaves would coincide");
        }
        Ok(tree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Dendrogram {
        // ((0,1)@1, 2)@3
        Dendrogram::new(
            3,
            0,
            Some(vec![0.2, 0.3, 0.5]),
            vec![
                Merge {
                    children: vec![0, 1],
                    height: 1.0,
                },
                Merge {
                    children: vec![3, 2],
                    height: 3.0,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn distances_and_balls() {
        let d = sample();
        assert_eq!(d.distance(0, 1), 1.0);
        assert_eq!(d.distance(1, 2), 3.0);
        assert_eq!(d.ball_count(0.5), 3);
        assert_eq!(d.ball_count(1.0), 2);
        assert_eq!(d.ball_count(3.0), 1);
        let c = d.coarsen(1.0);
        assert_eq!(c.leaf_count, 2);
        assert_eq!(c.masses.as_ref().unwrap(), &vec![0.5, 0.5]);
        assert_eq!(c.diameter(), 3.0);
    }

    #[test]
    fn rejects_bad_trees() {
        let equal = vec![
            Merge {
                children: vec![0, 1],
                height: 1.0,
            },
            Merge {
                children: vec![3, 2],
                height: 1.0,
            },
        ];
        assert!(Dendrogram::new(3, 0, None, equal).is_err());
        assert!(Dendrogram::new(2, 0, None, vec![]).is_err());
        assert!(Dendrogram::new(
            2,
            0,
            None,
            vec![Merge {
                children: vec![0, 0],
                height: 1.0
            }]
        )
        .is_err());
        let lower_parent = vec![
            Merge {
                children: vec![0, 1],
                height: 2.0,
            },
            Merge {
                children: vec![3, 2],
                height: 1.0,
            },
        ];
        assert!(Dendrogram::new(3, 0, None, lower_parent).is_err());
    }

    #[test]
    fn gaps_build_expected_metric() {
        let gaps = [0.5, 0.2, 0.5, 0.9, 0.1];
        let d = Dendrogram::from_gaps(&gaps, 2, None).unwrap();
        for i in 0..6 {
            for j in (i + 1)..6 {
                let expect = gaps[i..j].iter().cloned().fold(0.0, f64::max);
                assert_eq!(d.distance(i, j), expect, "{i} {j}");
            }
        }
        // Equal gaps produce one multifurcation.
        let c = d.compact();
        assert!(c
            .merges
            .iter()
            .any(|m| m.height == 0.5 && m.children.len() == 3));
    }

    #[test]
    fn coarsen_to_limits_points() {
        let gaps = [0.1, 0.4, 0.2, 0.8, 0.3, 0.6, 0.05];
        let d = Dendrogram::from_gaps(&gaps, 0, Some(vec![1.0; 8])).unwrap();
        let c = d.coarsen_to(3).unwrap();
        assert!(c.leaf_count <= 3);
        assert_eq!(c.total_mass(), 8.0);
    }
}
