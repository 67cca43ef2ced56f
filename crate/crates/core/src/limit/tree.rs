//! The tree of the limit space grown from a path of `Z`.

use crate::error::{domain, Result};
use crate::metric::{Dendrogram, Merge};
use crate::path::JumpPath;
use rand::Rng;

/// Grows a tree along `zpath`: at a jump of size `k` at time `r` a particle
/// chosen uniformly among those alive gives birth to `k` new particles.
/// Particles alive at `1-η` are the leaves, and two leaves are at distance
/// `1 - r` where `r` is the time their lineages split. The point is the
/// leaf of the initial particle.
pub fn build_limit_tree<R: Rng + ?Sized>(
    zpath: &JumpPath,
    eta: f64,
    rng: &mut R,
) -> Result<Dendrogram> {
    if !(eta > 0.0 && eta < 1.0) {
        return domain(format!("η must lie in (0,1), got {eta}"));
    }
    let horizon = 1.0 - eta;
    let mut alive = 1usize;
    // (time, parent, first child, count)
    let mut births: Vec<(f64, usize, usize, usize)> = Vec::new();
    for (r, dz) in zpath.jumps() {
        if r > horizon {
            break;
        }
        let k = dz.round() as usize;
        if k == 0 {
            continue;
        }
        let parent = rng.random_range(0..alive);
        births.push((r, parent, alive, k));
        alive += k;
    }
    // Reverse sweep: each birth becomes a merge at height 1 - r.
    let mut top: Vec<usize> = (0..alive).collect();
    let mut merges: Vec<Merge> = Vec::with_capacity(births.len());
    for &(r, parent, first, k) in births.iter().rev() {
        let mut children = vec![top[parent]];
        children.extend((first..first + k).map(|c| top[c]));
        top[parent] = alive + merges.len();
        merges.push(Merge {
            children,
            height: 1.0 - r,
        });
    }
    // Merges were created with increasing height and only refer to earlier
    // ones; the first birth is the root.
    Dendrogram::new(alive, 0, None, merges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn trivial_paths() {
        let mut rng = stream(0, "tree", 0);
        let flat = JumpPath::constant(0.0, 1.0);
        assert_eq!(
            build_limit_tree(&flat, 0.1, &mut rng).unwrap().leaf_count,
            1
        );
        let one = JumpPath::new(vec![0.0, 0.3], vec![1.0, 2.0]).unwrap();
        let t = build_limit_tree(&one, 0.1, &mut rng).unwrap();
        assert_eq!(t.leaf_count, 2);
        assert!((t.distance(0, 1) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn ball_counts_follow_path() {
        let p = JumpPath::new(
            vec![0.0, 0.1, 0.35, 0.5, 0.8, 0.95],
            vec![1.0, 3.0, 4.0, 7.0, 8.0, 9.0],
        )
        .unwrap();
        let t = build_limit_tree(&p, 0.1, &mut stream(5, "tree", 1)).unwrap();
        assert_eq!(t.leaf_count, 8);
        for r in [0.05, 0.2, 0.4, 0.6, 0.85] {
            assert_eq!(t.ball_count(1.0 - r) as f64, p.value_at(r), "r={r}");
        }
    }
}
