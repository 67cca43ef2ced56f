//! Finite ultrametric spaces and Gromov-Hausdorff(-Prokhorov) distances.

mod dendrogram;
mod gh;
mod io;
mod pointed;
mod prokhorov;

pub use dendrogram::{Dendrogram, Merge};
pub use gh::{gh_bounds, gh_exact, gh_exact_with, Correspondence, DEFAULT_GH_CAP};
pub use io::{read_dendrogram, write_dendrogram};
pub use pointed::{
    glued_hausdorff_prokhorov, pointed_gh, pointed_gh_with, pointed_ghp, pointed_ghp_with,
    PointedDistance,
};
pub use prokhorov::{prokhorov, prokhorov_general};

use crate::error::{domain, Result};

/// Partition of the closed unit ball `B(center, 1)` into the closed balls of
/// the given radius that it contains.
pub fn ball_decomposition(
    space: &Dendrogram,
    center: usize,
    radius: f64,
) -> Result<Vec<Dendrogram>> {
    if center >= space.leaf_count {
        return domain(format!("center {center} is not a leaf"));
    }
    if !(radius >= 0.0) {
        return domain("radius must be nonnegative");
    }
    let unit = space.subtree(space.ball_node(center, 1.0));
    Ok(unit
        .ball_nodes(radius)
        .into_iter()
        .map(|b| unit.subtree(b))
        .collect())
}

/// Quotient of `space` by its closed `eta`-balls, with `dist(B_i, B_j)` as
/// the metric.
pub fn space_from_balls(space: &Dendrogram, eta: f64) -> Dendrogram {
    space.coarsen(eta)
}

/// The path `r ↦ ball_count(1 - r)` on `[0, 1)`, jumping at `r = 1 - h` for
/// every merge height `h ∈ (0, 1)`.
pub fn ball_count_path(space: &Dendrogram) -> crate::path::JumpPath {
    let mut jumps: Vec<(f64, usize)> = space
        .merges
        .iter()
        .filter(|m| m.height > 0.0 && m.height < 1.0)
        .map(|m| (1.0 - m.height, m.children.len() - 1))
        .collect();
    jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut count = space.ball_count(1.0);
    let mut path = crate::path::JumpPath::constant(0.0, count as f64);
    let mut k = 0;
    while k < jumps.len() {
        let r = jumps[k].0;
        while k < jumps.len() && jumps[k].0 == r {
            count += jumps[k].1;
            k += 1;
        }
        path.push(r, count as f64);
    }
    path
}
