//! Ultrametric spaces read off excursions.
//!
//! For an excursion `f` reaching 1, leaves are the maximal runs of samples
//! with `f ≥ 1` and two consecutive runs are at distance `1 - min f` over
//! the samples between them. Gaps no deeper than the grid tolerance `2√dt`
//! are quotiented out. A leaf carries the local time at 1 of the samples
//! closer to it than to its neighbours, the split being at the argmin of
//! each gap.

use super::brownian::{straddling_bounds, straddling_excursion};
use super::grid::PathGrid;
use super::local_time::default_window;
use crate::error::{domain, Result};
use crate::metric::Dendrogram;
use rand::Rng;

/// Leaves on a line: `gaps[i]` separates leaf `i` from `i + 1`, `splits[i]`
/// is the sample index where the mass of the two is divided.
#[derive(Debug, Clone)]
struct Line {
    gaps: Vec<f64>,
    splits: Vec<usize>,
}

impl Line {
    fn leaf_of(&self, k: usize) -> usize {
        self.splits.partition_point(|&s| s < k)
    }

    fn masses(
        &self,
        values: &[f64],
        dt: f64,
        level: f64,
        range: std::ops::Range<usize>,
    ) -> Vec<f64> {
        let window = default_window(dt);
        let unit = dt / (2.0 * window);
        let mut m = vec![0.0; self.gaps.len() + 1];
        for k in range {
            if (values[k] - level).abs() < window {
                m[self.leaf_of(k)] += unit;
            }
        }
        m
    }
}

/// Runs of `values ≥ level` and the depths below `level` between them.
fn runs_above(values: &[f64], level: f64, tol: f64) -> Result<Line> {
    let mut gaps = Vec::new();
    let mut splits = Vec::new();
    let mut seen_run = false;
    let mut gap_min = f64::INFINITY;
    let mut gap_arg = 0;
    let mut in_gap = false;
    for (k, &v) in values.iter().enumerate() {
        if v >= level {
            if in_gap && seen_run {
                let depth = level - gap_min;
                if depth > tol {
                    gaps.push(depth);
                    splits.push(gap_arg);
                }
            }
            seen_run = true;
            in_gap = false;
        } else {
            if !in_gap {
                in_gap = true;
                gap_min = f64::INFINITY;
            }
            if v < gap_min {
                gap_min = v;
                gap_arg = k;
            }
        }
    }
    if !seen_run {
        return domain(format!("path never reaches level {level}"));
    }
    Ok(Line { gaps, splits })
}

fn finish(line: &Line, point: usize, masses: Vec<f64>, max_points: usize) -> Result<Dendrogram> {
    let full = Dendrogram::from_gaps(&line.gaps, point, Some(masses))?;
    full.coarsen_to(max_points)
}

/// Evans space of an excursion `f` that reaches 1, pointed at a leaf drawn
/// from the local-time measure at level 1, with at most `max_points` leaves
/// (finest ball quotient).
pub fn evans_space_from_excursion<R: Rng + ?Sized>(
    f: &PathGrid,
    max_points: usize,
    rng: &mut R,
) -> Result<Dendrogram> {
    let line = runs_above(&f.values, 1.0, default_window(f.dt))?;
    let masses = line.masses(&f.values, f.dt, 1.0, 0..f.len());
    let total: f64 = masses.iter().sum();
    let point = if total > 0.0 {
        let mut u = rng.random::<f64>() * total;
        let mut idx = masses.len() - 1;
        for (i, m) in masses.iter().enumerate() {
            if u < *m {
                idx = i;
                break;
            }
            u -= m;
        }
        idx
    } else {
        rng.random_range(0..masses.len())
    };
    finish(&line, point, masses, max_points)
}

/// Unit ball around `o = 0` of the space built from a two-sided path `W`:
/// the straddling excursion of `W` above `-1`, shifted by 1, read as an
/// excursion space and pointed at the leaf containing time zero.
pub fn limit_space_from_w(w: &PathGrid, max_points: usize) -> Result<Dendrogram> {
    let y = straddling_excursion(w, -1.0)?;
    let line = runs_above(&y.values, 1.0, default_window(y.dt))?;
    let masses = line.masses(&y.values, y.dt, 1.0, 0..y.len());
    let point = line.leaf_of(y.origin_index);
    finish(&line, point, masses, max_points)
}

/// The same ball built from the zero set of `W`: zeros are sign changes,
/// two consecutive zeros are at distance `max(-W)` between them (floored
/// at 0) and zeros closer than `2√dt` are identified. Masses are the local
/// time of `W` at 0 split at each separating maximum.
pub fn limit_space_from_zeros(w: &PathGrid, max_points: usize) -> Result<Dendrogram> {
    let (l, r) = straddling_bounds(w, -1.0)?;
    let v = &w.values;
    let tol = default_window(w.dt);
    let zeros: Vec<usize> = (l..r)
        .filter(|&k| (v[k] >= 0.0) != (v[k + 1] >= 0.0))
        .collect();
    let mut gaps = Vec::new();
    let mut splits = Vec::new();
    for pair in zeros.windows(2) {
        let (mut best, mut arg) = (0.0f64, pair[0] + 1);
        for k in pair[0] + 1..=pair[1] {
            if -v[k] > best {
                best = -v[k];
                arg = k;
            }
        }
        if best > tol {
            gaps.push(best);
            splits.push(arg);
        }
    }
    let line = Line { gaps, splits };
    let masses = line.masses(v, w.dt, 0.0, l..r + 1);
    let point = line.leaf_of(w.origin_index);
    finish(&line, point, masses, max_points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn grid(values: Vec<f64>, origin: usize) -> PathGrid {
        PathGrid::new(1e-6, values, origin).unwrap()
    }

    #[test]
    fn single_excursion_is_one_leaf() {
        let f = grid(vec![0.0, 0.5, 1.0, 1.2, 1.0, 0.4, 0.0], 0);
        let d = evans_space_from_excursion(&f, 100, &mut stream(0, "sp", 0)).unwrap();
        assert_eq!(d.leaf_count, 1);
    }

    #[test]
    fn gaps_give_running_minima() {
        let f = grid(vec![0.0, 1.1, 0.7, 1.2, 0.3, 1.05, 0.9, 1.3, 0.0], 0);
        let d = evans_space_from_excursion(&f, 100, &mut stream(0, "sp", 1)).unwrap();
        assert_eq!(d.leaf_count, 4);
        let dist = d.distance_matrix();
        assert!((dist[0][1] - 0.3).abs() < 1e-12);
        assert!((dist[0][2] - 0.7).abs() < 1e-12);
        assert!((dist[2][3] - 0.1).abs() < 1e-12);
        assert!((dist[1][3] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn never_reaching_one_is_an_error() {
        let f = grid(vec![0.0, 0.5, 0.0], 0);
        assert!(evans_space_from_excursion(&f, 10, &mut stream(0, "sp", 2)).is_err());
    }

    #[test]
    fn routes_agree_on_a_hand_path() {
        let w = grid(vec![-1.2, -0.2, 0.3, -0.6, 0.0, 0.2, -0.3, 0.1, -1.0], 4);
        let a = limit_space_from_w(&w, 100).unwrap();
        let b = limit_space_from_zeros(&w, 100).unwrap();
        assert_eq!(a.leaf_count, b.leaf_count);
        assert_eq!(a.point, b.point);
        let (da, db) = (a.distance_matrix(), b.distance_matrix());
        for i in 0..a.leaf_count {
            for j in 0..a.leaf_count {
                assert!((da[i][j] - db[i][j]).abs() < 1e-12);
            }
        }
    }
}
