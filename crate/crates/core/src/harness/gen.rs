//! Random finite ultrametric spaces for tests and the distance suite.

use crate::metric::Dendrogram;
use rand::Rng;

/// A random pointed ultrametric on `leaves` points. Half of the gap depths
/// are drawn from a small lattice so that ties and multifurcations occur.
/// With `masses`, leaf masses are positive and sum to 1.
pub fn random_dendrogram<R: Rng + ?Sized>(leaves: usize, masses: bool, rng: &mut R) -> Dendrogram {
    assert!(leaves >= 1, "need at least one leaf");
    let gaps: Vec<f64> = (0..leaves - 1)
        .map(|_| {
            if rng.random::<bool>() {
                0.25 * rng.random_range(1..=4) as f64
            } else {
                1e-3 + rng.random::<f64>()
            }
        })
        .collect();
    let m = masses.then(|| {
        let raw: Vec<f64> = (0..leaves).map(|_| 0.05 + rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    });
    let point = rng.random_range(0..leaves);
    Dendrogram::from_gaps(&gaps, point, m).expect("positive gaps")
}
