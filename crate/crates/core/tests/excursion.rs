//! Brownian excursions, their local times and the spaces built from them.

use lambda_coalescent::excursion::{
    conditioned_excursion, default_window, evans_space_from_excursion, level_grid,
    limit_space_from_w, limit_space_from_zeros, local_time_at, local_time_profile, local_time_sd,
    refine_bridge, scaled_excursion_family, simulate_straddling_excursion, simulate_straddling_w,
    WalkOptions,
};
use lambda_coalescent::harness::stats::ks_one_sample;
use lambda_coalescent::metric::gh_exact;
use lambda_coalescent::rng::stream;

#[test]
fn local_time_is_stable_under_halving_dt() {
    let dt = 1e-5;
    for i in 0..20u64 {
        let y = simulate_straddling_excursion(
            dt,
            WalkOptions::default(),
            &mut stream(3, "lt-coarse", i),
        )
        .unwrap();
        let fine = refine_bridge(&y, 2, &mut stream(3, "lt-fine", i)).unwrap();
        let (a, b) = (local_time_at(&y, 1.0), local_time_at(&fine, 1.0));
        let sd = local_time_sd(a.max(b), default_window(dt));
        assert!(
            (a - b).abs() < 4.0 * sd + 1e-9,
            "replica {i}: {a} vs {b} (sd {sd})"
        );
    }
}

#[test]
fn leaf_masses_add_up_to_the_local_time() {
    let dt = 1e-5;
    for i in 0..20u64 {
        let f = conditioned_excursion(dt, &mut stream(5, "mass-exc", i)).unwrap();
        let ell = local_time_at(&f, 1.0);
        let space =
            evans_space_from_excursion(&f, usize::MAX, &mut stream(5, "mass-pt", i)).unwrap();
        let total = space.total_mass();
        assert!(
            (total - ell).abs() <= 0.05 * ell.max(1e-3),
            "replica {i}: {total} vs {ell}"
        );
        let coarse = evans_space_from_excursion(&f, 8, &mut stream(5, "mass-pt", i)).unwrap();
        assert!(coarse.leaf_count <= 8);
        assert!((coarse.total_mass() - total).abs() < 1e-9);
    }
}

#[test]
fn excursion_and_zero_set_routes_agree() {
    let dt = 1e-5;
    for i in 0..20u64 {
        let w = simulate_straddling_w(
            dt,
            -1.0,
            WalkOptions::default(),
            &mut stream(7, "routes", i),
        )
        .unwrap();
        let a = limit_space_from_w(&w, 8).unwrap();
        let b = limit_space_from_zeros(&w, 8).unwrap();
        assert_eq!(a.leaf_count, b.leaf_count, "replica {i}");
        let d = gh_exact(&a, &b).unwrap();
        assert!(d < 2.0 * dt.sqrt(), "replica {i}: {d}");
        assert_eq!(a.point, b.point, "replica {i}");
    }
}

#[test]
fn excursion_spaces_are_ultrametric_with_unit_diameter() {
    let dt = 1e-5;
    for i in 0..10u64 {
        let f = conditioned_excursion(dt, &mut stream(9, "ultra", i)).unwrap();
        let s = evans_space_from_excursion(&f, 12, &mut stream(9, "ultra-pt", i)).unwrap();
        assert!(s.diameter() <= 1.0);
        let n = s.leaf_count;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    assert!(s.distance(a, c) <= s.distance(a, b).max(s.distance(b, c)));
                }
            }
        }
    }
}

/// Structural properties of the rescaled family, then the KS distance of
/// `ℓ̂₁(Y_ε)` to Gamma(2, scale 2) as `ε` shrinks (printed, not asserted:
/// at a fixed grid the rescaled step `dt·T²` grows like `ε⁻²`).
#[test]
fn scaled_family_structure_and_ks_trend() {
    let dt = 1e-6;
    let levels = level_grid(0.5, 1.0, 500);
    let gamma_cdf = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            1.0 - (-x / 2.0).exp() * (1.0 + x / 2.0)
        }
    };
    let reps = 60u64;
    let paths: Vec<_> = (0..reps)
        .map(|i| conditioned_excursion(dt, &mut stream(17, "family", i)).unwrap())
        .collect();
    let mut trend = Vec::new();
    for &eps in &[0.1, 0.03, 0.01] {
        let mut ells = Vec::new();
        for (i, x) in paths.iter().enumerate() {
            let profile = local_time_profile(x, &levels).unwrap();
            let Ok(fam) =
                scaled_excursion_family(x, eps, &profile, &mut stream(17, "family-pick", i as u64))
            else {
                continue;
            };
            assert!(fam.t_eps >= eps.powf(-0.5) - 1e-12);
            assert!(fam.selected < fam.excursions.len());
            assert_eq!(fam.excursions.len(), fam.local_times.len());
            for e in &fam.excursions {
                assert!((e.dt - dt * fam.t_eps * fam.t_eps).abs() < 1e-12 * e.dt.max(1.0));
                assert_eq!(e.values[0], 0.0);
                assert_eq!(*e.values.last().unwrap(), 0.0);
                assert!(e.max() >= 1.0);
                assert!(e.values[1..e.len() - 1].iter().all(|&v| v > 0.0));
            }
            ells.push(local_time_at(fam.y_eps(), 1.0));
        }
        assert!(!ells.is_empty());
        trend.push((eps, ells.len(), ks_one_sample(&ells, gamma_cdf).unwrap()));
    }
    for (eps, n, ks) in &trend {
        println!("eps {eps}: {n} families, KS of local time at 1 vs Gamma(2, 2) = {ks:.4}");
    }
}
