//! Solver outputs against independent brute-force computations.

mod common;

use common::*;
use extremal_kit::chebyshev::{min_enclosing_ball, DEFAULT_TOL};
use extremal_kit::geometry::{distance, PointSet};
use extremal_kit::mnc::{covering_radius, partition_diameter, ProfileMode};
use extremal_kit::simplex::{extract_exact, extract_greedy, ExtractionOutcome, FailureMode};

#[test]
fn partition_enumerator_counts_match_stirling_sums() {
    for (m, k) in [(1, 1), (4, 2), (6, 2), (6, 6), (8, 3), (9, 3), (7, 4)] {
        let mut n = 0u64;
        for_each_partition(m, k, |_| n += 1);
        assert_eq!(n, partitions_at_most(m, k), "m={m} k={k}");
    }
    // Bell(5) = 52.
    assert_eq!(partitions_at_most(5, 5), 52);
}

#[test]
fn meb_matches_exhaustive_circumballs() {
    for seed in 0..60 {
        let m = 3 + (seed as usize % 6);
        let d = 1 + (seed as usize % 3);
        let pts = random_set(seed, m, d, false);
        let (c, r) = brute_meb(&pts);
        let res = min_enclosing_ball(&pts, DEFAULT_TOL).unwrap();
        assert!(
            (res.radius - r).abs() <= 1e-9 * (1.0 + r),
            "seed {seed}: {} vs {r}",
            res.radius
        );
        assert!(distance(&res.center, &c) <= 1e-7, "seed {seed}");
    }
}

#[test]
fn orthonormal_three_center_survives_grid_refinement() {
    let pts = extremal_kit::generators::orthonormal_family(3).unwrap();
    let far = |c: &[f64]| pts.iter().map(|p| distance(p, c)).fold(0.0, f64::max);
    let mut best = vec![1.0 / 3.0; 3];
    let mut step = 0.1;
    for _ in 0..12 {
        let mut improved = best.clone();
        let mut value = far(&best);
        for i in -5i32..=5 {
            for j in -5i32..=5 {
                for k in -5i32..=5 {
                    let c = [
                        best[0] + i as f64 * step,
                        best[1] + j as f64 * step,
                        best[2] + k as f64 * step,
                    ];
                    let v = far(&c);
                    if v < value {
                        value = v;
                        improved = c.to_vec();
                    }
                }
            }
        }
        best = improved;
        step /= 4.0;
    }
    let res = min_enclosing_ball(&pts, DEFAULT_TOL).unwrap();
    assert!((far(&best) - res.radius).abs() < 1e-9);
    assert!(distance(&best, &res.center) < 1e-6);
    assert!((res.radius - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
}

#[test]
fn exact_extraction_matches_subset_enumeration() {
    for seed in 0..20u64 {
        let m = 5 + (seed as usize % 7);
        let pts = random_set(100 + seed, m, 2 + seed as usize % 4, seed % 2 == 0);
        let diam = brute_diameter(&pts);
        for frac in [0.3, 0.5, 0.7, 0.85, 1.0] {
            let t = frac * diam;
            let omega = brute_max_clique(&pts, t);
            for p in 1..m {
                let exact = extract_exact(&pts, t, p).unwrap();
                match (&exact, omega > p) {
                    (ExtractionOutcome::Found(c), true) => {
                        assert_eq!(c.vertex_indices.len(), p + 1);
                        assert!(c.min_edge >= t);
                    }
                    (ExtractionOutcome::NotFound { mode, best_size }, false) => {
                        assert_eq!(*mode, FailureMode::ProvenNonexistent);
                        assert_eq!(*best_size, omega, "seed {seed} t {t} p {p}");
                    }
                    (got, expected) => {
                        panic!("seed {seed} t {t} p {p}: {got:?}, oracle says {expected}")
                    }
                }
                // Greedy never claims more than exists.
                if extract_greedy(&pts, t, p).unwrap().certificate().is_some() {
                    assert!(omega > p);
                }
            }
        }
    }
}

fn radius_oracle(part: &PointSet) -> f64 {
    if part.len() == 1 {
        0.0
    } else {
        brute_meb(part).1
    }
}

#[test]
fn exact_profiles_match_partition_enumeration() {
    let mut sets = vec![extremal_kit::generators::orthonormal_family(6).unwrap()];
    for seed in 0..4 {
        sets.push(random_set(200 + seed, 8, 3, false));
    }
    sets.push(random_set(300, 9, 2, false));
    for pts in &sets {
        let m = pts.len();
        for k in [2, 3].into_iter().filter(|&k| k < m) {
            let rho = covering_radius(pts, k, ProfileMode::Exact).unwrap().value;
            let delta = partition_diameter(pts, k, ProfileMode::Exact)
                .unwrap()
                .value;
            let rho_o = brute_partition_value(pts, k, radius_oracle);
            let delta_o = brute_partition_value(pts, k, brute_diameter);
            assert!((rho - rho_o).abs() <= 1e-9, "m={m} k={k}: {rho} vs {rho_o}");
            assert_eq!(delta, delta_o, "m={m} k={k}");
        }
    }
}
