//! Independent brute-force oracles and seeded instances shared by the integration tests.
#![allow(dead_code)]

use extremal_kit::geometry::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random point set: `m` points with i.i.d. coordinates in [-1, 1]^d,
/// optionally projected to the unit sphere.
pub fn random_set(seed: u64, m: usize, d: usize, on_sphere: bool) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            if on_sphere {
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= n);
            }
            v
        })
        .collect();
    PointSet::new(rows).unwrap()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` when (nearly) singular.
#[allow(clippy::needless_range_loop)]
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |s, x| s.max(x.abs()))
        .max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Circumcenter of the points `idx` within their affine hull.
pub fn circumcenter(points: &PointSet, idx: &[usize]) -> Option<Vec<f64>> {
    let p0 = points.point(idx[0]);
    let dirs: Vec<Vec<f64>> = idx[1..].iter().map(|&i| sub(points.point(i), p0)).collect();
    let g: Vec<Vec<f64>> = dirs
        .iter()
        .map(|u| dirs.iter().map(|v| dot(u, v)).collect())
        .collect();
    let rhs: Vec<f64> = dirs.iter().map(|u| dot(u, u) / 2.0).collect();
    let lam = if dirs.is_empty() {
        vec![]
    } else {
        solve(g, rhs)?
    };
    let mut c = p0.to_vec();
    for (l, u) in lam.iter().zip(&dirs) {
        for (ci, ui) in c.iter_mut().zip(u) {
            *ci += l * ui;
        }
    }
    Some(c)
}

/// Minimum enclosing ball by exhaustion: the smallest circumball of at most
/// `d + 1` points that contains every point.
pub fn brute_meb(points: &PointSet) -> (Vec<f64>, f64) {
    let m = points.len();
    let max_size = (points.dim() + 1).min(m);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut idx = Vec::new();
    fn rec(
        start: usize,
        max_size: usize,
        points: &PointSet,
        idx: &mut Vec<usize>,
        best: &mut Option<(Vec<f64>, f64)>,
    ) {
        if !idx.is_empty() {
            if let Some(c) = circumcenter(points, idx) {
                let r = points
                    .iter()
                    .map(|p| dot(&sub(p, &c), &sub(p, &c)).sqrt())
                    .fold(0.0, f64::max);
                let on = dot(
                    &sub(points.point(idx[0]), &c),
                    &sub(points.point(idx[0]), &c),
                )
                .sqrt();
                if r <= on * (1.0 + 1e-12) + 1e-15 && best.as_ref().is_none_or(|b| r < b.1) {
                    *best = Some((c, r));
                }
            }
        }
        if idx.len() == max_size {
            return;
        }
        for i in start..points.len() {
            idx.push(i);
            rec(i + 1, max_size, points, idx, best);
            idx.pop();
        }
    }
    rec(0, max_size, points, &mut idx, &mut best);
    best.expect("some circumball encloses the set")
}

/// Size of the largest subset whose pairwise distances are all ≥ `threshold`,
/// by enumerating every subset (m ≤ 20).
pub fn brute_max_clique(points: &PointSet, threshold: f64) -> usize {
    let m = points.len();
    assert!(m <= 20);
    let far: Vec<Vec<bool>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let d = dot(
                        &sub(points.point(i), points.point(j)),
                        &sub(points.point(i), points.point(j)),
                    )
                    .sqrt();
                    d >= threshold
                })
                .collect()
        })
        .collect();
    let mut best = 0;
    for mask in 0u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let members: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let ok = members
            .iter()
            .enumerate()
            .all(|(a, &i)| members[a + 1..].iter().all(|&j| far[i][j]));
        if ok {
            best = size;
        }
    }
    best
}

/// Calls `f` with every restricted growth string of length `m` using at most
/// `k` blocks (each set partition into ≤ k parts exactly once). Iterative
/// successor form: increment the last position that may still grow.
pub fn for_each_partition(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut a = vec![0usize; m];
    // prefix_max[i] = max(a[0..i]), with prefix_max[0] = 0 by convention.
    loop {
        f(&a);
        let mut i = m;
        loop {
            if i <= 1 {
                return;
            }
            i -= 1;
            let prefix_max = a[..i].iter().copied().max().unwrap_or(0);
            if a[i] <= prefix_max && a[i] + 1 < k {
                a[i] += 1;
                for x in a[i + 1..].iter_mut() {
                    *x = 0;
                }
                break;
            }
        }
    }
}

/// Optimal max-per-part value over all partitions into ≤ k parts, with the
/// per-part cost memoized by bitmask.
pub fn brute_partition_value(points: &PointSet, k: usize, cost: impl Fn(&PointSet) -> f64) -> f64 {
    let m = points.len();
    let mut memo = vec![f64::NAN; 1 << m];
    let mut best = f64::INFINITY;
    for_each_partition(m, k, |a| {
        let mut masks = vec![0usize; k];
        for (i, &b) in a.iter().enumerate() {
            masks[b] |= 1 << i;
        }
        let mut worst = 0.0_f64;
        for &mask in masks.iter().filter(|&&x| x != 0) {
            if memo[mask].is_nan() {
                let idx: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
                memo[mask] = cost(&points.subset(&idx).unwrap());
            }
            worst = worst.max(memo[mask]);
        }
        best = best.min(worst);
    });
    best
}

pub fn brute_diameter(points: &PointSet) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(
                dot(
                    &sub(points.point(i), points.point(j)),
                    &sub(points.point(i), points.point(j)),
                )
                .sqrt(),
            );
        }
    }
    d
}

/// Number of set partitions of m elements into at most k blocks.
pub fn partitions_at_most(m: usize, k: usize) -> u64 {
    // Stirling numbers of the second kind by the usual recurrence.
    let mut s = vec![vec![0u64; k + 1]; m + 1];
    s[0][0] = 1;
    for n in 1..=m {
        for j in 1..=k {
            s[n][j] = j as u64 * s[n - 1][j] + s[n - 1][j - 1];
        }
    }
    s[m].iter().sum()
}
