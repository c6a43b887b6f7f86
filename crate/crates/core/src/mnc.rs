//! Covering-radius and partition-diameter profiles of finite point sets.
//!
//! For a finite set these are the desk-scale stand-ins for the Hausdorff and
//! Kuratowski measures of non-compactness: `rho(k)` is the smallest `r` such
//! that `k` balls of radius `r` (centers anywhere) cover the set, and
//! `delta(k)` the smallest maximal part diameter over partitions into at most
//! `k` parts. Both are computed exactly by restricted-growth-string
//! enumeration for small inputs, or by a deterministic multi-start heuristic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{min_enclosing_ball, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::generators::FamilySpec;
use crate::geometry::{distance, distance_matrix, Ball, PointSet};

pub const GREEDY_RESTARTS: usize = 8;
pub const GREEDY_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMode {
    Exact,
    Greedy,
}

impl ProfileMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileMode::Exact => "exact",
            ProfileMode::Greedy => "greedy",
        }
    }
}

/// Size limits for exact enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactCaps {
    pub max_m: usize,
    pub max_k: usize,
}

impl Default for ExactCaps {
    fn default() -> Self {
        ExactCaps {
            max_m: 14,
            max_k: 4,
        }
    }
}

impl ExactCaps {
    pub fn allows(&self, m: usize, k: usize) -> bool {
        m <= self.max_m && k <= self.max_k
    }

    fn check(&self, m: usize, k: usize) -> Result<()> {
        if m > self.max_m {
            return Err(Error::SizeCap {
                what: "point count",
                actual: m,
                cap: self.max_m,
            });
        }
        if k > self.max_k {
            return Err(Error::SizeCap {
                what: "part count k",
                actual: k,
                cap: self.max_k,
            });
        }
        Ok(())
    }
}

/// Objective value and the part index of every point.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub value: f64,
    pub assignment: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverEntry {
    pub k: usize,
    pub rho: f64,
    pub mode: ProfileMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringProfile {
    pub m: usize,
    pub entries: Vec<CoverEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionEntry {
    pub k: usize,
    pub delta: f64,
    pub mode: ProfileMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionProfile {
    pub m: usize,
    pub entries: Vec<PartitionEntry>,
    /// Set when the profiled set (a sphere slice) had no points.
    #[serde(default)]
    pub empty: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Objective {
    Radius,
    Diameter,
}

/// Optimal (exact) or heuristic (greedy) k-ball covering radius.
pub fn covering_radius(points: &PointSet, k: usize, mode: ProfileMode) -> Result<Clustering> {
    cluster(points, k, mode, ExactCaps::default(), Objective::Radius)
}

/// Optimal (exact) or heuristic (greedy) k-part partition diameter.
pub fn partition_diameter(points: &PointSet, k: usize, mode: ProfileMode) -> Result<Clustering> {
    cluster(points, k, mode, ExactCaps::default(), Objective::Diameter)
}

pub fn covering_radius_with(
    points: &PointSet,
    k: usize,
    mode: ProfileMode,
    caps: ExactCaps,
) -> Result<Clustering> {
    cluster(points, k, mode, caps, Objective::Radius)
}

pub fn partition_diameter_with(
    points: &PointSet,
    k: usize,
    mode: ProfileMode,
    caps: ExactCaps,
) -> Result<Clustering> {
    cluster(points, k, mode, caps, Objective::Diameter)
}

fn cluster(
    points: &PointSet,
    k: usize,
    mode: ProfileMode,
    caps: ExactCaps,
    obj: Objective,
) -> Result<Clustering> {
    let m = points.len();
    if k == 0 || k > m {
        return Err(Error::domain(format!("k must lie in 1..={m}, got {k}")));
    }
    if k == m {
        return Ok(Clustering {
            value: 0.0,
            assignment: (0..m).collect(),
        });
    }
    let costs = PartCost::new(points, obj);
    match mode {
        ProfileMode::Exact => {
            caps.check(m, k)?;
            let upper = greedy(&costs, k)?;
            exact(&costs, k, upper)
        }
        ProfileMode::Greedy => greedy(&costs, k),
    }
}

/// Cost of a part: MEB radius or diameter.
struct PartCost<'a> {
    points: &'a PointSet,
    dist: Vec<Vec<f64>>,
    obj: Objective,
}

impl<'a> PartCost<'a> {
    fn new(points: &'a PointSet, obj: Objective) -> Self {
        PartCost {
            points,
            dist: distance_matrix(points),
            obj,
        }
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn of(&self, members: &[usize]) -> Result<f64> {
        if members.len() <= 1 {
            return Ok(0.0);
        }
        match self.obj {
            Objective::Radius => {
                Ok(min_enclosing_ball(&self.points.subset(members)?, DEFAULT_TOL)?.radius)
            }
            Objective::Diameter => {
                let mut best = 0.0_f64;
                for (a, &i) in members.iter().enumerate() {
                    for &j in &members[a + 1..] {
                        best = best.max(self.dist[i][j]);
                    }
                }
                Ok(best)
            }
        }
    }

    fn value(&self, assignment: &[usize], k: usize) -> Result<f64> {
        let mut worst = 0.0_f64;
        for part in parts(assignment, k) {
            worst = worst.max(self.of(&part)?);
        }
        Ok(worst)
    }
}

fn parts(assignment: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k];
    for (i, &b) in assignment.iter().enumerate() {
        out[b].push(i);
    }
    out
}

/// Relabels parts in order of first appearance so equal partitions compare equal.
fn canonical(assignment: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    assignment
        .iter()
        .map(|b| {
            let next = map.len();
            *map.entry(*b).or_insert(next)
        })
        .collect()
}

/// Depth-first restricted-growth-string enumeration with monotone pruning.
///
/// Part costs are memoized per bitmask; a part's cost never decreases when a
/// point is added, so a prefix whose worst part already reaches the incumbent
/// is cut.
fn exact(costs: &PartCost, k: usize, upper: Clustering) -> Result<Clustering> {
    let m = costs.len();
    let mut memo = vec![f64::NAN; 1usize << m];
    memo[0] = 0.0;
    let mut best_value = upper.value * (1.0 + 1e-12) + 1e-300;
    let mut best_assignment = canonical(&upper.assignment);
    let mut rgs = vec![0usize; m];
    let mut masks = vec![0u32; k];
    let mut err = None;

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        i: usize,
        used: usize,
        worst: f64,
        k: usize,
        costs: &PartCost,
        memo: &mut [f64],
        rgs: &mut [usize],
        masks: &mut [u32],
        best_value: &mut f64,
        best_assignment: &mut Vec<usize>,
        err: &mut Option<Error>,
    ) {
        let m = rgs.len();
        if err.is_some() {
            return;
        }
        if i == m {
            if worst < *best_value {
                *best_value = worst;
                best_assignment.copy_from_slice(rgs);
            }
            return;
        }
        let limit = (used + 1).min(k);
        for b in 0..limit {
            let mask = masks[b] | (1 << i);
            let mut c = memo[mask as usize];
            if c.is_nan() {
                let members: Vec<usize> = (0..m).filter(|&j| mask & (1 << j) != 0).collect();
                match costs.of(&members) {
                    Ok(v) => c = v,
                    Err(e) => {
                        *err = Some(e);
                        return;
                    }
                }
                memo[mask as usize] = c;
            }
            let w = worst.max(c);
            if w >= *best_value {
                continue;
            }
            let prev = masks[b];
            masks[b] = mask;
            rgs[i] = b;
            recurse(
                i + 1,
                used.max(b + 1),
                w,
                k,
                costs,
                memo,
                rgs,
                masks,
                best_value,
                best_assignment,
                err,
            );
            masks[b] = prev;
        }
    }

    recurse(
        0,
        0,
        0.0,
        k,
        costs,
        &mut memo,
        &mut rgs,
        &mut masks,
        &mut best_value,
        &mut best_assignment,
        &mut err,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let value = costs.value(&best_assignment, k)?;
    Ok(Clustering {
        value,
        assignment: best_assignment,
    })
}

/// Multi-start heuristic: farthest-first seeding, balanced insertion, then
/// alternating re-centering and reassignment while the objective improves.
fn greedy(costs: &PartCost, k: usize) -> Result<Clustering> {
    let m = costs.len();
    let mut starts: Vec<usize> = (0..GREEDY_RESTARTS)
        .map(|r| r * m / GREEDY_RESTARTS)
        .collect();
    starts.dedup();
    let runs: Vec<Result<Clustering>> = starts
        .par_iter()
        .map(|&s| greedy_run(costs, k, s))
        .collect();
    let mut best: Option<Clustering> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn greedy_run(costs: &PartCost, k: usize, first: usize) -> Result<Clustering> {
    let m = costs.len();
    let d = &costs.dist;

    // Farthest-first traversal of all points.
    let mut order = vec![first];
    let mut taken = vec![false; m];
    taken[first] = true;
    let mut near: Vec<f64> = d[first].clone();
    while order.len() < m {
        let mut next = None;
        for j in 0..m {
            if !taken[j] && next.is_none_or(|n: usize| near[j] > near[n]) {
                next = Some(j);
            }
        }
        let j = next.expect("untaken point remains");
        taken[j] = true;
        order.push(j);
        for (q, nq) in near.iter_mut().enumerate() {
            *nq = nq.min(d[j][q]);
        }
    }

    // The first k points of the traversal seed the parts; the rest are
    // inserted where the part's bound grows least.
    let mut assignment = vec![usize::MAX; m];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let dim = costs.points.dim();
    let mut balls: Vec<(Vec<f64>, f64)> = vec![(vec![0.0; dim], 0.0); k];
    for (b, &s) in order.iter().take(k).enumerate() {
        assignment[s] = b;
        members[b].push(s);
        balls[b] = (costs.points.point(s).to_vec(), 0.0);
    }
    let mut diam = vec![0.0_f64; k];
    for &p in &order[k..] {
        let x = costs.points.point(p);
        let mut best = (0, f64::INFINITY);
        for b in 0..k {
            let grown = match costs.obj {
                Objective::Radius => {
                    let (c, r) = &balls[b];
                    r.max((r + distance(x, c)) / 2.0)
                }
                Objective::Diameter => members[b].iter().fold(diam[b], |acc, &q| acc.max(d[p][q])),
            };
            if grown < best.1 {
                best = (b, grown);
            }
        }
        let b = best.0;
        match costs.obj {
            Objective::Radius => {
                let (c, r) = &mut balls[b];
                let dist = distance(x, c);
                if dist > *r {
                    // Smallest ball containing the old ball and x.
                    let new_r = (*r + dist) / 2.0;
                    let t = (new_r - *r) / dist;
                    for (ci, xi) in c.iter_mut().zip(x) {
                        *ci += t * (xi - *ci);
                    }
                    *r = new_r;
                }
            }
            Objective::Diameter => diam[b] = best.1,
        }
        assignment[p] = b;
        members[b].push(p);
    }

    let mut value = costs.value(&assignment, k)?;
    for _ in 0..GREEDY_MAX_ITER {
        let next = match costs.obj {
            Objective::Radius => reassign_to_centers(costs, &assignment, k)?,
            Objective::Diameter => reassign_by_spread(costs, &assignment, k),
        };
        let next_value = costs.value(&next, k)?;
        if next_value < value {
            value = next_value;
            assignment = next;
        } else {
            break;
        }
    }
    Ok(Clustering { value, assignment })
}

fn reassign_to_centers(costs: &PartCost, assignment: &[usize], k: usize) -> Result<Vec<usize>> {
    let mut centers = Vec::with_capacity(k);
    for part in parts(assignment, k) {
        if part.is_empty() {
            centers.push(None);
        } else {
            let ball = min_enclosing_ball(&costs.points.subset(&part)?, DEFAULT_TOL)?;
            centers.push(Some(ball.center));
        }
    }
    Ok((0..costs.len())
        .map(|i| {
            let x = costs.points.point(i);
            let mut best = (assignment[i], f64::INFINITY);
            for (b, c) in centers.iter().enumerate() {
                if let Some(c) = c {
                    let dd = distance(x, c);
                    if dd < best.1 {
                        best = (b, dd);
                    }
                }
            }
            best.0
        })
        .collect())
}

fn reassign_by_spread(costs: &PartCost, assignment: &[usize], k: usize) -> Vec<usize> {
    let groups = parts(assignment, k);
    (0..costs.len())
        .map(|i| {
            let mut best = (assignment[i], f64::INFINITY);
            for (b, g) in groups.iter().enumerate() {
                let spread = g
                    .iter()
                    .filter(|&&q| q != i)
                    .fold(0.0_f64, |acc, &q| acc.max(costs.dist[i][q]));
                if spread < best.1 {
                    best = (b, spread);
                }
            }
            best.0
        })
        .collect()
}

/// One row of a profile table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub family: String,
    pub m: usize,
    pub k: usize,
    pub mode: ProfileMode,
    pub rho: f64,
    pub delta: f64,
}

#[derive(Clone, Debug)]
pub struct ProfileOptions {
    pub mode: ProfileMode,
    pub caps: ExactCaps,
    /// Rescale each truncation so its Chebyshev radius is 1. Off by default:
    /// the example families are already at the scale of the infinite set.
    pub unit_radius: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            mode: ProfileMode::Greedy,
            caps: ExactCaps::default(),
            unit_radius: false,
        }
    }
}

/// Covering and partition profiles of one point set over `k_grid`.
///
/// Exact cells over the caps fall back to greedy (recorded in `mode`).
/// Greedy cells keep the better of the covering and partition assignments
/// under each objective.
/// Values are made nonincreasing in `k`: a cover by at most `k` parts is
/// also a cover by at most `k' > k` parts. Entries with `k > m` are skipped.
pub fn profiles(
    points: &PointSet,
    k_grid: &[usize],
    opts: &ProfileOptions,
) -> Result<(CoveringProfile, PartitionProfile)> {
    let m = points.len();
    let mut ks: Vec<usize> = k_grid
        .iter()
        .copied()
        .filter(|&k| k >= 1 && k <= m)
        .collect();
    ks.sort_unstable();
    ks.dedup();
    let mut cover = CoveringProfile {
        m,
        entries: Vec::new(),
    };
    let mut part = PartitionProfile {
        m,
        entries: Vec::new(),
        empty: false,
    };
    let mut best_rho: Option<(f64, ProfileMode)> = None;
    let mut best_delta: Option<(f64, ProfileMode)> = None;
    for k in ks {
        let mode = match opts.mode {
            ProfileMode::Exact if opts.caps.allows(m, k) || k == m => ProfileMode::Exact,
            _ => ProfileMode::Greedy,
        };
        let cover_run = covering_radius_with(points, k, mode, opts.caps)?;
        let part_run = partition_diameter_with(points, k, mode, opts.caps)?;
        let (mut rho, mut delta) = (cover_run.value, part_run.value);
        if mode == ProfileMode::Greedy && k < m {
            // Score each heuristic assignment under the other objective too, so
            // rho ≤ delta ≤ 2·rho holds for heuristic values as it does for optima.
            let by_radius = PartCost::new(points, Objective::Radius);
            let by_diameter = PartCost::new(points, Objective::Diameter);
            rho = rho.min(by_radius.value(&part_run.assignment, k)?);
            delta = delta.min(by_diameter.value(&cover_run.assignment, k)?);
        }
        let r = match best_rho {
            Some((v, md)) if v < rho => (v, md),
            _ => (rho, mode),
        };
        let dl = match best_delta {
            Some((v, md)) if v < delta => (v, md),
            _ => (delta, mode),
        };
        best_rho = Some(r);
        best_delta = Some(dl);
        cover.entries.push(CoverEntry {
            k,
            rho: r.0,
            mode: r.1,
        });
        part.entries.push(PartitionEntry {
            k,
            delta: dl.0,
            mode: dl.1,
        });
    }
    Ok((cover, part))
}

/// Profiles of a generator family over truncation sizes `m_grid`.
pub fn mnc_profile(
    family: &FamilySpec,
    m_grid: &[usize],
    k_grid: &[usize],
    opts: &ProfileOptions,
) -> Result<(Vec<CoveringProfile>, Vec<PartitionProfile>, Vec<ProfileRow>)> {
    if m_grid.is_empty() || k_grid.is_empty() {
        return Err(Error::domain("profile grids must be non-empty"));
    }
    let mut covers = Vec::new();
    let mut partitions = Vec::new();
    let mut rows = Vec::new();
    for &m in m_grid {
        let spec = FamilySpec {
            m,
            ..family.clone()
        };
        let mut points = spec.build()?;
        if opts.unit_radius && points.distinct_count() > 1 {
            let r = min_enclosing_ball(&points, DEFAULT_TOL)?.radius;
            points = points.scaled(1.0 / r)?;
        }
        let (c, p) = profiles(&points, k_grid, opts)?;
        for (ce, pe) in c.entries.iter().zip(&p.entries) {
            rows.push(ProfileRow {
                family: family.family.to_string(),
                m: points.len(),
                k: ce.k,
                mode: if ce.mode == ProfileMode::Exact && pe.mode == ProfileMode::Exact {
                    ProfileMode::Exact
                } else {
                    ProfileMode::Greedy
                },
                rho: ce.rho,
                delta: pe.delta,
            });
        }
        covers.push(c);
        partitions.push(p);
    }
    Ok((covers, partitions, rows))
}

/// Indices of the points within `tol` of the sphere `S(center, radius)`.
pub fn sphere_slice(points: &PointSet, sphere: &Ball, tol: f64) -> Result<Vec<usize>> {
    crate::geometry::check_dim(points.dim(), &sphere.center)?;
    Ok(points
        .iter()
        .enumerate()
        .filter(|(_, p)| sphere.on_sphere(p, tol))
        .map(|(i, _)| i)
        .collect())
}

/// Partition profile (k = 1..=n) of the points lying on `sphere` within `tol`.
///
/// An empty slice yields an empty profile with `empty` set.
pub fn sphere_slice_mnc(points: &PointSet, sphere: &Ball, tol: f64) -> Result<PartitionProfile> {
    let idx = sphere_slice(points, sphere, tol)?;
    if idx.is_empty() {
        return Ok(PartitionProfile {
            m: 0,
            entries: Vec::new(),
            empty: true,
        });
    }
    let slice = points.subset(&idx)?;
    let n = slice.len();
    let caps = ExactCaps::default();
    let mut entries = Vec::with_capacity(n);
    let mut best = f64::INFINITY;
    for k in 1..=n {
        let mode = if caps.allows(n, k) || k == n {
            ProfileMode::Exact
        } else {
            ProfileMode::Greedy
        };
        let delta = partition_diameter_with(&slice, k, mode, caps)?.value;
        best = best.min(delta);
        entries.push(PartitionEntry {
            k,
            delta: best,
            mode,
        });
    }
    Ok(PartitionProfile {
        m: n,
        entries,
        empty: false,
    })
}
