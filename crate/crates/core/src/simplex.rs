//! Extraction of `p`-simplices whose edges are all at least a threshold.
//!
//! Two extractors share one outcome type. The greedy one grows a vertex list
//! from a seed, always adding the point whose minimum distance to the list is
//! largest; it is sound but may miss simplices. The exact one searches the
//! threshold graph (edge iff distance ≥ threshold) for a clique with
//! branch-and-bound and can prove that none exists.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{diameter, distance, distance_matrix, normalize_diameter, PointSet};
use crate::jung::simplex_chebyshev_bound;

/// Above this many points the greedy extractor only seeds from a diametral pair.
pub const ALL_SEEDS_MAX: usize = 512;
pub const DEFAULT_EXACT_CAP: usize = 64;
pub const DEFAULT_EPS_GRID: [f64; 4] = [0.3, 0.1, 0.03, 0.01];
pub const DEFAULT_P_GRID: [usize; 5] = [1, 2, 5, 10, 20];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexCertificate {
    /// Vertices in selection order.
    pub vertex_indices: Vec<usize>,
    pub p: usize,
    pub threshold: f64,
    pub min_edge: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureMode {
    GreedyExhausted,
    ProvenNonexistent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ExtractionOutcome {
    Found(SimplexCertificate),
    NotFound {
        mode: FailureMode,
        /// Largest vertex set with all edges ≥ threshold that was found
        /// (the maximum clique size in exact mode).
        best_size: usize,
    },
}

impl ExtractionOutcome {
    pub fn certificate(&self) -> Option<&SimplexCertificate> {
        match self {
            ExtractionOutcome::Found(c) => Some(c),
            ExtractionOutcome::NotFound { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractMode {
    Greedy,
    Exact,
}

fn min_pairwise(points: &PointSet, idx: &[usize]) -> f64 {
    let mut best = f64::INFINITY;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            best = best.min(distance(points.point(i), points.point(j)));
        }
    }
    best
}

fn check_request(points: &PointSet, threshold: f64, p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::domain("simplex dimension p must be ≥ 1"));
    }
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::domain(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    if p + 1 > points.len() {
        return Err(Error::domain(format!(
            "a {p}-simplex needs {} vertices but the set has {}",
            p + 1,
            points.len()
        )));
    }
    Ok(())
}

fn certificate(
    points: &PointSet,
    vertex_indices: Vec<usize>,
    threshold: f64,
) -> SimplexCertificate {
    SimplexCertificate {
        p: vertex_indices.len() - 1,
        min_edge: min_pairwise(points, &vertex_indices),
        vertex_indices,
        threshold,
    }
}

/// Farthest-point growth from every seed (or from a diametral pair for large sets).
pub fn extract_greedy(points: &PointSet, threshold: f64, p: usize) -> Result<ExtractionOutcome> {
    check_request(points, threshold, p)?;
    let m = points.len();
    let target = p + 1;

    let grow = |seed: usize, dist: &dyn Fn(usize, usize) -> f64| -> Vec<usize> {
        let mut chosen = vec![seed];
        let mut taken = vec![false; m];
        taken[seed] = true;
        let mut mind: Vec<f64> = (0..m).map(|j| dist(seed, j)).collect();
        while chosen.len() < target {
            let mut next: Option<usize> = None;
            for j in 0..m {
                if !taken[j] && next.is_none_or(|n| mind[j] > mind[n]) {
                    next = Some(j);
                }
            }
            let Some(j) = next else { break };
            if mind[j] < threshold {
                break;
            }
            chosen.push(j);
            taken[j] = true;
            for (k, md) in mind.iter_mut().enumerate() {
                *md = md.min(dist(j, k));
            }
        }
        chosen
    };

    let runs: Vec<Vec<usize>> = if m <= ALL_SEEDS_MAX {
        let dm = distance_matrix(points);
        let dist = |i: usize, j: usize| dm[i][j];
        (0..m).into_par_iter().map(|s| grow(s, &dist)).collect()
    } else {
        let dist = |i: usize, j: usize| distance(points.point(i), points.point(j));
        let (a, b) = diametral_pair(points);
        vec![grow(a, &dist), grow(b, &dist)]
    };

    let best_size = runs.iter().map(Vec::len).max().unwrap_or(0);
    match runs.into_iter().find(|r| r.len() == target) {
        Some(verts) => Ok(ExtractionOutcome::Found(certificate(
            points, verts, threshold,
        ))),
        None => Ok(ExtractionOutcome::NotFound {
            mode: FailureMode::GreedyExhausted,
            best_size,
        }),
    }
}

fn diametral_pair(points: &PointSet) -> (usize, usize) {
    let mut best = (0, 0, -1.0);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = distance(points.point(i), points.point(j));
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

/// Exact search for `p+1` mutually far points; proves nonexistence otherwise.
pub fn extract_exact(points: &PointSet, threshold: f64, p: usize) -> Result<ExtractionOutcome> {
    extract_exact_with_cap(points, threshold, p, DEFAULT_EXACT_CAP)
}

pub fn extract_exact_with_cap(
    points: &PointSet,
    threshold: f64,
    p: usize,
    cap: usize,
) -> Result<ExtractionOutcome> {
    let m = points.len();
    if m > cap {
        return Err(Error::SizeCap {
            what: "point count",
            actual: m,
            cap,
        });
    }
    check_request(points, threshold, p)?;
    let mut adj = vec![BitSet::new(m); m];
    for i in 0..m {
        for j in i + 1..m {
            if distance(points.point(i), points.point(j)) >= threshold {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let mut search = CliqueSearch {
        adj: &adj,
        best: Vec::new(),
        target: p + 1,
    };
    let mut all = BitSet::new(m);
    for i in 0..m {
        all.insert(i);
    }
    search.expand(&mut Vec::new(), all);
    if search.best.len() > p {
        let mut verts = search.best;
        verts.truncate(p + 1);
        verts.sort_unstable();
        Ok(ExtractionOutcome::Found(certificate(
            points, verts, threshold,
        )))
    } else {
        Ok(ExtractionOutcome::NotFound {
            mode: FailureMode::ProvenNonexistent,
            best_size: search.best.len(),
        })
    }
}

#[derive(Clone, Debug)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn intersect(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| k * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }
}

/// Branch-and-bound maximum clique with a greedy colouring bound.
struct CliqueSearch<'a> {
    adj: &'a [BitSet],
    best: Vec<usize>,
    target: usize,
}

impl CliqueSearch<'_> {
    /// Returns true once a clique of the target size is recorded.
    fn expand(&mut self, current: &mut Vec<usize>, mut cand: BitSet) -> bool {
        let (order, colors) = self.colour_sort(&cand);
        for idx in (0..order.len()).rev() {
            if current.len() + colors[idx] <= self.best.len() {
                return false;
            }
            let v = order[idx];
            current.push(v);
            if current.len() > self.best.len() {
                self.best = current.clone();
                if self.best.len() >= self.target {
                    return true;
                }
            }
            let next = cand.intersect(&self.adj[v]);
            if !next.is_empty() && self.expand(current, next) {
                return true;
            }
            current.pop();
            cand.remove(v);
        }
        false
    }

    /// Candidates ordered by non-decreasing colour; colours start at 1.
    fn colour_sort(&self, cand: &BitSet) -> (Vec<usize>, Vec<usize>) {
        let mut uncoloured = cand.clone();
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut avail = uncoloured.clone();
            while let Some(v) = avail.first() {
                avail.remove(v);
                uncoloured.remove(v);
                for u in self.adj[v].iter() {
                    avail.remove(u);
                }
                order.push(v);
                colors.push(colour);
            }
        }
        (order, colors)
    }
}

/// Recomputes the certificate: distinct in-range vertices, `p+1` of them,
/// true minimum edge ≥ threshold and equal to the recorded one within 1e−12.
pub fn verify_simplex(points: &PointSet, cert: &SimplexCertificate) -> bool {
    let idx = &cert.vertex_indices;
    if idx.len() != cert.p + 1 || idx.len() < 2 || idx.iter().any(|&i| i >= points.len()) {
        return false;
    }
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != idx.len() {
        return false;
    }
    let actual = min_pairwise(points, idx);
    actual >= cert.threshold && (actual - cert.min_edge).abs() <= 1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCell {
    pub eps: f64,
    pub p: usize,
    pub threshold: f64,
    pub outcome: ExtractionOutcome,
    /// `simplex_chebyshev_bound(p, min_edge)` for a successful extraction.
    pub bound: Option<f64>,
}

/// Simplex evidence for extremality, in units where the diameter is √2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// Factor applied to reach diameter √2.
    pub scale: f64,
    pub cells: Vec<WitnessCell>,
    /// Largest bound over successful cells; the normalized Chebyshev radius is at least this.
    pub witness_lower_bound: Option<f64>,
}

/// Tries extraction at threshold `√2 − ε` for every `(ε, p)` after scaling to diameter √2.
///
/// Entries of `p_grid` above `m − 1` are skipped.
pub fn extremality_witness(
    points: &PointSet,
    eps_grid: &[f64],
    p_grid: &[usize],
    mode: ExtractMode,
) -> Result<WitnessReport> {
    if eps_grid.is_empty() || p_grid.is_empty() {
        return Err(Error::domain("witness grids must be non-empty"));
    }
    let root2 = std::f64::consts::SQRT_2;
    if let Some(e) = eps_grid.iter().find(|&&e| !(e > 0.0 && e < root2)) {
        return Err(Error::domain(format!("epsilon {e} outside (0, √2)")));
    }
    if p_grid.contains(&0) {
        return Err(Error::domain("p must be ≥ 1"));
    }
    let ps: Vec<usize> = p_grid
        .iter()
        .copied()
        .filter(|&p| p < points.len())
        .collect();
    if ps.is_empty() {
        return Err(Error::domain(format!(
            "every p in the grid exceeds m − 1 = {}",
            points.len() - 1
        )));
    }
    let (scaled, scale) = if diameter(points) == root2 {
        (points.clone(), 1.0)
    } else {
        normalize_diameter(points, root2)?
    };

    let mut cells = Vec::new();
    let mut best: Option<f64> = None;
    for &eps in eps_grid {
        let threshold = root2 - eps;
        for &p in &ps {
            let outcome = match mode {
                ExtractMode::Greedy => extract_greedy(&scaled, threshold, p)?,
                ExtractMode::Exact => extract_exact(&scaled, threshold, p)?,
            };
            let bound = match outcome.certificate() {
                Some(c) => Some(simplex_chebyshev_bound(p, c.min_edge)?),
                None => None,
            };
            if let Some(b) = bound {
                best = Some(best.map_or(b, |x| x.max(b)));
            }
            cells.push(WitnessCell {
                eps,
                p,
                threshold,
                outcome,
                bound,
            });
        }
    }
    Ok(WitnessReport {
        scale,
        cells,
        witness_lower_bound: best,
    })
}
