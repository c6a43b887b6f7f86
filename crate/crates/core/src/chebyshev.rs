//! Minimum enclosing ball (Chebyshev center and radius) with a convex-hull
//! certificate.
//!
//! The solver runs in two phases:
//!
//! 1. a core-set pass that repeatedly moves a candidate center a step of
//!    `1/(k+1)` towards the current farthest point, giving a coarse
//!    `(1+δ)`-approximate center;
//! 2. an active-set walk started from that center. The walk keeps a support
//!    set `S` of affinely independent points that are all equidistant from
//!    the current center, moves the center towards the circumcenter of `S`
//!    until another point reaches the sphere (that point joins `S`), and
//!    drops the support point with the most negative affine coefficient
//!    whenever the center reaches `aff S` outside `conv S`. It stops when the
//!    center lies in `conv S`; the affine coefficients are then the
//!    certificate weights.
//!
//! The affine hull of `S` is tracked with an incrementally updated QR
//! factorization of the edge vectors `s_i − s_0`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{check_dim, distance, dot, farthest_from, squared_distance, Ball, PointSet};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance used when testing membership in the circumsphere `S(c, r)`;
/// multiplied by `1 + r`.
pub const SPHERE_TOL: f64 = 1e-7;

/// Center, radius and support weights of a minimum enclosing ball.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevResult {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `(point index, weight)`; weights are positive and sum to one, and
    /// `center = Σ weight·point`.
    pub support: Vec<(usize, f64)>,
    /// Largest certificate violation observed for this result.
    pub residual: f64,
}

impl ChebyshevResult {
    pub fn ball(&self) -> Ball {
        Ball {
            center: self.center.clone(),
            radius: self.radius,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Certificate tolerance; the effective bound is `tol·(1 + radius)`.
    pub tol: f64,
    /// Target accuracy of the core-set warm start (`⌈1/δ²⌉` steps).
    pub coarse_delta: f64,
    pub max_coarse_steps: usize,
    /// Active-set pivot budget. `None` means `200 + 2·min(m, d+1)`.
    pub max_pivots: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            coarse_delta: 0.05,
            max_coarse_steps: 1_000_000,
            max_pivots: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Minimum enclosing ball of `points` with default solver settings and the given tolerance.
pub fn min_enclosing_ball(points: &PointSet, tol: f64) -> Result<ChebyshevResult> {
    min_enclosing_ball_with(points, &SolverOptions::with_tol(tol))
}

pub fn min_enclosing_ball_with(points: &PointSet, opts: &SolverOptions) -> Result<ChebyshevResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if !(opts.coarse_delta > 0.0) {
        return Err(Error::domain("coarse_delta must be positive"));
    }
    let dim = points.dim();

    // Collapse exact duplicates; each distinct point is represented by its lowest index.
    let mut first_of: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut reps = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
        first_of.entry(key).or_insert_with(|| {
            reps.push(i);
            i
        });
    }

    if reps.len() == 1 {
        let center = points.point(0).to_vec();
        return Ok(ChebyshevResult {
            center,
            radius: 0.0,
            support: vec![(0, 1.0)],
            residual: 0.0,
        });
    }

    // Work relative to the centroid of the distinct points.
    let mut origin = vec![0.0; dim];
    for &i in &reps {
        for (o, x) in origin.iter_mut().zip(points.point(i)) {
            *o += x;
        }
    }
    for o in &mut origin {
        *o /= reps.len() as f64;
    }
    let pts: Vec<Vec<f64>> = reps
        .iter()
        .map(|&i| {
            points
                .point(i)
                .iter()
                .zip(&origin)
                .map(|(x, o)| x - o)
                .collect()
        })
        .collect();

    let coarse_steps = (1.0 / (opts.coarse_delta * opts.coarse_delta)).ceil() as usize;
    if coarse_steps > opts.max_coarse_steps {
        return Err(Error::NonConvergence {
            iterations: opts.max_coarse_steps,
            residual: f64::INFINITY,
            best_center: origin,
            best_radius: f64::INFINITY,
        });
    }
    let mut center = pts[0].clone();
    for k in 1..=coarse_steps {
        let (f, _) = farthest(&pts, &center);
        let step = 1.0 / (k as f64 + 1.0);
        for (c, x) in center.iter_mut().zip(&pts[f]) {
            *c += step * (x - *c);
        }
    }

    let budget = opts.max_pivots.unwrap_or(200 + 2 * reps.len().min(dim + 1));
    let walk = active_set_walk(&pts, center, budget);
    let (members, weights) = match walk {
        Ok(v) => v,
        Err((iterations, c)) => {
            let (_, r) = farthest(&pts, &c);
            let best_center: Vec<f64> = c.iter().zip(&origin).map(|(x, o)| x + o).collect();
            // Half the diameter is a lower bound on the optimal radius, so this
            // bounds the excess radius of the returned iterate.
            let gap = (r - crate::geometry::diameter(points) / 2.0).max(0.0);
            return Err(Error::NonConvergence {
                iterations,
                residual: gap,
                best_center,
                best_radius: r,
            });
        }
    };

    // Rebuild the center as the exact convex combination of the support.
    let mut support: Vec<(usize, f64)> = members
        .iter()
        .zip(&weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&j, &w)| (j, w))
        .collect();
    let total: f64 = support.iter().map(|(_, w)| w).sum();
    for s in &mut support {
        s.1 /= total;
    }
    let mut c_shift = vec![0.0; dim];
    for &(j, w) in &support {
        for (c, x) in c_shift.iter_mut().zip(&pts[j]) {
            *c += w * x;
        }
    }
    let (_, radius_shift) = farthest(&pts, &c_shift);
    let center: Vec<f64> = c_shift.iter().zip(&origin).map(|(x, o)| x + o).collect();
    let mut support: Vec<(usize, f64)> = support.into_iter().map(|(j, w)| (reps[j], w)).collect();
    support.sort_by_key(|s| s.0);

    let mut result = ChebyshevResult {
        radius: farthest_from(points, &center)?.1.max(radius_shift),
        center,
        support,
        residual: 0.0,
    };
    let res = certificate_residuals(points, &result)?;
    result.residual = res.max();
    if result.residual > opts.tol * (1.0 + result.radius) {
        return Err(Error::NonConvergence {
            iterations: budget,
            residual: result.residual,
            best_center: result.center,
            best_radius: result.radius,
        });
    }
    Ok(result)
}

fn farthest(pts: &[Vec<f64>], c: &[f64]) -> (usize, f64) {
    let mut best = (0, squared_distance(&pts[0], c));
    for (i, p) in pts.iter().enumerate().skip(1) {
        let d = squared_distance(p, c);
        if d > best.1 {
            best = (i, d);
        }
    }
    (best.0, best.1.sqrt())
}

/// Returns the final support (indices into `pts`) with their affine
/// coefficients, or the pivot count and last center if the budget ran out.
#[allow(clippy::type_complexity)]
fn active_set_walk(
    pts: &[Vec<f64>],
    mut center: Vec<f64>,
    budget: usize,
) -> std::result::Result<(Vec<usize>, Vec<f64>), (usize, Vec<f64>)> {
    let (f, _) = farthest(pts, &center);
    let mut basis = AffineBasis::new(pts, f);
    let mut in_support = vec![false; pts.len()];
    in_support[f] = true;

    for _pivot in 0..budget {
        let s0 = &pts[basis.members[0]];
        let r2 = squared_distance(&center, s0);
        let aff = basis.project(&center);
        let dir: Vec<f64> = aff.iter().zip(&center).map(|(a, c)| a - c).collect();
        let dist2 = dot(&dir, &dir);

        if dist2 <= 1e-26 * r2.max(f64::MIN_POSITIVE) {
            let lambdas = basis.affine_coords(&center);
            let (worst, &min) = lambdas
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("support is never empty");
            if min >= 0.0 {
                return Ok((basis.members.clone(), lambdas));
            }
            in_support[basis.members[worst]] = false;
            basis.remove(worst);
            continue;
        }

        // Walk from center towards aff; find the first point to reach the sphere.
        let dist = dist2.sqrt();
        let mut scale = 1.0;
        let mut stopper = None;
        for (j, p) in pts.iter().enumerate() {
            if in_support[j] {
                continue;
            }
            let toward: f64 = dir
                .iter()
                .zip(p.iter().zip(&center))
                .map(|(d, (x, c))| d * (x - c))
                .sum();
            let denom = dist2 - toward;
            if denom <= 1e-12 * dist * r2.sqrt() {
                continue;
            }
            let t = ((r2 - squared_distance(p, &center)) / (2.0 * denom)).max(0.0);
            if t < scale {
                scale = t;
                stopper = Some(j);
            }
        }
        match stopper {
            Some(j) => {
                for (c, d) in center.iter_mut().zip(&dir) {
                    *c += scale * d;
                }
                if !basis.push(j) {
                    return Err((_pivot, center));
                }
                in_support[j] = true;
            }
            None => center = aff,
        }
    }
    Err((budget, center))
}

/// Orthonormal basis of `span{p_i − p_0 : i ∈ members}` with its triangular factor.
struct AffineBasis<'a> {
    pts: &'a [Vec<f64>],
    members: Vec<usize>,
    q: Vec<Vec<f64>>,
    /// Column `j` of the upper-triangular factor, length `j + 1`.
    r: Vec<Vec<f64>>,
}

impl<'a> AffineBasis<'a> {
    fn new(pts: &'a [Vec<f64>], first: usize) -> Self {
        AffineBasis {
            pts,
            members: vec![first],
            q: Vec::new(),
            r: Vec::new(),
        }
    }

    fn origin(&self) -> &[f64] {
        &self.pts[self.members[0]]
    }

    /// Adds a point; returns false if it is (numerically) in the current affine hull.
    fn push(&mut self, idx: usize) -> bool {
        let v: Vec<f64> = self.pts[idx]
            .iter()
            .zip(self.origin())
            .map(|(x, o)| x - o)
            .collect();
        let vnorm = dot(&v, &v).sqrt();
        let mut w = v;
        let mut coeffs = vec![0.0; self.q.len()];
        // Classical Gram-Schmidt, applied twice.
        for _ in 0..2 {
            for (k, qk) in self.q.iter().enumerate() {
                let h = dot(qk, &w);
                coeffs[k] += h;
                for (wi, qi) in w.iter_mut().zip(qk) {
                    *wi -= h * qi;
                }
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm <= 1e-13 * vnorm || norm == 0.0 {
            return false;
        }
        for wi in &mut w {
            *wi /= norm;
        }
        coeffs.push(norm);
        self.q.push(w);
        self.r.push(coeffs);
        self.members.push(idx);
        true
    }

    fn remove(&mut self, pos: usize) {
        let mut rest = self.members.clone();
        rest.remove(pos);
        self.members = vec![rest[0]];
        self.q.clear();
        self.r.clear();
        for &m in &rest[1..] {
            // Subsets of affinely independent sets stay independent.
            let ok = self.push(m);
            debug_assert!(ok);
        }
    }

    fn project(&self, c: &[f64]) -> Vec<f64> {
        let o = self.origin();
        let v: Vec<f64> = c.iter().zip(o).map(|(x, y)| x - y).collect();
        let mut out = o.to_vec();
        for qk in &self.q {
            let h = dot(qk, &v);
            for (oi, qi) in out.iter_mut().zip(qk) {
                *oi += h * qi;
            }
        }
        out
    }

    /// Affine coefficients of `c` (assumed in the hull) over `members`.
    fn affine_coords(&self, c: &[f64]) -> Vec<f64> {
        let o = self.origin();
        let v: Vec<f64> = c.iter().zip(o).map(|(x, y)| x - y).collect();
        let k = self.q.len();
        let rhs: Vec<f64> = self.q.iter().map(|qk| dot(qk, &v)).collect();
        let mut lam = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = rhs[i];
            for (j, lj) in lam.iter().enumerate().skip(i + 1) {
                s -= self.r[j][i] * lj;
            }
            lam[i] = s / self.r[i][i];
        }
        let mut out = Vec::with_capacity(k + 1);
        out.push(1.0 - lam.iter().sum::<f64>());
        out.extend(lam);
        out
    }
}

/// Farthest distance from `c` to the points of `points`.
pub fn relative_radius(points: &PointSet, c: &[f64]) -> Result<f64> {
    Ok(farthest_from(points, c)?.1)
}

/// Indices of the points at distance strictly greater than `r − ε` from the center.
pub fn annulus_indices(
    points: &PointSet,
    result: &ChebyshevResult,
    eps: f64,
) -> Result<Vec<usize>> {
    check_dim(points.dim(), &result.center)?;
    if !(eps > 0.0 && eps < result.radius) {
        return Err(Error::domain(format!(
            "epsilon {eps} must lie in (0, {})",
            result.radius
        )));
    }
    let cut = result.radius - eps;
    let kept: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| distance(p, &result.center) > cut)
        .map(|(i, _)| i)
        .collect();
    if kept.is_empty() {
        return Err(Error::Inconsistent(
            "annulus is empty; the certificate does not belong to this set".into(),
        ));
    }
    Ok(kept)
}

/// The annulus reduction `A \ B(c, r − ε)`.
pub fn annulus_reduction(
    points: &PointSet,
    result: &ChebyshevResult,
    eps: f64,
) -> Result<PointSet> {
    points.subset(&annulus_indices(points, result, eps)?)
}

/// Individual violations of the certificate conditions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CertificateResiduals {
    /// `|Σ t_i − 1|`
    pub weight_sum: f64,
    /// `‖c − Σ t_i x_i‖`
    pub hull: f64,
    /// `max_i |‖x_i − c‖ − r|` over the support.
    pub sphere: f64,
    /// `max(0, max_x ‖x − c‖ − r)` over all points.
    pub enclosure: f64,
    /// Number of non-positive weights or out-of-range/duplicate indices.
    pub malformed: usize,
}

impl CertificateResiduals {
    /// Largest geometric residual (excludes the weight-sum error).
    pub fn max(&self) -> f64 {
        self.hull.max(self.sphere).max(self.enclosure)
    }
}

pub fn certificate_residuals(
    points: &PointSet,
    result: &ChebyshevResult,
) -> Result<CertificateResiduals> {
    check_dim(points.dim(), &result.center)?;
    let mut res = CertificateResiduals::default();
    let mut seen = vec![false; points.len()];
    let mut combo = vec![0.0; points.dim()];
    let mut wsum = 0.0;
    for &(i, w) in &result.support {
        if i >= points.len() || seen[i] || !(w > 0.0) {
            res.malformed += 1;
            continue;
        }
        seen[i] = true;
        wsum += w;
        let p = points.point(i);
        for (c, x) in combo.iter_mut().zip(p) {
            *c += w * x;
        }
        res.sphere = res
            .sphere
            .max((distance(p, &result.center) - result.radius).abs());
    }
    if result.support.is_empty() {
        res.malformed += 1;
    }
    res.weight_sum = (wsum - 1.0).abs();
    res.hull = distance(&combo, &result.center);
    let (_, far) = farthest_from(points, &result.center)?;
    res.enclosure = (far - result.radius).max(0.0);
    Ok(res)
}

/// Checks every certificate condition at `tol·(1 + r)`; weights must sum to one within 1e−9.
pub fn verify_certificate(points: &PointSet, result: &ChebyshevResult, tol: f64) -> bool {
    if !(result.radius >= 0.0) || result.center.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let Ok(res) = certificate_residuals(points, result) else {
        return false;
    };
    let eff = tol * (1.0 + result.radius);
    res.malformed == 0 && res.weight_sum <= 1e-9 && res.max() <= eff
}

/// `max_j |Σ_i t_i ‖y_i − y_j‖² − 2r²|` over the support points `y_j`.
pub fn support_identity_residual(points: &PointSet, result: &ChebyshevResult) -> f64 {
    let r2 = result.radius * result.radius;
    result
        .support
        .iter()
        .map(|&(j, _)| {
            let yj = points.point(j);
            let s: f64 = result
                .support
                .iter()
                .map(|&(i, t)| t * squared_distance(points.point(i), yj))
                .sum();
            (s - 2.0 * r2).abs()
        })
        .fold(0.0, f64::max)
}
