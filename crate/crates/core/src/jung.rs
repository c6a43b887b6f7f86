//! Jung constants, extremality classification and simplex-based lower bounds
//! on the Chebyshev radius.
//!
//! All report quantities are ratios to the diameter, so classification does
//! not depend on the scale of the input.

use serde::{Deserialize, Serialize};

use crate::chebyshev::{min_enclosing_ball, ChebyshevResult};
use crate::error::{Error, Result};
use crate::geometry::{diameter, PointSet};

/// `1/√2`, the Jung constant of infinite-dimensional Hilbert space.
pub const HILBERT_JUNG: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Ratios at or above this fraction of `1/√2` count as near-extremal.
pub const NEAR_EXTREMAL_FRACTION: f64 = 0.98;

pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-6;

/// `J(Eⁿ) = √(n / (2(n+1)))`.
pub fn jung_constant(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("Jung constant needs dimension n ≥ 1"));
    }
    let n = n as f64;
    Ok((n / (2.0 * (n + 1.0))).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Ratio meets the finite-dimensional Jung bound up to the tolerance.
    ExtremalWithinTol,
    /// Within 2% of `1/√2` but below the finite-dimensional bound.
    NearExtremal,
    NonExtremal,
}

impl Classification {
    pub fn classify(ratio: f64, finite_dim_bound: f64, tol: f64) -> Self {
        if ratio >= (1.0 - tol) * finite_dim_bound {
            Classification::ExtremalWithinTol
        } else if ratio >= NEAR_EXTREMAL_FRACTION * HILBERT_JUNG {
            Classification::NearExtremal
        } else {
            Classification::NonExtremal
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::ExtremalWithinTol => "extremal-within-tol",
            Classification::NearExtremal => "near-extremal",
            Classification::NonExtremal => "non-extremal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub diameter: f64,
    pub radius: f64,
    pub ratio: f64,
    /// Affine dimension bound `q = min(d, m − 1)` over distinct points.
    pub affine_dim: usize,
    pub finite_dim_bound: f64,
    pub hilbert_bound: f64,
    pub classification: Classification,
    /// `ratio ≥ 0.98/√2`, reported independently of the classification.
    pub near_hilbert_bound: bool,
    /// Best lower bound on the normalized radius from long-edge simplices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_lower_bound: Option<f64>,
}

impl ExtremalityReport {
    /// Names used by [`ExtremalityReport::violations`], in check order.
    pub const INVARIANTS: [&'static str; 7] = [
        "ratio-nonnegative",
        "ratio-consistency",
        "jung-inequality",
        "hilbert-strict",
        "finite-dim-bound-order",
        "hilbert-bound-value",
        "classification-consistency",
    ];

    /// Consistency problems of a (possibly hand-edited) report, by invariant name.
    pub fn violations(&self, tol: f64) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        if !(self.ratio >= 0.0) {
            out.push(("ratio-nonnegative", self.ratio));
        }
        if self.diameter > 0.0 {
            let err = (self.radius / self.diameter - self.ratio).abs();
            if err > 1e-12 * (1.0 + self.ratio) {
                out.push(("ratio-consistency", err));
            }
        }
        let excess = self.ratio - (self.finite_dim_bound + 1e-7);
        if excess > 0.0 {
            out.push(("jung-inequality", excess));
        }
        if self.ratio >= self.hilbert_bound {
            out.push(("hilbert-strict", self.ratio - self.hilbert_bound));
        }
        if self.finite_dim_bound > self.hilbert_bound {
            out.push((
                "finite-dim-bound-order",
                self.finite_dim_bound - self.hilbert_bound,
            ));
        }
        if (self.hilbert_bound - HILBERT_JUNG).abs() > 1e-15 {
            out.push(("hilbert-bound-value", self.hilbert_bound - HILBERT_JUNG));
        }
        if Classification::classify(self.ratio, self.finite_dim_bound, tol) != self.classification {
            out.push(("classification-consistency", self.ratio));
        }
        out
    }
}

/// Diameter, Chebyshev radius and Jung-bound classification of `points`.
pub fn extremality_report(
    points: &PointSet,
    tol: f64,
) -> Result<(ExtremalityReport, ChebyshevResult)> {
    let distinct = points.distinct_count();
    if distinct < 2 {
        return Err(Error::domain(
            "extremality needs at least two distinct points",
        ));
    }
    let cheb = min_enclosing_ball(points, crate::chebyshev::DEFAULT_TOL)?;
    let diam = diameter(points);
    Ok((report_from(diam, &cheb, points.dim(), distinct, tol)?, cheb))
}

pub(crate) fn report_from(
    diam: f64,
    cheb: &ChebyshevResult,
    dim: usize,
    distinct: usize,
    tol: f64,
) -> Result<ExtremalityReport> {
    let q = dim.min(distinct - 1);
    let finite_dim_bound = jung_constant(q)?;
    let ratio = cheb.radius / diam;
    Ok(ExtremalityReport {
        diameter: diam,
        radius: cheb.radius,
        ratio,
        affine_dim: q,
        finite_dim_bound,
        hilbert_bound: HILBERT_JUNG,
        classification: Classification::classify(ratio, finite_dim_bound, tol),
        near_hilbert_bound: ratio >= NEAR_EXTREMAL_FRACTION * HILBERT_JUNG,
        witness_lower_bound: None,
    })
}

/// Regular `n`-simplex with edge `edge`: the scaled standard basis of ℝⁿ⁺¹.
pub fn regular_simplex(n: usize, edge: f64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::domain("simplex dimension must be ≥ 1"));
    }
    if !(edge > 0.0) || !edge.is_finite() {
        return Err(Error::domain("simplex edge must be positive"));
    }
    // Smallest scale whose computed pairwise distance is at least `edge`.
    let mut s = edge * std::f64::consts::FRAC_1_SQRT_2;
    while (2.0 * s * s).sqrt() < edge {
        s = s.next_up();
    }
    let m = n + 1;
    let mut coords = vec![0.0; m * m];
    for i in 0..m {
        coords[i * m + i] = s;
    }
    PointSet::from_flat(coords, m)
}

/// Lower bound `s·√(p/(2(p+1)))` on the Chebyshev radius of a `p`-simplex
/// whose edges are all at least `s`.
pub fn simplex_chebyshev_bound(p: usize, min_edge: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::domain("simplex dimension must be ≥ 1"));
    }
    if !(min_edge >= 0.0) {
        return Err(Error::domain("minimum edge must be nonnegative"));
    }
    Ok(min_edge * jung_constant(p)?)
}

/// `√((2 − 4/√n)·p / (2(p+1)))`, the radius bound for a `p`-simplex whose
/// squared edges are at least `2 − 4/√n`.
pub fn tail_simplex_bound(p: usize, n: u64) -> Result<f64> {
    if n < 4 {
        return Err(Error::domain("bound is vacuous for n < 4"));
    }
    if p == 0 {
        return Err(Error::domain("simplex dimension must be ≥ 1"));
    }
    let factor = (2.0 - 4.0 / (n as f64).sqrt()).max(0.0);
    let p = p as f64;
    Ok((factor * p / (2.0 * (p + 1.0))).sqrt())
}
