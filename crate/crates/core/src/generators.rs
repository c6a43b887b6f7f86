//! Finite truncations of the explicit sets used to study extremality.
//!
//! Truncation convention: an infinite family is represented by its first `m`
//! members in enumeration order, embedded in the smallest ℝ^d holding them.
//! `e_n` is the n-th standard basis vector (1-based).
//!
//! Random families use ChaCha8 seeded from a `u64`; sphere samples are
//! normalized standard Gaussian vectors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Ball, PointSet};
use crate::jung::regular_simplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    /// `(1 − 1/n)·e_n`
    Example1,
    /// The unit-norm Cauchy sequence `x_n`.
    Example1Cauchy,
    /// `λe₁ + βe_{n+1}` with pairwise distance `γ`.
    Example2,
    Orthonormal,
    ScaledOrthonormal,
    RegularSimplex,
    RandomSphere,
    /// `example1 ∪ example1-cauchy`.
    Example1Union,
    /// `example1 ∪ example2(γ)`.
    Example2Union,
}

impl FamilyId {
    pub const ALL: [FamilyId; 9] = [
        FamilyId::Example1,
        FamilyId::Example1Cauchy,
        FamilyId::Example2,
        FamilyId::Orthonormal,
        FamilyId::ScaledOrthonormal,
        FamilyId::RegularSimplex,
        FamilyId::RandomSphere,
        FamilyId::Example1Union,
        FamilyId::Example2Union,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Example1 => "example1",
            FamilyId::Example1Cauchy => "example1-cauchy",
            FamilyId::Example2 => "example2",
            FamilyId::Orthonormal => "orthonormal",
            FamilyId::ScaledOrthonormal => "scaled-orthonormal",
            FamilyId::RegularSimplex => "regular-simplex",
            FamilyId::RandomSphere => "random-sphere",
            FamilyId::Example1Union => "example1-union",
            FamilyId::Example2Union => "example2-union",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown family {s:?}")))
    }
}

/// A generator family together with its truncation size and named parameters.
///
/// Recognized parameters: `gamma` (example2), `s` (scaled-orthonormal),
/// `edge` and `n` (regular-simplex), `dim` and `seed` (random-sphere).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: FamilyId,
    pub m: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl FamilySpec {
    pub fn new(family: FamilyId, m: usize) -> Self {
        FamilySpec {
            family,
            m,
            params: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.get(key)
            .ok_or_else(|| Error::domain(format!("family {} needs parameter {key:?}", self.family)))
    }

    fn integer(&self, key: &str, default: Option<usize>) -> Result<usize> {
        match self.get(key) {
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
            Some(v) => Err(Error::domain(format!(
                "parameter {key} must be a nonnegative integer, got {v}"
            ))),
            None => default.ok_or_else(|| {
                Error::domain(format!("family {} needs parameter {key:?}", self.family))
            }),
        }
    }

    /// The sphere the family is drawn on or against, in ℝ^dim: `S(0, 1)` for
    /// the unit-scale families, `S(0, s)` for scaled-orthonormal. `None` for
    /// the regular simplex, whose circumsphere depends on the edge.
    pub fn reference_sphere(&self, dim: usize) -> Option<Ball> {
        let radius = match self.family {
            FamilyId::RegularSimplex => return None,
            FamilyId::ScaledOrthonormal => self.get("s")?,
            _ => 1.0,
        };
        Ball::new(vec![0.0; dim], radius).ok()
    }

    /// Builds the truncated point set.
    pub fn build(&self) -> Result<PointSet> {
        if self.m == 0 {
            return Err(Error::domain("truncation size m must be ≥ 1"));
        }
        match self.family {
            FamilyId::Example1 => example1(self.m),
            FamilyId::Example1Cauchy => example1_cauchy(self.m),
            FamilyId::Example2 => example2(self.require("gamma")?, self.m),
            FamilyId::Orthonormal => orthonormal_family(self.m),
            FamilyId::ScaledOrthonormal => scaled_orthonormal(self.m, self.require("s")?),
            FamilyId::RegularSimplex => {
                let n = self.integer("n", Some(self.m.saturating_sub(1)))?;
                regular_simplex(n, self.get("edge").unwrap_or(1.0))
            }
            FamilyId::RandomSphere => {
                let seed = self.get("seed").unwrap_or(0.0);
                if !(seed >= 0.0 && seed.fract() == 0.0 && seed <= u64::MAX as f64) {
                    return Err(Error::domain(format!(
                        "seed must be a nonnegative integer, got {seed}"
                    )));
                }
                random_sphere(self.m, self.integer("dim", None)?, seed as u64)
            }
            FamilyId::Example1Union => union(&[example1(self.m)?, example1_cauchy(self.m)?]),
            FamilyId::Example2Union => {
                union(&[example1(self.m)?, example2(self.require("gamma")?, self.m)?])
            }
        }
    }
}

fn unit_rows(m: usize, dim: usize) -> Vec<f64> {
    vec![0.0; m * dim]
}

/// `(1 − 1/n)·e_n` for `n = 1..m` in ℝ^m; the first point is the origin.
pub fn example1(m: usize) -> Result<PointSet> {
    if m < 2 {
        return Err(Error::domain("example1 needs m ≥ 2"));
    }
    let mut coords = unit_rows(m, m);
    for n in 1..=m {
        coords[(n - 1) * m + (n - 1)] = 1.0 - 1.0 / n as f64;
    }
    PointSet::from_flat(coords, m)
}

/// `x_n = Σ_{k≤n} 2^{−k/2} e_k + 2^{−n/2} e_{n+1}` for `n = 1..m` in ℝ^{m+1}.
pub fn example1_cauchy(m: usize) -> Result<PointSet> {
    if m < 1 {
        return Err(Error::domain("example1-cauchy needs m ≥ 1"));
    }
    let dim = m + 1;
    let mut coords = unit_rows(m, dim);
    for n in 1..=m {
        let row = &mut coords[(n - 1) * dim..n * dim];
        for (k, x) in row.iter_mut().enumerate().take(n) {
            *x = 0.5f64.powf((k + 1) as f64 / 2.0);
        }
        row[n] = 0.5f64.powf(n as f64 / 2.0);
    }
    PointSet::from_flat(coords, dim)
}

/// `y_n = λe₁ + βe_{n+1}`, `β = γ/√2`, `λ = √(1 − β²)`, for `n = 1..m`.
pub fn example2(gamma: f64, m: usize) -> Result<PointSet> {
    if !(gamma > 0.0 && gamma <= std::f64::consts::SQRT_2) {
        return Err(Error::domain(format!(
            "gamma must lie in (0, √2], got {gamma}"
        )));
    }
    if m < 2 {
        return Err(Error::domain("example2 needs m ≥ 2"));
    }
    let beta = (gamma / std::f64::consts::SQRT_2).min(1.0);
    let lambda = (1.0 - beta * beta).max(0.0).sqrt();
    let dim = m + 1;
    let mut coords = unit_rows(m, dim);
    for n in 1..=m {
        coords[(n - 1) * dim] = lambda;
        coords[(n - 1) * dim + n] = beta;
    }
    PointSet::from_flat(coords, dim)
}

/// `e_1, …, e_m` in ℝ^m.
pub fn orthonormal_family(m: usize) -> Result<PointSet> {
    scaled_orthonormal(m, 1.0)
}

pub fn scaled_orthonormal(m: usize, s: f64) -> Result<PointSet> {
    if m < 1 {
        return Err(Error::domain("need m ≥ 1"));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("scale must be positive, got {s}")));
    }
    let mut coords = unit_rows(m, m);
    for i in 0..m {
        coords[i * m + i] = s;
    }
    PointSet::from_flat(coords, m)
}

/// `m` points drawn uniformly from the unit sphere of ℝ^d.
pub fn random_sphere(m: usize, d: usize, seed: u64) -> Result<PointSet> {
    if m < 1 || d < 1 {
        return Err(Error::domain("random-sphere needs m ≥ 1 and d ≥ 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(m * d);
    let mut row = vec![0.0; d];
    for _ in 0..m {
        loop {
            for x in row.iter_mut() {
                *x = StandardNormal.sample(&mut rng);
            }
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                coords.extend(row.iter().map(|x| x / norm));
                break;
            }
        }
    }
    PointSet::from_flat(coords, d)
}

/// Concatenation of point sets after zero-padding to the largest dimension.
pub fn union(sets: &[PointSet]) -> Result<PointSet> {
    let dim = sets
        .iter()
        .map(PointSet::dim)
        .max()
        .ok_or_else(|| Error::domain("union of no sets"))?;
    let mut coords = Vec::new();
    for s in sets {
        coords.extend_from_slice(s.padded(dim)?.as_flat());
    }
    PointSet::from_flat(coords, dim)
}
