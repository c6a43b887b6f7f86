//! Point sets in ℝ^d and the distance kernels every other module builds on.
//!
//! Points are stored row-major in one flat buffer. Ties in every argmax are
//! broken towards the lowest index so that reports are reproducible.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A non-empty, finite, ordered collection of points of a common dimension.
///
/// Duplicate points are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>,
    dim: usize,
    labels: Option<Vec<String>>,
}

impl PointSet {
    /// Builds a point set from rows, checking dimension agreement and finiteness.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::domain("point set must contain at least one point"))?;
        let dim = first.len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(coords, dim)
    }

    /// Builds a point set from a row-major buffer of `len * dim` coordinates.
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        if coords.is_empty() {
            return Err(Error::domain("point set must contain at least one point"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|x| !x.is_finite()) {
            return Err(Error::domain(format!(
                "coordinate {} of point {} is not finite",
                pos % dim,
                pos / dim
            )));
        }
        Ok(PointSet {
            coords,
            dim,
            labels: None,
        })
    }

    /// Attaches unique labels, one per point.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::domain(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::domain(format!("duplicate label {l:?}")));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; a `PointSet` holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// The sub-collection at `indices`, in the given order. Labels follow.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::domain("empty subset"));
        }
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::domain(format!(
                    "index {i} out of range for {} points",
                    self.len()
                )));
            }
            coords.extend_from_slice(self.point(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        Ok(PointSet {
            coords,
            dim: self.dim,
            labels,
        })
    }

    /// Uniform scaling `x ↦ s·x` about the origin.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let mut out = self.clone();
        for x in &mut out.coords {
            *x *= s;
        }
        if out.coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("scaling produced non-finite coordinates"));
        }
        Ok(out)
    }

    /// Zero-pads every point to dimension `dim` (which must be ≥ the current one).
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        let mut coords = Vec::with_capacity(self.len() * dim);
        for p in self.iter() {
            coords.extend_from_slice(p);
            coords.extend(std::iter::repeat_n(0.0, dim - self.dim));
        }
        Ok(PointSet {
            coords,
            dim,
            labels: self.labels.clone(),
        })
    }

    /// Appends a point of matching dimension.
    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        check_dim(self.dim, p)?;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("pushed point has non-finite coordinates"));
        }
        self.coords.extend_from_slice(p);
        if let Some(labels) = &mut self.labels {
            labels.push(format!("#{}", labels.len()));
        }
        Ok(())
    }

    /// Number of pairwise distinct points (bitwise coordinate equality).
    pub fn distinct_count(&self) -> usize {
        let mut seen = HashSet::new();
        self.iter()
            .filter(|p| seen.insert(p.iter().map(|x| x.to_bits()).collect::<Vec<_>>()))
            .count()
    }
}

/// A closed ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("invalid ball radius {radius}")));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("ball center has non-finite coordinates"));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        distance(p, &self.center) <= self.radius + tol
    }

    /// Membership in the sphere `S(center, radius)` up to `tol`.
    pub fn on_sphere(&self, p: &[f64], tol: f64) -> bool {
        (distance(p, &self.center) - self.radius).abs() <= tol
    }
}

pub(crate) fn check_dim(dim: usize, v: &[f64]) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    Ok(())
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest pairwise distance; 0 for a singleton.
pub fn diameter(points: &PointSet) -> f64 {
    let m = points.len();
    let mut best = 0.0_f64;
    for i in 0..m {
        let pi = points.point(i);
        for j in i + 1..m {
            best = best.max(distance(pi, points.point(j)));
        }
    }
    best
}

/// Full symmetric matrix of pairwise distances, row-major `m × m`.
#[allow(clippy::needless_range_loop)]
pub fn distance_matrix(points: &PointSet) -> Vec<Vec<f64>> {
    let m = points.len();
    let mut out = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let d = distance(points.point(i), points.point(j));
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    out
}

/// Index and distance of the point farthest from `c` (lowest index on ties).
pub fn farthest_from(points: &PointSet, c: &[f64]) -> Result<(usize, f64)> {
    check_dim(points.dim(), c)?;
    let mut best = (0, squared_distance(points.point(0), c));
    for (i, p) in points.iter().enumerate().skip(1) {
        let d = squared_distance(p, c);
        if d > best.1 {
            best = (i, d);
        }
    }
    Ok((best.0, best.1.sqrt()))
}

/// Rescales `points` about the origin so that its diameter becomes `target`.
///
/// Returns the scaled set and the factor applied.
pub fn normalize_diameter(points: &PointSet, target: f64) -> Result<(PointSet, f64)> {
    let d = diameter(points);
    if d <= 0.0 {
        return Err(Error::domain("cannot normalize a set of diameter 0"));
    }
    if !(target > 0.0) {
        return Err(Error::domain("target diameter must be positive"));
    }
    let s = target / d;
    Ok((points.scaled(s)?, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(m: usize) -> PointSet {
        let rows = (0..m)
            .map(|i| {
                let mut v = vec![0.0; m];
                v[i] = 1.0;
                v
            })
            .collect();
        PointSet::new(rows).unwrap()
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&PointSet::new(vec![vec![0.0, 0.0]]).unwrap()), 0.0);
        let a = PointSet::new(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(diameter(&a), 5.0);
        assert!((diameter(&basis(4)) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn distance_matrix_examples() {
        let single = PointSet::new(vec![vec![1.0, 2.0]]).unwrap();
        assert_eq!(distance_matrix(&single), vec![vec![0.0]]);
        let two = PointSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(distance_matrix(&two), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let dm = distance_matrix(&basis(3));
        for (i, row) in dm.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if i == j {
                    assert_eq!(d, 0.0);
                } else {
                    assert!((d - 2f64.sqrt()).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn farthest_examples() {
        let a = PointSet::new(vec![vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(farthest_from(&a, &[0.0]).unwrap(), (1, 2.0));

        let b = basis(2);
        let (i, d) = farthest_from(&b, &[0.5, 0.5]).unwrap();
        assert_eq!(i, 0);
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15);

        let rows = (1..=4)
            .map(|n| {
                let mut v = vec![0.0; 4];
                v[n - 1] = 1.0 - 1.0 / n as f64;
                v
            })
            .collect();
        let c = PointSet::new(rows).unwrap();
        assert_eq!(farthest_from(&c, &[0.0; 4]).unwrap(), (3, 0.75));
    }

    #[test]
    fn farthest_dimension_mismatch() {
        let a = basis(3);
        assert!(matches!(
            farthest_from(&a, &[0.0, 0.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(PointSet::new(vec![]).is_err());
        assert!(PointSet::new(vec![vec![0.0], vec![0.0, 1.0]]).is_err());
        assert!(PointSet::new(vec![vec![f64::NAN]]).is_err());
        let a = basis(2);
        assert!(a.clone().with_labels(vec!["x".into(), "x".into()]).is_err());
        assert!(a.with_labels(vec!["x".into(), "y".into()]).is_ok());
    }

    #[test]
    fn duplicates_are_kept() {
        let a = PointSet::new(vec![vec![1.0], vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.distinct_count(), 2);
    }
}
