//! Points and axis-aligned boxes in `R^{n_d}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the ambient space. Coordinates are finite 64-bit reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Parameter("point must have dimension >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parameter("point coordinates must be finite".into()));
        }
        Ok(Point { coords })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Point::new(coords.to_vec())
    }

    /// 2D convenience constructor; panics on non-finite input.
    pub fn xy(x: f64, y: f64) -> Self {
        Point::new(vec![x, y]).expect("finite coordinates")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, other: &Point) -> f64 {
        sq_dist(&self.coords, &other.coords).sqrt()
    }
}

/// Squared Euclidean distance between coordinate slices of equal length.
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Axis-aligned bounding box with strictly positive extent on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Parameter("box bounds must have equal dimension >= 1".into()));
        }
        if lo.iter().chain(hi.iter()).any(|c| !c.is_finite()) {
            return Err(Error::Parameter("box bounds must be finite".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
            return Err(Error::Parameter("box is empty: lo must be < hi on every axis".into()));
        }
        Ok(BoundingBox { lo, hi })
    }

    /// 2D convenience constructor.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        BoundingBox::new(vec![x0, y0], vec![x1, y1])
    }

    /// Smallest box containing all points, inflated by `margin` times the
    /// extent on each axis (degenerate axes get a unit pad).
    pub fn around(points: &[Point], margin: f64) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Parameter("cannot bound an empty point set".into()))?;
        let dim = first.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points {
            if p.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: p.dim() });
            }
            for (k, &c) in p.coords().iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        for k in 0..dim {
            let extent = hi[k] - lo[k];
            let pad = if extent > 0.0 { margin * extent } else { 1.0 };
            lo[k] -= pad;
            hi[k] += pad;
        }
        BoundingBox::new(lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .enumerate()
                .all(|(k, &c)| c >= self.lo[k] && c <= self.hi[k])
    }

    pub fn center(&self) -> Point {
        let coords = self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect();
        Point::new(coords).expect("finite box center")
    }

    /// Inflate symmetrically by `factor` times the extent per axis.
    pub fn inflated(&self, factor: f64) -> BoundingBox {
        let lo = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| l - factor * (h - l))
            .collect();
        let hi = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h + factor * (h - l))
            .collect();
        BoundingBox::new(lo, hi).expect("inflating keeps the box non-empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_rejects_nan_and_empty() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![0.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![1.0, -2.0]).is_ok());
    }

    #[test]
    fn bbox_rejects_empty() {
        assert!(BoundingBox::rect(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(BoundingBox::rect(0.0, 0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn bbox_around_points() {
        let pts = vec![Point::xy(0.0, 0.0), Point::xy(2.0, 4.0)];
        let bb = BoundingBox::around(&pts, 0.5).unwrap();
        assert_eq!(bb.lo(), &[-1.0, -2.0]);
        assert_eq!(bb.hi(), &[3.0, 6.0]);
        assert!(bb.contains(&Point::xy(2.9, 5.9)));
        assert!(!bb.contains(&Point::xy(3.1, 0.0)));
    }
}
