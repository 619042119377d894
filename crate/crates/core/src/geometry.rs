//! Finite-dimensional normed spaces and convex domains.

use std::fmt;
use std::ops::{Add, Index, Sub};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("vector must have at least one coordinate")]
    Empty,
    #[error("coordinate {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("cannot parse vector coordinate {0:?}")]
    Parse(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("ball radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("box bounds must satisfy lo <= hi coordinatewise")]
    BadBox,
    #[error("Lp exponent must lie in (1, inf), got {0}")]
    BadExponent(f64),
}

/// A point of R^d with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::Empty);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(GeometryError::NonFinite { index, value });
        }
        Ok(Vector(coords))
    }

    /// Builds a vector from coordinates already known to be finite.
    ///
    /// Panics on NaN or infinite input.
    pub fn from_slice(coords: &[f64]) -> Self {
        Self::new(coords.to_vec()).expect("finite nonempty coordinates")
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim.max(1)])
    }

    pub fn unit(dim: usize, j: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector(self.0.iter().map(|x| c * x).collect())
    }

    /// `a*self + b*other`.
    pub fn lincomb(&self, a: f64, other: &Vector, b: f64) -> Vector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(x, y)| a * x + b * y).collect())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }

    pub fn euclidean(&self) -> f64 {
        norm(self, NormKind::Euclidean)
    }

    pub fn distance(&self, other: &Vector, kind: NormKind) -> f64 {
        norm(&(self - other), kind)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<'a> Add<&'a Vector> for &Vector {
    type Output = Vector;
    fn add(self, rhs: &'a Vector) -> Vector {
        self.lincomb(1.0, rhs, 1.0)
    }
}

impl<'a> Sub<&'a Vector> for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &'a Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        Vector(self.0.iter().zip(&rhs.0).map(|(x, y)| x - y).collect())
    }
}

impl fmt::Display for Vector {
    /// Comma-separated shortest round-trip decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x:?}")?;
        }
        Ok(())
    }
}

impl FromStr for Vector {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coords = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>().map_err(|_| GeometryError::Parse(t.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Vector::new(coords)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    Euclidean,
    Lp(f64),
    L1,
    LInf,
}

impl NormKind {
    pub fn lp(p: f64) -> Result<Self, GeometryError> {
        if p > 1.0 && p.is_finite() {
            Ok(NormKind::Lp(p))
        } else {
            Err(GeometryError::BadExponent(p))
        }
    }

    pub fn is_strictly_convex(self) -> bool {
        matches!(self, NormKind::Euclidean | NormKind::Lp(_))
    }

    pub fn is_uniformly_convex(self) -> bool {
        self.is_strictly_convex()
    }

    pub fn is_frechet_differentiable(self) -> bool {
        self.is_strictly_convex()
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Euclidean => f.write_str("euclidean"),
            NormKind::Lp(p) => write!(f, "l{p}"),
            NormKind::L1 => f.write_str("l1"),
            NormKind::LInf => f.write_str("linf"),
        }
    }
}

pub fn norm(v: &Vector, kind: NormKind) -> f64 {
    let xs = v.coords();
    match kind {
        NormKind::Euclidean => {
            // Scaled to avoid overflow for large coordinates.
            let m = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if m == 0.0 {
                return 0.0;
            }
            m * xs.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
        }
        NormKind::L1 => xs.iter().map(|x| x.abs()).sum(),
        NormKind::LInf => xs.iter().fold(0.0, |m, x| m.max(x.abs())),
        NormKind::Lp(p) => {
            let m = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if m == 0.0 {
                return 0.0;
            }
            m * xs.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// The domain `C` of a semigroup.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    WholeSpace(usize),
    Ball { center: Vector, radius: f64 },
    Box { lo: Vector, hi: Vector },
}

impl ConvexSet {
    pub fn ball(center: Vector, radius: f64) -> Result<Self, GeometryError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(ConvexSet::Ball { center, radius })
        } else {
            Err(GeometryError::BadRadius(radius))
        }
    }

    pub fn unit_ball(dim: usize) -> Self {
        ConvexSet::Ball {
            center: Vector::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn cube(lo: Vector, hi: Vector) -> Result<Self, GeometryError> {
        if lo.dim() != hi.dim() {
            return Err(GeometryError::DimensionMismatch(lo.dim(), hi.dim()));
        }
        if lo.coords().iter().zip(hi.coords()).any(|(a, b)| a > b) {
            return Err(GeometryError::BadBox);
        }
        Ok(ConvexSet::Box { lo, hi })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::WholeSpace(d) => *d,
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Box { lo, .. } => lo.dim(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, ConvexSet::WholeSpace(_))
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        if v.dim() != self.dim() {
            return false;
        }
        match self {
            ConvexSet::WholeSpace(_) => true,
            ConvexSet::Ball { center, radius } => v.distance(center, NormKind::Euclidean) <= radius + tol,
            ConvexSet::Box { lo, hi } => v
                .coords()
                .iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .all(|(x, (a, b))| *x >= a - tol && *x <= b + tol),
        }
    }

    /// Euclidean metric projection onto the set.
    pub fn project(&self, v: &Vector) -> Vector {
        match self {
            ConvexSet::WholeSpace(_) => v.clone(),
            ConvexSet::Ball { center, radius } => {
                let offset = v - center;
                let r = offset.euclidean();
                if r <= *radius {
                    v.clone()
                } else {
                    center.lincomb(1.0, &offset, radius / r)
                }
            }
            ConvexSet::Box { lo, hi } => Vector(
                v.coords()
                    .iter()
                    .zip(lo.coords().iter().zip(hi.coords()))
                    .map(|(x, (a, b))| x.clamp(*a, *b))
                    .collect(),
            ),
        }
    }
}
