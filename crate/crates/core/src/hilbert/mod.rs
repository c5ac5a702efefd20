//! Dense vectors over R^n with the dot product, plus closed convex sets and
//! their metric projections.

mod sample;
mod sets;

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sample::Sampler;
pub use sets::{ConvexSet, DEFAULT_INTERSECTION_CAP, DEFAULT_INTERSECTION_TOL};

/// A point of R^n. Coordinates are always finite and there is at least one.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Vector(vec![0.0; dim])
    }

    /// Builds a vector from values known to be finite, e.g. arithmetic on
    /// other vectors. Overflow is caught in debug builds.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        debug_assert!(coords.iter().all(|c| c.is_finite()), "{coords:?}");
        Vector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub(crate) fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, other: &Vector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(dot(&self.0, &other.0))
    }

    pub fn norm_squared(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Vector::from_raw(self.0.iter().map(|c| factor * c).collect())
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a + factor * b)
    }

    /// `t * self + (1 - t) * other`.
    pub fn combine(t: f64, x: &Vector, y: &Vector) -> Result<Vector> {
        let s = 1.0 - t;
        x.zip_with(y, |a, b| t * a + s * b)
    }

    pub fn distance(&self, other: &Vector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub fn distance_squared(&self, other: &Vector) -> Result<f64> {
        self.distance(other).map(|d| d * d)
    }

    fn zip_with(&self, other: &Vector, op: impl Fn(f64, f64) -> f64) -> Result<Vector> {
        self.check_dim(other)?;
        Ok(Vector::from_raw(
            self.0.iter().zip(&other.0).map(|(&a, &b)| op(a, b)).collect(),
        ))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.0
    }
}

/// Free-function form of [`Vector::inner`].
pub fn inner(x: &Vector, y: &Vector) -> Result<f64> {
    x.inner(y)
}

pub fn norm(x: &Vector) -> f64 {
    x.norm()
}

/// `t * x + (1 - t) * y` for any real `t`.
pub fn combine(t: f64, x: &Vector, y: &Vector) -> Result<Vector> {
    Vector::combine(t, x, y)
}

/// Absolute/relative tolerance pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    #[serde(default)]
    pub rel: f64,
}

impl Tolerance {
    pub const fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        if !(abs >= 0.0 && rel >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be nonnegative, got abs={abs}, rel={rel}"
            )));
        }
        Ok(Tolerance { abs, rel })
    }

    /// Threshold for a quantity measured at a point of size `scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }

    pub fn is_stopping_rule(&self) -> bool {
        self.abs > 0.0 || self.rel > 0.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::absolute(1e-9)
    }
}
