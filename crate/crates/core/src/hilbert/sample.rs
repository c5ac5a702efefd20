use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ConvexSet, Vector};
use crate::error::{Error, Result};

/// Half-width of the sampling cube used for unbounded sets.
pub const DEFAULT_SAMPLING_RADIUS: f64 = 10.0;

/// Deterministic point sampler over a convex set.
///
/// Sets with interior are sampled uniformly by rejection inside their
/// bounding box, with at most 100 attempts per requested point. Sets without
/// interior (hyperplanes, simplices, singletons) are sampled by projecting
/// uniform box points onto the set.
pub struct Sampler<'a> {
    set: &'a ConvexSet,
    lower: Vec<f64>,
    upper: Vec<f64>,
    solid: bool,
    rng: ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    pub fn new(set: &'a ConvexSet, dim: usize, seed: u64) -> Result<Self> {
        Self::with_radius(set, dim, seed, DEFAULT_SAMPLING_RADIUS)
    }

    pub fn with_radius(set: &'a ConvexSet, dim: usize, seed: u64, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyVector);
        }
        if let Some(d) = set.dim() {
            if d != dim {
                return Err(Error::DimensionMismatch { expected: d, found: dim });
            }
        }
        let (lower, upper) = set.bounding_box(dim, radius)?;
        Ok(Sampler {
            set,
            lower,
            upper,
            solid: set.is_solid(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn draw_box(&mut self) -> Vector {
        let coords = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| if lo < hi { self.rng.gen_range(lo..=hi) } else { lo })
            .collect();
        Vector::from_raw(coords)
    }

    /// A point drawn uniformly from the ambient sampling box, not necessarily
    /// in the set.
    pub fn ambient(&mut self) -> Vector {
        self.draw_box()
    }

    pub fn sample(&mut self) -> Result<Vector> {
        Ok(self.sample_n(1)?.pop().expect("one sample"))
    }

    pub fn sample_n(&mut self, n: usize) -> Result<Vec<Vector>> {
        let mut points = Vec::with_capacity(n);
        if !self.solid {
            for _ in 0..n {
                let raw = self.draw_box();
                points.push(self.set.project(&raw)?);
            }
            return Ok(points);
        }
        let cap = 100 * n.max(1);
        let mut attempts = 0;
        while points.len() < n {
            if attempts == cap {
                return Err(Error::SamplerFailure {
                    requested: n,
                    produced: points.len(),
                    attempts,
                });
            }
            attempts += 1;
            let candidate = self.draw_box();
            if self.set.is_member(&candidate)? {
                points.push(candidate);
            }
        }
        Ok(points)
    }
}
