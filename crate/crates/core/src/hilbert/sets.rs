use serde::{Deserialize, Serialize};

use super::{dot, Tolerance, Vector};
use crate::error::{Error, Result};

pub const DEFAULT_INTERSECTION_CAP: usize = 10_000;
pub const DEFAULT_INTERSECTION_TOL: f64 = 1e-12;

/// A nonempty closed convex subset of R^n.
///
/// All kinds except `Intersection` have closed-form projections. The
/// intersection is projected with Dykstra's alternating scheme, which
/// converges to the true nearest point (plain alternating projection only
/// finds some point of the intersection).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "unchecked::ConvexSet")]
pub enum ConvexSet {
    WholeSpace,
    Box {
        lower: Vector,
        upper: Vector,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    /// `{x : <normal, x> <= offset}`
    Halfspace {
        normal: Vector,
        offset: f64,
    },
    /// `{x : <normal, x> = offset}`
    Hyperplane {
        normal: Vector,
        offset: f64,
    },
    /// `{x : x >= 0, sum(x) = scale}`
    Simplex {
        scale: f64,
    },
    Singleton {
        point: Vector,
    },
    Intersection {
        sets: Vec<ConvexSet>,
        max_iter: usize,
        tol: f64,
    },
}

impl ConvexSet {
    pub fn whole_space() -> Self {
        ConvexSet::WholeSpace
    }

    pub fn box_set(lower: Vector, upper: Vector) -> Result<Self> {
        ConvexSet::Box { lower, upper }.validated()
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        ConvexSet::Ball { center, radius }.validated()
    }

    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        ConvexSet::Halfspace { normal, offset }.validated()
    }

    pub fn hyperplane(normal: Vector, offset: f64) -> Result<Self> {
        ConvexSet::Hyperplane { normal, offset }.validated()
    }

    pub fn simplex(scale: f64) -> Result<Self> {
        ConvexSet::Simplex { scale }.validated()
    }

    pub fn singleton(point: Vector) -> Self {
        ConvexSet::Singleton { point }
    }

    pub fn intersection(sets: Vec<ConvexSet>) -> Result<Self> {
        ConvexSet::Intersection {
            sets,
            max_iter: DEFAULT_INTERSECTION_CAP,
            tol: DEFAULT_INTERSECTION_TOL,
        }
        .validated()
    }

    /// Interval `[lower, upper]` in R^1.
    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        ConvexSet::box_set(Vector::new(vec![lower])?, Vector::new(vec![upper])?)
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexSet::WholeSpace | ConvexSet::Singleton { .. } => Ok(()),
            ConvexSet::Box { lower, upper } => {
                lower.check_dim(upper)?;
                if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
                    return Err(Error::InvalidSet(format!(
                        "box lower bound exceeds upper bound at coordinate {i}"
                    )));
                }
                Ok(())
            }
            ConvexSet::Ball { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidSet(format!("ball radius must be positive, got {radius}")));
                }
                Ok(())
            }
            ConvexSet::Halfspace { normal, offset } | ConvexSet::Hyperplane { normal, offset } => {
                if normal.norm_squared() == 0.0 {
                    return Err(Error::InvalidSet("normal vector must be nonzero".into()));
                }
                if !offset.is_finite() {
                    return Err(Error::InvalidSet("offset must be finite".into()));
                }
                Ok(())
            }
            ConvexSet::Simplex { scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidSet(format!("simplex scale must be positive, got {scale}")));
                }
                Ok(())
            }
            ConvexSet::Intersection { sets, max_iter, tol } => {
                if sets.is_empty() {
                    return Err(Error::InvalidSet("intersection of zero sets".into()));
                }
                if *max_iter == 0 || !(*tol > 0.0) {
                    return Err(Error::InvalidSet(
                        "intersection needs a positive iteration cap and tolerance".into(),
                    ));
                }
                let mut dim = None;
                for set in sets {
                    set.validate()?;
                    if let (Some(a), Some(b)) = (dim, set.dim()) {
                        if a != b {
                            return Err(Error::DimensionMismatch { expected: a, found: b });
                        }
                    }
                    dim = dim.or(set.dim());
                }
                Ok(())
            }
        }
    }

    /// Ambient dimension, when the set pins one down.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexSet::WholeSpace | ConvexSet::Simplex { .. } => None,
            ConvexSet::Box { lower, .. } => Some(lower.dim()),
            ConvexSet::Ball { center, .. } => Some(center.dim()),
            ConvexSet::Halfspace { normal, .. } | ConvexSet::Hyperplane { normal, .. } => Some(normal.dim()),
            ConvexSet::Singleton { point } => Some(point.dim()),
            ConvexSet::Intersection { sets, .. } => sets.iter().find_map(ConvexSet::dim),
        }
    }

    pub fn check_point(&self, x: &Vector) -> Result<()> {
        match self.dim() {
            Some(d) if d != x.dim() => Err(Error::DimensionMismatch {
                expected: d,
                found: x.dim(),
            }),
            _ => Ok(()),
        }
    }

    /// Metric projection of `x` onto the set.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.check_point(x)?;
        Ok(match self {
            ConvexSet::WholeSpace => x.clone(),
            ConvexSet::Box { lower, upper } => Vector::from_raw(
                x.as_slice()
                    .iter()
                    .zip(lower.as_slice().iter().zip(upper.as_slice()))
                    .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
                    .collect(),
            ),
            ConvexSet::Ball { center, radius } => {
                let offset = x.sub(center)?;
                let dist = offset.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    center.axpy(radius / dist, &offset)?
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = dot(normal.as_slice(), x.as_slice()) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.axpy(-excess / normal.norm_squared(), normal)?
                }
            }
            ConvexSet::Hyperplane { normal, offset } => {
                let excess = dot(normal.as_slice(), x.as_slice()) - offset;
                if excess == 0.0 {
                    x.clone()
                } else {
                    x.axpy(-excess / normal.norm_squared(), normal)?
                }
            }
            ConvexSet::Simplex { scale } => project_simplex(x, *scale),
            ConvexSet::Singleton { point } => point.clone(),
            ConvexSet::Intersection { sets, max_iter, tol } => dykstra(sets, x, *max_iter, *tol)?,
        })
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        self.project(x)?.distance(x)
    }

    pub fn contains(&self, x: &Vector, tol: Tolerance) -> Result<bool> {
        Ok(self.distance(x)? <= tol.bound(x.norm()))
    }

    /// Exact membership test that never runs the Dykstra loop.
    pub(crate) fn is_member(&self, x: &Vector) -> Result<bool> {
        match self {
            ConvexSet::Intersection { sets, .. } => {
                self.check_point(x)?;
                for set in sets {
                    if !set.is_member(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(self.distance(x)? == 0.0),
        }
    }

    /// Whether the set has nonempty interior in the ambient space, judged from
    /// its structure alone.
    pub(crate) fn is_solid(&self) -> bool {
        match self {
            ConvexSet::WholeSpace | ConvexSet::Ball { .. } | ConvexSet::Halfspace { .. } => true,
            ConvexSet::Box { lower, upper } => (0..lower.dim()).all(|i| lower[i] < upper[i]),
            ConvexSet::Hyperplane { .. } | ConvexSet::Simplex { .. } | ConvexSet::Singleton { .. } => false,
            ConvexSet::Intersection { sets, .. } => sets.iter().all(ConvexSet::is_solid),
        }
    }

    /// An axis-aligned box covering the part of the set that samplers draw
    /// from. Unbounded sets get a cube of half-width `radius` centred on the
    /// projection of the origin.
    pub(crate) fn bounding_box(&self, dim: usize, radius: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let cube = |center: &Vector| -> (Vec<f64>, Vec<f64>) {
            (
                center.as_slice().iter().map(|c| c - radius).collect(),
                center.as_slice().iter().map(|c| c + radius).collect(),
            )
        };
        match self {
            ConvexSet::Box { lower, upper } => Ok((lower.as_slice().to_vec(), upper.as_slice().to_vec())),
            ConvexSet::Ball { center, radius: r } => Ok((
                center.as_slice().iter().map(|c| c - r).collect(),
                center.as_slice().iter().map(|c| c + r).collect(),
            )),
            ConvexSet::Simplex { scale } => Ok((vec![0.0; dim], vec![*scale; dim])),
            ConvexSet::Singleton { point } => Ok((point.as_slice().to_vec(), point.as_slice().to_vec())),
            ConvexSet::WholeSpace | ConvexSet::Halfspace { .. } | ConvexSet::Hyperplane { .. } => {
                Ok(cube(&self.project(&Vector::zeros(dim))?))
            }
            ConvexSet::Intersection { sets, .. } => {
                let mut boxes = sets.iter().filter(|s| s.is_bounded());
                let Some(first) = boxes.next() else {
                    return Ok(cube(&self.project(&Vector::zeros(dim))?));
                };
                let (mut lo, mut hi) = first.bounding_box(dim, radius)?;
                for set in boxes {
                    let (l, h) = set.bounding_box(dim, radius)?;
                    for i in 0..dim {
                        lo[i] = lo[i].max(l[i]);
                        hi[i] = hi[i].min(h[i]);
                    }
                }
                if lo.iter().zip(&hi).any(|(l, h)| l > h) {
                    return Err(Error::InvalidSet("intersection of bounded sets is empty".into()));
                }
                Ok((lo, hi))
            }
        }
    }

    fn is_bounded(&self) -> bool {
        match self {
            ConvexSet::WholeSpace | ConvexSet::Halfspace { .. } | ConvexSet::Hyperplane { .. } => false,
            ConvexSet::Intersection { sets, .. } => sets.iter().any(ConvexSet::is_bounded),
            _ => true,
        }
    }
}

/// Sort-and-threshold projection onto `{x >= 0, sum(x) = scale}`.
fn project_simplex(x: &Vector, scale: f64) -> Vector {
    let mut sorted = x.as_slice().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &value) in sorted.iter().enumerate() {
        cumulative += value;
        let candidate = (cumulative - scale) / (j + 1) as f64;
        if value - candidate > 0.0 {
            theta = candidate;
        }
    }
    Vector::from_raw(x.as_slice().iter().map(|v| (v - theta).max(0.0)).collect())
}

fn dykstra(sets: &[ConvexSet], x: &Vector, max_iter: usize, tol: f64) -> Result<Vector> {
    let mut current = x.clone();
    let mut increments = vec![Vector::zeros(x.dim()); sets.len()];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let previous = current.clone();
        for (set, increment) in sets.iter().zip(increments.iter_mut()) {
            let shifted = current.add(increment)?;
            let projected = set.project(&shifted)?;
            *increment = shifted.sub(&projected)?;
            current = projected;
        }
        let change = current.distance(&previous)?;
        let mut infeasibility: f64 = 0.0;
        for set in sets {
            infeasibility = infeasibility.max(set.distance(&current)?);
        }
        residual = change.max(infeasibility);
        if residual <= tol * current.norm().max(1.0) {
            return Ok(current);
        }
    }
    Err(Error::ProjectionNotConverged {
        iterations: max_iter,
        residual,
        last: current,
    })
}

mod unchecked {
    use serde::Deserialize;

    use super::{DEFAULT_INTERSECTION_CAP, DEFAULT_INTERSECTION_TOL};
    use crate::error::Error;
    use crate::hilbert::Vector;

    fn default_cap() -> usize {
        DEFAULT_INTERSECTION_CAP
    }

    fn default_tol() -> f64 {
        DEFAULT_INTERSECTION_TOL
    }

    #[derive(Deserialize)]
    #[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
    pub enum ConvexSet {
        WholeSpace,
        Box {
            lower: Vector,
            upper: Vector,
        },
        Ball {
            center: Vector,
            radius: f64,
        },
        Halfspace {
            normal: Vector,
            offset: f64,
        },
        Hyperplane {
            normal: Vector,
            offset: f64,
        },
        Simplex {
            scale: f64,
        },
        Singleton {
            point: Vector,
        },
        Intersection {
            sets: Vec<super::ConvexSet>,
            #[serde(default = "default_cap")]
            max_iter: usize,
            #[serde(default = "default_tol")]
            tol: f64,
        },
    }

    impl TryFrom<ConvexSet> for super::ConvexSet {
        type Error = Error;

        fn try_from(raw: ConvexSet) -> Result<Self, Error> {
            let set = match raw {
                ConvexSet::WholeSpace => super::ConvexSet::WholeSpace,
                ConvexSet::Box { lower, upper } => super::ConvexSet::Box { lower, upper },
                ConvexSet::Ball { center, radius } => super::ConvexSet::Ball { center, radius },
                ConvexSet::Halfspace { normal, offset } => super::ConvexSet::Halfspace { normal, offset },
                ConvexSet::Hyperplane { normal, offset } => super::ConvexSet::Hyperplane { normal, offset },
                ConvexSet::Simplex { scale } => super::ConvexSet::Simplex { scale },
                ConvexSet::Singleton { point } => super::ConvexSet::Singleton { point },
                ConvexSet::Intersection { sets, max_iter, tol } => {
                    super::ConvexSet::Intersection { sets, max_iter, tol }
                }
            };
            set.validate()?;
            Ok(set)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn unit_square() -> ConvexSet {
        ConvexSet::box_set(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(unit_square().project(&v(&[2.0, -1.0])).unwrap(), v(&[1.0, 0.0]));
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let p = ball.project(&v(&[3.0, 4.0])).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn halfspace_projection_matches_grid_search() {
        let half = ConvexSet::halfspace(v(&[1.0, 0.0]), 0.0).unwrap();
        let x = v(&[2.0, 5.0]);
        // Oracle: nearest feasible grid point on [-5, 0] x [0, 10] with step 0.01.
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=500 {
            for j in 0..=1000 {
                let (a, b) = (-5.0 + 0.01 * i as f64, 0.01 * j as f64);
                let d = (a - 2.0f64).powi(2) + (b - 5.0f64).powi(2);
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        let p = half.project(&x).unwrap();
        assert!((p[0] - best.1).abs() < 1e-9 && (p[1] - best.2).abs() < 1e-9);
        assert_eq!(p, v(&[0.0, 5.0]));
    }

    #[test]
    fn contains_examples() {
        let tol = Tolerance::absolute(1e-12);
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(ball.contains(&v(&[0.0, 0.0]), tol).unwrap());
        assert!(!unit_square().contains(&v(&[1.5, 0.5]), tol).unwrap());
        let plane = ConvexSet::hyperplane(v(&[1.0, 1.0]), 1.0).unwrap();
        // affine residual <a, x> - c is zero at (0.5, 0.5)
        assert_eq!(0.5 + 0.5 - 1.0, 0.0);
        assert!(plane.contains(&v(&[0.5, 0.5]), tol).unwrap());
    }

    #[test]
    fn simplex_projection() {
        let simplex = ConvexSet::simplex(1.0).unwrap();
        assert_eq!(simplex.project(&v(&[0.2, 0.3, 0.5])).unwrap(), v(&[0.2, 0.3, 0.5]));
        assert_eq!(simplex.project(&v(&[2.0, 0.0])).unwrap(), v(&[1.0, 0.0]));
        let p = simplex.project(&v(&[1.0, 1.0, 1.0])).unwrap();
        for i in 0..3 {
            assert!((p[i] - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dykstra_finds_nearest_point() {
        // Ball of radius 1 cut by x >= 0.5 (as -x <= -0.5). The nearest
        // point to (0, 2) lies on the arc at x = 0.5.
        let set = ConvexSet::intersection(vec![
            ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::halfspace(v(&[-1.0, 0.0]), -0.5).unwrap(),
        ])
        .unwrap();
        let p = set.project(&v(&[0.0, 2.0])).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-9, "{p:?}");
        assert!((p[1] - 0.75f64.sqrt()).abs() < 1e-9, "{p:?}");
        let inside = v(&[0.7, 0.1]);
        assert_eq!(set.project(&inside).unwrap(), inside);
    }

    #[test]
    fn dykstra_reports_empty_intersection() {
        let set = ConvexSet::Intersection {
            sets: vec![
                ConvexSet::halfspace(v(&[1.0]), 0.0).unwrap(),
                ConvexSet::halfspace(v(&[-1.0]), -1.0).unwrap(),
            ],
            max_iter: 50,
            tol: 1e-12,
        };
        match set.project(&v(&[3.0])) {
            Err(Error::ProjectionNotConverged { iterations, residual, .. }) => {
                assert_eq!(iterations, 50);
                assert!(residual > 0.5);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_sets() {
        assert!(ConvexSet::ball(v(&[0.0]), 0.0).is_err());
        assert!(ConvexSet::box_set(v(&[1.0]), v(&[0.0])).is_err());
        assert!(ConvexSet::halfspace(v(&[0.0, 0.0]), 1.0).is_err());
        assert!(ConvexSet::simplex(-1.0).is_err());
        let bad: std::result::Result<ConvexSet, _> =
            serde_json::from_str(r#"{"kind":"ball","center":[0.0],"radius":-2.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn serde_shape() {
        let set: ConvexSet = serde_json::from_str(
            r#"{"kind":"intersection","sets":[{"kind":"box","lower":[0,0],"upper":[1,1]},{"kind":"whole_space"}]}"#,
        )
        .unwrap();
        match &set {
            ConvexSet::Intersection { max_iter, tol, .. } => {
                assert_eq!(*max_iter, DEFAULT_INTERSECTION_CAP);
                assert_eq!(*tol, DEFAULT_INTERSECTION_TOL);
            }
            _ => panic!(),
        }
        let text = serde_json::to_string(&set).unwrap();
        assert_eq!(serde_json::from_str::<ConvexSet>(&text).unwrap(), set);
    }
}
