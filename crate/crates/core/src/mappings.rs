//! Concrete operators `S: E -> H` and a sampled checker for the classes of
//! nonexpansive-type mappings.
//!
//! Membership is never proven. A violated verdict carries an exact witness
//! pair; a consistent verdict only means no sampled pair violated the
//! defining inequality beyond the tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ConvexSet, Sampler, Tolerance, Vector};
use crate::linalg::Matrix;

/// Tolerance used when checking that an argument lies in a mapping's domain.
pub const DOMAIN_TOL: Tolerance = Tolerance::absolute(1e-9);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MappingKind {
    Identity,
    Projection {
        target: ConvexSet,
    },
    /// Planar rotation by `angle` radians about `center`.
    Rotation {
        center: Vector,
        angle: f64,
    },
    /// `x -> center - factor * (x - center)` with `|factor| <= 1`.
    ScaledReflection {
        center: Vector,
        factor: f64,
    },
    /// `x -> matrix * x + offset`
    Affine {
        matrix: Matrix,
        offset: Vector,
    },
    /// Applies `maps` left to right.
    Composite {
        maps: Vec<MappingKind>,
    },
}

impl MappingKind {
    fn validate(&self) -> Result<()> {
        match self {
            MappingKind::Identity => Ok(()),
            MappingKind::Projection { target } => target.validate(),
            MappingKind::Rotation { center, angle } => {
                if center.dim() != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        found: center.dim(),
                    });
                }
                if !angle.is_finite() {
                    return Err(Error::InvalidParameter("rotation angle must be finite".into()));
                }
                Ok(())
            }
            MappingKind::ScaledReflection { factor, .. } => {
                if !(-1.0..=1.0).contains(factor) {
                    return Err(Error::InvalidParameter(format!(
                        "reflection factor must lie in [-1, 1], got {factor}"
                    )));
                }
                Ok(())
            }
            MappingKind::Affine { matrix, offset } => {
                if !matrix.is_square() || matrix.rows() != offset.dim() {
                    return Err(Error::InvalidParameter(format!(
                        "affine map needs a square matrix matching the offset; got {}x{} and {}",
                        matrix.rows(),
                        matrix.cols(),
                        offset.dim()
                    )));
                }
                Ok(())
            }
            MappingKind::Composite { maps } => {
                if maps.is_empty() {
                    return Err(Error::InvalidParameter("composite of zero maps".into()));
                }
                maps.iter().try_for_each(MappingKind::validate)
            }
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            MappingKind::Identity => None,
            MappingKind::Projection { target } => target.dim(),
            MappingKind::Rotation { .. } => Some(2),
            MappingKind::ScaledReflection { center, .. } => Some(center.dim()),
            MappingKind::Affine { offset, .. } => Some(offset.dim()),
            MappingKind::Composite { maps } => maps.iter().find_map(MappingKind::dim),
        }
    }

    fn eval(&self, x: &Vector) -> Result<Vector> {
        match self {
            MappingKind::Identity => Ok(x.clone()),
            MappingKind::Projection { target } => target.project(x),
            MappingKind::Rotation { center, angle } => {
                let d = x.sub(center)?;
                let (sin, cos) = angle.sin_cos();
                Ok(Vector::from_raw(vec![
                    center[0] + cos * d[0] - sin * d[1],
                    center[1] + sin * d[0] + cos * d[1],
                ]))
            }
            MappingKind::ScaledReflection { center, factor } => center.axpy(-factor, &x.sub(center)?),
            MappingKind::Affine { matrix, offset } => matrix.mul_vec(x)?.add(offset),
            MappingKind::Composite { maps } => maps.iter().try_fold(x.clone(), |acc, m| m.eval(&acc)),
        }
    }
}

/// Declared `(alpha, beta)` generalized hybrid class of a mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaimedClass {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMapping")]
pub struct Mapping {
    pub kind: MappingKind,
    pub domain: ConvexSet,
    pub claimed_class: Option<ClaimedClass>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapping {
    kind: MappingKind,
    #[serde(default = "ConvexSet::whole_space")]
    domain: ConvexSet,
    #[serde(default)]
    claimed_class: Option<ClaimedClass>,
}

impl TryFrom<RawMapping> for Mapping {
    type Error = Error;

    fn try_from(raw: RawMapping) -> Result<Self> {
        Mapping::new(raw.kind, raw.domain).map(|m| Mapping {
            claimed_class: raw.claimed_class,
            ..m
        })
    }
}

impl Mapping {
    pub fn new(kind: MappingKind, domain: ConvexSet) -> Result<Self> {
        kind.validate()?;
        domain.validate()?;
        if let (Some(a), Some(b)) = (kind.dim(), domain.dim()) {
            if a != b {
                return Err(Error::DimensionMismatch { expected: a, found: b });
            }
        }
        Ok(Mapping {
            kind,
            domain,
            claimed_class: None,
        })
    }

    pub fn identity(domain: ConvexSet) -> Self {
        Mapping {
            kind: MappingKind::Identity,
            domain,
            claimed_class: None,
        }
    }

    pub fn with_claimed_class(mut self, alpha: f64, beta: f64) -> Self {
        self.claimed_class = Some(ClaimedClass { alpha, beta });
        self
    }

    pub fn dim(&self) -> Option<usize> {
        self.kind.dim().or(self.domain.dim())
    }

    /// Evaluates the defining formula at any point of the ambient space,
    /// without checking the domain. Every catalog formula is total on R^n.
    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        if let Some(d) = self.dim() {
            if d != x.dim() {
                return Err(Error::DimensionMismatch { expected: d, found: x.dim() });
            }
        }
        self.kind.eval(x)
    }

    pub fn check_domain(&self, x: &Vector) -> Result<()> {
        let distance = self.domain.distance(x)?;
        if distance > DOMAIN_TOL.bound(x.norm()) {
            return Err(Error::OutsideDomain { distance });
        }
        Ok(())
    }

    /// `Sx` for `x` in the domain.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        self.check_domain(x)?;
        self.eval(x)
    }

    /// `||Sx - x||`
    pub fn fixed_point_residual(&self, x: &Vector) -> Result<f64> {
        self.apply(x)?.distance(x)
    }

    /// `[a|Sx-Sy|^2 + (1-a)|x-Sy|^2] - [b|Sx-y|^2 + (1-b)|x-y|^2]`; the
    /// generalized hybrid inequality holds at `(x, y)` iff this is `<= 0`.
    pub fn ghyb_residual(&self, alpha: f64, beta: f64, x: &Vector, y: &Vector) -> Result<f64> {
        let (sx, sy) = (self.apply(x)?, self.apply(y)?);
        ghyb_residual_from(alpha, beta, x, y, &sx, &sy)
    }

    pub fn class_residual(&self, class: &OperatorClass, x: &Vector, y: &Vector) -> Result<f64> {
        let (sx, sy) = (self.apply(x)?, self.apply(y)?);
        class.residual(x, y, &sx, &sy)
    }
}

fn ghyb_residual_from(alpha: f64, beta: f64, x: &Vector, y: &Vector, sx: &Vector, sy: &Vector) -> Result<f64> {
    let lhs = alpha * sx.distance_squared(sy)? + (1.0 - alpha) * x.distance_squared(sy)?;
    let rhs = beta * sx.distance_squared(y)? + (1.0 - beta) * x.distance_squared(y)?;
    Ok(lhs - rhs)
}

/// Free-function form of [`Mapping::ghyb_residual`].
pub fn ghyb_residual(s: &Mapping, alpha: f64, beta: f64, x: &Vector, y: &Vector) -> Result<f64> {
    s.ghyb_residual(alpha, beta, x, y)
}

pub fn fixed_point_residual(s: &Mapping, x: &Vector) -> Result<f64> {
    s.fixed_point_residual(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum OperatorClass {
    FirmlyNonexpansive,
    Nonexpansive,
    Nonspreading,
    Hybrid,
    GeneralizedHybrid { alpha: f64, beta: f64 },
    QuasiNonexpansive,
}

impl OperatorClass {
    pub fn label(&self) -> String {
        match self {
            OperatorClass::FirmlyNonexpansive => "firmly-nonexpansive".into(),
            OperatorClass::Nonexpansive => "nonexpansive".into(),
            OperatorClass::Nonspreading => "nonspreading".into(),
            OperatorClass::Hybrid => "hybrid".into(),
            OperatorClass::GeneralizedHybrid { alpha, beta } => format!("generalized-hybrid({alpha},{beta})"),
            OperatorClass::QuasiNonexpansive => "quasi-nonexpansive".into(),
        }
    }

    /// Excess of the left side over the right side of the class's defining
    /// inequality, given `Sx` and `Sy`.
    pub fn residual(&self, x: &Vector, y: &Vector, sx: &Vector, sy: &Vector) -> Result<f64> {
        let sxsy = || sx.distance_squared(sy);
        match *self {
            OperatorClass::FirmlyNonexpansive => Ok(sxsy()? - x.sub(y)?.inner(&sx.sub(sy)?)?),
            OperatorClass::Nonexpansive => Ok(sxsy()? - x.distance_squared(y)?),
            OperatorClass::Nonspreading => {
                Ok(2.0 * sxsy()? - sx.distance_squared(y)? - sy.distance_squared(x)?)
            }
            OperatorClass::Hybrid => Ok(3.0 * sxsy()?
                - x.distance_squared(y)?
                - sx.distance_squared(y)?
                - sy.distance_squared(x)?),
            OperatorClass::GeneralizedHybrid { alpha, beta } => ghyb_residual_from(alpha, beta, x, y, sx, sy),
            OperatorClass::QuasiNonexpansive => Err(Error::NeedsFixedPoint("quasi-nonexpansive")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violated { x: Vector, y: Vector },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class_name: String,
    pub pairs_tested: usize,
    /// Largest sampled residual (LHS minus RHS).
    pub worst_residual: f64,
    /// `worst_residual - tol`; positive exactly when the verdict is violated.
    pub worst_violation: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

impl ClassReport {
    pub fn is_consistent(&self) -> bool {
        matches!(self.verdict, Verdict::Consistent)
    }
}

struct Worst {
    residual: f64,
    pair: Option<(Vector, Vector)>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            residual: f64::NEG_INFINITY,
            pair: None,
        }
    }

    fn offer(&mut self, residual: f64, x: &Vector, y: &Vector) {
        if residual > self.residual {
            self.residual = residual;
            self.pair = Some((x.clone(), y.clone()));
        }
    }

    fn into_report(self, class_name: String, pairs_tested: usize, tol: f64) -> ClassReport {
        let verdict = match self.pair {
            Some((x, y)) if self.residual > tol => Verdict::Violated { x, y },
            _ => Verdict::Consistent,
        };
        ClassReport {
            class_name,
            pairs_tested,
            worst_residual: self.residual,
            worst_violation: self.residual - tol,
            tol,
            verdict,
        }
    }
}

fn sampling_dim(s: &Mapping) -> Result<usize> {
    s.dim().ok_or_else(|| {
        Error::InvalidParameter("cannot infer the ambient dimension; give the mapping a bounded domain".into())
    })
}

/// Draws `n_pairs` pairs from the mapping's domain, deterministically in
/// `seed`.
pub fn sample_pairs(s: &Mapping, seed: u64, n_pairs: usize) -> Result<Vec<(Vector, Vector)>> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be at least 1".into()));
    }
    let mut sampler = Sampler::new(&s.domain, sampling_dim(s)?, seed)?;
    let points = sampler.sample_n(2 * n_pairs)?;
    let mut it = points.into_iter();
    Ok((0..n_pairs)
        .map(|_| (it.next().unwrap(), it.next().unwrap()))
        .collect())
}

/// Checks the defining inequality of `class` on pre-drawn pairs.
pub fn classify_pairs(s: &Mapping, class: &OperatorClass, pairs: &[(Vector, Vector)], tol: f64) -> Result<ClassReport> {
    let mut worst = Worst::new();
    for (x, y) in pairs {
        worst.offer(s.class_residual(class, x, y)?, x, y);
    }
    Ok(worst.into_report(class.label(), pairs.len(), tol))
}

pub fn classify(s: &Mapping, class: &OperatorClass, seed: u64, n_pairs: usize, tol: f64) -> Result<ClassReport> {
    if matches!(class, OperatorClass::QuasiNonexpansive) {
        return Err(Error::NeedsFixedPoint("quasi-nonexpansive"));
    }
    let pairs = sample_pairs(s, seed, n_pairs)?;
    classify_pairs(s, class, &pairs, tol)
}

/// Checks `||p - Sy|| <= ||p - y|| + tol` on points sampled from the domain,
/// where `p` must be a fixed point of `S`.
pub fn is_quasi_nonexpansive(s: &Mapping, p: &Vector, seed: u64, n_points: usize, tol: f64) -> Result<ClassReport> {
    let residual = s.fixed_point_residual(p)?;
    if residual > tol {
        return Err(Error::NotFixedPoint { residual });
    }
    if n_points == 0 {
        return Err(Error::InvalidParameter("n_points must be at least 1".into()));
    }
    let mut sampler = Sampler::new(&s.domain, p.dim(), seed)?;
    let mut worst = Worst::new();
    for y in sampler.sample_n(n_points)? {
        let excess = p.distance(&s.apply(&y)?)? - p.distance(&y)?;
        worst.offer(excess, p, &y);
    }
    Ok(worst.into_report(OperatorClass::QuasiNonexpansive.label(), n_points, tol))
}
