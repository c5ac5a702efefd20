//! Bifunctions `f: E x E -> R`, sampled checks of the standing conditions
//! (A1)-(A4), and the resolvent `T_r`.

mod resolvent;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{ConvexSet, Sampler, Tolerance, Vector};
use crate::linalg::Matrix;

pub use resolvent::{
    ep_membership, ep_residual, resolve, resolvent, resolvent_residual, ResolventRequest, ResolventResult, Strategy,
    StrategyUsed, Verification, DEFAULT_INNER_CAP, DEFAULT_INNER_TOL, DEFAULT_VERIFY_SAMPLES,
};

/// Tolerance for checking that bifunction arguments lie in the domain.
pub const DOMAIN_TOL: Tolerance = Tolerance::absolute(1e-9);

/// Convex functions `g` for the gap family `f(x, y) = g(y) - g(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexFunction {
    /// `0.5 <Qx, x> + <c, x>` with `Q` symmetric positive semidefinite.
    Quadratic { q: Matrix, c: Vector },
    /// `0.5 ||x||^2`
    NormSquare,
    /// `0.5 * sum_i w_i (x_i - center_i)^2` with `w_i >= 0`.
    SeparableQuadratic { weights: Vector, center: Vector },
}

impl ConvexFunction {
    fn validate(&self) -> Result<()> {
        match self {
            ConvexFunction::Quadratic { q, c } => {
                if !q.is_square() || q.rows() != c.dim() {
                    return Err(Error::InvalidParameter("quadratic needs square Q matching c".into()));
                }
                Ok(())
            }
            ConvexFunction::NormSquare => Ok(()),
            ConvexFunction::SeparableQuadratic { weights, center } => {
                weights.check_dim(center)?;
                if weights.as_slice().iter().any(|w| *w < 0.0) {
                    return Err(Error::InvalidParameter("separable quadratic weights must be >= 0".into()));
                }
                Ok(())
            }
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            ConvexFunction::Quadratic { c, .. } => Some(c.dim()),
            ConvexFunction::NormSquare => None,
            ConvexFunction::SeparableQuadratic { center, .. } => Some(center.dim()),
        }
    }

    pub fn value(&self, x: &Vector) -> Result<f64> {
        match self {
            ConvexFunction::Quadratic { q, c } => Ok(0.5 * q.mul_vec(x)?.inner(x)? + c.inner(x)?),
            ConvexFunction::NormSquare => Ok(0.5 * x.norm_squared()),
            ConvexFunction::SeparableQuadratic { weights, center } => {
                center.check_dim(x)?;
                Ok(0.5
                    * (0..x.dim())
                        .map(|i| weights[i] * (x[i] - center[i]).powi(2))
                        .sum::<f64>())
            }
        }
    }

    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        match self {
            ConvexFunction::Quadratic { q, c } => {
                // gradient of 0.5<Qx,x> is the symmetric part of Q applied to x
                let qx = q.mul_vec(x)?;
                let qtx = Vector::from_raw(
                    (0..x.dim())
                        .map(|j| (0..x.dim()).map(|i| q.get(i, j) * x[i]).sum())
                        .collect(),
                );
                qx.add(&qtx)?.scale(0.5).add(c)
            }
            ConvexFunction::NormSquare => Ok(x.clone()),
            ConvexFunction::SeparableQuadratic { weights, center } => {
                center.check_dim(x)?;
                Ok(Vector::from_raw(
                    (0..x.dim()).map(|i| weights[i] * (x[i] - center[i])).collect(),
                ))
            }
        }
    }

    /// Lipschitz constant of the gradient.
    pub fn gradient_lipschitz(&self) -> f64 {
        match self {
            ConvexFunction::Quadratic { q, .. } => {
                let a = q.to_nalgebra();
                let sym = (&a + a.transpose()) * 0.5;
                sym.singular_values().iter().fold(0.0f64, |acc, &s| acc.max(s))
            }
            ConvexFunction::NormSquare => 1.0,
            ConvexFunction::SeparableQuadratic { weights, .. } => {
                weights.as_slice().iter().fold(0.0f64, |acc, &w| acc.max(w))
            }
        }
    }
}

type BifunctionFn = dyn Fn(&Vector, &Vector) -> f64 + Send + Sync;

/// A user-supplied bifunction. It can be evaluated and audited but has no
/// resolvent solver.
#[derive(Clone)]
pub struct CustomBifunction {
    pub name: String,
    eval: Arc<BifunctionFn>,
}

impl CustomBifunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(&Vector, &Vector) -> f64 + Send + Sync + 'static) -> Self {
        CustomBifunction {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }
}

impl fmt::Debug for CustomBifunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomBifunction").field("name", &self.name).finish()
    }
}

impl PartialEq for CustomBifunction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.eval, &other.eval)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Zero,
    /// `f(x, y) = <Ax + b, y - x>`
    AffineVi { matrix: Matrix, offset: Vector },
    /// `f(x, y) = g(y) - g(x)`
    ConvexGap { g: ConvexFunction },
    #[serde(skip)]
    Custom(CustomBifunction),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Zero => "zero",
            Family::AffineVi { .. } => "affine_vi",
            Family::ConvexGap { .. } => "convex_gap",
            Family::Custom(_) => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBifunction")]
pub struct Bifunction {
    pub family: Family,
    pub domain: ConvexSet,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBifunction {
    family: Family,
    #[serde(default = "ConvexSet::whole_space")]
    domain: ConvexSet,
}

impl TryFrom<RawBifunction> for Bifunction {
    type Error = Error;

    fn try_from(raw: RawBifunction) -> Result<Self> {
        Bifunction::new(raw.family, raw.domain)
    }
}

impl Bifunction {
    pub fn new(family: Family, domain: ConvexSet) -> Result<Self> {
        domain.validate()?;
        match &family {
            Family::AffineVi { matrix, offset } => {
                if !matrix.is_square() || matrix.rows() != offset.dim() {
                    return Err(Error::InvalidParameter(
                        "affine VI needs a square matrix matching the offset".into(),
                    ));
                }
            }
            Family::ConvexGap { g } => g.validate()?,
            Family::Zero | Family::Custom(_) => {}
        }
        let bif = Bifunction { family, domain };
        if let (Some(a), Some(b)) = (bif.family_dim(), bif.domain.dim()) {
            if a != b {
                return Err(Error::DimensionMismatch { expected: a, found: b });
            }
        }
        Ok(bif)
    }

    pub fn zero(domain: ConvexSet) -> Self {
        Bifunction {
            family: Family::Zero,
            domain,
        }
    }

    pub fn affine_vi(matrix: Matrix, offset: Vector, domain: ConvexSet) -> Result<Self> {
        Bifunction::new(Family::AffineVi { matrix, offset }, domain)
    }

    pub fn convex_gap(g: ConvexFunction, domain: ConvexSet) -> Result<Self> {
        Bifunction::new(Family::ConvexGap { g }, domain)
    }

    pub fn custom(custom: CustomBifunction, domain: ConvexSet) -> Self {
        Bifunction {
            family: Family::Custom(custom),
            domain,
        }
    }

    fn family_dim(&self) -> Option<usize> {
        match &self.family {
            Family::AffineVi { offset, .. } => Some(offset.dim()),
            Family::ConvexGap { g } => g.dim(),
            Family::Zero | Family::Custom(_) => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.family_dim().or(self.domain.dim())
    }

    fn check_domain(&self, x: &Vector) -> Result<()> {
        let distance = self.domain.distance(x)?;
        if distance > DOMAIN_TOL.bound(x.norm()) {
            return Err(Error::OutsideDomain { distance });
        }
        Ok(())
    }

    /// `f(x, y)` for `x, y` in the domain.
    pub fn eval(&self, x: &Vector, y: &Vector) -> Result<f64> {
        x.check_dim(y)?;
        self.check_domain(x)?;
        self.check_domain(y)?;
        self.eval_unchecked(x, y)
    }

    pub(crate) fn eval_unchecked(&self, x: &Vector, y: &Vector) -> Result<f64> {
        match &self.family {
            Family::Zero => Ok(0.0),
            Family::AffineVi { matrix, offset } => matrix.mul_vec(x)?.add(offset)?.inner(&y.sub(x)?),
            Family::ConvexGap { g } => Ok(g.value(y)? - g.value(x)?),
            Family::Custom(custom) => Ok((custom.eval)(x, y)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    A1,
    A2,
    A3,
    A4,
}

impl Axiom {
    pub fn description(&self) -> &'static str {
        match self {
            Axiom::A1 => "f(x,x) = 0",
            Axiom::A2 => "monotone: f(x,y) + f(y,x) <= 0",
            Axiom::A3 => "upper hemicontinuity: f(tz + (1-t)x, y) <= f(x,y) as t -> 0",
            Axiom::A4 => "convexity of y -> f(x,y) (midpoint test)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub description: String,
    pub passed: bool,
    /// Largest sampled excess over the allowed bound (before tolerance).
    pub worst_excess: f64,
    /// Sample points `(x, y[, z])` achieving the worst excess when failed.
    pub witness: Option<Vec<Vector>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub tol: f64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// Default `t` grid for the (A3) check: `10^-1, ..., 10^-12`.
pub fn default_t_grid() -> Vec<f64> {
    (1..=12).map(|k| 10f64.powi(-k)).collect()
}

struct Tracker {
    axiom: Axiom,
    worst: f64,
    witness: Vec<Vector>,
}

impl Tracker {
    fn new(axiom: Axiom) -> Self {
        Tracker {
            axiom,
            worst: f64::NEG_INFINITY,
            witness: Vec::new(),
        }
    }

    fn offer(&mut self, excess: f64, points: &[&Vector]) {
        if excess > self.worst {
            self.worst = excess;
            self.witness = points.iter().map(|p| (*p).clone()).collect();
        }
    }

    fn finish(self, tol: f64) -> AxiomCheck {
        let passed = self.worst <= tol;
        AxiomCheck {
            axiom: self.axiom,
            description: self.axiom.description().to_string(),
            passed,
            worst_excess: self.worst,
            witness: (!passed).then_some(self.witness),
        }
    }
}

/// Sampled audit of (A1)-(A4) on triples drawn from the domain.
///
/// Lower semicontinuity in (A4) is not testable from samples; only the
/// convexity half is checked.
pub fn check_axioms(f: &Bifunction, seed: u64, n_samples: usize, t_grid: &[f64], tol: f64) -> Result<AxiomReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    if t_grid.is_empty()
        || t_grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0))
        || t_grid.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidParameter(
            "t_grid must be a nonempty decreasing sequence in (0, 1]".into(),
        ));
    }
    let dim = f
        .dim()
        .ok_or_else(|| Error::InvalidParameter("cannot infer the ambient dimension of the bifunction".into()))?;
    let mut sampler = Sampler::new(&f.domain, dim, seed)?;
    let points = sampler.sample_n(3 * n_samples)?;
    let t_min = *t_grid.last().unwrap();

    let mut a1 = Tracker::new(Axiom::A1);
    let mut a2 = Tracker::new(Axiom::A2);
    let mut a3 = Tracker::new(Axiom::A3);
    let mut a4 = Tracker::new(Axiom::A4);
    for triple in points.chunks(3) {
        let (x, y, z) = (&triple[0], &triple[1], &triple[2]);
        a1.offer(f.eval(x, x)?.abs(), &[x]);

        let fxy = f.eval(x, y)?;
        a2.offer(fxy + f.eval(y, x)?, &[x, y]);

        let xt = Vector::combine(t_min, z, x)?;
        a3.offer(f.eval(&xt, y)? - fxy, &[x, y, z]);

        let mid = Vector::combine(0.5, y, z)?;
        a4.offer(f.eval(x, &mid)? - 0.5 * (fxy + f.eval(x, z)?), &[x, y, z]);
    }
    Ok(AxiomReport {
        samples: n_samples,
        tol,
        checks: vec![a1.finish(tol), a2.finish(tol), a3.finish(tol), a4.finish(tol)],
    })
}
