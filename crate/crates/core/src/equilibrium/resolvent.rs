use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Bifunction, Family};
use crate::error::{Error, Result};
use crate::hilbert::{ConvexSet, Sampler, Vector};

pub const DEFAULT_INNER_CAP: usize = 100_000;
pub const DEFAULT_INNER_TOL: f64 = 1e-10;
pub const DEFAULT_VERIFY_SAMPLES: usize = 256;

fn default_cap() -> usize {
    DEFAULT_INNER_CAP
}

fn default_tol() -> f64 {
    DEFAULT_INNER_TOL
}

/// How to compute `T_r x`.
///
/// The iterative strategies stop once the a posteriori bound
/// `q/(1-q) * |z_{k+1} - z_k|` on the distance to the true resolvent drops
/// below `tol * max(1, |z|)`, where `q` is the contraction factor of the
/// inner map.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Auto,
    /// Solves `(rA + I) z = x - r b`; affine VI on the whole space only.
    ClosedFormLinear,
    /// `z <- P_E(z - step (Az + b + (z - x)/r))`. The default step is
    /// `mu / L^2` with `mu = 1/r` and `L = |A| + 1/r`.
    ProjectedFixedPoint {
        #[serde(default)]
        step: Option<f64>,
        #[serde(default = "default_cap")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// Projected gradient on `g(z) + |z - x|^2 / (2r)` over `E`; the default
    /// step is `1 / (L_g + 1/r)`.
    ProxGradient {
        #[serde(default)]
        step: Option<f64>,
        #[serde(default = "default_cap")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

impl Strategy {
    pub fn projected_fixed_point() -> Self {
        Strategy::ProjectedFixedPoint {
            step: None,
            max_iter: DEFAULT_INNER_CAP,
            tol: DEFAULT_INNER_TOL,
        }
    }

    pub fn prox_gradient() -> Self {
        Strategy::ProxGradient {
            step: None,
            max_iter: DEFAULT_INNER_CAP,
            tol: DEFAULT_INNER_TOL,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::ClosedFormLinear => "closed_form_linear",
            Strategy::ProjectedFixedPoint { .. } => "projected_fixed_point",
            Strategy::ProxGradient { .. } => "prox_gradient",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyUsed {
    Projection,
    ClosedFormLinear,
    ProjectedFixedPoint,
    ProxGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub seed: u64,
    pub n_samples: usize,
}

impl Default for Verification {
    fn default() -> Self {
        Verification {
            seed: 0,
            n_samples: DEFAULT_VERIFY_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventRequest {
    pub f: Bifunction,
    pub set: ConvexSet,
    pub r: f64,
    pub x: Vector,
    #[serde(default)]
    pub strategy: Strategy,
    /// Inner starting point; defaults to `P_E(x)`.
    #[serde(default)]
    pub initial: Option<Vector>,
    /// When present, the result carries a sampled residual.
    #[serde(default)]
    pub verify: Option<Verification>,
}

impl ResolventRequest {
    pub fn new(f: Bifunction, set: ConvexSet, r: f64, x: Vector) -> Self {
        ResolventRequest {
            f,
            set,
            r,
            x,
            strategy: Strategy::Auto,
            initial: None,
            verify: None,
        }
    }

    pub fn solve(&self) -> Result<ResolventResult> {
        let mut result = resolve(&self.f, &self.set, self.r, &self.x, &self.strategy, self.initial.as_ref())?;
        if let Some(v) = self.verify {
            result.achieved_residual = Some(resolvent_residual(
                &self.f,
                &self.set,
                self.r,
                &self.x,
                &result.z,
                v.seed,
                v.n_samples,
            )?);
        }
        Ok(result)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventResult {
    pub z: Vector,
    /// Sampled `min_y f(z,y) + <y-z, z-x>/r`, when verification was requested.
    pub achieved_residual: Option<f64>,
    /// Upper bound on `|z - T_r x|` (zero for exact strategies).
    pub error_bound: f64,
    pub inner_iterations: usize,
    pub strategy_used: StrategyUsed,
}

/// `T_r x` for a request.
pub fn resolvent(req: &ResolventRequest) -> Result<ResolventResult> {
    req.solve()
}

/// Computes `T_r x = { z in E : f(z,y) + <y-z, z-x>/r >= 0 for all y in E }`.
pub fn resolve(
    f: &Bifunction,
    set: &ConvexSet,
    r: f64,
    x: &Vector,
    strategy: &Strategy,
    initial: Option<&Vector>,
) -> Result<ResolventResult> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    set.check_point(x)?;
    if let Some(d) = f.dim() {
        if d != x.dim() {
            return Err(Error::DimensionMismatch { expected: d, found: x.dim() });
        }
    }
    let mismatch = || Error::StrategyMismatch {
        strategy: strategy.name(),
        family: f.family.name(),
    };
    let start = || -> Result<Vector> {
        match initial {
            Some(z0) => set.project(z0),
            None => set.project(x),
        }
    };
    match (&f.family, strategy) {
        (Family::Zero, Strategy::Auto) => Ok(exact(set.project(x)?, StrategyUsed::Projection)),
        (Family::AffineVi { matrix, offset }, Strategy::Auto) if matches!(set, ConvexSet::WholeSpace) => {
            closed_form_linear(matrix, offset, r, x)
        }
        (Family::AffineVi { matrix, offset }, Strategy::ClosedFormLinear) => {
            if !matches!(set, ConvexSet::WholeSpace) {
                return Err(mismatch());
            }
            closed_form_linear(matrix, offset, r, x)
        }
        (Family::AffineVi { matrix, offset }, Strategy::Auto) => {
            projected_fixed_point(matrix, offset, set, r, x, None, DEFAULT_INNER_CAP, DEFAULT_INNER_TOL, start()?)
        }
        (Family::AffineVi { matrix, offset }, Strategy::ProjectedFixedPoint { step, max_iter, tol }) => {
            projected_fixed_point(matrix, offset, set, r, x, *step, *max_iter, *tol, start()?)
        }
        (Family::ConvexGap { g }, Strategy::Auto) => {
            prox_gradient(g, set, r, x, None, DEFAULT_INNER_CAP, DEFAULT_INNER_TOL, start()?)
        }
        (Family::ConvexGap { g }, Strategy::ProxGradient { step, max_iter, tol }) => {
            prox_gradient(g, set, r, x, *step, *max_iter, *tol, start()?)
        }
        _ => Err(mismatch()),
    }
}

fn exact(z: Vector, used: StrategyUsed) -> ResolventResult {
    ResolventResult {
        z,
        achieved_residual: None,
        error_bound: 0.0,
        inner_iterations: 0,
        strategy_used: used,
    }
}

fn closed_form_linear(matrix: &crate::linalg::Matrix, offset: &Vector, r: f64, x: &Vector) -> Result<ResolventResult> {
    let n = x.dim();
    let system = matrix.to_nalgebra() * r + DMatrix::<f64>::identity(n, n);
    let rhs = DVector::from_iterator(n, (0..n).map(|i| x[i] - r * offset[i]));
    let solution = system.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    let z = Vector::new(solution.iter().copied().collect()).map_err(|_| Error::SingularSystem)?;
    Ok(exact(z, StrategyUsed::ClosedFormLinear))
}

struct Contraction {
    factor: f64,
    max_iter: usize,
    tol: f64,
    strategy: &'static str,
    used: StrategyUsed,
}

impl Contraction {
    fn run(&self, mut z: Vector, mut step: impl FnMut(&Vector) -> Result<Vector>) -> Result<ResolventResult> {
        let ratio = self.factor / (1.0 - self.factor);
        let mut bound = f64::INFINITY;
        for k in 1..=self.max_iter {
            let next = step(&z)?;
            bound = ratio * next.distance(&z)?;
            z = next;
            if bound <= self.tol * z.norm().max(1.0) {
                return Ok(ResolventResult {
                    z,
                    achieved_residual: None,
                    error_bound: bound,
                    inner_iterations: k,
                    strategy_used: self.used,
                });
            }
        }
        Err(Error::InnerSolver {
            strategy: self.strategy,
            iterations: self.max_iter,
            residual: bound,
            last: z,
        })
    }
}

fn check_inner(max_iter: usize, tol: f64) -> Result<()> {
    if max_iter == 0 || !(tol > 0.0) {
        return Err(Error::InvalidParameter(
            "inner solver needs a positive iteration cap and tolerance".into(),
        ));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn projected_fixed_point(
    matrix: &crate::linalg::Matrix,
    offset: &Vector,
    set: &ConvexSet,
    r: f64,
    x: &Vector,
    step: Option<f64>,
    max_iter: usize,
    tol: f64,
    z0: Vector,
) -> Result<ResolventResult> {
    check_inner(max_iter, tol)?;
    let mu = 1.0 / r;
    let lipschitz = matrix.spectral_norm() + mu;
    let gamma = step.unwrap_or(mu / (lipschitz * lipschitz));
    if !(gamma > 0.0 && gamma < 2.0 * mu / (lipschitz * lipschitz)) {
        return Err(Error::InvalidParameter(format!(
            "projected fixed-point step {gamma} is outside the contraction window (0, {})",
            2.0 * mu / (lipschitz * lipschitz)
        )));
    }
    let factor = (1.0 - 2.0 * gamma * mu + gamma * gamma * lipschitz * lipschitz).max(0.0).sqrt();
    let contraction = Contraction {
        factor,
        max_iter,
        tol,
        strategy: "projected_fixed_point",
        used: StrategyUsed::ProjectedFixedPoint,
    };
    contraction.run(z0, |z| {
        let operator = matrix.mul_vec(z)?.add(offset)?.axpy(mu, &z.sub(x)?)?;
        set.project(&z.axpy(-gamma, &operator)?)
    })
}

#[allow(clippy::too_many_arguments)]
fn prox_gradient(
    g: &super::ConvexFunction,
    set: &ConvexSet,
    r: f64,
    x: &Vector,
    step: Option<f64>,
    max_iter: usize,
    tol: f64,
    z0: Vector,
) -> Result<ResolventResult> {
    check_inner(max_iter, tol)?;
    let mu = 1.0 / r;
    let lipschitz = g.gradient_lipschitz() + mu;
    let step = step.unwrap_or(1.0 / lipschitz);
    let factor = (1.0 - step * mu).abs().max((1.0 - step * lipschitz).abs());
    if !(step > 0.0 && factor < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "prox-gradient step {step} is outside the contraction window (0, {})",
            2.0 / lipschitz
        )));
    }
    let contraction = Contraction {
        factor,
        max_iter,
        tol,
        strategy: "prox_gradient",
        used: StrategyUsed::ProxGradient,
    };
    contraction.run(z0, |z| {
        let gradient = g.gradient(z)?.axpy(mu, &z.sub(x)?)?;
        set.project(&z.axpy(-step, &gradient)?)
    })
}

fn require_member(set: &ConvexSet, z: &Vector) -> Result<()> {
    let distance = set.distance(z)?;
    if distance > super::DOMAIN_TOL.bound(z.norm()) {
        return Err(Error::OutsideDomain { distance });
    }
    Ok(())
}

/// `min_y f(z, y) + <y - z, z - x>/r` over `n_samples` points `y` drawn from
/// `E`. A correct resolvent value gives a result `>= -tol`.
pub fn resolvent_residual(
    f: &Bifunction,
    set: &ConvexSet,
    r: f64,
    x: &Vector,
    z: &Vector,
    seed: u64,
    n_samples: usize,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    require_member(set, z)?;
    let pull = z.sub(x)?;
    let mut sampler = Sampler::new(set, z.dim(), seed)?;
    let mut min = f64::INFINITY;
    for y in sampler.sample_n(n_samples)? {
        let value = f.eval(z, &y)? + y.sub(z)?.inner(&pull)? / r;
        min = min.min(value);
    }
    Ok(min)
}

/// `min_y f(z, y)` over sampled `y` in `E`.
pub fn ep_residual(f: &Bifunction, set: &ConvexSet, z: &Vector, seed: u64, n_samples: usize) -> Result<f64> {
    require_member(set, z)?;
    let mut sampler = Sampler::new(set, z.dim(), seed)?;
    let mut min = f64::INFINITY;
    for y in sampler.sample_n(n_samples)? {
        min = min.min(f.eval(z, &y)?);
    }
    Ok(min)
}

/// Sampled test of `z in EP(f)`.
pub fn ep_membership(f: &Bifunction, set: &ConvexSet, z: &Vector, seed: u64, n_samples: usize, tol: f64) -> Result<bool> {
    Ok(ep_residual(f, set, z, seed, n_samples)? >= -tol)
}
