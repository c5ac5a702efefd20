//! Iteration engines: the modified Ishikawa scheme with an equilibrium
//! (resolvent) step, its two specializations, and the Mann, Ishikawa and
//! Tada-Takahashi baselines.

mod schedule;
mod trace;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{ep_membership, resolve, Bifunction, Family, Strategy};
use crate::error::{Error, Result};
use crate::hilbert::{ConvexSet, Vector};
use crate::mappings::Mapping;

pub use schedule::{
    validate_for, validate_schedule, Bounds, Condition, FormulaKind, Schedule, ScheduleViolation, SequenceSpec,
    ValidatedSchedule,
};
pub use trace::{Record, Residuals, TerminalStatus, Trace, TraceMode};

/// Tolerance on `|Sq - q|` for a declared known solution.
pub const KNOWN_SOLUTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// `x_{n+1} = a_n x_n + (1-a_n) S x_n`
    #[serde(rename = "mann")]
    Mann,
    /// `y_n = b_n x_n + (1-b_n) S x_n`, `x_{n+1} = a_n x_n + (1-a_n) S y_n`
    #[serde(rename = "ishikawa")]
    Ishikawa,
    /// `u_n = T_{r_n} x_n`, `x_{n+1} = a_n x_n + (1-a_n) S u_n`
    #[serde(rename = "tada_takahashi")]
    TadaTakahashi,
    /// `u_n = T_{r_n} x_n`, `y_n = (1-b_n) x_n + b_n S u_n`,
    /// `x_{n+1} = (1-a_n) x_n + a_n S y_n`
    #[serde(rename = "thm31")]
    ModifiedIshikawa,
    /// The modified scheme with `f = 0` and `r_n = 1`, so `u_n = P_E x_n`.
    #[serde(rename = "cor32")]
    ProjectionIshikawa,
    /// The modified scheme with `a_n = 1`: `x_{n+1} = S((1-b_n) x_n + b_n S u_n)`.
    #[serde(rename = "cor33")]
    FullStepIshikawa,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Mann,
        Scheme::Ishikawa,
        Scheme::TadaTakahashi,
        Scheme::ModifiedIshikawa,
        Scheme::ProjectionIshikawa,
        Scheme::FullStepIshikawa,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Mann => "mann",
            Scheme::Ishikawa => "ishikawa",
            Scheme::TadaTakahashi => "tada_takahashi",
            Scheme::ModifiedIshikawa => "thm31",
            Scheme::ProjectionIshikawa => "cor32",
            Scheme::FullStepIshikawa => "cor33",
        }
    }

    pub fn from_name(name: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|s| s.name() == name)
    }

    /// The schedule actually iterated, after the scheme's fixed
    /// substitutions.
    pub fn forced_schedule(&self, s: &Schedule) -> Schedule {
        let mut forced = s.clone();
        match self {
            Scheme::ProjectionIshikawa => forced.r = SequenceSpec::constant(1.0),
            Scheme::FullStepIshikawa => forced.alpha = SequenceSpec::constant(1.0),
            _ => {}
        }
        forced
    }

    fn uses_resolvent(&self) -> bool {
        !matches!(self, Scheme::Mann | Scheme::Ishikawa)
    }
}

/// Find a point of `F(S) ∩ EP(f)` over the constraint set `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    #[serde(rename = "E")]
    pub set: ConvexSet,
    #[serde(rename = "S")]
    pub mapping: Mapping,
    #[serde(rename = "f")]
    pub bifunction: Bifunction,
    #[serde(default)]
    pub known_solution: Option<Vector>,
    #[serde(default)]
    pub known_solution_set: Option<ConvexSet>,
    /// Resolvent strategy used at every step.
    #[serde(default)]
    pub strategy: Strategy,
}

impl Problem {
    pub fn new(set: ConvexSet, mapping: Mapping, bifunction: Bifunction) -> Self {
        Problem {
            set,
            mapping,
            bifunction,
            known_solution: None,
            known_solution_set: None,
            strategy: Strategy::Auto,
        }
    }

    pub fn with_known_solution(mut self, q: Vector) -> Self {
        self.known_solution = Some(q);
        self
    }

    pub fn with_known_solution_set(mut self, set: ConvexSet) -> Self {
        self.known_solution_set = Some(set);
        self
    }

    pub fn dim(&self) -> Option<usize> {
        self.set
            .dim()
            .or(self.mapping.dim())
            .or(self.bifunction.dim())
            .or(self.known_solution.as_ref().map(Vector::dim))
    }

    /// Checks that all components agree on the ambient dimension.
    pub fn check_dims(&self, x1: &Vector) -> Result<()> {
        let dims = [
            self.set.dim(),
            self.mapping.dim(),
            self.bifunction.dim(),
            self.known_solution.as_ref().map(Vector::dim),
            self.known_solution_set.as_ref().and_then(ConvexSet::dim),
        ];
        for d in dims.into_iter().flatten() {
            if d != x1.dim() {
                return Err(Error::DimensionMismatch { expected: d, found: x1.dim() });
            }
        }
        Ok(())
    }

    /// Sampled certificate that the declared known solution lies in
    /// `F(S) ∩ EP(f)`.
    pub fn certify_known_solution(&self, seed: u64, n_samples: usize) -> Result<Option<Vector>> {
        let Some(q) = &self.known_solution else {
            return Ok(None);
        };
        let residual = self.mapping.fixed_point_residual(q)?;
        if residual > KNOWN_SOLUTION_TOL {
            return Err(Error::NotCertified(format!("|Sq - q| = {residual:e}")));
        }
        if !ep_membership(&self.bifunction, &self.set, q, seed, n_samples, KNOWN_SOLUTION_TOL)? {
            return Err(Error::NotCertified("q fails the sampled EP(f) test".into()));
        }
        Ok(Some(q.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_iter: usize,
    /// Applied to `max(|x_n - S u_n|, |x_n - u_n|)`.
    pub residual_tol: f64,
}

impl StopRule {
    pub fn new(max_iter: usize, residual_tol: f64) -> Result<Self> {
        let rule = StopRule { max_iter, residual_tol };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 || !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "stop rule needs max_iter >= 1 and residual_tol > 0".into(),
            ));
        }
        Ok(())
    }
}

/// All quantities produced by one step from `x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub u: Vector,
    pub y: Vector,
    pub next: Vector,
    pub residuals: Residuals,
}

fn step_residuals(x: &Vector, u: &Vector, y: &Vector, su: &Vector) -> Result<Residuals> {
    Ok(Residuals {
        x_su: x.distance(su)?,
        y_x: y.distance(x)?,
        x_u: x.distance(u)?,
        u_su: u.distance(su)?,
    })
}

fn resolvent_step(p: &Problem, r: f64, x: &Vector) -> Result<Vector> {
    Ok(resolve(&p.bifunction, &p.set, r, x, &p.strategy, None)?.z)
}

/// One step of the modified Ishikawa scheme from `x_n` with schedule values
/// `(alpha_n, beta_n, r_n)`:
///
/// ```text
/// u_n     = T_{r_n} x_n
/// y_n     = (1 - beta_n) x_n + beta_n S u_n
/// x_{n+1} = (1 - alpha_n) x_n + alpha_n S y_n
/// ```
pub fn step_thm31(p: &Problem, x: &Vector, alpha: f64, beta: f64, r: f64) -> Result<Step> {
    let u = resolvent_step(p, r, x)?;
    let su = p.mapping.eval(&u)?;
    let y = Vector::combine(beta, &su, x)?;
    let sy = p.mapping.eval(&y)?;
    let next = Vector::combine(alpha, &sy, x)?;
    let residuals = step_residuals(x, &u, &y, &su)?;
    Ok(Step { u, y, next, residuals })
}

/// One step of `scheme`. Schemes without an equilibrium step report
/// `u_n = x_n`; schemes without an inner point report `y_n = x_n`.
pub fn step(scheme: Scheme, p: &Problem, x: &Vector, alpha: f64, beta: f64, r: f64) -> Result<Step> {
    match scheme {
        Scheme::ModifiedIshikawa | Scheme::ProjectionIshikawa | Scheme::FullStepIshikawa => {
            step_thm31(p, x, alpha, beta, r)
        }
        Scheme::Mann => {
            let sx = p.mapping.eval(x)?;
            let next = Vector::combine(alpha, x, &sx)?;
            let residuals = step_residuals(x, x, x, &sx)?;
            Ok(Step {
                u: x.clone(),
                y: x.clone(),
                next,
                residuals,
            })
        }
        Scheme::Ishikawa => {
            let sx = p.mapping.eval(x)?;
            let y = Vector::combine(beta, x, &sx)?;
            let sy = p.mapping.eval(&y)?;
            let next = Vector::combine(alpha, x, &sy)?;
            let residuals = step_residuals(x, x, &y, &sx)?;
            Ok(Step {
                u: x.clone(),
                y,
                next,
                residuals,
            })
        }
        Scheme::TadaTakahashi => {
            let u = resolvent_step(p, r, x)?;
            let su = p.mapping.eval(&u)?;
            let next = Vector::combine(alpha, x, &su)?;
            let residuals = step_residuals(x, &u, x, &su)?;
            Ok(Step {
                u,
                y: x.clone(),
                next,
                residuals,
            })
        }
    }
}

fn check_applicable(scheme: Scheme, p: &Problem) -> Result<()> {
    if scheme == Scheme::ProjectionIshikawa && !matches!(p.bifunction.family, Family::Zero) {
        return Err(Error::SchemeNotApplicable {
            scheme: scheme.name(),
            reason: "requires the zero bifunction".into(),
        });
    }
    if scheme.uses_resolvent() && matches!(p.bifunction.family, Family::Custom(_)) {
        return Err(Error::SchemeNotApplicable {
            scheme: scheme.name(),
            reason: "custom bifunctions have no resolvent solver".into(),
        });
    }
    Ok(())
}

pub fn run(p: &Problem, scheme: Scheme, s: &Schedule, stop: &StopRule, x1: &Vector) -> Result<Trace> {
    run_with_mode(p, scheme, s, stop, x1, TraceMode::Full)
}

/// Iterates `scheme` from `x1` until the stop rule fires, the iteration cap
/// is reached, or the inner resolvent solver fails. Schedule and
/// applicability problems are errors; solver failures end the trace.
pub fn run_with_mode(
    p: &Problem,
    scheme: Scheme,
    s: &Schedule,
    stop: &StopRule,
    x1: &Vector,
    mode: TraceMode,
) -> Result<Trace> {
    stop.validate()?;
    p.check_dims(x1)?;
    check_applicable(scheme, p)?;
    let schedule = validate_for(scheme, s, stop.max_iter)?;

    let mut records = Vec::new();
    let mut x = x1.clone();
    let mut status = TerminalStatus::MaxIter;
    let mut next_x = None;
    let mut failure = None;
    for n in 1..=stop.max_iter {
        let (alpha, beta, r) = schedule.term(n);
        let outcome = match step(scheme, p, &x, alpha, beta, r) {
            Ok(outcome) => outcome,
            Err(err @ (Error::InnerSolver { .. } | Error::ProjectionNotConverged { .. } | Error::SingularSystem)) => {
                status = TerminalStatus::InnerSolverFailure;
                failure = Some(format!("step {n}: {err}"));
                break;
            }
            Err(err) => return Err(err),
        };
        let dist_q = p.known_solution.as_ref().map(|q| x.distance(q)).transpose()?;
        let converged = outcome.residuals.x_su.max(outcome.residuals.x_u) <= stop.residual_tol;
        let keep = mode == TraceMode::Full;
        records.push(Record {
            n,
            x: keep.then(|| x.clone()),
            u: keep.then_some(outcome.u),
            y: keep.then_some(outcome.y),
            alpha,
            beta,
            r,
            residuals: outcome.residuals,
            dist_q,
        });
        if converged {
            status = TerminalStatus::Converged;
            next_x = Some(outcome.next);
            break;
        }
        if n == stop.max_iter {
            next_x = Some(outcome.next);
        } else {
            x = outcome.next;
        }
    }
    Ok(Trace {
        scheme,
        dim: x1.dim(),
        mode,
        records,
        final_x: x,
        next_x,
        status,
        failure,
        advisories: schedule.advisories().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub scheme: Scheme,
    pub status: Option<TerminalStatus>,
    pub iterations: usize,
    pub final_residuals: Option<Residuals>,
    pub final_distance: Option<f64>,
    pub final_point: Option<Vector>,
    pub error: Option<String>,
}

/// Runs each scheme from the same start and schedule. Errors are recorded
/// per row.
pub fn compare(
    p: &Problem,
    schemes: &[Scheme],
    s: &Schedule,
    stop: &StopRule,
    x1: &Vector,
) -> (Vec<CompareRow>, Vec<Option<Trace>>) {
    let mut rows = Vec::with_capacity(schemes.len());
    let mut traces = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        match run(p, scheme, s, stop, x1) {
            Ok(trace) => {
                let final_distance = p
                    .known_solution
                    .as_ref()
                    .and_then(|q| trace.final_x.distance(q).ok());
                rows.push(CompareRow {
                    scheme,
                    status: Some(trace.status),
                    iterations: trace.len(),
                    final_residuals: trace.last().map(|r| r.residuals),
                    final_distance,
                    final_point: Some(trace.final_x.clone()),
                    error: trace.failure.clone(),
                });
                traces.push(Some(trace));
            }
            Err(err) => {
                rows.push(CompareRow {
                    scheme,
                    status: None,
                    iterations: 0,
                    final_residuals: None,
                    final_distance: None,
                    final_point: None,
                    error: Some(err.to_string()),
                });
                traces.push(None);
            }
        }
    }
    (rows, traces)
}

#[cfg(test)]
mod tests;
