//! Finite-trace certificates for the convergence argument of the modified
//! Ishikawa scheme.
//!
//! Asymptotic statements become tail criteria with explicit windows and
//! tolerances. In R^n weak and norm convergence coincide, so what gets
//! certified is norm convergence, and reports say so.

use serde::{Deserialize, Serialize};

use crate::equilibrium::ep_residual;
use crate::error::{Error, Result};
use crate::hilbert::{ConvexSet, Vector};
use crate::schemes::{Problem, Residuals, Scheme, Trace};

pub const CERTIFIED_PROPERTY: &str = "norm convergence (finite-dimensional specialization)";

/// A point checked to lie in `F(S) ∩ EP(f)` (by sampling for the EP part).
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedPoint(Vector);

impl CertifiedPoint {
    pub fn certify(problem: &Problem, q: &Vector, seed: u64, n_samples: usize) -> Result<Self> {
        let residual = problem.mapping.fixed_point_residual(q)?;
        if residual > crate::schemes::KNOWN_SOLUTION_TOL {
            return Err(Error::NotCertified(format!("|Sq - q| = {residual:e}")));
        }
        let ep = ep_residual(&problem.bifunction, &problem.set, q, seed, n_samples)?;
        if ep < -crate::schemes::KNOWN_SOLUTION_TOL {
            return Err(Error::NotCertified(format!("min_y f(q, y) = {ep:e} < 0")));
        }
        Ok(CertifiedPoint(q.clone()))
    }

    pub fn point(&self) -> &Vector {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    /// Record index `n` where the margin is worst, when meaningful.
    pub worst_index: Option<usize>,
    /// Worst value of (measured - allowed); `<= 0` when passed.
    pub worst_margin: f64,
    pub detail: String,
}

impl CheckEntry {
    fn new(name: &str, tol: f64, worst: Option<(usize, f64)>, detail: String) -> Self {
        let (index, value) = worst.map_or((None, 0.0), |(i, v)| (Some(i), v));
        CheckEntry {
            name: name.to_string(),
            passed: value <= tol,
            worst_index: index,
            worst_margin: value - tol,
            detail,
        }
    }

    fn failed(name: &str, detail: String) -> Self {
        CheckEntry {
            name: name.to_string(),
            passed: false,
            worst_index: None,
            worst_margin: f64::INFINITY,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub certified_property: String,
    pub checks: Vec<CheckEntry>,
    pub verdict: bool,
}

impl CertificateReport {
    pub fn new(checks: Vec<CheckEntry>) -> Self {
        let verdict = checks.iter().all(|c| c.passed);
        CertificateReport {
            certified_property: CERTIFIED_PROPERTY.to_string(),
            checks,
            verdict,
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Index and value of the largest element, first one on ties.
fn worst(values: impl IntoIterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    values
        .into_iter()
        .fold(None, |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, best)) if best >= v => acc,
            _ => Some((i, v)),
        })
}

fn distances(trace: &Trace, q: &Vector) -> Result<Vec<f64>> {
    let xs = trace.iterates().ok_or(Error::MissingIterates)?;
    xs.into_iter().map(|x| x.distance(q)).collect()
}

/// `|x_{n+1} - q| <= |x_n - q| + tol` for every recorded step.
pub fn fejer_check(trace: &Trace, q: &CertifiedPoint, tol: f64) -> Result<CheckEntry> {
    let d = distances(trace, q.point())?;
    let margins = d.windows(2).enumerate().map(|(i, w)| (i + 1, w[1] - w[0]));
    Ok(CheckEntry::new(
        "fejer_monotone",
        tol,
        worst(margins),
        format!("|x_(n+1) - q| - |x_n - q| over {} steps", d.len().saturating_sub(1)),
    ))
}

/// `|x_{n+1} - q|^2 <= |x_n - q|^2 - a_n b_n (1 - b_n) |x_n - S u_n|^2 + tol`.
pub fn descent_check(trace: &Trace, q: &CertifiedPoint, tol: f64) -> Result<CheckEntry> {
    let d = distances(trace, q.point())?;
    let margins = trace.records.iter().zip(d.windows(2)).map(|(rec, w)| {
        let gain = rec.alpha * rec.beta * (1.0 - rec.beta) * rec.residuals.x_su.powi(2);
        (rec.n, w[1] * w[1] - w[0] * w[0] + gain)
    });
    Ok(CheckEntry::new(
        "descent",
        tol,
        worst(margins),
        "|x_(n+1)-q|^2 - |x_n-q|^2 + a_n b_n (1-b_n) |x_n - S u_n|^2".into(),
    ))
}

/// `|u_n - q| <= |x_n - q| + tol` (nonexpansiveness of the resolvent at `q`).
pub fn resolvent_contraction_check(trace: &Trace, q: &CertifiedPoint, tol: f64) -> Result<CheckEntry> {
    let mut margins = Vec::with_capacity(trace.len());
    for rec in &trace.records {
        let (Some(x), Some(u)) = (&rec.x, &rec.u) else {
            return Err(Error::MissingIterates);
        };
        margins.push((rec.n, u.distance(q.point())? - x.distance(q.point())?));
    }
    Ok(CheckEntry::new(
        "resolvent_contraction",
        tol,
        worst(margins),
        "|u_n - q| - |x_n - q|".into(),
    ))
}

/// Passes iff each of the four residual series has its minimum over the
/// last `window` records at most `tol`.
pub fn residual_decay(trace: &Trace, tol: f64, window: usize) -> CheckEntry {
    if trace.is_empty() {
        return CheckEntry::failed("residual_decay", "empty trace".into());
    }
    let window = window.clamp(1, trace.len());
    let start = trace.len() - window;
    let series = trace.residual_series();
    let tails = series
        .iter()
        .map(|s| s[start..].iter().copied().fold(f64::INFINITY, f64::min))
        .collect::<Vec<_>>();
    let failing: Vec<&str> = tails
        .iter()
        .zip(Residuals::NAMES)
        .filter(|(m, _)| **m > tol)
        .map(|(_, name)| name)
        .collect();
    let detail = if failing.is_empty() {
        format!("tail minima {tails:?} over the last {window} records")
    } else {
        format!("series above tolerance: {}", failing.join(", "))
    };
    CheckEntry::new(
        "residual_decay",
        tol,
        Some((trace.len(), tails.iter().copied().fold(f64::NEG_INFINITY, f64::max))),
        detail,
    )
}

/// Total variation of `|x_n - q|` over the final `tail_fraction` of the
/// trace, a finite stand-in for existence of `lim |x_n - q|`.
pub fn limit_existence_check(trace: &Trace, q: &CertifiedPoint, tail_fraction: f64, tol: f64) -> Result<CheckEntry> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter("tail_fraction must lie in (0, 1]".into()));
    }
    let d = distances(trace, q.point())?;
    let take = ((d.len() as f64 * tail_fraction).ceil() as usize).clamp(2.min(d.len()), d.len());
    let tail = &d[d.len() - take..];
    let variation: f64 = tail.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    Ok(CheckEntry::new(
        "limit_existence",
        tol,
        Some((d.len(), variation)),
        format!("total variation of |x_n - q| over the last {take} iterates"),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSeries {
    /// `p_n = P_sol(x_n)`
    pub points: Vec<Vector>,
    /// `|p_{n+1} - p_n|`
    pub gaps: Vec<f64>,
    /// Sum of the gaps over the final window, bounding the tail's diameter.
    pub tail_bound: f64,
    /// `|x_N - p_N| - dist(x_N, sol)`
    pub closing_gap: f64,
}

impl ProjectionSeries {
    pub fn limit(&self) -> &Vector {
        self.points.last().expect("projection series is never empty")
    }

    /// Passes iff the largest gap in the last `window` steps and the
    /// closing gap are both at most `tol`.
    pub fn check(&self, tol: f64, window: usize) -> CheckEntry {
        let window = window.clamp(1, self.gaps.len().max(1));
        let start = self.gaps.len().saturating_sub(window);
        let tail_max = self.gaps[start..].iter().copied().fold(0.0f64, f64::max);
        let value = tail_max.max(self.closing_gap);
        CheckEntry::new(
            "projection_series",
            tol,
            Some((self.points.len(), value)),
            format!("max tail gap {tail_max:e}, closing gap {:e}", self.closing_gap),
        )
    }
}

/// Projections of the iterates onto the known solution set; by the
/// Fejér property these converge strongly, and their limit should be the
/// limit of the iterates.
pub fn projection_series(trace: &Trace, sol: &ConvexSet, window: usize) -> Result<ProjectionSeries> {
    let xs = trace.iterates().filter(|xs| !xs.is_empty()).ok_or(Error::MissingIterates)?;
    let points = xs.iter().map(|x| sol.project(x)).collect::<Result<Vec<_>>>()?;
    let gaps = points
        .windows(2)
        .map(|w| w[1].distance(&w[0]))
        .collect::<Result<Vec<_>>>()?;
    let window = window.clamp(1, gaps.len().max(1));
    let tail_bound = gaps[gaps.len().saturating_sub(window)..].iter().sum();
    let last_x = xs.last().expect("nonempty");
    let closing_gap = last_x.distance(points.last().expect("nonempty"))? - sol.distance(last_x)?;
    Ok(ProjectionSeries {
        points,
        gaps,
        tail_bound,
        closing_gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Running mean of the members.
    pub center: Vector,
    /// Most recent member, the best available estimate of the limit point.
    pub latest: Vector,
    pub count: usize,
}

/// Greedy clustering of the second half of the iterates: each point joins
/// the nearest existing cluster within `cluster_radius` of its running mean,
/// or starts a new cluster.
pub fn accumulation_points(trace: &Trace, cluster_radius: f64) -> Result<Vec<Cluster>> {
    let xs = trace.iterates().ok_or(Error::MissingIterates)?;
    if xs.len() < 2 {
        return Err(Error::InvalidParameter("accumulation points need at least two iterates".into()));
    }
    let tail = &xs[xs.len() / 2..];
    let mut clusters: Vec<Cluster> = Vec::new();
    for &x in tail {
        let mut nearest: Option<(usize, f64)> = None;
        for (i, c) in clusters.iter().enumerate() {
            let d = c.center.distance(x)?;
            if d <= cluster_radius && nearest.is_none_or(|(_, best)| d < best) {
                nearest = Some((i, d));
            }
        }
        match nearest {
            Some((i, _)) => {
                let c = &mut clusters[i];
                c.count += 1;
                c.center = Vector::combine(1.0 / c.count as f64, x, &c.center)?;
                c.latest = x.clone();
            }
            None => clusters.push(Cluster {
                center: x.clone(),
                latest: x.clone(),
                count: 1,
            }),
        }
    }
    Ok(clusters)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub seed: u64,
    pub n_samples: usize,
    pub fejer_tol: f64,
    pub descent_tol: f64,
    pub residual_tol: f64,
    pub window: usize,
    pub tail_fraction: f64,
    pub limit_tol: f64,
    pub projection_tol: f64,
    pub cluster_radius: f64,
    /// Tolerance for certifying the accumulation point.
    pub point_tol: f64,
    /// The run's stop tolerance; the final iterate must have residuals
    /// within ten times this.
    pub stop_tol: Option<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            seed: 0,
            n_samples: 256,
            fejer_tol: 1e-8,
            descent_tol: 1e-8,
            residual_tol: 1e-6,
            window: 10,
            tail_fraction: 0.2,
            limit_tol: 1e-5,
            projection_tol: 1e-5,
            cluster_radius: 1e-3,
            point_tol: 1e-5,
            stop_tol: None,
        }
    }
}

fn point_in_solution(problem: &Problem, x: &Vector, opts: &CertifyOptions) -> Result<(f64, f64)> {
    let fixed = problem.mapping.fixed_point_residual(x)?;
    let ep = ep_residual(&problem.bifunction, &problem.set, x, opts.seed, opts.n_samples)?;
    Ok((fixed, ep))
}

fn solution_entry(name: &str, problem: &Problem, x: &Vector, tol: f64, opts: &CertifyOptions) -> CheckEntry {
    match point_in_solution(problem, x, opts) {
        Ok((fixed, ep)) => CheckEntry::new(
            name,
            tol,
            Some((0, fixed.max(-ep))),
            format!("|Sx - x| = {fixed:e}, min_y f(x, y) = {ep:e}"),
        ),
        Err(err) => CheckEntry::failed(name, err.to_string()),
    }
}

fn entry_or_failure(name: &str, result: Result<CheckEntry>) -> CheckEntry {
    result.unwrap_or_else(|err| CheckEntry::failed(name, err.to_string()))
}

/// Runs every applicable check on a trace of `problem`.
pub fn certify(trace: &Trace, problem: &Problem, opts: &CertifyOptions) -> CertificateReport {
    let mut checks = Vec::new();
    checks.push(residual_decay(trace, opts.residual_tol, opts.window));

    if let Some(q) = &problem.known_solution {
        match CertifiedPoint::certify(problem, q, opts.seed, opts.n_samples) {
            Ok(q) => {
                checks.push(entry_or_failure("fejer_monotone", fejer_check(trace, &q, opts.fejer_tol)));
                if matches!(
                    trace.scheme,
                    Scheme::ModifiedIshikawa | Scheme::ProjectionIshikawa | Scheme::FullStepIshikawa
                ) {
                    checks.push(entry_or_failure("descent", descent_check(trace, &q, opts.descent_tol)));
                }
                if !matches!(trace.scheme, Scheme::Mann | Scheme::Ishikawa) {
                    checks.push(entry_or_failure(
                        "resolvent_contraction",
                        resolvent_contraction_check(trace, &q, opts.fejer_tol),
                    ));
                }
                checks.push(entry_or_failure(
                    "limit_existence",
                    limit_existence_check(trace, &q, opts.tail_fraction, opts.limit_tol),
                ));
            }
            Err(err) => checks.push(CheckEntry::failed("known_solution", err.to_string())),
        }
    }

    let mut projection_limit = None;
    if let Some(sol) = &problem.known_solution_set {
        match projection_series(trace, sol, opts.window) {
            Ok(series) => {
                checks.push(series.check(opts.projection_tol, opts.window));
                projection_limit = Some(series.limit().clone());
            }
            Err(err) => checks.push(CheckEntry::failed("projection_series", err.to_string())),
        }
    }

    match accumulation_points(trace, opts.cluster_radius) {
        Ok(clusters) if clusters.len() == 1 => {
            let point = &clusters[0].latest;
            checks.push(solution_entry("accumulation_point", problem, point, opts.point_tol, opts));
            if let (Some(limit), Some(ConvexSet::Singleton { .. })) = (&projection_limit, &problem.known_solution_set) {
                let gap = limit.distance(point).unwrap_or(f64::INFINITY);
                checks.push(CheckEntry::new(
                    "projection_limit_agreement",
                    1e-4,
                    Some((trace.len(), gap)),
                    "|lim P_sol(x_n) - accumulation point|".into(),
                ));
            }
        }
        Ok(clusters) => checks.push(CheckEntry::failed(
            "accumulation_point",
            format!("{} clusters in the trace tail", clusters.len()),
        )),
        Err(err) => checks.push(CheckEntry::failed("accumulation_point", err.to_string())),
    }

    if let Some(stop_tol) = opts.stop_tol {
        checks.push(solution_entry("limit_certification", problem, &trace.final_x, 10.0 * stop_tol, opts));
    }
    CertificateReport::new(checks)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::equilibrium::Bifunction;
    use crate::mappings::{Mapping, MappingKind};
    use crate::schemes::{run, Record, Schedule, StopRule, TerminalStatus, TraceMode};

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn identity_problem() -> Problem {
        Problem::new(
            ConvexSet::WholeSpace,
            Mapping::identity(ConvexSet::WholeSpace),
            Bifunction::zero(ConvexSet::WholeSpace),
        )
    }

    fn rotation_problem() -> Problem {
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let rot = Mapping::new(
            MappingKind::Rotation {
                center: v(&[0.0, 0.0]),
                angle: FRAC_PI_2,
            },
            ball.clone(),
        )
        .unwrap();
        Problem::new(ball.clone(), rot, Bifunction::zero(ball))
            .with_known_solution(v(&[0.0, 0.0]))
            .with_known_solution_set(ConvexSet::singleton(v(&[0.0, 0.0])))
    }

    fn rotation_trace() -> Trace {
        run(
            &rotation_problem(),
            Scheme::ModifiedIshikawa,
            &Schedule::constant(0.5, 0.5, 1.0),
            &StopRule::new(500, 1e-7).unwrap(),
            &v(&[1.0, 0.0]),
        )
        .unwrap()
    }

    /// A hand-built trace through the given 1-D points.
    fn synthetic(points: &[f64]) -> Trace {
        let records = points[..points.len() - 1]
            .iter()
            .enumerate()
            .map(|(i, &x)| Record {
                n: i + 1,
                x: Some(v(&[x])),
                u: Some(v(&[x])),
                y: Some(v(&[x])),
                alpha: 0.5,
                beta: 0.5,
                r: 1.0,
                residuals: Residuals {
                    x_su: 0.0,
                    y_x: 0.0,
                    x_u: 0.0,
                    u_su: 0.0,
                },
                dist_q: None,
            })
            .collect();
        Trace {
            scheme: Scheme::ModifiedIshikawa,
            dim: 1,
            mode: TraceMode::Full,
            records,
            final_x: v(&[points[points.len() - 2]]),
            next_x: Some(v(&[*points.last().unwrap()])),
            status: TerminalStatus::MaxIter,
            failure: None,
            advisories: vec![],
        }
    }

    fn origin_1d() -> CertifiedPoint {
        let p = Problem::new(
            ConvexSet::WholeSpace,
            Mapping::new(
                MappingKind::ScaledReflection {
                    center: v(&[0.0]),
                    factor: 0.5,
                },
                ConvexSet::WholeSpace,
            )
            .unwrap(),
            Bifunction::zero(ConvexSet::WholeSpace),
        );
        CertifiedPoint::certify(&p, &v(&[0.0]), 0, 16).unwrap()
    }

    #[test]
    fn stationary_trace() {
        let p = identity_problem();
        let x1 = v(&[0.4, 0.2]);
        let trace = run(&p, Scheme::ModifiedIshikawa, &Schedule::constant(0.5, 0.5, 1.0), &StopRule::new(5, 1e-9).unwrap(), &x1).unwrap();
        let q = CertifiedPoint::certify(&p, &x1, 0, 16).unwrap();
        let fejer = fejer_check(&trace, &q, 0.0).unwrap();
        assert!(fejer.passed);
        assert_eq!(fejer.worst_margin, 0.0);
        assert!(residual_decay(&trace, 0.0, 5).passed);
        let limit = limit_existence_check(&trace, &q, 0.2, 0.0).unwrap();
        assert!(limit.passed);
        let clusters = accumulation_points(&trace, 1e-3).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].center, x1);
    }

    #[test]
    fn rotation_trace_passes() {
        let trace = rotation_trace();
        let p = rotation_problem();
        let q = CertifiedPoint::certify(&p, &v(&[0.0, 0.0]), 0, 64).unwrap();
        assert!(fejer_check(&trace, &q, 1e-10).unwrap().passed);
        assert!(descent_check(&trace, &q, 1e-8).unwrap().passed);
        assert!(residual_decay(&trace, 1e-6, 3).passed);
        assert!(limit_existence_check(&trace, &q, 0.2, 1e-5).unwrap().passed);
        let clusters = accumulation_points(&trace, 1e-3).unwrap();
        assert_eq!(clusters.len(), 1);
        assert!(clusters[0].center.norm() < 1e-3);
        assert!(clusters[0].latest.norm() < 1e-6);
        let series = projection_series(&trace, p.known_solution_set.as_ref().unwrap(), 5).unwrap();
        assert!(series.points.iter().all(|p| p.norm() == 0.0));
        assert!(series.gaps.iter().all(|g| *g == 0.0));
        let report = certify(
            &trace,
            &p,
            &CertifyOptions {
                stop_tol: Some(1e-7),
                ..CertifyOptions::default()
            },
        );
        assert!(report.verdict, "{report:#?}");
        assert_eq!(report.certified_property, CERTIFIED_PROPERTY);
    }

    #[test]
    fn injected_ascent_is_caught() {
        let trace = synthetic(&[1.0, 0.5, 0.25, 0.4, 0.1]);
        let entry = fejer_check(&trace, &origin_1d(), 1e-10).unwrap();
        assert!(!entry.passed);
        assert_eq!(entry.worst_index, Some(3));
        assert!((entry.worst_margin - (0.15 - 1e-10)).abs() < 1e-12);
    }

    #[test]
    fn short_trace_fails_decay() {
        let trace = run(
            &rotation_problem(),
            Scheme::ModifiedIshikawa,
            &Schedule::constant(0.5, 0.5, 1.0),
            &StopRule::new(3, 1e-12).unwrap(),
            &v(&[1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(trace.len(), 3);
        assert!(!residual_decay(&trace, 1e-12, 3).passed);
    }

    #[test]
    fn oscillation_fails_limit_and_clusters() {
        let trace = synthetic(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        let limit = limit_existence_check(&trace, &origin_1d(), 0.5, 1e-5).unwrap();
        // |x_n - 0| is constant 1, so distances alone do not oscillate
        assert!(limit.passed);
        let drift = synthetic(&[1.0, 0.2, 1.0, 0.2, 1.0, 0.2, 1.0, 0.2]);
        assert!(!limit_existence_check(&drift, &origin_1d(), 0.5, 1e-5).unwrap().passed);
        assert_eq!(accumulation_points(&trace, 1e-3).unwrap().len(), 2);
    }

    #[test]
    fn projection_onto_hyperplane_drifting_trace() {
        // x_n = (n^-1, 1 + 2^-n) projected onto {x_1 + x_2 = 1}.
        let plane = ConvexSet::hyperplane(v(&[1.0, 1.0]), 1.0).unwrap();
        let mut trace = synthetic(&[0.0; 6]);
        let points: Vec<Vector> = (1..=6).map(|n| v(&[1.0 / n as f64, 1.0 + 0.5f64.powi(n)])).collect();
        for (rec, p) in trace.records.iter_mut().zip(&points) {
            rec.x = Some(p.clone());
        }
        trace.next_x = Some(points[5].clone());
        trace.dim = 2;
        let series = projection_series(&trace, &plane, 3).unwrap();
        // oracle: p = x - (x1 + x2 - 1)/2 * (1, 1)
        for (p, x) in series.points.iter().zip(&points) {
            let shift = (x[0] + x[1] - 1.0) / 2.0;
            assert!((p[0] - (x[0] - shift)).abs() < 1e-15 && (p[1] - (x[1] - shift)).abs() < 1e-15);
        }
        let gaps = &series.gaps[..4];
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(series.closing_gap.abs() < 1e-15);
    }

    #[test]
    fn uncertified_point_rejected() {
        let err = CertifiedPoint::certify(&rotation_problem(), &v(&[0.5, 0.0]), 0, 16).unwrap_err();
        assert!(matches!(err, Error::NotCertified(_)));
    }
}
