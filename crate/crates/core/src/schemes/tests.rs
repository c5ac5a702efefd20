use std::f64::consts::FRAC_PI_2;

use super::*;
use crate::linalg::Matrix;
use crate::mappings::MappingKind;

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
    Problem::new(ball.clone(), rot, Bifunction::zero(ball)).with_known_solution(v(&[0.0, 0.0]))
}

fn affine_problem() -> Problem {
    let e = ConvexSet::interval(0.0, 1.0).unwrap();
    Problem::new(
        e.clone(),
        Mapping::identity(e.clone()),
        Bifunction::affine_vi(Matrix::identity(1), v(&[-0.3]), e).unwrap(),
    )
    .with_known_solution(v(&[0.3]))
}

#[test]
fn identity_problem_is_stationary() {
    let p = identity_problem();
    let x = v(&[0.7, -1.2]);
    let s = step_thm31(&p, &x, 0.5, 0.5, 1.0).unwrap();
    assert_eq!(s.next, x);
    let trace = run(&p, Scheme::ModifiedIshikawa, &Schedule::constant(0.5, 0.5, 1.0), &StopRule::new(10, 1e-9).unwrap(), &x).unwrap();
    assert_eq!(trace.status, TerminalStatus::Converged);
    assert_eq!(trace.len(), 1);
    assert_eq!(trace.records[0].residuals.max(), 0.0);
}

#[test]
fn rotation_first_step_matches_hand_oracle() {
    // u = P_B(1,0) = (1,0); Su = (0,1); y = (0.5,0.5); Sy = (-0.5,0.5);
    // x2 = 0.5 (1,0) + 0.5 (-0.5,0.5) = (0.25, 0.25).
    let rot = |p: [f64; 2]| [-p[1], p[0]];
    let x = [1.0, 0.0];
    let u = x;
    let su = rot(u);
    let y = [0.5 * x[0] + 0.5 * su[0], 0.5 * x[1] + 0.5 * su[1]];
    let sy = rot(y);
    let oracle = [0.5 * x[0] + 0.5 * sy[0], 0.5 * x[1] + 0.5 * sy[1]];
    assert_eq!(oracle, [0.25, 0.25]);

    let s = step_thm31(&rotation_problem(), &v(&x), 0.5, 0.5, 1.0).unwrap();
    assert_eq!(s.u, v(&[1.0, 0.0]));
    assert!(s.y.distance(&v(&[0.5, 0.5])).unwrap() < 1e-15);
    assert!(s.next.distance(&v(&oracle)).unwrap() < 1e-15);
}

#[test]
fn affine_first_step_matches_oracle() {
    // closed-form resolvent (x + 0.3 r) / (1 + r) for an interior solution
    let (x, r, a, b) = (0.9, 1.0, 0.5, 0.5);
    let u = (x + 0.3 * r) / (1.0 + r);
    let y = (1.0 - b) * x + b * u;
    let next = (1.0 - a) * x + a * y;
    assert!((u - 0.6f64).abs() < 1e-15 && (y - 0.75f64).abs() < 1e-15 && (next - 0.825f64).abs() < 1e-15);

    let s = step_thm31(&affine_problem(), &v(&[x]), a, b, r).unwrap();
    assert!((s.u[0] - u).abs() < 1e-10);
    assert!((s.y[0] - y).abs() < 1e-10);
    assert!((s.next[0] - next).abs() < 1e-10);
}

#[test]
fn rotation_run_converges_to_center() {
    let trace = run(
        &rotation_problem(),
        Scheme::ModifiedIshikawa,
        &Schedule::constant(0.5, 0.5, 1.0),
        &StopRule::new(500, 1e-6).unwrap(),
        &v(&[1.0, 0.0]),
    )
    .unwrap();
    assert_eq!(trace.status, TerminalStatus::Converged);
    assert!(trace.final_x.norm() < 1e-5);
    let p = rotation_problem();
    assert!(p.mapping.fixed_point_residual(&trace.final_x).unwrap() <= 1e-6);
}

#[test]
fn full_step_variant_equals_alpha_one() {
    let p = rotation_problem();
    let stop = StopRule::new(200, 1e-9).unwrap();
    let x1 = v(&[0.6, -0.3]);
    let cor = run(&p, Scheme::FullStepIshikawa, &Schedule::constant(0.3, 0.4, 1.0), &stop, &x1).unwrap();
    let thm = run(&p, Scheme::ModifiedIshikawa, &Schedule::constant(1.0, 0.4, 1.0), &stop, &x1).unwrap();
    assert_eq!(cor.records, thm.records);
    assert_eq!(cor.next_x, thm.next_x);
}

#[test]
fn projection_variant_requires_zero_bifunction() {
    let err = run(
        &affine_problem(),
        Scheme::ProjectionIshikawa,
        &Schedule::constant(0.5, 0.5, 1.0),
        &StopRule::new(10, 1e-6).unwrap(),
        &v(&[0.5]),
    )
    .unwrap_err();
    assert!(matches!(err, Error::SchemeNotApplicable { scheme: "cor32", .. }));
}

#[test]
fn invalid_schedule_is_rejected_before_iterating() {
    let err = run(
        &rotation_problem(),
        Scheme::ModifiedIshikawa,
        &Schedule::constant(0.5, 1.0, 1.0),
        &StopRule::new(10, 1e-6).unwrap(),
        &v(&[1.0, 0.0]),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Schedule(ScheduleViolation { condition: Condition::BetaBox, .. })));
}

#[test]
fn inner_failure_ends_trace() {
    let mut p = affine_problem();
    p.strategy = Strategy::ProjectedFixedPoint {
        step: None,
        max_iter: 1,
        tol: 1e-15,
    };
    let trace = run(&p, Scheme::ModifiedIshikawa, &Schedule::constant(0.5, 0.5, 1.0), &StopRule::new(10, 1e-6).unwrap(), &v(&[0.9])).unwrap();
    assert_eq!(trace.status, TerminalStatus::InnerSolverFailure);
    assert!(trace.is_empty());
    assert!(trace.failure.unwrap().contains("projected_fixed_point"));
}

#[test]
fn thin_mode_keeps_residuals_only() {
    let p = rotation_problem();
    let s = Schedule::constant(0.5, 0.5, 1.0);
    let stop = StopRule::new(100, 1e-8).unwrap();
    let full = run(&p, Scheme::ModifiedIshikawa, &s, &stop, &v(&[1.0, 0.0])).unwrap();
    let thin = run_with_mode(&p, Scheme::ModifiedIshikawa, &s, &stop, &v(&[1.0, 0.0]), TraceMode::Thin).unwrap();
    assert_eq!(full.len(), thin.len());
    assert!(thin.records.iter().all(|r| r.x.is_none()));
    assert_eq!(full.residual_series(), thin.residual_series());
    assert_eq!(full.final_x, thin.final_x);
    assert!(thin.iterates().is_none());
}

#[test]
fn compare_identity_all_schemes() {
    let (rows, _) = compare(
        &identity_problem(),
        &Scheme::ALL,
        &Schedule::constant(0.5, 0.5, 1.0),
        &StopRule::new(10, 1e-9).unwrap(),
        &v(&[1.0, 2.0]),
    );
    for row in rows {
        assert_eq!(row.error, None, "{row:?}");
        assert_eq!(row.iterations, 1, "{row:?}");
        assert_eq!(row.final_residuals.unwrap().max(), 0.0);
    }
}

#[test]
fn compare_affine_mann_is_stationary() {
    let p = affine_problem();
    let (rows, _) = compare(
        &p,
        &[Scheme::ModifiedIshikawa, Scheme::Mann],
        &Schedule::constant(0.5, 0.5, 1.0),
        &StopRule::new(1000, 1e-8).unwrap(),
        &v(&[0.9]),
    );
    assert!(rows[0].final_distance.unwrap() < 1e-5);
    // S = I, so the Mann step x_{n+1} = a x_n + (1-a) x_n never moves.
    assert_eq!(rows[1].final_point.as_ref().unwrap(), &v(&[0.9]));
    assert_eq!(rows[1].iterations, 1);
}

#[test]
fn known_solution_certification() {
    assert_eq!(rotation_problem().certify_known_solution(1, 256).unwrap(), Some(v(&[0.0, 0.0])));
    let wrong = affine_problem().with_known_solution(v(&[0.9]));
    assert!(matches!(wrong.certify_known_solution(1, 256), Err(Error::NotCertified(_))));
}

#[test]
fn problem_round_trips() {
    let p = affine_problem().with_known_solution_set(ConvexSet::singleton(v(&[0.3])));
    let text = serde_json::to_string(&p).unwrap();
    assert!(text.contains("\"E\"") && text.contains("\"S\"") && text.contains("\"f\""));
    assert_eq!(serde_json::from_str::<Problem>(&text).unwrap(), p);
}
