//! Generators and reference problems shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use hybrid_ep::equilibrium::{Bifunction, ConvexFunction};
use hybrid_ep::hilbert::{ConvexSet, Vector};
use hybrid_ep::linalg::Matrix;
use hybrid_ep::mappings::{Mapping, MappingKind};
use hybrid_ep::schemes::Problem;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn v(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vector {
    Vector::new((0..dim).map(|_| rng.gen_range(-scale..=scale)).collect()).unwrap()
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    loop {
        let d = random_vector(rng, dim, 1.0);
        let n = d.norm();
        if n > 1e-3 {
            return d.scale(1.0 / n);
        }
    }
}

pub const SET_KINDS: [&str; 8] = [
    "whole_space",
    "box",
    "ball",
    "halfspace",
    "hyperplane",
    "simplex",
    "singleton",
    "intersection",
];

/// A random set of the named kind in R^dim, with sizes of order one.
pub fn random_set(kind: &str, dim: usize, rng: &mut ChaCha8Rng) -> ConvexSet {
    match kind {
        "whole_space" => ConvexSet::whole_space(),
        "box" => {
            let lower = random_vector(rng, dim, 3.0);
            let widths: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..4.0)).collect();
            let upper = Vector::new(lower.as_slice().iter().zip(&widths).map(|(l, w)| l + w).collect()).unwrap();
            ConvexSet::box_set(lower, upper).unwrap()
        }
        "ball" => ConvexSet::ball(random_vector(rng, dim, 3.0), rng.gen_range(0.1..4.0)).unwrap(),
        "halfspace" => ConvexSet::halfspace(random_direction(rng, dim), rng.gen_range(-2.0..2.0)).unwrap(),
        "hyperplane" => ConvexSet::hyperplane(random_direction(rng, dim), rng.gen_range(-2.0..2.0)).unwrap(),
        "simplex" => ConvexSet::simplex(rng.gen_range(0.1..3.0)).unwrap(),
        "singleton" => ConvexSet::singleton(random_vector(rng, dim, 3.0)),
        "intersection" => {
            // a ball cut by a halfspace that keeps at least half of it, so
            // rejection sampling stays within its attempt cap up to R^5
            let center = random_vector(rng, dim, 2.0);
            let radius = rng.gen_range(0.5..3.0);
            let normal = random_direction(rng, dim);
            let offset = normal.inner(&center).unwrap() + rng.gen_range(0.0..0.8) * radius;
            ConvexSet::intersection(vec![
                ConvexSet::ball(center, radius).unwrap(),
                ConvexSet::halfspace(normal, offset).unwrap(),
            ])
            .unwrap()
        }
        other => panic!("unknown set kind {other}"),
    }
}

/// A random positive semidefinite-plus-skew matrix, so `<Ax, x> >= 0`.
pub fn random_monotone_matrix(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
    let b: Vec<Vec<f64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let k: Vec<Vec<f64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let sym: f64 = (0..dim).map(|l| b[l][i] * b[l][j]).sum();
                    sym + k[i][j] - k[j][i]
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows).unwrap()
}

pub fn unit_ball() -> ConvexSet {
    ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap()
}

/// Rotation by a quarter turn on the unit disc with f = 0; the solution set is {0}.
pub fn rotation_problem() -> Problem {
    let ball = unit_ball();
    let s = Mapping::new(
        MappingKind::Rotation {
            center: v(&[0.0, 0.0]),
            angle: FRAC_PI_2,
        },
        ball.clone(),
    )
    .unwrap();
    Problem::new(ball.clone(), s, Bifunction::zero(ball))
        .with_known_solution(v(&[0.0, 0.0]))
        .with_known_solution_set(ConvexSet::singleton(v(&[0.0, 0.0])))
}

/// f(x, y) = (x - 0.3)(y - x) on [0, 1] with S the identity; the solution is 0.3.
pub fn affine_1d_problem() -> Problem {
    let e = ConvexSet::interval(0.0, 1.0).unwrap();
    let f = Bifunction::affine_vi(Matrix::identity(1), v(&[-0.3]), e.clone()).unwrap();
    Problem::new(e.clone(), Mapping::identity(e), f)
        .with_known_solution(v(&[0.3]))
        .with_known_solution_set(ConvexSet::singleton(v(&[0.3])))
}

/// f(x, y) = x(y - x) with S x = -x/2 on [-1, 2]; the solution is 0.
pub fn combined_problem() -> Problem {
    let e = ConvexSet::interval(-1.0, 2.0).unwrap();
    let f = Bifunction::affine_vi(Matrix::identity(1), v(&[0.0]), e.clone()).unwrap();
    let s = Mapping::new(
        MappingKind::ScaledReflection {
            center: v(&[0.0]),
            factor: 0.5,
        },
        e.clone(),
    )
    .unwrap();
    Problem::new(e, s, f)
        .with_known_solution(v(&[0.0]))
        .with_known_solution_set(ConvexSet::singleton(v(&[0.0])))
}

/// S projects onto the horizontal axis and f(x, y) = |y|^2/2 - |x|^2/2 on a
/// box around the origin; the only common point is 0.
pub fn convex_gap_problem() -> Problem {
    let e = ConvexSet::box_set(v(&[-1.0, -1.0]), v(&[2.0, 1.0])).unwrap();
    let f = Bifunction::convex_gap(ConvexFunction::NormSquare, e.clone()).unwrap();
    let s = Mapping::new(
        MappingKind::Projection {
            target: ConvexSet::hyperplane(v(&[0.0, 1.0]), 0.0).unwrap(),
        },
        e.clone(),
    )
    .unwrap();
    Problem::new(e, s, f)
        .with_known_solution(v(&[0.0, 0.0]))
        .with_known_solution_set(ConvexSet::singleton(v(&[0.0, 0.0])))
}
