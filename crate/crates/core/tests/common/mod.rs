//! Shared helpers: an independent convex-hull facet oracle and random
//! polytopes.

#![allow(dead_code)]

use danzer_core::geometry::Point;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian(d: usize, rng: &mut impl Rng) -> Point {
    DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn sphere_sample(d: usize, rng: &mut impl Rng) -> Point {
    gaussian(d, rng).normalize()
}

/// Half-spaces `n·x ≤ c` whose intersection is the convex hull.
pub fn hull_facets(points: &[Point]) -> Vec<(Point, f64)> {
    match points[0].len() {
        2 => hull_facets_2d(points),
        3 => hull_facets_3d(points),
        d => panic!("no hull oracle for d = {d}"),
    }
}

fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

// Andrew's monotone chain, counter-clockwise.
fn hull_facets_2d(points: &[Point]) -> Vec<(Point, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut hull: Vec<Point> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p.clone());
        }
        hull.pop();
    }
    let m = hull.len();
    (0..m)
        .map(|i| {
            let (a, b) = (&hull[i], &hull[(i + 1) % m]);
            let n = DVector::from_vec(vec![b[1] - a[1], a[0] - b[0]]);
            let c = n.dot(a);
            (n, c)
        })
        .collect()
}

// Every plane through three points with all others on one side.
fn hull_facets_3d(points: &[Point]) -> Vec<(Point, f64)> {
    let mut out = Vec::new();
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = (&points[j] - &points[i]).cross(&(&points[k] - &points[i]));
                if normal.norm() < 1e-12 {
                    continue;
                }
                let normal = normal.normalize();
                let c = normal.dot(&points[i]);
                let side: Vec<f64> = points.iter().map(|p| normal.dot(p) - c).collect();
                if side.iter().all(|s| *s <= 1e-12) {
                    out.push((normal, c));
                } else if side.iter().all(|s| *s >= -1e-12) {
                    out.push((-normal, -c));
                }
            }
        }
    }
    out
}

pub fn inside_hull(facets: &[(Point, f64)], p: &Point) -> bool {
    facets.iter().all(|(n, c)| n.dot(p) <= c + 1e-12 * n.norm())
}

pub fn random_polytope(d: usize, count: usize, rng: &mut impl Rng) -> Vec<Point> {
    let stretch = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(d, d) * 2.0;
    (0..count).map(|_| &stretch * gaussian(d, rng)).collect()
}
