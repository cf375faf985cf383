//! Smallest enclosing Euclidean ball of a finite point set.

use crate::bodies::hull_distance;
use crate::conic::{BarrierOptions, Cone, ConeProgram};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct EnclosingBall {
    pub center: Vector,
    pub radius: f64,
    /// Indices of points on the boundary sphere.
    pub support: Vec<usize>,
    /// The center lies in the hull of the support points, which proves
    /// optimality.
    pub certified: bool,
}

fn radius_about(points: &[Vector], c: &Vector) -> f64 {
    points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
}

/// Point of `aff(active)` equidistant from all of `active`.
fn circumcenter(active: &[&Vector]) -> Option<Vector> {
    let p0 = active[0];
    let diffs: Vec<Vector> = active[1..].iter().map(|p| *p - p0).collect();
    let q = linalg::orthonormal_basis(&diffs, 1e-10);
    if q.is_empty() {
        return Some(p0.clone());
    }
    let a = Matrix::from_fn(diffs.len(), q.len(), |r, c| diffs[r].dot(&q[c]));
    let rhs = Vector::from_iterator(diffs.len(), diffs.iter().map(|d| d.norm_squared() / 2.0));
    let beta = a.svd(true, true).solve(&rhs, 1e-13).ok()?;
    let mut c = p0.clone();
    for (qi, b) in q.iter().zip(beta.iter()) {
        c += qi * *b;
    }
    Some(c)
}

fn barrier_ball(points: &[Vector]) -> Result<(Vector, f64)> {
    let n = points[0].len();
    let start_c = linalg::centroid(points);
    let start_r = radius_about(points, &start_c) * 1.5 + 1.0;
    let mut lift = Matrix::zeros(n, n + 1);
    for i in 0..n {
        lift[(i, i)] = 1.0;
    }
    let mut obj = Vector::zeros(n + 1);
    obj[n] = 1.0;
    let mut prog = ConeProgram::new(obj.clone());
    for p in points {
        prog.cones.push(Cone {
            a: lift.clone(),
            b: -p,
            c: obj.clone(),
            d: 0.0,
        });
    }
    let z = start_c.clone().insert_row(n, start_r);
    let scale = start_r.max(1.0);
    let sol = prog.solve(
        z,
        BarrierOptions {
            gap_tol: 1e-13 * scale,
            ..BarrierOptions::default()
        },
    )?;
    let c = Vector::from_iterator(n, sol.z.iter().take(n).copied());
    let r = radius_about(points, &c);
    Ok((c, r))
}

/// Exact ball for small inputs: the smallest circumball of at most `d + 1`
/// points that covers everything.
fn small_ball(points: &[Vector]) -> Option<(Vector, f64)> {
    let m = points.len();
    let d = points[0].len();
    let top = (d + 1).min(m);
    let work: u128 = (1..=top).map(|j| linalg::binomial(m, j)).sum();
    if work > 4000 {
        return None;
    }
    let mut best: Option<(Vector, f64)> = None;
    for j in 1..=top {
        for subset in linalg::Combinations::new(m, j) {
            let pts: Vec<&Vector> = subset.iter().map(|&i| &points[i]).collect();
            let Some(c) = circumcenter(&pts) else { continue };
            let r = pts.iter().map(|p| (*p - &c).norm()).fold(0.0, f64::max);
            if best.as_ref().is_some_and(|(_, br)| r >= *br) {
                continue;
            }
            if points.iter().all(|p| (p - &c).norm() <= r * (1.0 + 1e-12) + 1e-14) {
                best = Some((c, r));
            }
        }
    }
    best.map(|(c, _)| {
        let r = radius_about(points, &c);
        (c, r)
    })
}

pub fn min_enclosing_ball(points: &[Vector]) -> Result<EnclosingBall> {
    let Some(first) = points.first() else {
        return Err(GeomError::InvalidInput("min_enclosing_ball needs at least one point".into()));
    };
    let n = first.len();
    if points.iter().any(|p| p.len() != n) {
        return Err(GeomError::InvalidInput("points of mixed dimension".into()));
    }
    let spread = points.iter().map(|p| (p - first).norm()).fold(0.0, f64::max);
    if spread == 0.0 {
        return Ok(EnclosingBall {
            center: first.clone(),
            radius: 0.0,
            support: (0..points.len()).collect(),
            certified: true,
        });
    }
    if let Some((center, radius)) = small_ball(points) {
        return finish(points, center, radius);
    }
    let (mut center, mut radius) = barrier_ball(points)?;
    // polish on the near-active points
    for rel in [1e-6, 1e-4] {
        let active: Vec<&Vector> = points.iter().filter(|p| (*p - &center).norm() >= radius * (1.0 - rel)).collect();
        if let Some(c) = circumcenter(&active) {
            let r = radius_about(points, &c);
            let pts: Vec<Vector> = active.iter().map(|p| (*p).clone()).collect();
            if r <= radius + 1e-12 * (1.0 + radius) && hull_distance(&pts, &c)? <= 1e-10 * (1.0 + radius) {
                center = c;
                radius = r;
                break;
            }
        }
    }
    finish(points, center, radius)
}

fn finish(points: &[Vector], center: Vector, radius: f64) -> Result<EnclosingBall> {
    let tol = 1e-9 * (1.0 + radius);
    let support: Vec<usize> = (0..points.len())
        .filter(|&i| (&points[i] - &center).norm() >= radius - tol)
        .collect();
    let sp: Vec<Vector> = support.iter().map(|&i| points[i].clone()).collect();
    let certified = support.len() >= 2 && hull_distance(&sp, &center)? <= tol;
    Ok(EnclosingBall {
        center,
        radius,
        support,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn two_points() {
        let b = min_enclosing_ball(&[Vector::from_vec(vec![1.0, 0.0]), Vector::from_vec(vec![-1.0, 0.0])]).unwrap();
        assert!(b.center.norm() < 1e-12 && (b.radius - 1.0).abs() < 1e-12 && b.certified);
    }

    #[test]
    fn right_triangle_uses_hypotenuse() {
        let pts = vec![
            Vector::from_vec(vec![0.0, 0.0]),
            Vector::from_vec(vec![2.0, 0.0]),
            Vector::from_vec(vec![0.0, 2.0]),
            Vector::from_vec(vec![0.5, 0.5]),
        ];
        let b = min_enclosing_ball(&pts).unwrap();
        assert!((b.radius - 2f64.sqrt()).abs() < 1e-12);
        assert!((&b.center - Vector::from_vec(vec![1.0, 1.0])).norm() < 1e-12);
        assert!(b.certified);
    }

    #[test]
    fn obtuse_triangle_uses_longest_side() {
        let pts = vec![
            Vector::from_vec(vec![-1.0, 0.0]),
            Vector::from_vec(vec![1.0, 0.0]),
            Vector::from_vec(vec![0.0, 0.3]),
        ];
        let b = min_enclosing_ball(&pts).unwrap();
        assert!((b.radius - 1.0).abs() < 1e-12 && b.certified && b.support.len() == 2);
    }

    #[test]
    fn random_clouds_are_certified() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            for _ in 0..5 {
                let pts: Vec<Vector> = (0..25).map(|_| linalg::random_gaussian(&mut rng, n)).collect();
                let b = min_enclosing_ball(&pts).unwrap();
                assert!(b.certified, "n={n} {b:?}");
                assert!(pts.iter().all(|p| (p - &b.center).norm() <= b.radius + 1e-12));
            }
        }
    }

    #[test]
    fn single_point() {
        let b = min_enclosing_ball(&[Vector::from_vec(vec![3.0])]).unwrap();
        assert_eq!(b.radius, 0.0);
    }
}
