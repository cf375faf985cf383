//! Outer k-radius in Loewner position against `√(k/n)`, and the exact
//! values for regular polytopes.

use super::meb::{min_enclosing_ball, EnclosingBall};
use super::{BoundReport, EqualityCertificate, Side, BOUND_TOL};
use crate::bodies::{self, ConvexBody, Subspace};
use crate::constructions::RegularKind;
use crate::ellipsoid::{john_verify, loewner_decomposition, mvee_with_weights};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Vector};
use crate::optimize::nelder_mead_restarted;

#[derive(Debug, Clone, PartialEq)]
pub struct OuterReport {
    /// Smallest enclosing ball radius of the projection.
    pub ball: BoundReport,
    /// `(vol_k(E)/vol_k(B^k))^{1/k}` for the Loewner ellipsoid `E` of the
    /// projection.
    pub volume: BoundReport,
    pub meb: EnclosingBall,
    pub mvee_center_norm: f64,
    pub mvee_semiaxes: Vec<f64>,
}

/// `R_k` of a regular polytope whose Loewner ellipsoid is the unit ball.
pub fn regular_outer_kradius(kind: RegularKind, n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    if kind == RegularKind::Simplex && n % 2 == 0 {
        if k == 1 {
            return (nf + 1.0) / (nf * (nf + 2.0).sqrt());
        }
        if k == n - 1 {
            return (2.0 * nf - 1.0) / (2.0 * nf);
        }
    }
    (kf / nf).sqrt()
}

fn loewner_points(body: &ConvexBody) -> Result<Vec<Vector>> {
    let n = body.dim();
    if let ConvexBody::Ball(b) = body {
        if b.is_unit_ball_at_origin() && b.apexes().is_empty() {
            return Ok(Vec::new());
        }
        return Err(GeomError::RepresentationUnavailable(
            "outer k-radius of a ball hull other than B^n".into(),
        ));
    }
    let pts = bodies::extreme_points(body)?;
    let far = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if far > 1.0 + 1e-9 {
        return Err(GeomError::NotInLoewnerPosition { residual: far - 1.0 });
    }
    let d = loewner_decomposition(body, 1e-6)
        .map_err(|_| GeomError::NotInLoewnerPosition { residual: f64::INFINITY })?;
    let rep = john_verify(&d, body);
    if !rep.pass || d.dim() != n {
        return Err(GeomError::NotInLoewnerPosition { residual: rep.max_residual() });
    }
    Ok(pts)
}

/// Compares the projection of a Loewner-position body onto `f` with the
/// ball `√(k/n) B^k`, both by enclosing radius and by Loewner volume.
pub fn outer_kradius(body: &ConvexBody, f: &Subspace) -> Result<OuterReport> {
    let n = body.dim();
    let k = f.k();
    if f.dim() != n {
        return Err(GeomError::WrongDimension { expected: n, got: f.dim() });
    }
    let bound = (k as f64 / n as f64).sqrt();
    let pts = loewner_points(body)?;
    if pts.is_empty() {
        let meb = EnclosingBall {
            center: Vector::zeros(k),
            radius: 1.0,
            support: Vec::new(),
            certified: true,
        };
        return Ok(OuterReport {
            ball: BoundReport::new("outer k-ball radius", 1.0, bound, Side::AtLeast),
            volume: BoundReport::new("outer k-ellipsoid volume radius", 1.0, bound, Side::AtLeast),
            meb,
            mvee_center_norm: 0.0,
            mvee_semiaxes: vec![1.0; k],
        });
    }
    let proj: Vec<Vector> = pts.iter().map(|p| f.coords(p)).collect();
    let meb = min_enclosing_ball(&proj)?;
    let ball = BoundReport::new("outer k-ball radius", meb.radius, bound, Side::AtLeast);

    let lo = mvee_with_weights(&proj, 1e-11, crate::ellipsoid::DEFAULT_MAX_ITER)?;
    let axes = lo.ellipsoid.semiaxes();
    let vol_radius = axes.iter().map(|a| a.ln()).sum::<f64>().exp().powf(1.0 / k as f64);
    let center_norm = lo.ellipsoid.center().norm();
    let mut volume = BoundReport::new("outer k-ellipsoid volume radius", vol_radius, bound, Side::AtLeast);
    if volume.near_equality() {
        let spread = axes.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - axes.iter().copied().fold(f64::INFINITY, f64::min);
        let radius_error = axes.iter().map(|a| (a - bound).abs()).fold(0.0, f64::max);
        volume.equality = Some(EqualityCertificate {
            center_norm,
            expected_center_norm: 0.0,
            perpendicularity: 0.0,
            radius_spread: spread,
            radius_error,
            contact_products: Vec::new(),
            holds: center_norm <= 1e-6 && radius_error <= 10.0 * BOUND_TOL,
        });
    }
    Ok(OuterReport {
        ball,
        volume,
        meb,
        mvee_center_norm: center_norm,
        mvee_semiaxes: axes,
    })
}

/// Half the minimal width of a simplex given by its vertices: the minimum
/// over splits of the vertex set into two faces of the distance between
/// the parallel hyperplanes through them.
pub fn simplex_min_halfwidth(vertices: &[Vector]) -> Result<(f64, Vector)> {
    let m = vertices.len();
    let n = vertices[0].len();
    if m != n + 1 {
        return Err(GeomError::InvalidInput(format!("a simplex in R^{n} has {} vertices, got {m}", n + 1)));
    }
    let mut best = (f64::INFINITY, Vector::zeros(n));
    for mask in 1..(1usize << (m - 1)) {
        let (a, b): (Vec<usize>, Vec<usize>) = (0..m).partition(|&i| i == m - 1 || mask >> i & 1 == 1);
        if b.is_empty() {
            continue;
        }
        let mut dirs: Vec<Vector> = a[1..].iter().map(|&i| &vertices[i] - &vertices[a[0]]).collect();
        dirs.extend(b[1..].iter().map(|&i| &vertices[i] - &vertices[b[0]]));
        let normal = linalg::orthogonal_complement(&dirs, n);
        if normal.len() != 1 {
            continue;
        }
        let u = &normal[0];
        let w = u.dot(&(&vertices[a[0]] - &vertices[b[0]])).abs();
        if w < best.0 {
            best = (w, u.clone());
        }
    }
    Ok((best.0 / 2.0, best.1))
}

fn projected_radius(points: &[Vector], u: &Vector) -> f64 {
    let nrm = u.norm();
    if nrm < 1e-12 {
        return f64::INFINITY;
    }
    let u = u / nrm;
    let proj: Vec<Vector> = points.iter().map(|p| p - &u * u.dot(p)).collect();
    min_enclosing_ball(&proj).map_or(f64::INFINITY, |b| b.radius)
}

/// Smallest enclosing radius of the projection onto a hyperplane, locally
/// minimized over the normal from each start. Returns the best value and
/// its normal; an upper bound on the true minimum.
pub fn hyperplane_projection_radius(points: &[Vector], starts: &[Vector]) -> (f64, Vector) {
    let n = points[0].len();
    let mut best = (f64::INFINITY, linalg::unit(n, 0));
    for s in starts {
        let f = |x: &[f64]| projected_radius(points, &Vector::from_column_slice(x));
        let r = nelder_mead_restarted(f, s.normalize().as_slice(), 0.2, 1e-15, 4000);
        if r.value < best.0 {
            best = (r.value, Vector::from_vec(r.x).normalize());
        }
    }
    best
}

/// Difference of centroids for every split of the points into two parts.
pub fn split_directions(points: &[Vector]) -> Vec<Vector> {
    let m = points.len();
    let mut out = Vec::new();
    for mask in 1..(1usize << (m - 1)) {
        let (a, b): (Vec<usize>, Vec<usize>) = (0..m).partition(|&i| i == m - 1 || mask >> i & 1 == 1);
        if b.is_empty() {
            continue;
        }
        let pick = |idx: &[usize]| linalg::centroid(&idx.iter().map(|&i| points[i].clone()).collect::<Vec<_>>());
        out.push(pick(&a) - pick(&b));
    }
    out
}
