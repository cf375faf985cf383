use super::enumerate::{facets_of, vertices_of};
use super::types::{AffineMap, BallHull, ConvexBody, HPolytope, Subspace, VPolytope};
use crate::conic::{BarrierOptions, Cone, ConeProgram};
use crate::error::{GeomError, Result};
use crate::linalg::{Matrix, Vector};
use crate::lp::{Cmp, LinearProgram, Sense};

fn check_dim(body: &ConvexBody, x: &Vector) -> Result<()> {
    if x.len() != body.dim() {
        return Err(GeomError::WrongDimension {
            expected: body.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `h_K(a) = max_{x ∈ K} a^T x`.
pub fn support(body: &ConvexBody, a: &Vector) -> Result<f64> {
    check_dim(body, a)?;
    if a.norm() == 0.0 {
        return Err(GeomError::InvalidInput("support direction must be nonzero".into()));
    }
    Ok(match body {
        ConvexBody::V(p) => vertex_support(p.vertices(), a),
        ConvexBody::H(p) => p.support_lp(a)?,
        ConvexBody::Ball(b) => ballhull_support(b, a),
    })
}

pub fn vertex_support(points: &[Vector], a: &Vector) -> f64 {
    points.iter().map(|v| v.dot(a)).fold(f64::NEG_INFINITY, f64::max)
}

pub fn ballhull_support(b: &BallHull, a: &Vector) -> f64 {
    let ball = b.center().dot(a) + b.radius() * a.norm();
    b.apexes().iter().map(|p| p.dot(a)).fold(ball, f64::max)
}

/// `min{ρ ≥ 0 : x ∈ ρK}` for a body with the origin in its interior.
pub fn gauge(body: &ConvexBody, x: &Vector) -> Result<f64> {
    check_dim(body, x)?;
    match body {
        ConvexBody::H(p) => {
            let r = origin_depth_h(p);
            if r <= 1e-9 {
                return Err(GeomError::OriginNotInterior { radius: r });
            }
            Ok(h_gauge(p, x))
        }
        ConvexBody::V(p) => {
            let eps = origin_weight_margin(p.vertices())?;
            if eps <= 1e-12 {
                return Err(GeomError::OriginNotInterior { radius: eps });
            }
            v_gauge(p.vertices(), x)
        }
        ConvexBody::Ball(b) => ballhull_gauge(b, x),
    }
}

/// Distance from the origin to the nearest facet hyperplane (negative when
/// the origin lies outside).
pub fn origin_depth_h(p: &HPolytope) -> f64 {
    p.halfspaces().map(|(a, b)| b / a.norm()).fold(f64::INFINITY, f64::min)
}

pub fn h_gauge(p: &HPolytope, x: &Vector) -> f64 {
    p.halfspaces().map(|(a, b)| a.dot(x) / b).fold(0.0, f64::max)
}

/// Largest ε such that the origin is a convex combination of the points with
/// every weight at least ε; positive iff the origin is interior to a
/// full-dimensional hull.
fn origin_weight_margin(points: &[Vector]) -> Result<f64> {
    let m = points.len();
    let n = points[0].len();
    let mut obj = vec![0.0; m + 1];
    obj[m] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for j in 0..n {
        let mut row: Vec<f64> = points.iter().map(|p| p[j]).collect();
        row.push(0.0);
        lp.row(row, Cmp::Eq, 0.0);
    }
    let mut row = vec![1.0; m];
    row.push(0.0);
    lp.row(row, Cmp::Eq, 1.0);
    for i in 0..m {
        let mut row = vec![0.0; m + 1];
        row[i] = 1.0;
        row[m] = -1.0;
        lp.row(row, Cmp::Ge, 0.0);
    }
    match lp.solve() {
        Ok(sol) => Ok(sol.value),
        Err(GeomError::Infeasible) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn v_gauge(points: &[Vector], x: &Vector) -> Result<f64> {
    if x.norm() == 0.0 {
        return Ok(0.0);
    }
    let m = points.len();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0; m]);
    for j in 0..x.len() {
        lp.row(points.iter().map(|p| p[j]).collect(), Cmp::Eq, x[j]);
    }
    for i in 0..m {
        lp.nonneg(i);
    }
    match lp.solve() {
        Ok(sol) => Ok(sol.value),
        Err(GeomError::Infeasible) => Err(GeomError::OriginNotInterior { radius: 0.0 }),
        Err(e) => Err(e),
    }
}

/// Gauge of a ball hull as the support function of its polar
/// `{a : c^T a + r‖a‖ <= 1, p_i^T a <= 1}`, maximized by a barrier method.
pub fn ballhull_gauge(b: &BallHull, x: &Vector) -> Result<f64> {
    if x.norm() == 0.0 {
        return Ok(0.0);
    }
    let n = b.dim();
    let mut prog = ConeProgram::new(-x.clone());
    prog.cones.push(Cone {
        a: Matrix::identity(n, n) * b.radius(),
        b: Vector::zeros(n),
        c: -b.center().clone(),
        d: 1.0,
    });
    for p in b.apexes() {
        prog.linear.push((p.clone(), 1.0));
    }
    let scale = x.norm().max(1.0);
    let opts = BarrierOptions {
        gap_tol: 1e-13 * scale,
        blowup: 1e9,
        ..BarrierOptions::default()
    };
    match prog.solve(Vector::zeros(n), opts) {
        Ok(sol) => Ok(-sol.value),
        Err(GeomError::Unbounded) => Err(GeomError::OriginNotInterior { radius: 0.0 }),
        Err(e) => Err(e),
    }
}

/// Membership with absolute tolerance `tol`.
pub fn contains(body: &ConvexBody, x: &Vector, tol: f64) -> Result<bool> {
    check_dim(body, x)?;
    match body {
        ConvexBody::H(p) => Ok(p.halfspaces().all(|(a, b)| a.dot(x) <= b + tol * a.norm())),
        ConvexBody::V(p) => Ok(hull_distance(p.vertices(), x)? <= tol),
        ConvexBody::Ball(b) => {
            let d = x - b.center();
            if d.norm() <= b.radius() + tol {
                return Ok(true);
            }
            let shifted = BallHull::new(
                Vector::zeros(b.dim()),
                b.radius(),
                b.apexes().iter().map(|p| p - b.center()).collect(),
            )?;
            let g = ballhull_gauge(&shifted, &d)?;
            // a gauge excess of δ puts x at distance about δ·‖x - c‖ outside
            Ok((g - 1.0) * d.norm() <= tol)
        }
    }
}

/// `min_{y ∈ conv(points)} ‖x - y‖_∞`.
pub fn hull_distance(points: &[Vector], x: &Vector) -> Result<f64> {
    let m = points.len();
    let n = x.len();
    let mut obj = vec![0.0; m + 1];
    obj[m] = 1.0;
    let mut lp = LinearProgram::new(Sense::Minimize, obj);
    for j in 0..n {
        let mut row: Vec<f64> = points.iter().map(|p| p[j]).collect();
        row.push(-1.0);
        lp.row(row.clone(), Cmp::Le, x[j]);
        row[m] = 1.0;
        lp.row(row, Cmp::Ge, x[j]);
    }
    let mut row = vec![1.0; m];
    row.push(0.0);
    lp.row(row, Cmp::Eq, 1.0);
    for i in 0..=m {
        lp.nonneg(i);
    }
    Ok(lp.solve()?.value)
}

/// Vertex representation; ball hulls have none.
pub fn to_vpolytope(body: &ConvexBody) -> Result<VPolytope> {
    match body {
        ConvexBody::V(p) => Ok(p.clone()),
        ConvexBody::H(p) => VPolytope::new(vertices_of(p)?),
        ConvexBody::Ball(_) => Err(GeomError::RepresentationUnavailable(
            "ball hull has no vertex representation".into(),
        )),
    }
}

/// Facet representation; ball hulls have none.
pub fn to_hpolytope(body: &ConvexBody) -> Result<HPolytope> {
    match body {
        ConvexBody::H(p) => Ok(p.clone()),
        ConvexBody::V(p) => facets_of(p),
        ConvexBody::Ball(_) => Err(GeomError::RepresentationUnavailable(
            "ball hull has no facet representation".into(),
        )),
    }
}

/// Orthogonal projection onto `F`, expressed in the coordinates of its basis.
pub fn project(body: &ConvexBody, f: &Subspace) -> Result<ConvexBody> {
    if f.dim() != body.dim() {
        return Err(GeomError::WrongDimension {
            expected: body.dim(),
            got: f.dim(),
        });
    }
    match body {
        ConvexBody::V(p) => Ok(project_points(p.vertices(), f)?.into()),
        ConvexBody::H(p) => Ok(project_points(&vertices_of(p)?, f)?.into()),
        ConvexBody::Ball(b) => Ok(BallHull::new(
            f.coords(b.center()),
            b.radius(),
            b.apexes().iter().map(|p| f.coords(p)).collect(),
        )?
        .into()),
    }
}

fn project_points(points: &[Vector], f: &Subspace) -> Result<VPolytope> {
    VPolytope::new(points.iter().map(|p| f.coords(p)).collect())
}

/// `{x : v_i^T x <= 1}` for a V-polytope with the origin in its interior.
pub fn polar(p: &VPolytope) -> Result<HPolytope> {
    let n = p.vertices().len();
    match HPolytope::new(p.vertices().to_vec(), vec![1.0; n]) {
        Ok(h) => Ok(h),
        Err(GeomError::Unbounded) | Err(GeomError::EmptyInterior) => Err(GeomError::OriginNotInterior { radius: 0.0 }),
        Err(e) => Err(e),
    }
}

/// Polar of an H-polytope with the origin in its interior: `conv{a_i / b_i}`.
pub fn polar_of_h(p: &HPolytope) -> Result<VPolytope> {
    let r = origin_depth_h(p);
    if r <= 1e-9 {
        return Err(GeomError::OriginNotInterior { radius: r });
    }
    VPolytope::new(p.halfspaces().map(|(a, b)| a / b).collect())
}

/// Image of the body under an invertible affine map. Ball hulls map to ball
/// hulls only under similarities.
pub fn transform(body: &ConvexBody, map: &AffineMap) -> Result<ConvexBody> {
    if map.translation().len() != body.dim() {
        return Err(GeomError::WrongDimension {
            expected: body.dim(),
            got: map.translation().len(),
        });
    }
    match body {
        ConvexBody::V(p) => Ok(VPolytope::new(p.vertices().iter().map(|v| map.apply(v)).collect())?.into()),
        ConvexBody::H(p) => Ok(transform_h(p, map)?.into()),
        ConvexBody::Ball(b) => {
            let scale = map.is_similarity(1e-12).ok_or_else(|| {
                GeomError::RepresentationUnavailable("ball hull under a non-similarity map".into())
            })?;
            let rot = map.linear() / scale;
            let out = BallHull::new(
                map.apply(b.center()),
                b.radius() * scale,
                b.apexes().iter().map(|p| map.apply(p)).collect(),
            )?
            .with_contacts(b.contacts().iter().map(|u| &rot * u).collect());
            Ok(out.into())
        }
    }
}

pub fn transform_h(p: &HPolytope, map: &AffineMap) -> Result<HPolytope> {
    let inv_t = map
        .linear()
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::DegenerateInput("singular map".into()))?
        .transpose();
    let (normals, offsets): (Vec<Vector>, Vec<f64>) = p
        .halfspaces()
        .map(|(a, b)| {
            let na = &inv_t * a;
            let nb = b + na.dot(map.translation());
            (na, nb)
        })
        .unzip();
    HPolytope::new_unchecked(normals, offsets)
}

/// Finite point set whose hull, together with the ball part of a ball hull,
/// is the body.
pub fn extreme_points(body: &ConvexBody) -> Result<Vec<Vector>> {
    match body {
        ConvexBody::V(p) => Ok(p.vertices().to_vec()),
        ConvexBody::H(p) => vertices_of(p),
        ConvexBody::Ball(b) => Ok(b.apexes().to_vec()),
    }
}

/// Euclidean diameter.
pub fn diameter(body: &ConvexBody) -> Result<f64> {
    let pts = extreme_points(body)?;
    let mut d = 0.0f64;
    for i in 0..pts.len() {
        for j in 0..i {
            d = d.max((&pts[i] - &pts[j]).norm());
        }
    }
    if let ConvexBody::Ball(b) = body {
        d = d.max(2.0 * b.radius());
        for p in &pts {
            d = d.max((p - b.center()).norm() + b.radius());
        }
    }
    Ok(d)
}

/// Euclidean circumradius about the origin, `max_{x ∈ K} ‖x‖`.
pub fn max_norm(body: &ConvexBody) -> Result<f64> {
    let pts = extreme_points(body)?;
    let mut r = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if let ConvexBody::Ball(b) = body {
        r = r.max(b.center().norm() + b.radius());
    }
    Ok(r)
}
