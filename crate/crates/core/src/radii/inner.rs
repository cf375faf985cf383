//! Inscribed k-balls of bodies in John position against the
//! asymmetry-dependent volume bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{distinct, BoundReport, EqualityCertificate, Side, BOUND_TOL};
use crate::bodies::{self, ConvexBody, HPolytope, KEllipsoid, VPolytope};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{Cmp, LinearProgram, Sense};
use crate::optimize::nelder_mead;

/// `√((n/k)·min{(s+1)/2, (n+1)/(k+1)})`.
pub fn inner_bound(n: usize, k: usize, s: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    (nf / kf * ((s + 1.0) / 2.0).min((nf + 1.0) / (kf + 1.0))).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainmentMethod {
    /// Support of the ellipsoid against every facet.
    Facets,
    /// Facets of the hull of certified body points, inside the carrier plane.
    InnerHull,
    /// Gauge at sampled boundary points; does not prove containment.
    Sampled,
}

impl ContainmentMethod {
    pub fn name(self) -> &'static str {
        match self {
            ContainmentMethod::Facets => "facets",
            ContainmentMethod::InnerHull => "inner-hull",
            ContainmentMethod::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Containment {
    /// Smallest facet slack; negative means the ellipsoid sticks out.
    pub slack: f64,
    pub method: ContainmentMethod,
    pub certifying: bool,
}

/// `max_{x ∈ E} a^T x`.
fn kellipsoid_support(e: &KEllipsoid, a: &Vector) -> f64 {
    a.dot(e.center()) + (e.axes() * (e.basis().transpose() * a)).norm()
}

fn facet_slack(h: &HPolytope, e: &KEllipsoid) -> f64 {
    h.normalized()
        .halfspaces()
        .map(|(a, b)| b - kellipsoid_support(e, a))
        .fold(f64::INFINITY, f64::min)
}

/// Slack of `E` inside the hull of `points`, computed in the carrier plane.
/// `None` when the points leave the plane or do not span it.
fn inner_hull_slack(e: &KEllipsoid, points: &[Vector]) -> Option<f64> {
    let f = e.carrier();
    let mut local = Vec::with_capacity(points.len());
    for p in points {
        let d = p - e.center();
        if (f.project(&d) - &d).norm() > 1e-9 * (1.0 + d.norm()) {
            return None;
        }
        local.push(f.coords(&d));
    }
    let axes = e.axes();
    if f.k() == 1 {
        let r = axes[(0, 0)];
        let hi = local.iter().map(|y| y[0]).fold(f64::NEG_INFINITY, f64::max);
        let lo = local.iter().map(|y| y[0]).fold(f64::INFINITY, f64::min);
        return Some((hi - r).min(-lo - r));
    }
    let hull = bodies::facets_of(&VPolytope::new(local).ok()?).ok()?;
    Some(
        hull.halfspaces()
            .map(|(a, b)| b - (axes * a).norm())
            .fold(f64::INFINITY, f64::min),
    )
}

fn sampled_slack(body: &ConvexBody, e: &KEllipsoid) -> Result<f64> {
    let k = e.k();
    let dirs: Vec<Vector> = match k {
        1 => vec![Vector::from_vec(vec![1.0]), Vector::from_vec(vec![-1.0])],
        2 => linalg::circle_directions(720),
        3 => linalg::icosphere(3),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            (0..4000).map(|_| linalg::random_unit(&mut rng, k)).collect()
        }
    };
    let mut worst = f64::INFINITY;
    for y in dirs {
        let x = e.point(&y);
        let g = bodies::gauge(body, &x)?;
        worst = worst.min((1.0 - g) * x.norm());
    }
    Ok(worst)
}

/// Checks `E ⊂ K`. Ball hulls need `inner_points`: points of `K` whose hull
/// within the carrier plane contains `E`; without them the check falls back
/// to sampling. Errors with `ContainmentViolated` past the bound tolerance.
pub fn kball_containment(body: &ConvexBody, e: &KEllipsoid, inner_points: &[Vector]) -> Result<Containment> {
    if e.dim() != body.dim() {
        return Err(GeomError::WrongDimension { expected: body.dim(), got: e.dim() });
    }
    let report = match body {
        ConvexBody::H(h) => Containment {
            slack: facet_slack(h, e),
            method: ContainmentMethod::Facets,
            certifying: true,
        },
        ConvexBody::V(_) => Containment {
            slack: facet_slack(&bodies::to_hpolytope(body)?, e),
            method: ContainmentMethod::Facets,
            certifying: true,
        },
        ConvexBody::Ball(_) => {
            let inside = inner_points.iter().try_fold(true, |ok, p| Ok::<_, GeomError>(ok && bodies::contains(body, p, 1e-9)?))?;
            match inside.then(|| inner_hull_slack(e, inner_points)).flatten() {
                Some(slack) => Containment {
                    slack,
                    method: ContainmentMethod::InnerHull,
                    certifying: true,
                },
                None => Containment {
                    slack: sampled_slack(body, e)?,
                    method: ContainmentMethod::Sampled,
                    certifying: false,
                },
            }
        }
    };
    if report.slack < -BOUND_TOL {
        return Err(GeomError::ContainmentViolated { violation: -report.slack });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerReport {
    pub containment: Containment,
    /// Against the asymmetry-dependent bound.
    pub theorem: BoundReport,
    /// Against `√(n(n+1)/(k(k+1)))`.
    pub ball: BoundReport,
    /// Against `√(n/k)`, reported only for `s = 1`.
    pub symmetric: Option<BoundReport>,
}

/// Compares the volume radius of `E ⊂ K` with the bounds for a body in
/// John position with John asymmetry `s`. Near equality the report carries
/// the center norm, perpendicularity and contact products of `E`, the
/// contacts being those of `contacts` (unit vectors of the decomposition).
pub fn inner_bound_report(
    body: &ConvexBody,
    s: f64,
    e: &KEllipsoid,
    inner_points: &[Vector],
    contacts: &[Vector],
) -> Result<InnerReport> {
    let containment = kball_containment(body, e, inner_points)?;
    let (n, k) = (e.dim(), e.k());
    let (nf, kf) = (n as f64, k as f64);
    let axes = e.semiaxes();
    let measured = e.volume_ratio().powf(1.0 / kf);
    let bound = inner_bound(n, k, s);
    let mut theorem = BoundReport::new("inner k-ellipsoid volume radius", measured, bound, Side::AtMost);
    if theorem.near_equality() {
        let c = e.center();
        let m = ((s + 1.0) / 2.0).min((nf + 1.0) / (kf + 1.0));
        let expected = (nf * (m - 1.0)).max(0.0).sqrt();
        let perpendicularity = (e.basis().transpose() * c).norm();
        let spread = axes[0] - axes[axes.len() - 1];
        let radius_error = axes.iter().map(|a| (a - bound).abs()).fold(0.0, f64::max);
        let products = distinct(contacts.iter().map(|u| c.dot(u)).collect(), 1e-7);
        let tol = 10.0 * BOUND_TOL * (1.0 + bound);
        theorem.equality = Some(EqualityCertificate {
            center_norm: c.norm(),
            expected_center_norm: expected,
            perpendicularity,
            radius_spread: spread,
            radius_error,
            contact_products: products,
            holds: spread <= tol && radius_error <= tol && perpendicularity <= tol && (c.norm() - expected).abs() <= tol,
        });
    }
    let ball_bound = (nf * (nf + 1.0) / (kf * (kf + 1.0))).sqrt();
    let ball = BoundReport::new("inner k-ellipsoid volume radius (simplex bound)", measured, ball_bound, Side::AtMost);
    let symmetric = ((s - 1.0).abs() <= 1e-9).then(|| {
        BoundReport::new("inner k-ellipsoid volume radius (symmetric bound)", measured, (nf / kf).sqrt(), Side::AtMost)
    });
    Ok(InnerReport {
        containment,
        theorem,
        ball,
        symmetric,
    })
}

/// Largest k-ball in `P` with carrier `basis` (columns orthonormal).
fn best_ball_for_carrier(h: &HPolytope, basis: &Matrix) -> Option<(Vector, f64)> {
    let n = h.dim();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for (a, b) in h.halfspaces() {
        let mut row: Vec<f64> = a.iter().copied().collect();
        row.push((basis.transpose() * a).norm());
        lp.row(row, Cmp::Le, b);
    }
    lp.nonneg(n);
    let sol = lp.solve().ok()?;
    Some((Vector::from_column_slice(&sol.x[..n]), sol.x[n]))
}

fn carrier_of(x: &[f64], n: usize, k: usize) -> Option<Matrix> {
    let cols: Vec<Vector> = (0..k).map(|j| Vector::from_column_slice(&x[j * n..(j + 1) * n])).collect();
    let q = linalg::orthonormal_basis(&cols, 1e-9);
    (q.len() == k).then(|| linalg::columns(&q))
}

/// Local search for a large inscribed k-ball of a polytope: the best center
/// and radius for a fixed carrier come from an LP, and the carrier is moved
/// by Nelder–Mead from `restarts` seeded random starts. A lower-bound
/// procedure only.
pub fn search_inner_kball(body: &ConvexBody, k: usize, restarts: usize, seed: u64) -> Result<KEllipsoid> {
    let n = body.dim();
    if k == 0 || k > n {
        return Err(GeomError::ParameterOutOfRange(format!("k must lie in [1, {n}], got {k}")));
    }
    let h = match body {
        ConvexBody::H(h) => h.normalized(),
        ConvexBody::V(_) => bodies::to_hpolytope(body)?.normalized(),
        ConvexBody::Ball(_) => {
            return Err(GeomError::RepresentationUnavailable("inner k-ball search needs a polytope".into()));
        }
    };
    let objective = |x: &[f64]| match carrier_of(x, n, k).and_then(|u| best_ball_for_carrier(&h, &u)) {
        Some((_, r)) => -r,
        None => f64::INFINITY,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..restarts.max(1) {
        let x0: Vec<f64> = (0..k).flat_map(|_| linalg::random_gaussian(&mut rng, n).iter().copied().collect::<Vec<_>>()).collect();
        let r = nelder_mead(objective, &x0, 0.3, 1e-10, 300 * n as u64 * k as u64);
        if best.as_ref().is_none_or(|(v, _)| r.value < *v) {
            best = Some((r.value, r.x));
        }
    }
    let (_, x) = best.expect("at least one restart");
    let basis = carrier_of(&x, n, k).ok_or_else(|| GeomError::DegenerateInput("degenerate carrier".into()))?;
    let (center, radius) =
        best_ball_for_carrier(&h, &basis).ok_or(GeomError::Infeasible)?;
    // shrink by a hair so the ball is strictly feasible after round-off
    KEllipsoid::ball(center, basis, radius * (1.0 - 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{high_asym_body, mid_asym_body, regular_body, small_asym_body, Position, RegularKind};

    fn report_for(c: &crate::constructions::Construction) -> InnerReport {
        let s = c.certificate.john_asymmetry.unwrap();
        inner_bound_report(
            &c.body,
            s,
            c.kball().unwrap(),
            &c.certificate.inner_points,
            &c.certificate.decomposition.contacts,
        )
        .unwrap()
    }

    #[test]
    fn high_regime_meets_simplex_bound() {
        let c = high_asym_body(3, 1, 3.0).unwrap();
        let r = report_for(&c);
        assert!(r.theorem.pass && r.ball.pass);
        assert!((r.theorem.measured - 6f64.sqrt()).abs() < 1e-9);
        let eq = r.theorem.equality.unwrap();
        assert!(eq.holds, "{eq:?}");
        assert_eq!(eq.contact_products.len(), 2);
        assert!((eq.contact_products[0] + 1.0).abs() < 1e-9 && (eq.contact_products[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mid_regime_contact_products() {
        let s = 1.6;
        let c = mid_asym_body(4, 2, s).unwrap();
        let r = report_for(&c);
        assert_eq!(r.containment.method, ContainmentMethod::InnerHull);
        assert!((r.theorem.measured - (4.0 * (s + 1.0) / 4.0f64).sqrt()).abs() < 1e-9);
        let eq = r.theorem.equality.unwrap();
        assert!(eq.holds, "{eq:?}");
        assert_eq!(eq.contact_products.len(), 2);
        assert!((eq.contact_products[0] - (1.0 - s) / 2.0).abs() < 1e-9);
        assert!((eq.contact_products[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn small_regime_is_below_bound() {
        for s in [1.0, 1.2, 1.5] {
            let c = small_asym_body(4, 1, s).unwrap();
            let r = report_for(&c);
            assert!(r.theorem.pass, "{s} {r:?}");
        }
    }

    #[test]
    fn cube_attains_symmetric_bound() {
        let c = regular_body(RegularKind::Cube, 3, Position::John).unwrap();
        let basis = Matrix::from_fn(3, 1, |r, _| if r == 0 { 1.0 } else { 0.0 });
        let diag = linalg::columns(&[Vector::from_element(3, 1.0 / 3f64.sqrt())]);
        let e = KEllipsoid::ball(Vector::zeros(3), diag, 3f64.sqrt()).unwrap();
        let r = inner_bound_report(&c.body, 1.0, &e, &[], &c.certificate.decomposition.contacts).unwrap();
        assert!(r.symmetric.unwrap().slack.abs() < 1e-12);
        let small = KEllipsoid::ball(Vector::zeros(3), basis, 0.5).unwrap();
        let r = inner_bound_report(&c.body, 1.0, &small, &[], &[]).unwrap();
        assert!(r.theorem.slack > 0.5 && r.theorem.equality.is_none());
    }

    #[test]
    fn containment_violation() {
        let c = regular_body(RegularKind::Cube, 2, Position::John).unwrap();
        let basis = linalg::columns(&[linalg::unit(2, 0)]);
        let e = KEllipsoid::ball(Vector::zeros(2), basis, 1.5).unwrap();
        assert!(matches!(kball_containment(&c.body, &e, &[]), Err(GeomError::ContainmentViolated { .. })));
    }

    #[test]
    fn search_finds_cube_diagonal() {
        let c = regular_body(RegularKind::Cube, 3, Position::John).unwrap();
        let e = search_inner_kball(&c.body, 1, 8, 1).unwrap();
        assert!((e.semiaxes()[0] - 3f64.sqrt()).abs() < 1e-4, "{:?}", e.semiaxes());
        assert!(kball_containment(&c.body, &e, &[]).unwrap().slack >= 0.0);
    }
}
