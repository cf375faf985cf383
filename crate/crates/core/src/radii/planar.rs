//! Diameter of planar bodies in John position against `D_s`.

use super::{BoundReport, EqualityCertificate, Side};
use crate::bodies::{self, ConvexBody};
use crate::constructions::d_s;
use crate::error::{GeomError, Result};
use crate::linalg::{self, Vector};

/// Tolerance of the two norm identities at equality.
const IDENTITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarReport {
    pub report: BoundReport,
    /// Endpoints of a diameter.
    pub x: Vector,
    pub y: Vector,
}

/// A pair of points of `body` at maximal distance, and that distance.
pub fn diameter_pair(body: &ConvexBody) -> Result<(Vector, Vector, f64)> {
    let pts = match body {
        ConvexBody::Ball(b) => {
            let c = b.center();
            let r = b.radius();
            let e = linalg::unit(b.dim(), 0);
            let mut best = (c + &e * r, c - &e * r, 2.0 * r);
            for (i, p) in b.apexes().iter().enumerate() {
                let d = p - c;
                let far = c - &d * (r / d.norm());
                let len = d.norm() + r;
                if len > best.2 {
                    best = (p.clone(), far, len);
                }
                for q in &b.apexes()[i + 1..] {
                    let len = (p - q).norm();
                    if len > best.2 {
                        best = (p.clone(), q.clone(), len);
                    }
                }
            }
            return Ok(best);
        }
        _ => bodies::extreme_points(body)?,
    };
    let mut best = (pts[0].clone(), pts[0].clone(), 0.0);
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let len = (p - q).norm();
            if len > best.2 {
                best = (p.clone(), q.clone(), len);
            }
        }
    }
    Ok(best)
}

/// Compares the diameter of a planar body in John position, with John
/// asymmetry `s`, to `D_s`. At equality the diameter endpoints must satisfy
/// `‖x‖ = ‖y‖ = √(D²/2 - 2)` and `‖(x+y)/2‖ = √(D²/4 - 2)`.
pub fn planar_diameter_report(body: &ConvexBody, s: f64) -> Result<PlanarReport> {
    if body.dim() != 2 {
        return Err(GeomError::WrongDimension { expected: 2, got: body.dim() });
    }
    let bound = d_s(s)?;
    let (x, y, diam) = diameter_pair(body)?;
    let mut report = BoundReport::new("planar diameter", diam, bound, Side::AtMost);
    if report.near_equality() {
        let end_norm = (diam * diam / 2.0 - 2.0).max(0.0).sqrt();
        let mid_norm = (diam * diam / 4.0 - 2.0).max(0.0).sqrt();
        let mid = ((&x + &y) / 2.0).norm();
        let radius_error = (x.norm() - end_norm).abs().max((y.norm() - end_norm).abs());
        report.equality = Some(EqualityCertificate {
            center_norm: mid,
            expected_center_norm: mid_norm,
            perpendicularity: 0.0,
            radius_spread: (x.norm() - y.norm()).abs(),
            radius_error,
            contact_products: Vec::new(),
            holds: radius_error <= IDENTITY_TOL && (mid - mid_norm).abs() <= IDENTITY_TOL,
        });
    }
    Ok(PlanarReport { report, x, y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{regular_body, small_asym_body, Position, RegularKind};

    #[test]
    fn small_regime_is_extremal() {
        for s in [1.0, 1.4, 2.0] {
            let c = small_asym_body(2, 1, s).unwrap();
            let r = planar_diameter_report(&c.body, s).unwrap();
            assert!(r.report.slack.abs() < 1e-9, "{s} {:?}", r.report);
            assert!(r.report.equality.unwrap().holds);
        }
    }

    #[test]
    fn square_diagonal() {
        let c = regular_body(RegularKind::Cube, 2, Position::John).unwrap();
        let r = planar_diameter_report(&c.body, 1.0).unwrap();
        assert!((r.report.measured - 8f64.sqrt()).abs() < 1e-12);
        assert!(r.report.slack.abs() < 1e-12);
    }

    #[test]
    fn rejects_other_dimensions() {
        let c = regular_body(RegularKind::Cube, 3, Position::John).unwrap();
        assert!(matches!(planar_diameter_report(&c.body, 1.0), Err(GeomError::WrongDimension { .. })));
    }
}
