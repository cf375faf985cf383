//! Width, diameter, circumradius and inradius of a polytope relative to a
//! gauge body, and the search for affine images extremizing `D/2r` and
//! `w/2R`.

mod poly;
mod search;
mod shear;

pub use poly::Width;
pub use search::{
    grunbaum_upper_bound, maximize_wr_affine, minimize_dr_affine, AffineSearchResult, GrunbaumBound, SearchMethod,
    SearchOptions,
};
pub use shear::{shear_inflation_check, shear_inflation_map, ShearReport};

use crate::bodies::ConvexBody;
use crate::constructions::d_s;
use crate::error::Result;
use crate::linalg::Vector;
use poly::{Gauge, Poly};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub w: Width,
    pub d: f64,
    pub big_r: f64,
    pub r: f64,
    /// `None` for the Euclidean ball.
    pub gauge: Option<ConvexBody>,
    pub diameter_pair: (Vector, Vector),
    /// Translation `t` with `K ⊂ R·C + t`.
    pub circumcenter: Vector,
    /// Translation `t` with `r·C + t ⊂ K`.
    pub incenter: Vector,
}

impl RadialProfile {
    /// `w ≤ D`, `r ≤ R`, `w ≤ 2R` and `D ≥ 2r` within `tol`.
    pub fn consistent(&self, tol: f64) -> bool {
        self.w.upper <= self.d + tol
            && self.r <= self.big_r + tol
            && self.w.lower <= 2.0 * self.big_r + tol
            && self.d + tol >= 2.0 * self.r
    }
}

/// The four radial functionals of a polytope `k` relative to the polytope
/// `gauge`, or to the Euclidean unit ball when `gauge` is `None`.
pub fn radial_profile(k: &ConvexBody, gauge: Option<&ConvexBody>) -> Result<RadialProfile> {
    let p = Poly::from_body(k)?;
    let g = Gauge::of(gauge)?;
    let w = poly::width(&p, &g)?;
    let (d, i, j) = poly::diameter(&p, &g);
    let (big_r, circumcenter) = poly::circumradius(&p, &g)?;
    let (r, incenter) = poly::inradius(&p, &g)?;
    Ok(RadialProfile {
        w,
        d,
        big_r,
        r,
        gauge: gauge.cloned(),
        diameter_pair: (p.vertices[i].clone(), p.vertices[j].clone()),
        circumcenter,
        incenter,
    })
}

/// Lower bound on `min_A D(AK,C)/2r(AK,C)` from the Minkowski asymmetries
/// of `K` and `C`.
pub fn general_dr_lower(s_k: f64, s_c: f64) -> f64 {
    (s_k + 1.0) / (s_c + 1.0) * (s_c / s_k).max(1.0)
}

/// Euclidean bounds on `min_A D(AK)/2r(AK)` from the Minkowski asymmetry
/// `s` and the John asymmetry `s_john`.
pub fn dr_bounds(n: usize, s: f64, s_john: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    let lower = (s * ((nf + 1.0) / (2.0 * nf)).sqrt()).max((s + 1.0) / 2.0);
    let upper = if n == 2 { d_s(s_john)? / 2.0 } else { (nf * (s_john + 1.0) / 2.0).sqrt() };
    Ok((lower, upper))
}

/// Bounds on `max_A w(AK)/2R(AK)` from the Minkowski asymmetry `s`.
pub fn wr_bounds(n: usize, s: f64) -> (f64, f64) {
    let nf = n as f64;
    let first = if n % 2 == 1 { nf.sqrt() / s } else { (nf + 1.0) / (s * (nf + 2.0).sqrt()) };
    (1.0 / nf.sqrt(), first.min((s + 1.0) / (2.0 * s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{self, VPolytope};
    use crate::constructions::{regular_body, Position, RegularKind};

    fn v(points: &[[f64; 2]]) -> ConvexBody {
        VPolytope::new(points.iter().map(|p| Vector::from_column_slice(p)).collect())
            .unwrap()
            .into()
    }

    #[test]
    fn triangle_and_square() {
        let t = regular_body(RegularKind::Simplex, 2, Position::John).unwrap();
        let p = radial_profile(&t.body, None).unwrap();
        assert!((p.d / (2.0 * p.r) - 3f64.sqrt()).abs() < 1e-9);
        let sq: ConvexBody = bodies::cube_v(2, 1.0).into();
        let p = radial_profile(&sq, None).unwrap();
        assert!((p.w.upper / (2.0 * p.big_r) - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(p.consistent(1e-9));
    }

    #[test]
    fn self_gauge() {
        let tri = v(&[[0.0, 0.0], [3.0, 0.5], [1.0, 2.0]]);
        let p = radial_profile(&tri, Some(&tri)).unwrap();
        for (x, e) in [(p.w.upper, 2.0), (p.d, 2.0), (p.big_r, 1.0), (p.r, 1.0)] {
            assert!((x - e).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn tetrahedron_width() {
        let t = regular_body(RegularKind::Simplex, 3, Position::John).unwrap();
        let p = radial_profile(&t.body, None).unwrap();
        assert!((p.w.upper - 2.0 * 3f64.sqrt()).abs() < 1e-9 && (p.big_r - 3.0).abs() < 1e-9);
        let c = regular_body(RegularKind::Cube, 3, Position::John).unwrap();
        let q = regular_body(RegularKind::CrossPolytope, 3, Position::John).unwrap();
        let p = radial_profile(&c.body, Some(&q.body)).unwrap();
        assert!(p.consistent(1e-9));
    }

    #[test]
    fn four_dimensional_width_is_an_interval() {
        let c: ConvexBody = bodies::cube_v(4, 1.0).into();
        let p = radial_profile(&c, None).unwrap();
        assert!(p.w.lower <= p.w.upper + 1e-12 && (p.w.upper - 2.0).abs() < 1e-6);
    }

    #[test]
    fn bound_formulas() {
        let (lo, hi) = wr_bounds(2, 2.0);
        assert!((lo - 0.5f64.sqrt()).abs() < 1e-15 && (hi - 0.75).abs() < 1e-15);
        let (lo, hi) = dr_bounds(3, 3.0, 3.0).unwrap();
        assert!((lo - 6f64.sqrt()).abs() < 1e-12 && (hi - 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(general_dr_lower(1.0, 1.0), 1.0);
    }
}
