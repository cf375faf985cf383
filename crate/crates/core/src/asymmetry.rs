//! Minkowski and John asymmetry, Minkowski-center certificates, and the
//! scan of their ratio along the spindle family.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bodies::{self, BallHull, ConvexBody, HPolytope};
use crate::constructions::{rounding_body, Construction};
use crate::ellipsoid::{john_decomposition, john_verify, CONTACT_TOL};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Vector};
use crate::lp::{Cmp, LinearProgram, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymmetryMethod {
    ExactLp,
    Certificate,
    SampledLowerBound,
}

impl AsymmetryMethod {
    pub fn name(self) -> &'static str {
        match self {
            AsymmetryMethod::ExactLp => "exact-LP",
            AsymmetryMethod::Certificate => "certificate",
            AsymmetryMethod::SampledLowerBound => "sampled-lower-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryReport {
    pub value: f64,
    pub witness_center: Vector,
    pub binding_directions: Vec<Vector>,
    pub method: AsymmetryMethod,
}

/// Unit directions used when a body has no facet structure: the circle at
/// 4096 angles, a level-5 icosphere, or seeded random directions, plus the
/// coordinate axes and any `extra` directions.
pub fn probe_directions(n: usize, extra: &[Vector]) -> Vec<Vector> {
    let mut dirs = match n {
        1 => vec![Vector::from_vec(vec![1.0]), Vector::from_vec(vec![-1.0])],
        2 => linalg::circle_directions(4096),
        3 => linalg::icosphere(5),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..8000).map(|_| linalg::random_unit(&mut rng, n)).collect()
        }
    };
    for i in 0..n {
        dirs.push(linalg::unit(n, i));
        dirs.push(-linalg::unit(n, i));
    }
    dirs.extend(extra.iter().filter(|a| a.norm() > 0.0).map(|a| a.normalize()));
    dirs
}

fn facet_form(body: &ConvexBody) -> Result<(HPolytope, Vec<Vector>)> {
    let limit = |e: GeomError| match e {
        GeomError::DimensionTooLarge(m) => GeomError::RepresentationUnavailable(m),
        other => other,
    };
    let h = bodies::to_hpolytope(body).map_err(limit)?.normalized();
    let v = bodies::extreme_points(body).map_err(limit)?;
    Ok((h, v))
}

/// `min ρ` over `(d, ρ)` with `h_K(a) - a^T d - ρ h_K(-a) <= 0` on the given
/// rows `(a, h_K(a), h_K(-a))`; the center is `d/(1 + ρ)`.
fn covering_lp(n: usize, rows: &[(Vector, f64, f64)]) -> Result<(f64, Vector, Vec<usize>)> {
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::new(Sense::Minimize, obj);
    for (a, plus, minus) in rows {
        let mut row: Vec<f64> = a.iter().map(|x| -x).collect();
        row.push(-minus);
        lp.row(row, Cmp::Le, -plus);
    }
    lp.bound(n, 1.0 - 1e-9, f64::INFINITY);
    let sol = lp.solve()?;
    let rho = sol.value;
    let d = Vector::from_iterator(n, sol.x[..n].iter().copied());
    let center = &d / (1.0 + rho);
    let binding = rows
        .iter()
        .enumerate()
        .filter(|(_, (a, plus, minus))| (plus - a.dot(&d) - rho * minus).abs() <= 1e-8 * (1.0 + plus.abs()))
        .map(|(i, _)| i)
        .collect();
    Ok((rho, center, binding))
}

/// Minkowski asymmetry. Polytopes get the exact facet LP; ball hulls get
/// the LP restricted to [`probe_directions`] together with their contacts,
/// which is a lower bound.
pub fn minkowski_asymmetry(body: &ConvexBody) -> Result<AsymmetryReport> {
    match body {
        ConvexBody::Ball(b) => sampled_minkowski(b, &[]),
        _ => {
            let (h, verts) = facet_form(body)?;
            let rows: Vec<(Vector, f64, f64)> = h
                .halfspaces()
                .map(|(a, b)| (-a, bodies::vertex_support(&verts, &-a), b))
                .collect();
            let (value, center, binding) = covering_lp(body.dim(), &rows)?;
            Ok(AsymmetryReport {
                value,
                witness_center: center,
                binding_directions: binding.into_iter().map(|i| rows[i].0.clone()).collect(),
                method: AsymmetryMethod::ExactLp,
            })
        }
    }
}

/// Lower bound for a ball hull over the probe directions plus `extra`.
pub fn sampled_minkowski(b: &BallHull, extra: &[Vector]) -> Result<AsymmetryReport> {
    let mut more = b.contacts().to_vec();
    more.extend(extra.iter().cloned());
    let rows: Vec<(Vector, f64, f64)> = probe_directions(b.dim(), &more)
        .into_iter()
        .map(|a| {
            let plus = bodies::ballhull_support(b, &a);
            let minus = bodies::ballhull_support(b, &-&a);
            (a, plus, minus)
        })
        .collect();
    let (value, center, binding) = covering_lp(b.dim(), &rows)?;
    Ok(AsymmetryReport {
        value,
        witness_center: center,
        binding_directions: binding.into_iter().map(|i| rows[i].0.clone()).collect(),
        method: AsymmetryMethod::SampledLowerBound,
    })
}

/// Minkowski asymmetry of a construction: the exact LP for polytopes, and
/// for ball hulls the sampled bound upgraded to the attached certificate
/// when that certificate verifies.
pub fn construction_minkowski(c: &Construction) -> Result<AsymmetryReport> {
    let ConvexBody::Ball(b) = &c.body else {
        return minkowski_asymmetry(&c.body);
    };
    let extra = c
        .certificate
        .minkowski
        .as_ref()
        .map(|m| m.equality_directions.clone())
        .unwrap_or_default();
    let sampled = sampled_minkowski(b, &extra)?;
    if let Some(m) = &c.certificate.minkowski {
        let check = verify_minkowski_center(&c.body, &m.center, m.value, Some(&m.equality_directions))?;
        if check.pass && sampled.value <= m.value + 1e-7 {
            return Ok(AsymmetryReport {
                value: m.value,
                witness_center: m.center.clone(),
                binding_directions: m.equality_directions.clone(),
                method: AsymmetryMethod::Certificate,
            });
        }
    }
    Ok(sampled)
}

/// `min{ρ : K ⊂ -ρK}` for a body whose John ellipsoid is the unit ball.
pub fn john_asymmetry(body: &ConvexBody) -> Result<AsymmetryReport> {
    let decomp = john_decomposition(body, CONTACT_TOL)?;
    let rep = john_verify(&decomp, body);
    if !rep.pass {
        return Err(GeomError::NotInJohnPosition { residual: rep.max_residual() });
    }
    let n = body.dim();
    match body {
        ConvexBody::Ball(b) => {
            let mut value = 1.0f64;
            let mut witness = Vec::new();
            for p in b.apexes() {
                let g = bodies::ballhull_gauge(b, &-p)?;
                if g > value + 1e-12 {
                    witness = vec![p.normalize()];
                }
                value = value.max(g);
            }
            // cross-check: every direction ratio is a lower bound
            let probes = if n <= 3 { probe_directions(n, b.contacts()) } else { b.contacts().to_vec() };
            let lower = probes
                .iter()
                .map(|a| bodies::ballhull_support(b, a) / bodies::ballhull_support(b, &-a))
                .fold(1.0, f64::max);
            if lower > value + 1e-7 {
                return Err(GeomError::NoConvergence {
                    iterations: 0,
                    residual: lower - value,
                });
            }
            Ok(AsymmetryReport {
                value,
                witness_center: Vector::zeros(n),
                binding_directions: witness,
                method: AsymmetryMethod::Certificate,
            })
        }
        _ => {
            let (h, verts) = facet_form(body)?;
            let mut value = 1.0f64;
            let mut witness = Vec::new();
            for v in &verts {
                let g = bodies::h_gauge(&h, &-v);
                if g > value + 1e-12 {
                    witness = vec![v.normalize()];
                }
                value = value.max(g);
            }
            Ok(AsymmetryReport {
                value,
                witness_center: Vector::zeros(n),
                binding_directions: witness,
                method: AsymmetryMethod::ExactLp,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterReport {
    /// `max_a h_{K-c}(a) - s·h_{K-c}(-a)` over the checked directions.
    pub max_violation: f64,
    pub worst_direction: Vector,
    /// Directions where the ratio equals `s` within tolerance.
    pub equality_directions: Vec<Vector>,
    /// Smallest weight in a convex combination of the equality directions
    /// giving the origin; positive iff they positively span.
    pub spanning_margin: f64,
    pub pass: bool,
}

/// Checks `h_{K-c}(a) <= s·h_{K-c}(-a)` on probe, facet and certificate
/// directions, and that the equality directions positively span `R^n`.
pub fn verify_minkowski_center(body: &ConvexBody, c: &Vector, s: f64, equality: Option<&[Vector]>) -> Result<CenterReport> {
    let n = body.dim();
    let mut extra: Vec<Vector> = equality.map(|e| e.to_vec()).unwrap_or_default();
    match body {
        ConvexBody::Ball(b) => extra.extend(b.contacts().iter().cloned()),
        _ => {
            if let Ok(h) = bodies::to_hpolytope(body) {
                extra.extend(h.normalized().normals().iter().cloned());
            }
        }
    }
    let dirs = probe_directions(n, &extra);
    let verts = match body {
        ConvexBody::Ball(_) => Vec::new(),
        _ => bodies::extreme_points(body)?,
    };
    let hk = |a: &Vector| -> Result<f64> {
        Ok(match body {
            ConvexBody::Ball(b) => bodies::ballhull_support(b, a),
            _ => bodies::vertex_support(&verts, a),
        })
    };
    let mut worst = f64::NEG_INFINITY;
    let mut worst_dir = dirs[0].clone();
    let mut found = Vec::new();
    for a in &dirs {
        let plus = hk(a)? - a.dot(c);
        let minus = hk(&-a)? + a.dot(c);
        let gap = plus - s * minus;
        if gap > worst {
            worst = gap;
            worst_dir = a.clone();
        }
        if gap.abs() <= 1e-9 * (1.0 + plus.abs()) {
            found.push(a.clone());
        }
    }
    let eq: Vec<Vector> = match equality {
        Some(e) => e.iter().map(|a| a.normalize()).collect(),
        None => {
            let stride = found.len().div_ceil(256).max(1);
            found.into_iter().step_by(stride).collect()
        }
    };
    let eq_tight = eq.iter().all(|a| {
        let plus = hk(a).unwrap_or(f64::INFINITY) - a.dot(c);
        let minus = hk(&-a).unwrap_or(f64::INFINITY) + a.dot(c);
        (plus - s * minus).abs() <= 1e-8 * (1.0 + plus.abs())
    });
    let margin = if eq.len() > n && linalg::affine_rank(&eq, 1e-9) == n {
        positive_span_margin(&eq)?
    } else {
        0.0
    };
    let pass = worst <= 1e-9 && eq_tight && margin > 1e-9;
    Ok(CenterReport {
        max_violation: worst,
        worst_direction: worst_dir,
        equality_directions: eq,
        spanning_margin: margin,
        pass,
    })
}

/// `max t` with `Σ λ_i a_i = 0`, `Σ λ_i = 1`, `λ_i >= t`.
fn positive_span_margin(dirs: &[Vector]) -> Result<f64> {
    let m = dirs.len();
    let n = dirs[0].len();
    let mut obj = vec![0.0; m + 1];
    obj[m] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for j in 0..n {
        let mut row: Vec<f64> = dirs.iter().map(|a| a[j]).collect();
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

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub s: f64,
    pub john: f64,
    pub minkowski: f64,
    pub minkowski_method: AsymmetryMethod,
    /// The LP over probe and certificate directions, a lower bound on `s(K)`.
    pub minkowski_lower: f64,
    pub ratio: f64,
}

/// `s_J/s` along the spindle family for each `s` in the grid.
pub fn asymmetry_gap_scan(n: usize, grid: &[f64]) -> Result<Vec<GapRow>> {
    if n > 6 {
        return Err(GeomError::DimensionTooLarge(format!("gap scan supports n <= 6, got {n}")));
    }
    grid.par_iter()
        .map(|&s| {
            let c = rounding_body(n, s)?;
            let john = john_asymmetry(&c.body)?.value;
            let mk = construction_minkowski(&c)?;
            let ConvexBody::Ball(b) = &c.body else { unreachable!() };
            let extra = c.certificate.minkowski.as_ref().map(|m| m.equality_directions.clone()).unwrap_or_default();
            let lower = sampled_minkowski(b, &extra)?.value;
            Ok(GapRow {
                s,
                john,
                minkowski: mk.value,
                minkowski_method: mk.method,
                minkowski_lower: lower,
                ratio: john / mk.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{cube_h, cross_polytope_v, AffineMap};
    use crate::constructions::{mid_asym_body, regular_body, Position, RegularKind};
    use crate::linalg::Matrix;

    #[test]
    fn regular_values() {
        for n in 2..=4 {
            let cube: ConvexBody = cube_h(n, 1.0).into();
            assert!((minkowski_asymmetry(&cube).unwrap().value - 1.0).abs() < 1e-9);
            assert!((john_asymmetry(&cube).unwrap().value - 1.0).abs() < 1e-12);
            let cross: ConvexBody = cross_polytope_v(n, 1.0).into();
            assert!((minkowski_asymmetry(&cross).unwrap().value - 1.0).abs() < 1e-9);
            let t = regular_body(RegularKind::Simplex, n, Position::John).unwrap();
            let r = minkowski_asymmetry(&t.body).unwrap();
            assert!((r.value - n as f64).abs() < 1e-9);
            assert!(r.witness_center.norm() < 1e-9);
            assert!((john_asymmetry(&t.body).unwrap().value - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn affine_invariance() {
        let t = regular_body(RegularKind::Simplex, 3, Position::John).unwrap();
        let pts = bodies::extreme_points(&t.body).unwrap();
        let mut more = pts.clone();
        more.push(Vector::from_vec(vec![1.0, 2.0, 0.5]));
        more.push(Vector::from_vec(vec![-2.0, 0.3, 1.0]));
        let body: ConvexBody = bodies::VPolytope::new(more).unwrap().into();
        let base = minkowski_asymmetry(&body).unwrap().value;
        let map = AffineMap::new(
            Matrix::from_row_slice(3, 3, &[2.0, 0.3, -1.0, 0.0, 0.7, 0.2, 0.4, 0.0, 1.5]),
            Vector::from_vec(vec![3.0, -1.0, 2.0]),
        )
        .unwrap();
        let moved = bodies::transform(&body, &map).unwrap();
        assert!((minkowski_asymmetry(&moved).unwrap().value - base).abs() < 1e-7);
    }

    #[test]
    fn spindle_john_asymmetry() {
        for n in 2..=4 {
            for s in [1.5, 2.0, n as f64] {
                if s > n as f64 {
                    continue;
                }
                let c = rounding_body(n, s).unwrap();
                let r = john_asymmetry(&c.body).unwrap();
                assert!((r.value - s).abs() < 1e-7, "n={n} s={s} got {}", r.value);
            }
        }
        let c = mid_asym_body(4, 2, 1.75).unwrap();
        assert!((john_asymmetry(&c.body).unwrap().value - 1.75).abs() < 1e-7);
        let c = mid_asym_body(3, 1, 1.8).unwrap();
        assert!((john_asymmetry(&c.body).unwrap().value - 1.8).abs() < 1e-7);
        for s in [2.5, 3.0] {
            let c = crate::constructions::asym_body(3, 1, s).unwrap();
            assert!((john_asymmetry(&c.body).unwrap().value - s).abs() < 1e-9);
        }
    }

    #[test]
    fn minkowski_center_of_spindle() {
        let c = rounding_body(3, 2.0).unwrap();
        let m = c.certificate.minkowski.clone().unwrap();
        let rep = verify_minkowski_center(&c.body, &m.center, m.value, Some(&m.equality_directions)).unwrap();
        assert!(rep.pass, "{rep:?}");
        let rep = verify_minkowski_center(&c.body, &Vector::zeros(3), m.value, Some(&m.equality_directions)).unwrap();
        assert!(!rep.pass);
        assert!(rep.max_violation > 0.1);
        let cube: ConvexBody = cube_h(3, 1.0).into();
        assert!(verify_minkowski_center(&cube, &Vector::zeros(3), 1.0, None).unwrap().pass);
    }

    #[test]
    fn gap_scan() {
        let rows = asymmetry_gap_scan(4, &[1.0, 4.0]).unwrap();
        assert!((rows[0].ratio - 1.0).abs() < 1e-7);
        assert!((rows[1].ratio - 2.5).abs() < 1e-6, "{:?}", rows[1]);
        let rows = asymmetry_gap_scan(3, &[2.0]).unwrap();
        assert!((rows[0].ratio - 1.5).abs() < 1e-6);
        assert!((rows[0].minkowski_lower - 4.0 / 3.0).abs() < 1e-6, "{:?}", rows[0]);
        assert_eq!(rows[0].minkowski_method, AsymmetryMethod::Certificate);
    }

    #[test]
    fn minkowski_never_exceeds_john() {
        for (n, k, s) in [(3, 1, 1.4), (3, 1, 2.5), (4, 2, 1.6)] {
            let c = crate::constructions::asym_body(n, k, s).unwrap();
            let mk = construction_minkowski(&c).unwrap().value;
            let j = john_asymmetry(&c.body).unwrap().value;
            assert!(mk <= j + 1e-9 && mk >= 1.0 - 1e-9);
        }
    }
}
