//! Bodies in John position with prescribed John asymmetry that carry large
//! inscribed k-balls, and the spindle separating John and Minkowski
//! asymmetry.

use super::polytope::construction_polytope;
use super::scalar::{mu, s_threshold, tau};
use super::{Certificate, Construction, Enclosing, MinkowskiCertificate, Position, ScalarParams};
use crate::bodies::{BallHull, HPolytope, KEllipsoid};
use crate::ellipsoid::JohnDecomposition;
use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};

const EDGE: f64 = 1e-12;

fn check_range(name: &str, s: f64, lo: f64, hi: f64) -> Result<()> {
    if s >= lo - EDGE && s <= hi + EDGE {
        Ok(())
    } else {
        Err(GeomError::ParameterOutOfRange(format!("{name} needs s in [{lo}, {hi}], got {s}")))
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 || k == 0 || k >= n {
        return Err(GeomError::ParameterOutOfRange(format!("need 1 <= k < n, got n={n}, k={k}")));
    }
    Ok(())
}

fn params(n: usize, k: Option<usize>, s: f64) -> ScalarParams {
    ScalarParams { k, s: Some(s), ..ScalarParams::new(n) }
}

/// `T ∩ (-sT)` for the regular simplex `T` with inradius 1, and the inscribed
/// ball of the k-face spanned by its first `k + 1` vertices.
pub fn high_asym_body(n: usize, k: usize, s: f64) -> Result<Construction> {
    check_nk(n, k)?;
    check_range("high-asym", s, s_threshold(n, k)?, n as f64)?;
    let dirs = linalg::simplex_directions(n);
    let nf = n as f64;
    let mut normals: Vec<Vector> = dirs.iter().map(|y| -y).collect();
    let mut offsets = vec![1.0; n + 1];
    normals.extend(dirs.iter().cloned());
    offsets.extend(std::iter::repeat(s).take(n + 1));
    let body = HPolytope::new(normals, offsets)?;

    let face: Vec<Vector> = dirs[..=k].iter().map(|y| y * nf).collect();
    let center = linalg::centroid(&face);
    let edges: Vec<Vector> = face[1..].iter().map(|x| x - &face[0]).collect();
    let basis = linalg::columns(&linalg::orthonormal_basis(&edges, 1e-10));
    let radius = (nf * (nf + 1.0) / (k * (k + 1)) as f64).sqrt();

    let contacts: Vec<Vector> = dirs.iter().map(|y| -y).collect();
    let weights = vec![nf / (nf + 1.0); n + 1];
    let mut cert = Certificate::new(Position::John, JohnDecomposition { contacts, weights });
    cert.kball = Some(KEllipsoid::ball(center, basis, radius)?);
    cert.inner_points = face;
    cert.john_asymmetry = Some(s);
    Ok(Construction {
        family: "high-asym",
        params: params(n, Some(k), s),
        body: body.into(),
        certificate: cert,
    })
}

/// `conv(B^n ∪ {c ± ρe_j, -c/s ± (ρ/s)e_j : j < k})` with `c` along the last
/// axis, together with its k-ball `c + (ρ/√k)(B^n ∩ span{e_0..e_{k-1}})`.
fn spindle(n: usize, k: usize, s: f64, rho: f64, offset: f64, j: Vec<usize>, tau: f64, family: &'static str) -> Result<Construction> {
    let c = linalg::unit(n, n - 1) * offset;
    let mut apexes = Vec::with_capacity(4 * k);
    let mut inner = Vec::with_capacity(2 * k);
    for i in 0..k {
        let e = linalg::unit(n, i);
        for sign in [1.0, -1.0] {
            let p = &c + &e * (sign * rho);
            apexes.push(p.clone());
            apexes.push(-&p / s);
            inner.push(p);
        }
    }
    let (polytope, decomposition) = construction_polytope(&j, tau, n)?;
    let body = BallHull::new(Vector::zeros(n), 1.0, apexes)?.with_contacts(decomposition.contacts.clone());
    let basis = Matrix::from_fn(n, k, |r, q| if r == q { 1.0 } else { 0.0 });
    let mut cert = Certificate::new(Position::John, decomposition);
    cert.kball = Some(KEllipsoid::ball(c, basis, rho / (k as f64).sqrt())?);
    cert.enclosing = Some(Enclosing { j, tau, polytope });
    cert.inner_points = inner;
    cert.john_asymmetry = Some(s);
    Ok(Construction {
        family,
        params: ScalarParams {
            tau: Some(tau),
            j: cert.enclosing.as_ref().map(|e| e.j.clone()),
            ..params(n, Some(k), s)
        },
        body: body.into(),
        certificate: cert,
    })
}

/// Middle regime `s ∈ [1 + 2/n, s_{n,k}]`.
pub fn mid_asym_body(n: usize, k: usize, s: f64) -> Result<Construction> {
    check_nk(n, k)?;
    let nf = n as f64;
    check_range("mid-asym", s, 1.0 + 2.0 / nf, s_threshold(n, k)?)?;
    let rho = (nf * (s + 1.0) / 2.0).sqrt();
    let offset = (nf * (s - 1.0) / 2.0).max(0.0).sqrt();
    let tau = (2.0 / (nf * (s - 1.0))).sqrt().min(1.0);
    spindle(n, k, s, rho, offset, (k..n - 1).collect(), tau, "mid-asym")
}

/// Small regime `s ∈ [1, 1 + 2/n]`.
pub fn small_asym_body(n: usize, k: usize, s: f64) -> Result<Construction> {
    check_nk(n, k)?;
    let nf = n as f64;
    check_range("small-asym", s, 1.0, 1.0 + 2.0 / nf)?;
    let m = mu(n, k, s)?.clamp(nf, nf + 1.0);
    let offset = (m - nf).max(0.0).sqrt();
    spindle(n, k, s, m.sqrt(), offset, (0..k).collect(), tau(n, k, m)?, "small-asym")
}

/// Whichever of the three regimes contains `s`; the small body is used at
/// `s = 1 + 2/n`.
pub fn asym_body(n: usize, k: usize, s: f64) -> Result<Construction> {
    check_nk(n, k)?;
    let nf = n as f64;
    if s <= 1.0 + 2.0 / nf {
        small_asym_body(n, k, s)
    } else if s <= s_threshold(n, k)? {
        mid_asym_body(n, k, s)
    } else {
        high_asym_body(n, k, s)
    }
}

/// `conv(B^n ∪ {-√(ns) v, √(n/s) v})` for `v = e_{n-1}`, with John
/// asymmetry `s` and Minkowski asymmetry `2s/(s+1)`.
pub fn rounding_body(n: usize, s: f64) -> Result<Construction> {
    if n < 2 {
        return Err(GeomError::ParameterOutOfRange(format!("n must be at least 2, got {n}")));
    }
    let nf = n as f64;
    check_range("rounding", s, 1.0, nf)?;
    let v = linalg::unit(n, n - 1);
    let apexes = vec![&v * -(nf * s).sqrt(), &v * (nf / s).sqrt()];
    let j: Vec<usize> = (0..n - 1).collect();
    let tau = (s / nf).sqrt();
    let (polytope, decomposition) = construction_polytope(&j, tau, n)?;
    let body = BallHull::new(Vector::zeros(n), 1.0, apexes)?.with_contacts(decomposition.contacts.clone());

    let along = 1.0 / (nf * s).sqrt();
    let across = (1.0 - along * along).max(0.0).sqrt();
    let mut equality = vec![-&v];
    for w in linalg::simplex_directions(n - 1) {
        let mut a = &v * along;
        for i in 0..n - 1 {
            a[i] = across * w[i];
        }
        equality.push(a);
    }
    let mut cert = Certificate::new(Position::John, decomposition);
    cert.enclosing = Some(Enclosing { j: j.clone(), tau, polytope });
    cert.john_asymmetry = Some(s);
    cert.minkowski = Some(MinkowskiCertificate {
        center: &v * (-(nf * s).sqrt() * (s - 1.0) / (3.0 * s + 1.0)),
        value: 2.0 * s / (s + 1.0),
        equality_directions: equality,
    });
    Ok(Construction {
        family: "rounding",
        params: ScalarParams {
            tau: Some(tau),
            j: Some(j),
            ..params(n, None, s)
        },
        body: body.into(),
        certificate: cert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{self, ConvexBody};
    use crate::ellipsoid::john_verify;

    fn check_kball_inside(c: &Construction) {
        let e = c.kball().unwrap();
        let f = e.carrier();
        let r = e.ball_radius(1e-12).unwrap();
        // the k-ball sits in the hull of the inner points: check in carrier coordinates
        let pts: Vec<Vector> = c.certificate.inner_points.iter().map(|p| f.coords(&(p - e.center()))).collect();
        for p in &c.certificate.inner_points {
            assert!((f.project(&(p - e.center())) - (p - e.center())).norm() < 1e-9);
        }
        let dirs: Vec<Vector> = match f.k() {
            1 => vec![Vector::from_vec(vec![1.0]), Vector::from_vec(vec![-1.0])],
            2 => linalg::circle_directions(64),
            _ => (0..200)
                .map(|i| {
                    use rand::SeedableRng;
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(i);
                    linalg::random_unit(&mut rng, f.k())
                })
                .collect(),
        };
        for a in dirs {
            assert!(bodies::vertex_support(&pts, &a) >= r - 1e-9);
        }
        for p in &c.certificate.inner_points {
            assert!(bodies::contains(&c.body, p, 1e-9).unwrap());
        }
    }

    #[test]
    fn high_body_examples() {
        for (n, k) in [(3, 1), (4, 2), (5, 1)] {
            let c = high_asym_body(n, k, n as f64).unwrap();
            let nf = n as f64;
            let e = c.kball().unwrap();
            assert!((e.ball_radius(1e-12).unwrap() - (nf * (nf + 1.0) / (k * (k + 1)) as f64).sqrt()).abs() < 1e-12);
            assert!((e.center().norm_squared() - nf * (nf - k as f64) / (k + 1) as f64).abs() < 1e-10);
            assert!(john_verify(&c.certificate.decomposition, &c.body).pass);
            check_kball_inside(&c);
        }
        let (n, k) = (3, 1);
        let s = s_threshold(n, k).unwrap();
        let c = high_asym_body(n, k, s).unwrap();
        let ConvexBody::H(p) = &c.body else { panic!() };
        let e = c.kball().unwrap();
        let proj = e.basis() * e.basis().transpose();
        let r = e.ball_radius(1e-12).unwrap();
        let worst = p
            .halfspaces()
            .skip(n + 1)
            .map(|(a, b)| b - a.dot(e.center()) - r * (&proj * a).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(worst.abs() < 1e-9, "{worst}");
        assert!(high_asym_body(3, 1, 2.0).is_err());
    }

    #[test]
    fn spindle_examples() {
        let c = mid_asym_body(4, 2, 1.5).unwrap();
        assert!((c.kball().unwrap().ball_radius(1e-12).unwrap() - 2.5f64.sqrt()).abs() < 1e-12);
        let c = mid_asym_body(4, 2, 1.5).unwrap();
        check_kball_inside(&c);
        let c = mid_asym_body(3, 1, 1.0 + 2.0 / 3.0).unwrap();
        assert!((c.kball().unwrap().center().norm() - 1.0).abs() < 1e-12);

        let c = small_asym_body(3, 2, 1.0).unwrap();
        assert!(c.kball().unwrap().center().norm() < 1e-12);
        assert!((c.kball().unwrap().ball_radius(1e-12).unwrap() - 1.5f64.sqrt()).abs() < 1e-12);
        let c = small_asym_body(3, 2, 1.0 + 2.0 / 3.0).unwrap();
        assert!((c.kball().unwrap().ball_radius(1e-12).unwrap() * 2f64.sqrt() - 2.0).abs() < 1e-12);
        check_kball_inside(&c);
        assert!(mid_asym_body(3, 1, 1.5).is_err());
        assert!(small_asym_body(3, 1, 1.7).is_err());
    }

    #[test]
    fn regimes_agree_at_the_boundary() {
        for (n, k) in [(3, 1), (4, 2), (4, 3)] {
            let s = 1.0 + 2.0 / n as f64;
            let a = mid_asym_body(n, k, s).unwrap();
            let b = small_asym_body(n, k, s).unwrap();
            let (ConvexBody::Ball(x), ConvexBody::Ball(y)) = (&a.body, &b.body) else { panic!() };
            assert_eq!(x.apexes().len(), y.apexes().len());
            for p in x.apexes() {
                assert!(y.apexes().iter().any(|q| (p - q).norm() < 1e-8));
            }
        }
    }

    #[test]
    fn every_family_is_in_john_position() {
        for n in 2..=5 {
            for k in 1..n {
                let lo = s_threshold(n, k).unwrap();
                for i in 0..=6 {
                    let s = 1.0 + (n as f64 - 1.0) * i as f64 / 6.0;
                    let c = asym_body(n, k, s).unwrap();
                    let rep = john_verify(&c.certificate.decomposition, &c.body);
                    assert!(rep.pass, "n={n} k={k} s={s} {rep:?}");
                    if s > lo {
                        assert_eq!(c.family, "high-asym");
                    }
                }
            }
            for s in [1.0, 1.5, n as f64] {
                let c = rounding_body(n, s).unwrap();
                assert!(john_verify(&c.certificate.decomposition, &c.body).pass);
                assert!((bodies::max_norm(&c.body).unwrap() - (n as f64 * s).sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rounding_equality_directions_positively_span() {
        let c = rounding_body(3, 2.0).unwrap();
        let m = c.certificate.minkowski.as_ref().unwrap();
        assert_eq!(m.equality_directions.len(), 4);
        assert!(m.equality_directions.iter().all(|a| (a.norm() - 1.0).abs() < 1e-12));
        let origin = Vector::zeros(3);
        assert!(bodies::hull_distance(&m.equality_directions, &origin).unwrap() < 1e-12);
    }
}
