//! Convex bodies in three representations and the basic queries on them.

mod enumerate;
mod ops;
mod types;

pub use enumerate::{facets_of, vertices_of, MAX_ENUM_DIM, MAX_ENUM_ROWS};
pub use ops::{
    ballhull_gauge, ballhull_support, contains, diameter, extreme_points, gauge, h_gauge, hull_distance, max_norm,
    origin_depth_h, polar, polar_of_h, project, support, to_hpolytope, to_vpolytope, transform, transform_h,
    vertex_support,
};
pub use types::{AffineMap, BallHull, ConvexBody, Ellipsoid, HPolytope, KEllipsoid, Subspace, VPolytope};

use crate::linalg::{unit, Vector};

/// `[-h, h]^n` in facet form.
pub fn cube_h(n: usize, h: f64) -> HPolytope {
    let mut normals = Vec::with_capacity(2 * n);
    for i in 0..n {
        normals.push(unit(n, i));
        normals.push(-unit(n, i));
    }
    HPolytope::new_unchecked(normals, vec![h; 2 * n]).expect("well-formed cube")
}

/// `[-h, h]^n` by its vertices.
pub fn cube_v(n: usize, h: f64) -> VPolytope {
    let pts = (0..1usize << n)
        .map(|mask| Vector::from_fn(n, |i, _| if mask >> i & 1 == 1 { h } else { -h }))
        .collect();
    VPolytope::new(pts).expect("full-dimensional cube")
}

/// `conv{±h e_i}`.
pub fn cross_polytope_v(n: usize, h: f64) -> VPolytope {
    let pts = (0..n).flat_map(|i| [unit(n, i) * h, unit(n, i) * -h]).collect();
    VPolytope::new(pts).expect("full-dimensional cross-polytope")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_unit, simplex_directions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn support_examples() {
        let cube: ConvexBody = cube_v(2, 1.0).into();
        assert_eq!(support(&cube, &Vector::from_vec(vec![1.0, 1.0])).unwrap(), 2.0);
        let hull: ConvexBody = BallHull::new(Vector::zeros(2), 1.0, vec![Vector::from_vec(vec![3.0, 0.0])])
            .unwrap()
            .into();
        assert_eq!(support(&hull, &Vector::from_vec(vec![0.0, 1.0])).unwrap(), 1.0);
        let sq_h: ConvexBody = cube_h(2, 1.0).into();
        let e1 = Vector::from_vec(vec![1.0, 0.0]);
        let (sh, sv) = (support(&sq_h, &e1).unwrap(), support(&cube, &e1).unwrap());
        assert!((sh - 1.0).abs() < 1e-10 && (sh - sv).abs() < 1e-10);
    }

    #[test]
    fn representations_agree_on_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4 {
            let pairs: Vec<(ConvexBody, ConvexBody)> = vec![
                (cube_v(n, 1.0).into(), cube_h(n, 1.0).into()),
                {
                    let v = VPolytope::new(simplex_directions(n)).unwrap();
                    let h = facets_of(&v).unwrap();
                    (v.into(), h.into())
                },
                {
                    let v = cross_polytope_v(n, 1.0);
                    let h = facets_of(&v).unwrap();
                    (v.into(), h.into())
                },
            ];
            for (v, h) in &pairs {
                for _ in 0..1000 {
                    let a = random_unit(&mut rng, n);
                    let (sv, sh) = (support(v, &a).unwrap(), support(h, &a).unwrap());
                    assert!((sv - sh).abs() < 1e-10, "n={n}: {sv} vs {sh}");
                }
            }
        }
    }

    #[test]
    fn gauge_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ball: ConvexBody = BallHull::unit_ball(3).into();
        for _ in 0..20 {
            let x = crate::linalg::random_gaussian(&mut rng, 3);
            assert!((gauge(&ball, &x).unwrap() - x.norm()).abs() < 1e-9);
        }
        let mut x = Vector::zeros(4);
        x[0] = 2.0;
        assert_eq!(gauge(&cube_h(4, 1.0).into(), &x).unwrap(), 2.0);
        assert!((gauge(&cube_v(4, 1.0).into(), &x).unwrap() - 2.0).abs() < 1e-12);
        let shifted = HPolytope::new(vec![unit(1, 0), -unit(1, 0)], vec![2.0, -1.0]).unwrap();
        assert!(matches!(
            gauge(&shifted.into(), &unit(1, 0)),
            Err(crate::error::GeomError::OriginNotInterior { .. })
        ));
    }

    #[test]
    fn ballhull_gauge_against_cone_geometry() {
        // conv(B^2 ∪ {(2,0)}): the tangent from (2,0) touches at angle 60°
        let b = BallHull::new(Vector::zeros(2), 1.0, vec![Vector::from_vec(vec![2.0, 0.0])]).unwrap();
        let body: ConvexBody = b.into();
        assert!((gauge(&body, &Vector::from_vec(vec![2.0, 0.0])).unwrap() - 1.0).abs() < 1e-10);
        assert!((gauge(&body, &Vector::from_vec(vec![-3.0, 0.0])).unwrap() - 3.0).abs() < 1e-10);
        // the tangent segment from (2,0) to (1/2, √3/2) crosses the 45° ray at
        // distance t with t(cos45 + √3 sin45) = 2
        let t = 2.0 / (0.5f64.sqrt() * (1.0 + 3f64.sqrt()));
        let x = Vector::from_vec(vec![0.5f64.sqrt(), 0.5f64.sqrt()]);
        assert!((gauge(&body, &x).unwrap() - 1.0 / t).abs() < 1e-10);
    }

    #[test]
    fn projection_examples() {
        let ball: ConvexBody = BallHull::unit_ball(3).into();
        let xy = Subspace::coordinate(3, &[0, 1]).unwrap();
        match project(&ball, &xy).unwrap() {
            ConvexBody::Ball(b) => assert!(b.is_unit_ball_at_origin() && b.apexes().is_empty()),
            other => panic!("unexpected {other:?}"),
        }
        let cross: ConvexBody = cross_polytope_v(3, 1.0).into();
        let proj = to_vpolytope(&project(&cross, &xy).unwrap()).unwrap();
        let hull = facets_of(&proj).unwrap();
        assert_eq!(hull.len(), 4);
        assert!(hull.offsets().iter().all(|b| (b - 0.5f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn project_then_support_is_restricted_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let body: ConvexBody = cube_h(4, 1.0).into();
        let q = crate::linalg::orthonormal_basis(&[random_unit(&mut rng, 4), random_unit(&mut rng, 4)], 1e-9);
        let f = Subspace::new(crate::linalg::columns(&q)).unwrap();
        let proj = project(&body, &f).unwrap();
        for _ in 0..50 {
            let a = random_unit(&mut rng, 2);
            let lhs = support(&proj, &a).unwrap();
            let rhs = support(&body, &f.embed(&a)).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn polar_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=4 {
            let p = polar(&cube_v(n, 1.0)).unwrap();
            assert_eq!(p.len(), 1 << n);
            let cross: ConvexBody = cross_polytope_v(n, 1.0).into();
            for _ in 0..20 {
                let x = random_unit(&mut rng, n);
                let a = h_gauge(&p, &x);
                let b = gauge(&cross, &x).unwrap();
                assert!((a - b).abs() < 1e-9);
            }
        }
        let diamond = cross_polytope_v(2, 2f64.sqrt());
        let sq = polar(&diamond).unwrap();
        let half = 0.5f64.sqrt();
        let expect: ConvexBody = cube_h(2, half).into();
        for _ in 0..20 {
            let a = random_unit(&mut rng, 2);
            let s1 = support(&sq.clone().into(), &a).unwrap();
            assert!((s1 - support(&expect, &a).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn polar_gauge_is_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..5 {
            let n = 2 + trial % 3;
            let mut pts: Vec<Vector> = (0..12).map(|_| random_unit(&mut rng, n) * 1.5).collect();
            pts.extend(simplex_directions(n).into_iter().map(|v| v * 0.5));
            let p = VPolytope::new(pts).unwrap();
            let pol: ConvexBody = polar(&p).unwrap().into();
            let body: ConvexBody = p.into();
            for _ in 0..100 {
                let a = random_unit(&mut rng, n);
                let g = gauge(&pol, &a).unwrap();
                let s = support(&body, &a).unwrap();
                assert!((g - s).abs() < 1e-9, "{g} vs {s}");
            }
        }
    }

    #[test]
    fn degenerate_inputs() {
        let flat = vec![
            Vector::from_vec(vec![0.0, 0.0]),
            Vector::from_vec(vec![1.0, 1.0]),
            Vector::from_vec(vec![2.0, 2.0]),
        ];
        assert!(VPolytope::new(flat).is_err());
        let open = HPolytope::new(vec![unit(2, 0)], vec![1.0]);
        assert_eq!(open.unwrap_err(), crate::error::GeomError::Unbounded);
    }
}
