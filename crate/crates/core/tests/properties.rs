use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use convex_radii::affine::{general_dr_lower, grunbaum_upper_bound, minimize_dr_affine, radial_profile, SearchOptions};
use convex_radii::asymmetry::{john_asymmetry, minkowski_asymmetry};
use convex_radii::bodies::{
    self, cross_polytope_v, cube_h, cube_v, AffineMap, ConvexBody, HPolytope, Subspace, VPolytope,
};
use convex_radii::constructions::{
    mid_asym_body, mu, outer_family, small_asym_body, tau, tau_equation, tau_other_root, xi_star,
};
use convex_radii::ellipsoid::{mvee, normalize_john, DEFAULT_EPS};
use convex_radii::harness::{body_json, parse_body, random_john_body, to_string, BodyFile};
use convex_radii::linalg::{self, Matrix, Vector};
use convex_radii::radii::outer_kradius;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_map(seed: u64, n: usize) -> AffineMap {
    let mut r = rng(seed);
    let mut m = Matrix::identity(n, n);
    for v in m.iter_mut() {
        *v += 0.4 * linalg::random_gaussian(&mut r, 1)[0];
    }
    AffineMap::new(m, linalg::random_gaussian(&mut r, n) * 0.3).unwrap()
}

fn ellipsoid_log_volume(e: &bodies::Ellipsoid) -> f64 {
    e.semiaxes().iter().map(|a| a.ln()).sum()
}

fn quick() -> SearchOptions {
    SearchOptions { restarts: 4, seed: 3, max_iters: 1500 }
}

fn few(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(few(24))]

    #[test]
    fn support_agrees_across_representations(n in 2usize..=4, seed in any::<u64>()) {
        let a = linalg::random_gaussian(&mut rng(seed), n);
        let cube_v: ConvexBody = cube_v(n, 1.0).into();
        let cube_h: ConvexBody = cube_h(n, 1.0).into();
        assert_abs_diff_eq!(bodies::support(&cube_v, &a).unwrap(), bodies::support(&cube_h, &a).unwrap(), epsilon = 1e-10);
        let cross = cross_polytope_v(n, 1.0);
        let cross_h: ConvexBody = bodies::facets_of(&cross).unwrap().into();
        assert_abs_diff_eq!(bodies::support(&cross.into(), &a).unwrap(), bodies::support(&cross_h, &a).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn gauge_is_polar_support(n in 2usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let pts: Vec<Vector> = (0..n + 4).map(|_| linalg::random_gaussian(&mut r, n)).collect();
        let mut pts = pts;
        pts.extend((0..n).flat_map(|i| [linalg::unit(n, i) * 0.2, linalg::unit(n, i) * -0.2]));
        let v = VPolytope::new(pts).unwrap();
        let polar: ConvexBody = bodies::polar(&v).unwrap().into();
        let x = linalg::random_gaussian(&mut r, n);
        assert_abs_diff_eq!(bodies::gauge(&v.into(), &x).unwrap(), bodies::support(&polar, &x).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn projection_support_restricts(n in 3usize..=4, k in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let body: ConvexBody = VPolytope::new((0..n + 3).map(|_| linalg::random_gaussian(&mut r, n)).collect()).unwrap().into();
        let f = Subspace::span(&(0..k).map(|_| linalg::random_gaussian(&mut r, n)).collect::<Vec<_>>()).unwrap();
        let a = linalg::random_gaussian(&mut r, k);
        let proj = bodies::project(&body, &f).unwrap();
        assert_abs_diff_eq!(bodies::support(&proj, &a).unwrap(), bodies::support(&body, &f.embed(&a)).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn john_normalization_is_idempotent(n in 2usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let body: ConvexBody = VPolytope::new((0..n + 3).map(|_| linalg::random_gaussian(&mut r, n)).collect()).unwrap().into();
        let (once, _) = normalize_john(&body).unwrap();
        let (_, again) = normalize_john(&once).unwrap();
        for sv in linalg::singular_values(again.map.linear()) {
            assert_abs_diff_eq!(sv, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn mvee_volume_is_monotone(n in 2usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut pts: Vec<Vector> = (0..n + 3).map(|_| linalg::random_gaussian(&mut r, n)).collect();
        let before = mvee(&pts, DEFAULT_EPS).unwrap();
        pts.push(before.center().clone() + linalg::random_gaussian(&mut r, n) * 1e-3);
        let after = mvee(&pts, DEFAULT_EPS).unwrap();
        prop_assert!(ellipsoid_log_volume(&after) <= ellipsoid_log_volume(&before) + 1e-6);
    }

    #[test]
    fn asymmetries_are_ordered_and_bounded(n in 2usize..=4, seed in any::<u64>()) {
        let b = random_john_body(n, 1 + (seed % 5) as usize, seed).unwrap();
        let s = minkowski_asymmetry(&b.body).unwrap().value;
        let sj = john_asymmetry(&b.body).unwrap().value;
        let nf = n as f64;
        prop_assert!(s >= 1.0 - 1e-9 && s <= nf + 1e-9);
        prop_assert!(sj >= 1.0 - 1e-9 && sj <= nf + 1e-7);
        prop_assert!(s <= sj + 1e-7, "s = {s}, s_J = {sj}");
    }

    #[test]
    fn rounding_proposition(n in 2usize..=4, seed in any::<u64>()) {
        let b = random_john_body(n, 1 + (seed % 5) as usize, seed).unwrap();
        let sj = john_asymmetry(&b.body).unwrap().value;
        let rho = bodies::max_norm(&b.body).unwrap();
        prop_assert!(rho >= sj - 1e-7 && rho <= (n as f64 * sj).sqrt() + 1e-7);
    }

    #[test]
    fn minkowski_asymmetry_is_affine_invariant(n in 2usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let body: ConvexBody = VPolytope::new((0..n + 3).map(|_| linalg::random_gaussian(&mut r, n)).collect()).unwrap().into();
        let moved = bodies::transform(&body, &random_map(seed, n)).unwrap();
        assert_abs_diff_eq!(minkowski_asymmetry(&body).unwrap().value, minkowski_asymmetry(&moved).unwrap().value, epsilon = 1e-7);
    }

    #[test]
    fn mu_increases_and_tau_solves(n in 2usize..=8, kk in 0usize..7, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let k = 1 + kk % (n - 1);
        let nf = n as f64;
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assume!(hi - lo > 1e-6);
        let (s1, s2) = (1.0 + 2.0 / nf * lo, 1.0 + 2.0 / nf * hi);
        let (m1, m2) = (mu(n, k, s1).unwrap(), mu(n, k, s2).unwrap());
        prop_assert!(m2 > m1);
        let t = tau(n, k, m2).unwrap();
        prop_assert!(tau_equation(n, k, m2, t).abs() <= 1e-10);
        prop_assert!(tau_other_root(n, k, m2).unwrap() < 0.0);
        prop_assert!(((s2 - 1.0) * t - 2.0 / nf * (m2 - nf).max(0.0).sqrt()).abs() <= 1e-10);
    }

    #[test]
    fn maximizer_lies_strictly_inside(s in 1.0001f64..1.9999) {
        let x = xi_star(s).unwrap();
        prop_assert!(x > s && x < (2.0 * s).sqrt());
    }

    #[test]
    fn jung_consistency(m in 3usize..9, seed in any::<u64>()) {
        let mut r = rng(seed);
        let body: ConvexBody = VPolytope::new((0..m).map(|_| linalg::random_gaussian(&mut r, 2)).collect()).unwrap().into();
        let p = radial_profile(&body, None).unwrap();
        prop_assert!(p.big_r / p.d <= (2.0f64 / 6.0).sqrt() + 1e-9);
        prop_assert!(p.consistent(1e-9));
    }

    #[test]
    fn regular_triangle_minimizes_diameter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tri: ConvexBody = VPolytope::new((0..3).map(|_| linalg::random_gaussian(&mut r, 2)).collect()).unwrap().into();
        let p = radial_profile(&tri, None).unwrap();
        // the regular triangle with inradius 1 has diameter 2√3
        prop_assert!(p.d / p.r >= 2.0 * 3f64.sqrt() - 1e-4);
    }

    #[test]
    fn body_files_round_trip(n in 2usize..=4, seed in any::<u64>()) {
        let b = random_john_body(n, 1 + (seed % 5) as usize, seed).unwrap();
        let f = BodyFile::bare(b.body);
        prop_assert_eq!(parse_body(&to_string(&body_json(&f))).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(few(6))]

    #[test]
    fn outer_radius_is_constant_along_family(n in 2usize..=4, kk in 0usize..3, seed in any::<u64>()) {
        let k = 1 + kk % (n - 1);
        let f = Subspace::coordinate(n, &(0..k).collect::<Vec<_>>()).unwrap();
        let t_max = if convex_radii::constructions::simplex_alignment_exists(n, k) { 2.0 } else { 1.0 };
        let t = (seed % 1000) as f64 / 999.0 * t_max;
        let r = outer_kradius(&outer_family(n, k, t).unwrap().body, &f).unwrap();
        assert_abs_diff_eq!(r.ball.measured, (k as f64 / n as f64).sqrt(), epsilon = 1e-6);
        // equality only for centered enclosing ellipsoids
        if r.volume.slack.abs() <= 1e-7 {
            prop_assert!(r.mvee_center_norm <= 1e-6);
        }
    }

    #[test]
    fn general_sandwich(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k: ConvexBody = VPolytope::new((0..5).map(|_| linalg::random_gaussian(&mut r, 2)).collect()).unwrap().into();
        let c: ConvexBody = VPolytope::new((0..4).map(|_| linalg::random_gaussian(&mut r, 2)).collect()).unwrap().into();
        let dr = minimize_dr_affine(&k, Some(&c), quick()).unwrap();
        let lower = general_dr_lower(minkowski_asymmetry(&k).unwrap().value, minkowski_asymmetry(&c).unwrap().value);
        let upper = grunbaum_upper_bound(&k, Some(&c), quick()).unwrap().rho;
        prop_assert!(dr.best_ratio >= lower - 1e-6, "{} < {lower}", dr.best_ratio);
        prop_assert!(dr.best_ratio <= upper + 1e-6, "{} > {upper}", dr.best_ratio);
        prop_assert!((1.0 - 1e-9..=2.0 + 1e-9).contains(&dr.best_ratio));
    }
}

#[test]
fn regimes_meet_at_the_boundary() {
    for n in 2..=5 {
        for k in 1..n {
            let s = 1.0 + 2.0 / n as f64;
            let mid = match mid_asym_body(n, k, s) {
                Ok(c) => c,
                // the middle regime is empty for k = n - 1
                Err(_) => continue,
            };
            let small = small_asym_body(n, k, s).unwrap();
            let mut r = rng(n as u64 * 10 + k as u64);
            for _ in 0..200 {
                let a = linalg::random_unit(&mut r, n);
                let (x, y) = (bodies::support(&mid.body, &a).unwrap(), bodies::support(&small.body, &a).unwrap());
                assert!((x - y).abs() <= 1e-8, "n={n} k={k}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn cube_normals_are_unit() {
    let h: HPolytope = cube_h(3, 2.0).normalized();
    assert!(h.normals().iter().all(|a| (a.norm() - 1.0).abs() < 1e-12));
}
