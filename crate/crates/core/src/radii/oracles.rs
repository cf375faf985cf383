//! Randomized checks of the auxiliary inequalities: the support function of
//! a k-ellipsoid, the weighted inner-product inequality on the sphere, and
//! the inner-product and distance bounds for points of a body in John
//! position.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bodies::KEllipsoid;
use crate::ellipsoid::JohnDecomposition;
use crate::error::{GeomError, Result};
use crate::linalg::{self, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct EllipSupport {
    pub value: f64,
    pub maximizer: Vector,
    /// `b` is orthogonal to the carrier, so every point of `E` maximizes.
    pub attained_everywhere: bool,
}

/// Closed-form `max_{x ∈ E} b^T x` and its maximizer.
pub fn oracle_ellip_support(e: &KEllipsoid, b: &Vector) -> EllipSupport {
    let w = e.axes() * (e.basis().transpose() * b);
    let r = w.norm();
    let base = b.dot(e.center());
    if r <= 1e-14 * (1.0 + b.norm()) {
        return EllipSupport {
            value: base,
            maximizer: e.center().clone(),
            attained_everywhere: true,
        };
    }
    EllipSupport {
        value: base + r,
        maximizer: e.point(&(w / r)),
        attained_everywhere: false,
    }
}

/// Largest `b^T x` over `samples` uniform boundary points of `E`.
pub fn sampled_ellip_support(e: &KEllipsoid, b: &Vector, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| b.dot(&e.point(&linalg::random_unit(&mut rng, e.k()))))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallLemmaReport {
    /// `(Σ x_i^T u_i)²`
    pub lhs: f64,
    /// `Σ_{i,l} ‖x_i‖‖x_l‖(1 - u_i^T u_l)`
    pub gamma: f64,
    pub holds: bool,
    pub near_equality: bool,
    /// Largest deviation from `u_i - u = σ(√γ/ξ) x_i/‖x_i‖` over nonzero
    /// `x_i`, for the better sign `σ`; set only near equality.
    pub characterization_residual: Option<f64>,
    pub sigma: Option<f64>,
}

/// For `Σ x_i = 0` and unit `u_i`, checks `(Σ x_i^T u_i)² ≤ γ`, and near
/// equality the condition describing the equality case.
pub fn oracle_ball_lemma(xs: &[Vector], us: &[Vector]) -> Result<BallLemmaReport> {
    if xs.len() != us.len() || xs.is_empty() {
        return Err(GeomError::InvalidInput("need equally many x and u, at least one".into()));
    }
    let n = xs[0].len();
    let sum = xs.iter().fold(Vector::zeros(n), |acc, x| acc + x);
    if sum.norm() > 1e-10 {
        return Err(GeomError::InvalidInput(format!("x must sum to zero, residual {:e}", sum.norm())));
    }
    let lhs = xs.iter().zip(us).map(|(x, u)| x.dot(u)).sum::<f64>().powi(2);
    let norms: Vec<f64> = xs.iter().map(|x| x.norm()).collect();
    let mut gamma = 0.0;
    for i in 0..xs.len() {
        for l in 0..xs.len() {
            gamma += norms[i] * norms[l] * (1.0 - us[i].dot(&us[l]));
        }
    }
    let gap = gamma - lhs;
    let scale = gamma.abs().max(1e-300);
    let holds = gap >= -1e-9 * gamma.abs().max(1.0);
    let near_equality = gap.abs() <= 1e-9 * scale || (gamma == 0.0 && lhs == 0.0);
    let (mut characterization_residual, mut sigma) = (None, None);
    if near_equality {
        let xi: f64 = norms.iter().sum();
        if xi == 0.0 {
            characterization_residual = Some(0.0);
        } else {
            let u = xs
                .iter()
                .zip(us)
                .zip(&norms)
                .fold(Vector::zeros(n), |acc, ((_, ui), w)| acc + ui * *w)
                / xi;
            let step = gamma.max(0.0).sqrt() / xi;
            let residual_for = |sg: f64| {
                xs.iter()
                    .zip(us)
                    .zip(&norms)
                    .filter(|(_, w)| **w > 1e-12)
                    .map(|((x, ui), w)| (ui - &u - x * (sg * step / *w)).norm())
                    .fold(0.0, f64::max)
            };
            let (rp, rm) = (residual_for(1.0), residual_for(-1.0));
            let (r, sg) = if rp <= rm { (rp, 1.0) } else { (rm, -1.0) };
            characterization_residual = Some(r);
            sigma = Some(sg);
        }
    }
    Ok(BallLemmaReport {
        lhs,
        gamma,
        holds,
        near_equality,
        characterization_residual,
        sigma,
    })
}

/// An equality instance in `R^n`, `n >= 2`, with `m >= 2` vectors: `x_i`
/// orthogonal to a unit `w` and summing to zero, and
/// `u_i = β w + α x_i/‖x_i‖` with `α² + β² = 1`.
pub fn ball_lemma_equality_instance(n: usize, m: usize, seed: u64) -> Result<(Vec<Vector>, Vec<Vector>)> {
    if n < 2 || m < 2 {
        return Err(GeomError::ParameterOutOfRange(format!("need n >= 2 and m >= 2, got n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = linalg::random_unit(&mut rng, n);
    let flat = |v: Vector| &v - &w * w.dot(&v);
    let mut xs: Vec<Vector> = (0..m - 1).map(|_| flat(linalg::random_gaussian(&mut rng, n))).collect();
    let last = -xs.iter().fold(Vector::zeros(n), |acc, x| acc + x);
    xs.push(last);
    let alpha: f64 = rand::Rng::gen_range(&mut rng, -1.0..1.0);
    let beta = (1.0 - alpha * alpha).sqrt();
    let us = xs
        .iter()
        .map(|x| {
            let nrm = x.norm();
            if nrm > 1e-12 { &w * beta + x * (alpha / nrm) } else { w.clone() }
        })
        .collect();
    Ok((xs, us))
}

#[derive(Debug, Clone, PartialEq)]
pub struct JohnVectorsReport {
    pub inner_product: f64,
    pub distance: f64,
    /// `√(2(max(‖x‖², ‖y‖²) + n))`
    pub distance_bound: f64,
    /// `√(2n(n+1))`
    pub diameter_bound: f64,
    pub inner_holds: bool,
    pub distance_holds: bool,
    pub diameter_holds: bool,
    pub diameter_near_equality: bool,
    /// At near equality of the diameter bound, whether `‖x‖ = ‖y‖ = n`.
    pub equality_norms: Option<bool>,
}

/// For `x, y` in a body whose John decomposition is `decomp`, checks
/// `x^T y ≥ -n` and the two distance bounds that follow from it.
pub fn oracle_john_vectors(decomp: &JohnDecomposition, x: &Vector, y: &Vector) -> JohnVectorsReport {
    let nf = decomp.dim() as f64;
    let inner_product = x.dot(y);
    let distance = (x - y).norm();
    let distance_bound = (2.0 * (x.norm_squared().max(y.norm_squared()) + nf)).sqrt();
    let diameter_bound = (2.0 * nf * (nf + 1.0)).sqrt();
    let diameter_near_equality = (diameter_bound - distance).abs() <= 1e-6 * diameter_bound;
    JohnVectorsReport {
        inner_product,
        distance,
        distance_bound,
        diameter_bound,
        inner_holds: inner_product >= -nf - 1e-9,
        distance_holds: distance <= distance_bound + 1e-9,
        diameter_holds: distance <= diameter_bound + 1e-9,
        diameter_near_equality,
        equality_norms: diameter_near_equality
            .then(|| (x.norm() - nf).abs() <= 1e-6 * nf && (y.norm() - nf).abs() <= 1e-6 * nf),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;
    use crate::constructions::{regular_body, Position, RegularKind};
    use crate::linalg::Matrix;
    use rand::Rng;

    #[test]
    fn orthogonal_direction_is_flat() {
        let basis = linalg::columns(&[linalg::unit(3, 0)]);
        let e = KEllipsoid::ball(Vector::from_vec(vec![0.0, 0.0, 2.0]), basis, 1.5).unwrap();
        let r = oracle_ellip_support(&e, &linalg::unit(3, 2));
        assert!(r.attained_everywhere && (r.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unit_ball_support_is_norm() {
        let basis = Matrix::from_fn(3, 2, |r, c| if r == c { 1.0 } else { 0.0 });
        let e = KEllipsoid::ball(Vector::zeros(3), basis, 1.0).unwrap();
        let b = Vector::from_vec(vec![3.0, -4.0, 0.0]);
        assert!((oracle_ellip_support(&e, &b).value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn support_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..5 {
            let n = 4;
            let k = 2;
            let basis = linalg::columns(&linalg::orthonormal_basis(
                &[linalg::random_gaussian(&mut rng, n), linalg::random_gaussian(&mut rng, n)],
                1e-9,
            ));
            let a = Matrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
            let axes = &a * a.transpose() + Matrix::identity(k, k) * 0.3;
            let e = KEllipsoid::new(linalg::random_gaussian(&mut rng, n), basis, axes).unwrap();
            let b = linalg::random_gaussian(&mut rng, n);
            let exact = oracle_ellip_support(&e, &b);
            let sampled = sampled_ellip_support(&e, &b, 100_000, trial);
            assert!(sampled <= exact.value + 1e-12 && exact.value - sampled < 1e-6);
            assert!((b.dot(&exact.maximizer) - exact.value).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_lemma_zero_and_equality() {
        let zero = vec![Vector::zeros(3); 2];
        let us = vec![linalg::unit(3, 0), linalg::unit(3, 1)];
        let r = oracle_ball_lemma(&zero, &us).unwrap();
        assert!(r.holds && r.near_equality && r.characterization_residual == Some(0.0));

        let a = 0.6;
        let xs = vec![linalg::unit(2, 0), -linalg::unit(2, 0)];
        let us = vec![Vector::from_vec(vec![a, 0.8]), Vector::from_vec(vec![-a, 0.8])];
        let r = oracle_ball_lemma(&xs, &us).unwrap();
        assert!(r.near_equality && r.characterization_residual.unwrap() < 1e-12 && r.sigma == Some(1.0));

        for seed in 0..20 {
            let (xs, us) = ball_lemma_equality_instance(4, 5, seed).unwrap();
            let r = oracle_ball_lemma(&xs, &us).unwrap();
            assert!(r.near_equality && r.characterization_residual.unwrap() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn ball_lemma_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(2..=6);
            let mut xs: Vec<Vector> = (0..m).map(|_| linalg::random_gaussian(&mut rng, n)).collect();
            let mean = linalg::centroid(&xs);
            xs.iter_mut().for_each(|x| *x -= &mean);
            let us: Vec<Vector> = (0..m).map(|_| linalg::random_unit(&mut rng, n)).collect();
            assert!(oracle_ball_lemma(&xs, &us).unwrap().holds);
        }
    }

    #[test]
    fn simplex_and_cube_vertices() {
        for n in 2..=5 {
            let c = regular_body(RegularKind::Simplex, n, Position::John).unwrap();
            let v = bodies::extreme_points(&c.body).unwrap();
            let r = oracle_john_vectors(&c.certificate.decomposition, &v[0], &v[1]);
            assert!((r.inner_product + n as f64).abs() < 1e-9);
            assert!(r.diameter_near_equality && r.equality_norms == Some(true));

            let q = regular_body(RegularKind::Cube, n, Position::John).unwrap();
            let one = Vector::from_element(n, 1.0);
            let r = oracle_john_vectors(&q.certificate.decomposition, &one, &-&one);
            assert!((r.inner_product + n as f64).abs() < 1e-12);
            assert!(r.diameter_holds && !r.diameter_near_equality);
        }
    }
}
