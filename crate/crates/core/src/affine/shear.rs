//! The inflation `x ↦ π_U(x) + α(π_{U⊥}(x) - c) + c` and a sampled check
//! of its action on `conv((μ(B^n ∩ U) + c) ∪ B^n)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bodies::{self, AffineMap, BallHull, ConvexBody, Subspace};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};

/// Requires `c ⊥ U` and `α > 1`.
pub fn shear_inflation_map(u: &Subspace, c: &Vector, alpha: f64) -> Result<AffineMap> {
    let n = u.dim();
    if c.len() != n {
        return Err(GeomError::WrongDimension { expected: n, got: c.len() });
    }
    if u.project(c).norm() > 1e-9 {
        return Err(GeomError::ParameterOutOfRange("c must be orthogonal to U".into()));
    }
    if !(alpha > 1.0) {
        return Err(GeomError::ParameterOutOfRange(format!("alpha must exceed 1, got {alpha}")));
    }
    let p = u.basis() * u.basis().transpose();
    let linear = &p + (Matrix::identity(n, n) - &p) * alpha;
    AffineMap::new(linear, c * (1.0 - alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShearReport {
    /// `min (1 - gauge)` of the image body over the sampled unit vectors;
    /// nonnegative when `B^n` lies inside.
    pub ball_margin: f64,
    /// Sampled unit vectors that are also boundary points of the image.
    pub common_boundary: usize,
    /// Smallest `c^T x` over those points.
    pub min_offset: Option<f64>,
    /// The gauge of the body was evaluated exactly rather than on a
    /// sampled outline of the disc.
    pub exact_body: bool,
    pub holds: bool,
}

/// The body `conv((μ(B^n ∩ U) + c) ∪ B^n)` is invariant under rotations of
/// `U`, so the minimizer of its support function over `{a : a^T y = 1}` lies
/// in `span(π_U y) + U^⊥`. There the body agrees with the one built from the
/// segment along `π_U y`, which therefore has the same gauge at `y`.
fn section_body(u: &Subspace, c: &Vector, mu: f64, y: &Vector) -> Result<ConvexBody> {
    let yu = u.project(y);
    let dir = if yu.norm() > 1e-12 { yu.normalize() } else { u.embed(&linalg::unit(u.k(), 0)) };
    let apexes = vec![c + &dir * mu, c - &dir * mu];
    Ok(BallHull::new(Vector::zeros(u.dim()), 1.0, apexes)?.into())
}

/// Samples `samples` unit vectors and checks that each lies in the image
/// of `conv((μ(B^n ∩ U) + c) ∪ B^n)`, and that those on its boundary have
/// `c^T x > 0`.
pub fn shear_inflation_check(u: &Subspace, c: &Vector, alpha: f64, mu: f64, samples: usize, seed: u64) -> Result<ShearReport> {
    let map = shear_inflation_map(u, c, alpha)?;
    if !(mu > 1.0) {
        return Err(GeomError::ParameterOutOfRange(format!("mu must exceed 1, got {mu}")));
    }
    let n = u.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inv = map.inverse();
    let mut ball_margin = f64::INFINITY;
    let mut common = Vec::new();
    for _ in 0..samples {
        let x = linalg::random_unit(&mut rng, n);
        let y = inv.apply(&x);
        let g = bodies::gauge(&section_body(u, c, mu, &y)?, &y)?;
        ball_margin = ball_margin.min(1.0 - g);
        if (g - 1.0).abs() <= 1e-6 {
            common.push(c.dot(&x));
        }
    }
    let min_offset = common.iter().copied().reduce(f64::min);
    Ok(ShearReport {
        ball_margin,
        common_boundary: common.len(),
        min_offset,
        exact_body: true,
        holds: ball_margin >= -1e-9 && min_offset.is_none_or(|m| m > 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_identity() {
        let u = Subspace::coordinate(3, &[0]).unwrap();
        let c = Vector::from_vec(vec![0.0, 0.0, 0.5]);
        let m = shear_inflation_map(&u, &c, 1.0 + 1e-9).unwrap();
        assert!((m.linear() - Matrix::identity(3, 3)).amax() < 1e-8);
        let r = shear_inflation_check(&u, &c, 1.0 + 1e-9, 1.2, 200, 1).unwrap();
        assert!(r.ball_margin >= -1e-9);
    }

    #[test]
    fn example_configuration() {
        let u = Subspace::coordinate(3, &[0]).unwrap();
        let c = Vector::from_vec(vec![0.0, 0.0, 0.5]);
        let r = shear_inflation_check(&u, &c, 1.5, 1.2, 2000, 2).unwrap();
        assert!(r.holds && r.exact_body, "{r:?}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let u = Subspace::coordinate(3, &[0]).unwrap();
        let c = Vector::from_vec(vec![0.1, 0.0, 0.5]);
        assert!(matches!(shear_inflation_map(&u, &c, 1.5), Err(GeomError::ParameterOutOfRange(_))));
        let c = Vector::from_vec(vec![0.0, 0.0, 0.5]);
        assert!(matches!(shear_inflation_map(&u, &c, 1.0), Err(GeomError::ParameterOutOfRange(_))));
    }

    #[test]
    fn section_matches_sampled_disc() {
        let u = Subspace::coordinate(3, &[0, 1]).unwrap();
        let c = Vector::from_vec(vec![0.0, 0.0, 0.4]);
        let apexes = linalg::circle_directions(256).iter().map(|d| &c + u.embed(d) * 1.3).collect();
        let full: ConvexBody = BallHull::new(Vector::zeros(3), 1.0, apexes).unwrap().into();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let y = linalg::random_gaussian(&mut rng, 3);
            let exact = bodies::gauge(&section_body(&u, &c, 1.3, &y).unwrap(), &y).unwrap();
            let sampled = bodies::gauge(&full, &y).unwrap();
            assert!(sampled >= exact - 1e-9 && sampled - exact < 2e-4, "{sampled} {exact}");
        }
    }
}
