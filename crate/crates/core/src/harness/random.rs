//! Seeded random bodies in John position.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::{cube_h, ConvexBody, HPolytope, VPolytope};
use crate::constructions::{construction_polytope, construction_tau_range};
use crate::ellipsoid::{john_verify, normalize_john, JohnDecomposition};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Vector};

const ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Cube,
    /// Random vertices mapped to John position.
    Normalized,
    /// `P(J, τ)` cut by extra halfspaces that keep `B^n` inside.
    Truncated,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::Cube => "cube",
            Generator::Normalized => "normalized-vertices",
            Generator::Truncated => "truncated-enclosing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JohnBody {
    pub body: ConvexBody,
    pub decomposition: JohnDecomposition,
    pub generator: Generator,
}

fn normalized(rng: &mut ChaCha8Rng, n: usize, complexity: usize) -> Option<JohnBody> {
    let points: Vec<Vector> = (0..n + 1 + complexity).map(|_| linalg::random_gaussian(rng, n)).collect();
    let v = VPolytope::new(points).ok()?;
    let (body, cert) = normalize_john(&v.into()).ok()?;
    Some(JohnBody {
        body,
        decomposition: cert.decomposition,
        generator: Generator::Normalized,
    })
}

fn truncated(rng: &mut ChaCha8Rng, n: usize, complexity: usize) -> Option<JohnBody> {
    let mut axes: Vec<usize> = (0..n - 1).collect();
    axes.shuffle(rng);
    axes.truncate(rng.gen_range(1..n));
    axes.sort_unstable();
    let (lo, hi) = construction_tau_range(n, axes.len());
    let tau = if hi > lo { rng.gen_range(lo..=hi) } else { hi };
    let (p, decomposition) = construction_polytope(&axes, tau, n).ok()?;
    let mut normals = p.normals().to_vec();
    let mut offsets = p.offsets().to_vec();
    for _ in 0..complexity {
        normals.push(linalg::random_unit(rng, n));
        offsets.push(1.0 + rng.gen::<f64>() * 0.5);
    }
    Some(JohnBody {
        body: HPolytope::new(normals, offsets).ok()?.into(),
        decomposition,
        generator: Generator::Truncated,
    })
}

/// A body in John position from `seed`; `complexity` is the number of
/// extra vertices or halfspaces, and `0` gives the cube `[-1, 1]^n`.
/// Each candidate is kept only if its decomposition verifies.
pub fn random_john_body(n: usize, complexity: usize, seed: u64) -> Result<JohnBody> {
    if n > 6 {
        return Err(GeomError::DimensionTooLarge(format!("random bodies support n <= 6, got {n}")));
    }
    if n < 2 {
        return Err(GeomError::ParameterOutOfRange(format!("n must be at least 2, got {n}")));
    }
    if complexity == 0 {
        let cube: ConvexBody = cube_h(n, 1.0).into();
        let contacts: Vec<Vector> = (0..n).flat_map(|i| [linalg::unit(n, i), -linalg::unit(n, i)]).collect();
        let weights = vec![0.5; 2 * n];
        return Ok(JohnBody {
            body: cube,
            decomposition: JohnDecomposition { contacts, weights },
            generator: Generator::Cube,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let candidate = if rng.gen_bool(0.5) {
            normalized(&mut rng, n, complexity)
        } else {
            truncated(&mut rng, n, complexity)
        };
        if let Some(c) = candidate.filter(|c| john_verify(&c.decomposition, &c.body).pass) {
            return Ok(c);
        }
    }
    Err(GeomError::GenerationFailed { attempts: ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_body_verifies() {
        let b = random_john_body(3, 4, 42).unwrap();
        let rep = john_verify(&b.decomposition, &b.body);
        assert!(rep.pass && rep.max_residual() < 1e-6, "{rep:?}");
    }

    #[test]
    fn deterministic() {
        for seed in 0..4 {
            assert_eq!(random_john_body(3, 3, seed).unwrap(), random_john_body(3, 3, seed).unwrap());
        }
    }

    #[test]
    fn base_case_is_the_cube() {
        let b = random_john_body(4, 0, 7).unwrap();
        assert_eq!(b.body, ConvexBody::from(cube_h(4, 1.0)));
        assert!(john_verify(&b.decomposition, &b.body).pass);
    }

    #[test]
    fn both_generators_occur() {
        let kinds: Vec<Generator> = (0..12).map(|s| random_john_body(2, 3, s).unwrap().generator).collect();
        assert!(kinds.contains(&Generator::Normalized) && kinds.contains(&Generator::Truncated));
        assert!(matches!(random_john_body(7, 1, 0), Err(GeomError::DimensionTooLarge(_))));
    }
}
