//! The halfspace polytope `P(J, τ)` whose facet normals carry a closed-form
//! John decomposition. Indices are 0-based: `J ⊂ {0, …, n-2}` and the
//! distinguished axis is `e_{n-1}`.

use crate::bodies::HPolytope;
use crate::ellipsoid::JohnDecomposition;
use crate::error::{GeomError, Result};
use crate::linalg::Vector;

/// Admissible `τ` interval for `|J| = j`.
pub fn construction_tau_range(n: usize, j: usize) -> (f64, f64) {
    let (nf, jf) = (n as f64, j as f64);
    (((nf - jf) / ((jf + 1.0) * nf)).sqrt(), 1.0)
}

fn signs(m: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..1usize << m).map(move |mask| (0..m).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
}

/// Unit facet normals and their weights, `a`-vectors first.
pub fn construction_vectors(j: &[usize], tau: f64, n: usize) -> Result<(Vec<Vector>, Vec<f64>)> {
    if n < 2 {
        return Err(GeomError::ParameterOutOfRange(format!("n must be at least 2, got {n}")));
    }
    let mut js = j.to_vec();
    js.sort_unstable();
    js.dedup();
    if js.len() != j.len() || js.iter().any(|&i| i + 1 >= n) {
        return Err(GeomError::ParameterOutOfRange(format!(
            "J must be a set of distinct indices in 0..{}",
            n - 1
        )));
    }
    let (lo, hi) = construction_tau_range(n, js.len());
    if !(tau >= lo - 1e-12 && tau <= hi + 1e-12) {
        return Err(GeomError::ParameterOutOfRange(format!("tau must lie in [{lo}, {hi}], got {tau}")));
    }
    let tau = tau.clamp(lo, hi);
    let (nf, m) = (n as f64, js.len());
    let mf = m as f64;
    let last = n - 1;
    let in_j = |i: usize| js.binary_search(&i).is_ok();
    let t2 = tau * tau;
    let lam_a = nf / ((1u64 << m) as f64 * (nf * t2 + 1.0));
    let lam_b = nf * nf * t2 / ((1u64 << (n - 1)) as f64 * (nf * t2 + 1.0));

    let mut vecs = Vec::new();
    let mut weights = Vec::new();
    let a_side = if m == 0 { 0.0 } else { ((1.0 - t2) / mf).max(0.0).sqrt() };
    for delta in signs(m) {
        let mut a = Vector::zeros(n);
        for (idx, &i) in js.iter().enumerate() {
            a[i] = delta[idx] * a_side;
        }
        a[last] = tau;
        vecs.push(a);
        weights.push(lam_a);
    }
    let b_in = if m == 0 {
        0.0
    } else {
        (((mf + 1.0) * nf * t2 + mf - nf) / (mf * nf * nf * t2)).max(0.0).sqrt()
    };
    let b_out = (nf * t2 + 1.0).sqrt() / (nf * tau);
    for sigma in signs(n - 1) {
        let mut b = Vector::zeros(n);
        for i in 0..last {
            b[i] = sigma[i] * if in_j(i) { b_in } else { b_out };
        }
        b[last] = -1.0 / (nf * tau);
        vecs.push(b);
        weights.push(lam_b);
    }
    Ok((vecs, weights))
}

/// `P(J, τ) = {x : u^T x <= 1}` over the construction vectors, with their
/// analytic decomposition. Coincident normals at `τ = 1` are kept.
pub fn construction_polytope(j: &[usize], tau: f64, n: usize) -> Result<(HPolytope, JohnDecomposition)> {
    let (contacts, weights) = construction_vectors(j, tau, n)?;
    let offsets = vec![1.0; contacts.len()];
    let p = HPolytope::new_unchecked(contacts.clone(), offsets)?;
    Ok((p, JohnDecomposition { contacts, weights }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::ConvexBody;
    use crate::ellipsoid::john_verify;

    #[test]
    fn vectors_are_unit_and_identities_hold() {
        for n in 2..=6 {
            for m in 0..n {
                let j: Vec<usize> = (0..m).collect();
                let (lo, _) = construction_tau_range(n, m);
                for tau in [lo, 0.5 * (lo + 1.0), 1.0] {
                    let (p, d) = construction_polytope(&j, tau, n).unwrap();
                    assert!(d.contacts.iter().all(|u| (u.norm() - 1.0).abs() < 1e-12));
                    let r = d.residuals();
                    assert!(r.centroid < 1e-12 && r.frame < 1e-12 && r.trace < 1e-12, "{n} {m} {tau} {r:?}");
                    if n <= 4 {
                        let body: ConvexBody = HPolytope::new(p.normals().to_vec(), p.offsets().to_vec())
                            .unwrap()
                            .into();
                        assert!(john_verify(&d, &body).pass);
                    }
                }
            }
        }
    }

    #[test]
    fn tau_one_collapses_a_vectors() {
        let n = 4;
        let (p, d) = construction_polytope(&[0, 1, 2], 1.0, n).unwrap();
        let e = crate::linalg::unit(n, n - 1);
        for u in &d.contacts[..8] {
            assert!((u - &e).norm() < 1e-12);
        }
        assert_eq!(p.len(), 16);
    }

    #[test]
    fn odd_subset_example() {
        let (_, d) = construction_polytope(&[1], 0.8, 3).unwrap();
        assert!(d.contacts.iter().all(|u| (u.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn out_of_range() {
        let (lo, _) = construction_tau_range(3, 1);
        assert!(matches!(
            construction_polytope(&[0], lo - 1e-3, 3),
            Err(GeomError::ParameterOutOfRange(_))
        ));
        assert!(construction_polytope(&[], 0.9, 3).is_err());
        assert!(construction_polytope(&[2], 0.9, 3).is_err());
    }
}
