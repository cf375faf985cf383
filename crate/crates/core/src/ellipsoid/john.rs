//! John decompositions: extraction by nonnegative least squares, residual
//! reports, and normalization to John or Loewner position.

use crate::bodies::{self, AffineMap, ConvexBody, HPolytope};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};

use super::inscribed::{inscribed_ellipsoid, DEFAULT_KKT_TOL};
use super::mvee::{mvee, DEFAULT_EPS};

/// Residual threshold for accepting an NNLS decomposition.
pub const NNLS_TOL: f64 = 1e-6;
pub const VERIFY_TOL: f64 = 1e-6;
pub const PRUNE_BELOW: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct JohnDecomposition {
    pub contacts: Vec<Vector>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `‖Σ λ_i u_i‖`
    pub centroid: f64,
    /// `‖Σ λ_i u_i u_i^T - I‖_F`
    pub frame: f64,
    /// `|Σ λ_i - n|`
    pub trace: f64,
}

impl JohnDecomposition {
    pub fn dim(&self) -> usize {
        self.contacts.first().map_or(0, |u| u.len())
    }

    pub fn residuals(&self) -> IdentityResiduals {
        let n = self.dim();
        let mut sum = Vector::zeros(n);
        let mut frame = -Matrix::identity(n, n);
        for (u, &w) in self.contacts.iter().zip(&self.weights) {
            sum += u * w;
            frame += u * u.transpose() * w;
        }
        IdentityResiduals {
            centroid: sum.norm(),
            frame: frame.norm(),
            trace: (self.weights.iter().sum::<f64>() - n as f64).abs(),
        }
    }

    pub fn transformed(&self, rot: &Matrix) -> Self {
        Self {
            contacts: self.contacts.iter().map(|u| rot * u).collect(),
            weights: self.weights.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnReport {
    pub centroid: f64,
    pub frame: f64,
    pub trace: f64,
    /// `max_i |h_K(u_i) - 1|`
    pub support: f64,
    /// `max_i |‖u_i‖ - 1|`
    pub unit: f64,
    pub min_weight: f64,
    pub pass: bool,
}

impl JohnReport {
    pub fn max_residual(&self) -> f64 {
        self.centroid.max(self.frame).max(self.trace).max(self.support).max(self.unit)
    }
}

/// Residuals of a decomposition against a body. The support residual is
/// meaningful for both positions: contacts lie in `K ∩ S^{n-1}` either way.
pub fn john_verify(decomp: &JohnDecomposition, body: &ConvexBody) -> JohnReport {
    let id = decomp.residuals();
    let mut support = 0.0f64;
    let mut unit = 0.0f64;
    for u in &decomp.contacts {
        unit = unit.max((u.norm() - 1.0).abs());
        let h = bodies::support(body, u).unwrap_or(f64::INFINITY);
        support = support.max((h - 1.0).abs());
    }
    let min_weight = decomp.weights.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = id.centroid <= VERIFY_TOL
        && id.frame <= VERIFY_TOL
        && id.trace <= VERIFY_TOL
        && support <= VERIFY_TOL
        && unit <= VERIFY_TOL
        && min_weight > 0.0
        && !decomp.contacts.is_empty();
    JohnReport {
        centroid: id.centroid,
        frame: id.frame,
        trace: id.trace,
        support,
        unit,
        min_weight,
        pass,
    }
}

/// Lawson–Hanson nonnegative least squares, `min ‖A x - b‖` over `x >= 0`.
pub fn nnls(a: &Matrix, b: &Vector) -> (Vector, f64) {
    let (m, p) = a.shape();
    let mut x = Vector::zeros(p);
    let mut passive = vec![false; p];
    let tol = 1e-13 * a.amax().max(1.0) * (m.max(p) as f64);
    let solve_passive = |passive: &[bool]| -> Vector {
        let idx: Vec<usize> = (0..p).filter(|&j| passive[j]).collect();
        let sub = Matrix::from_fn(m, idx.len(), |r, c| a[(r, idx[c])]);
        let svd = sub.svd(true, true);
        let z = svd.solve(b, 1e-14).unwrap_or_else(|_| Vector::zeros(idx.len()));
        let mut full = Vector::zeros(p);
        for (k, &j) in idx.iter().enumerate() {
            full[j] = z[k];
        }
        full
    };
    for _outer in 0..(3 * p + 10) {
        let w = a.transpose() * (b - a * &x);
        let cand = (0..p)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let Some(j) = cand else { break };
        passive[j] = true;
        for _inner in 0..(3 * p + 10) {
            let z = solve_passive(&passive);
            let bad: Vec<usize> = (0..p).filter(|&k| passive[k] && z[k] <= 0.0).collect();
            if bad.is_empty() {
                x = z;
                break;
            }
            let alpha = bad
                .iter()
                .map(|&k| x[k] / (x[k] - z[k]))
                .fold(f64::INFINITY, f64::min);
            x = &x + (&z - &x) * alpha;
            for k in 0..p {
                if passive[k] && x[k] <= 1e-15 {
                    passive[k] = false;
                    x[k] = 0.0;
                }
            }
        }
    }
    let res = (a * &x - b).norm();
    (x, res)
}

/// Weights for the given unit contacts by NNLS on the stacked identities
/// `Σ λ u = 0`, `Σ λ u u^T = I`, `Σ λ = n`.
pub fn fit_weights(contacts: &[Vector]) -> Result<JohnDecomposition> {
    let n = contacts.first().map(|u| u.len()).unwrap_or(0);
    if contacts.is_empty() {
        return Err(GeomError::NotInJohnPosition { residual: f64::INFINITY });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let rows = n + pairs.len() + 1;
    let mut a = Matrix::zeros(rows, contacts.len());
    let mut b = Vector::zeros(rows);
    let s2 = 2f64.sqrt();
    for (c, u) in contacts.iter().enumerate() {
        for i in 0..n {
            a[(i, c)] = u[i];
        }
        for (r, &(i, j)) in pairs.iter().enumerate() {
            a[(n + r, c)] = if i == j { u[i] * u[i] } else { s2 * u[i] * u[j] };
        }
        a[(rows - 1, c)] = 1.0;
    }
    for (r, &(i, j)) in pairs.iter().enumerate() {
        if i == j {
            b[n + r] = 1.0;
        }
    }
    b[rows - 1] = n as f64;
    let (x, res) = nnls(&a, &b);
    if res > NNLS_TOL {
        return Err(GeomError::NotInJohnPosition { residual: res });
    }
    let (contacts, weights): (Vec<Vector>, Vec<f64>) = contacts
        .iter()
        .zip(x.iter())
        .filter(|(_, &w)| w >= PRUNE_BELOW)
        .map(|(u, &w)| (u.clone(), w))
        .unzip();
    let d = JohnDecomposition { contacts, weights };
    let r = d.residuals();
    let worst = r.centroid.max(r.frame).max(r.trace);
    if worst > NNLS_TOL {
        return Err(GeomError::NotInJohnPosition { residual: worst });
    }
    Ok(d)
}

/// Decomposition certifying `𝔍(K) = B^n`. For polytopes the candidates are
/// unit facet normals at distance at most `1 + contact_tol`; for ball hulls
/// they are the body's certificate directions.
pub fn john_decomposition(body: &ConvexBody, contact_tol: f64) -> Result<JohnDecomposition> {
    let n = body.dim();
    let candidates: Vec<Vector> = match body {
        ConvexBody::H(_) | ConvexBody::V(_) => {
            let h = bodies::to_hpolytope(body)?.normalized();
            let depth = bodies::origin_depth_h(&h);
            if depth < 1.0 - 1e-9 {
                return Err(GeomError::NotInJohnPosition { residual: 1.0 - depth });
            }
            h.halfspaces()
                .filter(|(_, b)| *b <= 1.0 + contact_tol)
                .map(|(a, _)| a.clone())
                .collect()
        }
        ConvexBody::Ball(b) => {
            if b.center().norm() + 1.0 > b.radius() + 1e-9 {
                return Err(GeomError::NotInJohnPosition {
                    residual: b.center().norm() + 1.0 - b.radius(),
                });
            }
            let dirs: Vec<Vector> = if b.contacts().is_empty() {
                (0..n).flat_map(|i| [linalg::unit(n, i), -linalg::unit(n, i)]).collect()
            } else {
                b.contacts().to_vec()
            };
            dirs.into_iter()
                .map(|u| u.normalize())
                .filter(|u| bodies::ballhull_support(b, u) <= 1.0 + contact_tol)
                .collect()
        }
    };
    fit_weights(&candidates)
}

/// Decomposition certifying `𝔏(K) = B^n` from the points of a polytope on the
/// unit sphere.
pub fn loewner_decomposition(body: &ConvexBody, contact_tol: f64) -> Result<JohnDecomposition> {
    let pts = match body {
        ConvexBody::Ball(_) => {
            return Err(GeomError::RepresentationUnavailable(
                "Loewner decomposition needs a polytope".into(),
            ))
        }
        _ => bodies::extreme_points(body)?,
    };
    let rmax = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if rmax > 1.0 + 1e-9 {
        return Err(GeomError::NotInLoewnerPosition { residual: rmax - 1.0 });
    }
    let cands: Vec<Vector> = pts
        .iter()
        .filter(|p| p.norm() >= 1.0 - contact_tol)
        .map(|p| p.normalize())
        .collect();
    fit_weights(&cands).map_err(|e| match e {
        GeomError::NotInJohnPosition { residual } => GeomError::NotInLoewnerPosition { residual },
        other => other,
    })
}

#[derive(Debug, Clone)]
pub struct PositionCertificate {
    pub map: AffineMap,
    pub decomposition: JohnDecomposition,
    pub residuals: IdentityResiduals,
}

/// Affinely map the body so its John ellipsoid is `B^n`.
pub fn normalize_john(body: &ConvexBody) -> Result<(ConvexBody, PositionCertificate)> {
    let n = body.dim();
    let (map, out) = match body {
        ConvexBody::Ball(_) => (AffineMap::identity(n), body.clone()),
        _ => {
            let h: HPolytope = bodies::to_hpolytope(body)?;
            let ins = inscribed_ellipsoid(&h, DEFAULT_KKT_TOL)?;
            let inv = ins
                .map
                .clone()
                .try_inverse()
                .ok_or_else(|| GeomError::DegenerateInput("inscribed ellipsoid is flat".into()))?;
            let t = -(&inv * &ins.center);
            let map = AffineMap::new(inv, t)?;
            let out = match body {
                ConvexBody::V(_) => bodies::transform(body, &map)?,
                _ => ConvexBody::H(bodies::transform_h(&h, &map)?),
            };
            (map, out)
        }
    };
    let decomposition = match &out {
        ConvexBody::V(v) => {
            let h = bodies::facets_of(v)?;
            john_decomposition(&ConvexBody::H(h), super::inscribed::CONTACT_TOL)?
        }
        other => john_decomposition(other, super::inscribed::CONTACT_TOL)?,
    };
    let residuals = decomposition.residuals();
    Ok((
        out,
        PositionCertificate {
            map,
            decomposition,
            residuals,
        },
    ))
}

/// Affinely map a polytope so its Loewner ellipsoid is `B^n`.
pub fn normalize_loewner(body: &ConvexBody) -> Result<(ConvexBody, PositionCertificate)> {
    let pts = match body {
        ConvexBody::Ball(_) => {
            return Err(GeomError::RepresentationUnavailable(
                "Loewner normalization needs a polytope".into(),
            ))
        }
        _ => bodies::extreme_points(body)?,
    };
    let e = mvee(&pts, DEFAULT_EPS)?;
    let b = e.map();
    let inv = b.clone().try_inverse().ok_or_else(|| GeomError::DegenerateInput("flat ellipsoid".into()))?;
    let t = -(&inv * e.center());
    let map = AffineMap::new(inv, t)?;
    let out = bodies::transform(body, &map)?;
    let decomposition = loewner_decomposition(&out, 1e-6)?;
    let residuals = decomposition.residuals();
    Ok((
        out,
        PositionCertificate {
            map,
            decomposition,
            residuals,
        },
    ))
}
