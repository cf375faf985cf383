//! Minimum-volume enclosing ellipsoid via Frank–Wolfe with away steps on the
//! D-optimal design weights of the lifted points `(p_i, 1)`.

use crate::bodies::Ellipsoid;
use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};

pub const DEFAULT_EPS: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct MveeResult {
    pub ellipsoid: Ellipsoid,
    /// Design weights, summing to 1; the positive ones mark the active points.
    pub weights: Vec<f64>,
    pub iterations: usize,
    /// `max_i (p_i - c)^T Q (p_i - c)` before the final rescale.
    pub max_value: f64,
}

pub fn mvee(points: &[Vector], eps: f64) -> Result<Ellipsoid> {
    Ok(mvee_with_weights(points, eps, DEFAULT_MAX_ITER)?.ellipsoid)
}

pub fn mvee_with_weights(points: &[Vector], eps: f64, max_iter: usize) -> Result<MveeResult> {
    if !(1e-12..=1e-3).contains(&eps) {
        return Err(GeomError::InvalidInput(format!("mvee eps must lie in [1e-12, 1e-3], got {eps}")));
    }
    let n = points.first().map(|p| p.len()).unwrap_or(0);
    if n == 0 || points.len() < n + 1 || linalg::affine_rank(points, 1e-10) < n {
        return Err(GeomError::DegenerateInput(format!("points do not affinely span R^{n}")));
    }
    let lifted: Vec<Vector> = points.iter().map(|p| p.clone().insert_row(n, 1.0)).collect();
    let m = points.len();
    let mut u = vec![1.0 / m as f64; m];
    let iters = design_weights(&lifted, &mut u, eps, max_iter)?;

    // polish: rerun on the active points to a tight tolerance and keep the
    // result when it still covers every point
    let active: Vec<usize> = (0..m).filter(|&i| u[i] > 0.0).collect();
    let mut best = finish(points, &u, n);
    if active.len() < m {
        let sub: Vec<Vector> = active.iter().map(|&i| lifted[i].clone()).collect();
        let mut su: Vec<f64> = active.iter().map(|&i| u[i]).collect();
        if design_weights(&sub, &mut su, 1e-14, 200_000).is_ok() {
            let mut full = vec![0.0; m];
            for (k, &i) in active.iter().enumerate() {
                full[i] = su[k];
            }
            let cand = finish(points, &full, n);
            if cand.1 <= 1.0 + eps && cand.1 < best.1 + 1e-15 {
                u = full;
                best = cand;
            }
        }
    }
    let (mut ell, max_value) = best;
    if max_value > 1.0 {
        ell = Ellipsoid::new(ell.center().clone(), ell.shape() / max_value)?;
    }
    Ok(MveeResult {
        ellipsoid: ell,
        weights: u,
        iterations: iters,
        max_value,
    })
}

fn finish(points: &[Vector], u: &[f64], n: usize) -> (Ellipsoid, f64) {
    let c = points.iter().zip(u).fold(Vector::zeros(n), |acc, (p, w)| acc + p * *w);
    let mut sigma = Matrix::zeros(n, n);
    for (p, &w) in points.iter().zip(u) {
        if w > 0.0 {
            let d = p - &c;
            sigma += &d * d.transpose() * w;
        }
    }
    let shape = sigma.try_inverse().expect("active points span") / n as f64;
    let shape = (&shape + shape.transpose()) * 0.5;
    let ell = Ellipsoid::new(c, shape).expect("positive definite");
    let max_value = points.iter().map(|p| ell.value(p)).fold(0.0, f64::max);
    (ell, max_value)
}

/// Wolfe–Atwood / Todd–Yildirim iteration on the lifted points. Stops once
/// every `ω_i <= d + n·eps` and every active `ω_i >= d - n·eps`.
fn design_weights(q: &[Vector], u: &mut [f64], eps: f64, max_iter: usize) -> Result<usize> {
    let d = q[0].len();
    let dn = d as f64;
    let tol = (dn - 1.0) * eps;
    let moment = |u: &[f64]| {
        let mut m = Matrix::zeros(d, d);
        for (qi, &w) in q.iter().zip(u.iter()) {
            if w > 0.0 {
                m += qi * qi.transpose() * w;
            }
        }
        m
    };
    let mut minv = moment(u)
        .try_inverse()
        .ok_or_else(|| GeomError::DegenerateInput("singular design moment matrix".into()))?;
    let mut residual = f64::INFINITY;
    for it in 0..max_iter {
        if it % 64 == 63 {
            if let Some(inv) = moment(u).try_inverse() {
                minv = inv;
            }
        }
        let omega: Vec<f64> = q.iter().map(|qi| qi.dot(&(&minv * qi))).collect();
        let (j, &wj) = omega
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let (k, &wk) = omega
            .iter()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        let up = wj - dn;
        let down = dn - wk;
        residual = up.max(down);
        if up <= tol && down <= tol {
            return Ok(it);
        }
        if up >= down {
            let alpha = up / (dn * (wj - 1.0));
            for w in u.iter_mut() {
                *w *= 1.0 - alpha;
            }
            u[j] += alpha;
            let g = alpha / (1.0 - alpha);
            let mq = &minv * &q[j];
            minv = (&minv - &mq * mq.transpose() * (g / (1.0 + g * wj))) / (1.0 - alpha);
        } else {
            let uk = u[k];
            let mut beta = down / (dn * (wk - 1.0));
            let drop = uk / (1.0 - uk);
            let dropped = beta >= drop;
            if dropped {
                beta = drop;
            }
            for w in u.iter_mut() {
                *w *= 1.0 + beta;
            }
            u[k] -= beta;
            if dropped {
                u[k] = 0.0;
                minv = moment(u)
                    .try_inverse()
                    .ok_or_else(|| GeomError::DegenerateInput("singular design moment matrix".into()))?;
            } else {
                let g = beta / (1.0 + beta);
                let mq = &minv * &q[k];
                minv = (&minv + &mq * mq.transpose() * (g / (1.0 - g * wk))) / (1.0 + beta);
            }
        }
    }
    Err(GeomError::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::cube_v;

    #[test]
    fn square_gives_circumscribed_circle() {
        let e = mvee(cube_v(2, 1.0).vertices(), 1e-9).unwrap();
        assert!(e.center().norm() < 1e-9);
        for a in e.semiaxes() {
            assert!((a - 2f64.sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let pts = vec![
            Vector::from_vec(vec![0.0, 0.0]),
            Vector::from_vec(vec![1.0, 0.0]),
            Vector::from_vec(vec![2.0, 0.0]),
        ];
        assert!(matches!(mvee(&pts, 1e-9), Err(GeomError::DegenerateInput(_))));
    }

    #[test]
    fn covers_all_points_and_is_tight() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in 2..=4 {
            let pts: Vec<Vector> = (0..30).map(|_| linalg::random_gaussian(&mut rng, n)).collect();
            let r = mvee_with_weights(&pts, 1e-9, DEFAULT_MAX_ITER).unwrap();
            let vals: Vec<f64> = pts.iter().map(|p| r.ellipsoid.value(p)).collect();
            assert!(vals.iter().all(|&v| v <= 1.0 + 1e-12));
            // active points sit on the boundary
            for (v, w) in vals.iter().zip(&r.weights) {
                if *w > 1e-6 {
                    assert!((v - 1.0).abs() < 1e-7, "{v}");
                }
            }
        }
    }

    #[test]
    fn adding_an_interior_point_never_grows_volume() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut pts: Vec<Vector> = (0..12).map(|_| linalg::random_gaussian(&mut rng, 3)).collect();
        let e = mvee(&pts, 1e-10).unwrap();
        let vol = |e: &Ellipsoid| e.semiaxes().iter().product::<f64>();
        pts.push(e.center() + (&pts[0] - e.center()) * 0.5);
        let e2 = mvee(&pts, 1e-10).unwrap();
        assert!(vol(&e2) <= vol(&e) * (1.0 + 1e-8));
    }
}
