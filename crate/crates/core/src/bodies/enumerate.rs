//! Vertex and facet enumeration by the double description method on the
//! homogenized cone. Sizes are capped: dimension ≤ 6 and at most 128
//! constraints, which covers every construction in the crate.

use super::types::{HPolytope, VPolytope};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Vector};

pub const MAX_ENUM_DIM: usize = 6;
pub const MAX_ENUM_ROWS: usize = 128;

const ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
struct Ray {
    v: Vector,
    zero: u128,
}

fn check_limits(dim: usize, rows: usize) -> Result<()> {
    if dim > MAX_ENUM_DIM {
        return Err(GeomError::DimensionTooLarge(format!(
            "enumeration supports n <= {MAX_ENUM_DIM}, got {dim}"
        )));
    }
    if rows + 1 > MAX_ENUM_ROWS {
        return Err(GeomError::DimensionTooLarge(format!(
            "enumeration supports at most {} constraints, got {rows}",
            MAX_ENUM_ROWS - 1
        )));
    }
    Ok(())
}

/// Extreme rays of the pointed cone `{y : r_i^T y <= 0}`.
fn extreme_rays(rows: &[Vector]) -> Result<Vec<Vector>> {
    let d = rows[0].len();
    let rows: Vec<Vector> = rows.iter().map(|r| r / r.norm()).collect();

    // greedy choice of d independent rows for the initial simplicial cone
    let mut chosen: Vec<usize> = Vec::new();
    let mut ortho: Vec<Vector> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut v = r.clone();
        for _ in 0..2 {
            for q in &ortho {
                let c = q.dot(&v);
                v -= q * c;
            }
        }
        if v.norm() > 1e-7 {
            ortho.push(v.normalize());
            chosen.push(i);
            if chosen.len() == d {
                break;
            }
        }
    }
    if chosen.len() < d {
        return Err(GeomError::Unbounded);
    }
    let r0 = crate::linalg::Matrix::from_fn(d, d, |i, j| rows[chosen[i]][j]);
    let inv = r0.try_inverse().ok_or(GeomError::Unbounded)?;
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let v: Vector = -inv.column(j);
            let mut zero = 0u128;
            for (jj, &row) in chosen.iter().enumerate() {
                if jj != j {
                    zero |= 1u128 << row;
                }
            }
            Ray { v: v.normalize(), zero }
        })
        .collect();

    for (i, row) in rows.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let vals: Vec<f64> = rays.iter().map(|r| row.dot(&r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j] > ZERO_TOL).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j] < -ZERO_TOL).collect();
        if pos.is_empty() {
            for (j, r) in rays.iter_mut().enumerate() {
                if vals[j].abs() <= ZERO_TOL {
                    r.zero |= 1u128 << i;
                }
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zero & rays[q].zero;
                if (common.count_ones() as usize) + 2 < d {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(j, r)| j == p || j == q || common & r.zero != common);
                if !adjacent {
                    continue;
                }
                let v = &rays[q].v * vals[p] - &rays[p].v * vals[q];
                let nrm = v.norm();
                if nrm > 0.0 {
                    next.push(Ray {
                        v: v / nrm,
                        zero: common | (1u128 << i),
                    });
                }
            }
        }
        for (j, mut r) in rays.into_iter().enumerate() {
            if vals[j] < -ZERO_TOL {
                next.push(r);
            } else if vals[j].abs() <= ZERO_TOL {
                r.zero |= 1u128 << i;
                next.push(r);
            }
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

fn dedupe(points: Vec<Vector>, tol: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (q - &p).amax() <= tol) {
            out.push(p);
        }
    }
    out
}

/// Vertices of a bounded H-polytope.
pub fn vertices_of(h: &HPolytope) -> Result<Vec<Vector>> {
    let n = h.dim();
    check_limits(n, h.len())?;
    let mut rows: Vec<Vector> = h
        .halfspaces()
        .map(|(a, b)| {
            let mut r = Vector::zeros(n + 1);
            r.rows_mut(0, n).copy_from(a);
            r[n] = -b;
            r
        })
        .collect();
    let mut last = Vector::zeros(n + 1);
    last[n] = -1.0;
    rows.push(last);
    let rays = extreme_rays(&rows)?;
    let mut verts = Vec::with_capacity(rays.len());
    for r in rays {
        let x0 = r[n];
        if x0 <= 1e-10 {
            return Err(GeomError::Unbounded);
        }
        verts.push(Vector::from_iterator(n, r.iter().take(n).map(|x| x / x0)));
    }
    let scale = verts.iter().map(|v| v.amax()).fold(1.0, f64::max);
    Ok(dedupe(verts, 1e-9 * scale))
}

/// Facets of `conv(vertices)`, normals of unit length, one halfspace per
/// facet.
pub fn facets_of(v: &VPolytope) -> Result<HPolytope> {
    let n = v.dim();
    check_limits(n, v.vertices().len())?;
    let c = linalg::centroid(v.vertices());
    // facets of conv(V) are the vertices of {y : (v_i - c)^T y <= 1}
    let rows: Vec<Vector> = v
        .vertices()
        .iter()
        .map(|p| {
            let mut r = Vector::zeros(n + 1);
            r.rows_mut(0, n).copy_from(&(p - &c));
            r[n] = -1.0;
            r
        })
        .chain(std::iter::once({
            let mut r = Vector::zeros(n + 1);
            r[n] = -1.0;
            r
        }))
        .collect();
    let rays = extreme_rays(&rows)?;
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for r in rays {
        let x0 = r[n];
        if x0 <= 1e-10 {
            return Err(GeomError::DegenerateInput("vertex set is not full-dimensional".into()));
        }
        let y = Vector::from_iterator(n, r.iter().take(n).map(|x| x / x0));
        let nrm = y.norm();
        let a = &y / nrm;
        let b = (1.0 + y.dot(&c)) / nrm;
        if !normals.iter().zip(&offsets).any(|(q, bq): (&Vector, &f64)| (q - &a).amax() <= 1e-9 && (bq - b).abs() <= 1e-9 * b.abs().max(1.0)) {
            normals.push(a);
            offsets.push(b);
        }
    }
    HPolytope::new_unchecked(normals, offsets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(n: usize) -> HPolytope {
        let mut normals = Vec::new();
        for i in 0..n {
            normals.push(linalg::unit(n, i));
            normals.push(-linalg::unit(n, i));
        }
        HPolytope::new(normals, vec![1.0; 2 * n]).unwrap()
    }

    #[test]
    fn cube_vertices() {
        for n in 1..=6 {
            let v = vertices_of(&cube(n)).unwrap();
            assert_eq!(v.len(), 1 << n);
            assert!(v.iter().all(|p| p.iter().all(|x| (x.abs() - 1.0).abs() < 1e-12)));
        }
    }

    #[test]
    fn cross_polytope_facets() {
        for n in 2..=6 {
            let mut pts = Vec::new();
            for i in 0..n {
                pts.push(linalg::unit(n, i));
                pts.push(-linalg::unit(n, i));
            }
            let h = facets_of(&VPolytope::new(pts).unwrap()).unwrap();
            assert_eq!(h.len(), 1 << n);
            let expect = 1.0 / (n as f64).sqrt();
            assert!(h.offsets().iter().all(|b| (b - expect).abs() < 1e-12));
        }
    }

    #[test]
    fn simplex_round_trip() {
        let pts = linalg::simplex_directions(4);
        let v = VPolytope::new(pts.clone()).unwrap();
        let h = facets_of(&v).unwrap();
        assert_eq!(h.len(), 5);
        let back = vertices_of(&h).unwrap();
        assert_eq!(back.len(), 5);
        for p in &pts {
            assert!(back.iter().any(|q| (q - p).amax() < 1e-10));
        }
    }

    #[test]
    fn limits_are_enforced() {
        let n = 7;
        let mut normals = Vec::new();
        for i in 0..n {
            normals.push(linalg::unit(n, i));
            normals.push(-linalg::unit(n, i));
        }
        let h = HPolytope::new(normals, vec![1.0; 2 * n]).unwrap();
        assert!(matches!(vertices_of(&h), Err(GeomError::DimensionTooLarge(_))));
    }
}
