//! Regular simplex, cube and cross-polytope, optionally rotated so that the
//! coordinate plane `span{e_0, …, e_{k-1}}` sees every vertex at the same
//! projected length, and the interpolating family through all three.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Certificate, Construction, Position, ScalarParams};
use crate::bodies::{hull_distance, VPolytope};
use crate::ellipsoid::JohnDecomposition;
use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularKind {
    Simplex,
    Cube,
    CrossPolytope,
}

impl RegularKind {
    pub fn name(self) -> &'static str {
        match self {
            RegularKind::Simplex => "simplex",
            RegularKind::Cube => "cube",
            RegularKind::CrossPolytope => "cross-polytope",
        }
    }
}

/// Rows of the real DFT basis of length `len`, grouped so that each group
/// adds the same amount to every column's squared norm: the constant and
/// alternating rows add `1/len`, each cosine/sine pair adds `2/len`.
fn dft_groups(len: usize, with_constant: bool) -> (Vec<[Vector; 2]>, Vec<Vector>) {
    let l = len as f64;
    let mut pairs = Vec::new();
    for j in 1..=(len - 1) / 2 {
        let w = 2.0 * PI * j as f64 / l;
        let c = Vector::from_fn(len, |m, _| (2.0 / l).sqrt() * (w * m as f64).cos());
        let s = Vector::from_fn(len, |m, _| (2.0 / l).sqrt() * (w * m as f64).sin());
        pairs.push([c, s]);
    }
    let mut singles = Vec::new();
    if with_constant {
        singles.push(Vector::from_element(len, 1.0 / l.sqrt()));
    }
    if len % 2 == 0 {
        singles.push(Vector::from_fn(len, |m, _| if m % 2 == 0 { 1.0 } else { -1.0 } / l.sqrt()));
    }
    (pairs, singles)
}

/// Picks `k` rows with constant column norm if the groups allow it; the
/// boolean reports whether they did.
fn pick_rows(pairs: &[[Vector; 2]], singles: &[Vector], k: usize) -> (Vec<Vector>, bool) {
    let mut out = Vec::new();
    let mut pi = pairs.iter();
    let mut si = singles.iter();
    while k - out.len() >= 2 {
        match pi.next() {
            Some([c, s]) => {
                out.push(c.clone());
                out.push(s.clone());
            }
            None => break,
        }
    }
    while out.len() < k {
        match si.next() {
            Some(r) => out.push(r.clone()),
            None => break,
        }
    }
    if out.len() == k {
        return (out, true);
    }
    if let Some([c, _]) = pi.next() {
        out.push(c.clone());
    }
    (out, false)
}

/// `k` orthonormal rows in `1^⊥ ⊂ R^len` whose columns all have squared norm
/// `k/len`, by alternating projection.
fn balanced_rows(len: usize, k: usize) -> Option<Vec<Vector>> {
    let target = (k as f64 / len as f64).sqrt();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Matrix::from_fn(k, len, |_, _| linalg::random_gaussian(&mut rng, 1)[0]);
        for _ in 0..20_000 {
            for mut col in x.column_iter_mut() {
                let nrm = col.norm();
                if nrm > 1e-14 {
                    col *= target / nrm;
                }
            }
            for mut row in x.row_iter_mut() {
                let mean = row.mean();
                row.add_scalar_mut(-mean);
            }
            let svd = x.clone().svd(true, true);
            x = svd.u.unwrap() * svd.v_t.unwrap();
            let dev = x.column_iter().map(|c| (c.norm() - target).abs()).fold(0.0, f64::max);
            if dev < 1e-15 {
                break;
            }
        }
        let dev = x.column_iter().map(|c| (c.norm() - target).abs()).fold(0.0, f64::max);
        if dev < 1e-13 {
            return Some(x.row_iter().map(|r| r.transpose()).collect());
        }
    }
    None
}

/// Completes `rows` (orthonormal, orthogonal to `fixed`) to an orthonormal
/// basis of `fixed^⊥`, keeping `rows` first.
fn complete(rows: Vec<Vector>, fixed: &[Vector], len: usize) -> Vec<Vector> {
    let mut span = rows.clone();
    span.extend(fixed.iter().cloned());
    let mut out = rows;
    out.extend(linalg::orthogonal_complement(&span, len));
    out
}

/// Orthogonal `n×n` matrix whose columns project onto the first `k`
/// coordinates with squared length `k/n`.
fn cross_frame(n: usize, k: usize) -> Matrix {
    let (pairs, singles) = dft_groups(n, true);
    let (rows, _) = pick_rows(&pairs, &singles, k);
    let rows = complete(rows, &[], n);
    Matrix::from_fn(n, n, |r, c| rows[r][c])
}

/// Unit vertices of a regular simplex whose projections onto the first `k`
/// coordinates all have squared length `k/n` whenever such a placement
/// exists.
fn simplex_frame(n: usize, k: usize) -> Vec<Vector> {
    let len = n + 1;
    let ones = Vector::from_element(len, 1.0 / (len as f64).sqrt());
    let (pairs, singles) = dft_groups(len, false);
    let (mut rows, exact) = pick_rows(&pairs, &singles, k);
    if !exact && k != 1 && k != n - 1 {
        if let Some(b) = balanced_rows(len, k) {
            rows = b;
        }
    }
    let rows = complete(rows, &[ones], len);
    let scale = (len as f64 / n as f64).sqrt();
    (0..len).map(|m| Vector::from_fn(n, |r, _| scale * rows[r][m])).collect()
}

fn cube_points(n: usize, h: f64) -> Vec<Vector> {
    (0..1usize << n)
        .map(|mask| Vector::from_fn(n, |i, _| if mask >> i & 1 == 1 { -h } else { h }))
        .collect()
}

/// Unit vertices (Loewner position) and unit facet normals of the body in
/// the given orientation.
fn unit_geometry(kind: RegularKind, n: usize, k: Option<usize>) -> (Vec<Vector>, Vec<Vector>) {
    let nf = n as f64;
    match kind {
        RegularKind::Cube => {
            let verts = cube_points(n, 1.0 / nf.sqrt());
            let normals = (0..n).flat_map(|i| [linalg::unit(n, i), -linalg::unit(n, i)]).collect();
            (verts, normals)
        }
        RegularKind::CrossPolytope => {
            let q = match k {
                Some(k) => cross_frame(n, k),
                None => Matrix::identity(n, n),
            };
            let verts = (0..n).flat_map(|i| [q.column(i).into_owned(), -q.column(i).into_owned()]).collect();
            let normals = cube_points(n, 1.0 / nf.sqrt()).into_iter().map(|e| &q * e).collect();
            (verts, normals)
        }
        RegularKind::Simplex => {
            let verts = match k {
                Some(k) => simplex_frame(n, k),
                None => linalg::simplex_directions(n),
            };
            let normals = verts.iter().map(|v| -v).collect();
            (verts, normals)
        }
    }
}

fn equal_weights(contacts: Vec<Vector>, n: usize) -> JohnDecomposition {
    let w = n as f64 / contacts.len() as f64;
    let weights = vec![w; contacts.len()];
    JohnDecomposition { contacts, weights }
}

/// John-position scale factor: the ratio of circumradius to inradius.
fn john_scale(kind: RegularKind, n: usize) -> f64 {
    match kind {
        RegularKind::Simplex => n as f64,
        RegularKind::Cube | RegularKind::CrossPolytope => (n as f64).sqrt(),
    }
}

fn build(kind: RegularKind, n: usize, position: Position, k: Option<usize>) -> Result<Construction> {
    if n < 2 {
        return Err(GeomError::ParameterOutOfRange(format!("n must be at least 2, got {n}")));
    }
    let (verts, normals) = unit_geometry(kind, n, k);
    let (points, contacts) = match position {
        Position::Loewner => (verts.clone(), verts),
        Position::John => {
            let s = john_scale(kind, n);
            (verts.iter().map(|v| v * s).collect(), normals)
        }
    };
    let mut cert = Certificate::new(position, equal_weights(contacts, n));
    cert.john_asymmetry = Some(if kind == RegularKind::Simplex { n as f64 } else { 1.0 });
    Ok(Construction {
        family: kind.name(),
        params: ScalarParams { k, ..ScalarParams::new(n) },
        body: VPolytope::new(points)?.into(),
        certificate: cert,
    })
}

/// Coordinate-aligned cube and cross-polytope; simplex from
/// [`linalg::simplex_directions`].
pub fn regular_body(kind: RegularKind, n: usize, position: Position) -> Result<Construction> {
    build(kind, n, position, None)
}

/// Orientation in which all vertices project onto `span{e_0, …, e_{k-1}}`
/// with equal length whenever that is possible.
pub fn regular_body_aligned(kind: RegularKind, n: usize, position: Position, k: usize) -> Result<Construction> {
    if k == 0 || k >= n {
        return Err(GeomError::ParameterOutOfRange(format!("k must lie in [1, {}], got {k}", n - 1)));
    }
    build(kind, n, position, Some(k))
}

/// Drops duplicates and candidates lying in the hull of the others.
fn extreme_only(mut points: Vec<Vector>) -> Result<Vec<Vector>> {
    let mut unique: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points.drain(..) {
        if unique.iter().all(|q| (q - &p).amax() > 1e-12) {
            unique.push(p);
        }
    }
    let points = unique;
    let mut keep = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        let others: Vec<Vector> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if hull_distance(&others, &points[i])? > 1e-10 {
            keep.push(points[i].clone());
        }
    }
    Ok(keep)
}

/// Piecewise hull interpolation cross-polytope → cube → simplex for
/// `t ∈ [0, 2]`, all in Loewner position and aligned for `k`.
pub fn outer_family(n: usize, k: usize, t: f64) -> Result<Construction> {
    if !(0.0..=2.0).contains(&t) {
        return Err(GeomError::ParameterOutOfRange(format!("t must lie in [0, 2], got {t}")));
    }
    let cross = regular_body_aligned(RegularKind::CrossPolytope, n, Position::Loewner, k)?;
    let cube = regular_body_aligned(RegularKind::Cube, n, Position::Loewner, k)?;
    let simplex = regular_body_aligned(RegularKind::Simplex, n, Position::Loewner, k)?;
    let pts = |c: &Construction| crate::bodies::extreme_points(&c.body);
    let (full, other, scale) = if t <= 0.5 {
        (&cross, &cube, 2.0 * t)
    } else if t <= 1.0 {
        (&cube, &cross, 2.0 * (1.0 - t))
    } else if t <= 1.5 {
        (&cube, &simplex, t - 1.0)
    } else {
        (&simplex, &cube, 2.0 * (2.0 - t))
    };
    let mut cand = pts(full)?;
    if scale > 0.0 {
        cand.extend(pts(other)?.into_iter().map(|p| p * scale));
    }
    let verts = extreme_only(cand)?;
    let cert = Certificate::new(Position::Loewner, full.certificate.decomposition.clone());
    Ok(Construction {
        family: "outer",
        params: ScalarParams {
            k: Some(k),
            t: Some(t),
            ..ScalarParams::new(n)
        },
        body: VPolytope::new(verts)?.into(),
        certificate: cert,
    })
}

/// Whether `regular_body_aligned` achieves equal projected lengths.
pub fn simplex_alignment_exists(n: usize, k: usize) -> bool {
    n % 2 == 1 || (k != 1 && k != n - 1)
}
