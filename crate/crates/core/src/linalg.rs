//! Small dense linear-algebra helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

pub fn unit(n: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[i] = 1.0;
    e
}

/// Matrix whose columns are the given vectors.
pub fn columns(vs: &[Vector]) -> Matrix {
    let n = vs.first().map_or(0, |v| v.len());
    Matrix::from_fn(n, vs.len(), |i, j| vs[j][i])
}

pub fn centroid(points: &[Vector]) -> Vector {
    let n = points[0].len();
    points.iter().fold(Vector::zeros(n), |acc, p| acc + p) / points.len() as f64
}

/// Singular values in decreasing order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Dimension of the affine hull, relative tolerance on singular values.
pub fn affine_rank(points: &[Vector], tol: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let c = centroid(points);
    let centered: Vec<Vector> = points.iter().map(|p| p - &c).collect();
    let m = columns(&centered);
    let s = singular_values(&m);
    let scale = s.first().copied().unwrap_or(0.0).max(1.0);
    s.iter().filter(|&&x| x > tol * scale).count()
}

/// Orthonormal basis (as columns) of the span of the given columns, by
/// modified Gram-Schmidt with re-orthogonalisation. Columns with residual
/// below `tol` are dropped.
pub fn orthonormal_basis(cols: &[Vector], tol: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for c in cols {
        let mut v = c.clone();
        for _ in 0..2 {
            for q in &out {
                let d = q.dot(&v);
                v -= q * d;
            }
        }
        let nrm = v.norm();
        if nrm > tol {
            out.push(v / nrm);
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of span(cols) in R^n.
pub fn orthogonal_complement(cols: &[Vector], n: usize) -> Vec<Vector> {
    let mut basis = orthonormal_basis(cols, 1e-10);
    let k = basis.len();
    for i in 0..n {
        let mut v = unit(n, i);
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&v);
                v -= q * d;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-8 {
            basis.push(v / nrm);
        }
        if basis.len() == n {
            break;
        }
    }
    basis.split_off(k)
}

/// Uniformly random unit vector.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let nrm = v.norm();
        if nrm > 1e-12 {
            return v / nrm;
        }
    }
}

pub fn random_gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// `d + 1` unit vectors in R^d with pairwise inner product `-1/d` (vertices of
/// a regular simplex inscribed in the unit sphere).
pub fn simplex_directions(d: usize) -> Vec<Vector> {
    // centred standard basis of R^{d+1}, expressed in an orthonormal basis of 1^⊥
    let n1 = d + 1;
    let ones = Vector::from_element(n1, 1.0);
    let basis = orthogonal_complement(&[ones], n1);
    let scale = ((d + 1) as f64 / d as f64).sqrt();
    (0..n1)
        .map(|i| {
            let mut e = unit(n1, i);
            e.add_scalar_mut(-1.0 / n1 as f64);
            Vector::from_fn(d, |r, _| scale * basis[r].dot(&e))
        })
        .collect()
}

/// `m` equally spaced directions on the unit circle.
pub fn circle_directions(m: usize) -> Vec<Vector> {
    (0..m)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            Vector::from_vec(vec![t.cos(), t.sin()])
        })
        .collect()
}

/// Vertices of the icosahedron subdivided `level` times, projected to the
/// unit sphere (10·4^level + 2 points).
pub fn icosphere(level: usize) -> Vec<Vector> {
    use std::collections::HashMap;
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ];
    let normalize = |v: [f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    for v in verts.iter_mut() {
        *v = normalize(*v);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (va, vb) = (verts[a], verts[b]);
                verts.push(normalize([va[0] + vb[0], va[1] + vb[1], va[2] + vb[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let ab = midpoint(f[0], f[1], &mut verts);
            let bc = midpoint(f[1], f[2], &mut verts);
            let ca = midpoint(f[2], f[0], &mut verts);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    verts.into_iter().map(|v| Vector::from_vec(v.to_vec())).collect()
}

/// Lexicographic k-subsets of 0..n.
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Solve a small square system by partial-pivot Gaussian elimination on a
/// row-major buffer. Returns `None` when a pivot falls below `tol` relative
/// to the largest entry.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize, tol: f64) -> Option<()> {
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= tol * scale {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col * n + c] * b[c];
        }
        b[col] = s / a[col * n + col];
    }
    Some(())
}

/// Symmetric eigen-decomposition with eigenvalues ascending.
pub fn sym_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Matrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Symmetric square root of a symmetric positive semidefinite matrix.
pub fn sym_sqrt(m: &Matrix) -> Matrix {
    let (vals, vecs) = sym_eigen(m);
    let d = Matrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0).sqrt())));
    &vecs * d * vecs.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(Combinations::new(6, 3).count(), 20);
        assert_eq!(Combinations::new(4, 4).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
        assert_eq!(binomial(64, 6), 74_974_368);
    }

    #[test]
    fn simplex_directions_are_regular() {
        for d in 1..=6 {
            let vs = simplex_directions(d);
            assert_eq!(vs.len(), d + 1);
            for i in 0..=d {
                assert!((vs[i].norm() - 1.0).abs() < 1e-13);
                for j in 0..i {
                    assert!((vs[i].dot(&vs[j]) + 1.0 / d as f64).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn icosphere_sizes() {
        assert_eq!(icosphere(0).len(), 12);
        assert_eq!(icosphere(2).len(), 162);
        assert!(icosphere(1).iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = Vector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let c = orthogonal_complement(&[v.clone()], 4);
        assert_eq!(c.len(), 3);
        for (i, a) in c.iter().enumerate() {
            assert!(a.dot(&v).abs() < 1e-12);
            for b in &c[..i] {
                assert!(a.dot(b).abs() < 1e-12);
            }
        }
    }
}
