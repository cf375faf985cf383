use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{Cmp, LinearProgram, Sense};

/// Absolute tolerance for merging duplicate vertices.
pub const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<Vector>,
}

impl VPolytope {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).ok_or_else(|| GeomError::DegenerateInput("no vertices".into()))?;
        let mut vertices: Vec<Vector> = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != dim {
                return Err(GeomError::WrongDimension { expected: dim, got: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(GeomError::InvalidInput("non-finite vertex coordinate".into()));
            }
            if !vertices.iter().any(|q| (q - &p).amax() <= DUPLICATE_TOL) {
                vertices.push(p);
            }
        }
        if vertices.len() < dim + 1 || linalg::affine_rank(&vertices, 1e-10) < dim {
            return Err(GeomError::DegenerateInput(format!("vertices do not affinely span R^{dim}")));
        }
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }
}

/// `{x : a_i^T x <= b_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<Vector>,
    offsets: Vec<f64>,
}

impl HPolytope {
    pub fn new(normals: Vec<Vector>, offsets: Vec<f64>) -> Result<Self> {
        let h = Self::new_unchecked(normals, offsets)?;
        h.check_bounded()?;
        let (_, r) = h.chebyshev()?;
        if r <= 1e-9 {
            return Err(GeomError::EmptyInterior);
        }
        Ok(h)
    }

    /// Shape checks only; boundedness and interior are the caller's promise.
    pub fn new_unchecked(normals: Vec<Vector>, offsets: Vec<f64>) -> Result<Self> {
        if normals.len() != offsets.len() || normals.is_empty() {
            return Err(GeomError::InvalidInput("halfspace normals and offsets differ in length".into()));
        }
        let dim = normals[0].len();
        for a in &normals {
            if a.len() != dim {
                return Err(GeomError::WrongDimension { expected: dim, got: a.len() });
            }
            if a.norm() == 0.0 || a.iter().any(|x| !x.is_finite()) {
                return Err(GeomError::InvalidInput("zero or non-finite halfspace normal".into()));
            }
        }
        if offsets.iter().any(|b| !b.is_finite()) {
            return Err(GeomError::InvalidInput("non-finite halfspace offset".into()));
        }
        Ok(Self { dim, normals, offsets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn halfspaces(&self) -> impl Iterator<Item = (&Vector, f64)> {
        self.normals.iter().zip(self.offsets.iter().copied())
    }

    /// Same polytope with every normal scaled to unit length.
    pub fn normalized(&self) -> Self {
        let (normals, offsets) = self
            .halfspaces()
            .map(|(a, b)| {
                let n = a.norm();
                (a / n, b / n)
            })
            .unzip();
        Self { dim: self.dim, normals, offsets }
    }

    fn lp_rows(&self, lp: &mut LinearProgram, extra: usize) {
        for (a, b) in self.halfspaces() {
            let mut row: Vec<f64> = a.iter().copied().collect();
            row.resize(self.dim + extra, 0.0);
            lp.row(row, Cmp::Le, b);
        }
    }

    pub(crate) fn support_lp(&self, a: &Vector) -> Result<f64> {
        let mut lp = LinearProgram::new(Sense::Maximize, a.iter().copied().collect());
        self.lp_rows(&mut lp, 0);
        match lp.solve() {
            Ok(sol) => Ok(sol.value),
            Err(GeomError::Unbounded) => Err(GeomError::UnboundedBody),
            Err(e) => Err(e),
        }
    }

    fn check_bounded(&self) -> Result<()> {
        for j in 0..self.dim {
            for sign in [1.0, -1.0] {
                let e = linalg::unit(self.dim, j) * sign;
                match self.support_lp(&e) {
                    Ok(_) => {}
                    Err(GeomError::UnboundedBody) => return Err(GeomError::Unbounded),
                    Err(GeomError::Infeasible) => return Err(GeomError::EmptyInterior),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(())
    }

    /// Center and radius of the largest inscribed ball.
    pub fn chebyshev(&self) -> Result<(Vector, f64)> {
        let n = self.dim;
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut lp = LinearProgram::new(Sense::Maximize, obj);
        for (a, b) in self.halfspaces() {
            let mut row: Vec<f64> = a.iter().copied().collect();
            row.push(a.norm());
            lp.row(row, Cmp::Le, b);
        }
        lp.nonneg(n);
        let sol = match lp.solve() {
            Ok(s) => s,
            Err(GeomError::Infeasible) => return Err(GeomError::EmptyInterior),
            Err(e) => return Err(e),
        };
        Ok((Vector::from_iterator(n, sol.x[..n].iter().copied()), sol.x[n]))
    }
}

/// `conv((center + radius·B^n) ∪ apexes)`, with optional certificate contact
/// directions used for John decompositions.
#[derive(Debug, Clone, PartialEq)]
pub struct BallHull {
    dim: usize,
    center: Vector,
    radius: f64,
    apexes: Vec<Vector>,
    contacts: Vec<Vector>,
}

impl BallHull {
    pub fn new(center: Vector, radius: f64, apexes: Vec<Vector>) -> Result<Self> {
        let dim = center.len();
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeomError::InvalidInput(format!("ball radius must be positive, got {radius}")));
        }
        let mut kept: Vec<Vector> = Vec::new();
        for p in apexes {
            if p.len() != dim {
                return Err(GeomError::WrongDimension { expected: dim, got: p.len() });
            }
            if (&p - &center).norm() <= radius * (1.0 + 1e-12) {
                continue;
            }
            if !kept.iter().any(|q| (q - &p).amax() <= DUPLICATE_TOL) {
                kept.push(p);
            }
        }
        Ok(Self {
            dim,
            center,
            radius,
            apexes: kept,
            contacts: Vec::new(),
        })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self {
            dim,
            center: Vector::zeros(dim),
            radius: 1.0,
            apexes: Vec::new(),
            contacts: Vec::new(),
        }
    }

    pub fn with_contacts(mut self, contacts: Vec<Vector>) -> Self {
        self.contacts = contacts;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn apexes(&self) -> &[Vector] {
        &self.apexes
    }

    pub fn contacts(&self) -> &[Vector] {
        &self.contacts
    }

    pub fn is_unit_ball_at_origin(&self) -> bool {
        self.center.amax() <= 1e-14 && (self.radius - 1.0).abs() <= 1e-14
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexBody {
    V(VPolytope),
    H(HPolytope),
    Ball(BallHull),
}

impl ConvexBody {
    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::V(p) => p.dim(),
            ConvexBody::H(p) => p.dim(),
            ConvexBody::Ball(b) => b.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexBody::V(_) => "vpolytope",
            ConvexBody::H(_) => "hpolytope",
            ConvexBody::Ball(_) => "ballhull",
        }
    }
}

impl From<VPolytope> for ConvexBody {
    fn from(p: VPolytope) -> Self {
        ConvexBody::V(p)
    }
}

impl From<HPolytope> for ConvexBody {
    fn from(p: HPolytope) -> Self {
        ConvexBody::H(p)
    }
}

impl From<BallHull> for ConvexBody {
    fn from(b: BallHull) -> Self {
        ConvexBody::Ball(b)
    }
}

/// `{x : (x - c)^T Q (x - c) <= 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: Vector,
    shape: Matrix,
}

impl Ellipsoid {
    pub fn new(center: Vector, shape: Matrix) -> Result<Self> {
        let n = center.len();
        if shape.nrows() != n || shape.ncols() != n {
            return Err(GeomError::WrongDimension { expected: n, got: shape.nrows() });
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax().max(1.0) {
            return Err(GeomError::InvalidInput("ellipsoid shape matrix is not symmetric".into()));
        }
        let shape = (&shape + shape.transpose()) * 0.5;
        let (vals, _) = linalg::sym_eigen(&shape);
        if vals[0] <= 0.0 {
            return Err(GeomError::InvalidInput("ellipsoid shape matrix is not positive definite".into()));
        }
        Ok(Self { center, shape })
    }

    /// Image of the unit ball under `y ↦ center + map·y`.
    pub fn from_map(center: Vector, map: &Matrix) -> Result<Self> {
        let m = map * map.transpose();
        let inv = m
            .try_inverse()
            .ok_or_else(|| GeomError::DegenerateInput("singular ellipsoid map".into()))?;
        Self::new(center, (&inv + inv.transpose()) * 0.5)
    }

    pub fn unit(n: usize) -> Self {
        Self {
            center: Vector::zeros(n),
            shape: Matrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn shape(&self) -> &Matrix {
        &self.shape
    }

    /// Symmetric `B` with `E = center + B·B^n`.
    pub fn map(&self) -> Matrix {
        let inv = self.shape.clone().try_inverse().expect("positive definite");
        linalg::sym_sqrt(&inv)
    }

    /// Semi-axis lengths in decreasing order.
    pub fn semiaxes(&self) -> Vec<f64> {
        let (vals, _) = linalg::sym_eigen(&self.shape);
        vals.iter().map(|v| 1.0 / v.sqrt()).collect()
    }

    pub fn value(&self, x: &Vector) -> f64 {
        let d = x - &self.center;
        d.dot(&(&self.shape * &d))
    }

    pub fn support(&self, a: &Vector) -> f64 {
        let inv = self.shape.clone().try_inverse().expect("positive definite");
        self.center.dot(a) + a.dot(&(inv * a)).max(0.0).sqrt()
    }

    /// Distance of the ellipsoid from `B^n`: max of center norm and the
    /// spread of the semi-axes around 1.
    pub fn deviation_from_unit_ball(&self) -> f64 {
        let axes = self.semiaxes();
        let spread = axes.iter().map(|a| (a - 1.0).abs()).fold(0.0, f64::max);
        spread.max(self.center.norm())
    }
}

/// `center + basis·axes·B^k` with `basis` an `n × k` column-orthonormal matrix
/// and `axes` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct KEllipsoid {
    center: Vector,
    basis: Matrix,
    axes: Matrix,
}

impl KEllipsoid {
    pub fn new(center: Vector, basis: Matrix, axes: Matrix) -> Result<Self> {
        let sub = Subspace::new(basis)?;
        if sub.dim() != center.len() {
            return Err(GeomError::WrongDimension { expected: center.len(), got: sub.dim() });
        }
        let k = sub.k();
        if axes.nrows() != k || axes.ncols() != k {
            return Err(GeomError::WrongDimension { expected: k, got: axes.nrows() });
        }
        let (vals, _) = linalg::sym_eigen(&axes);
        if vals[0] <= 0.0 || (&axes - axes.transpose()).amax() > 1e-12 {
            return Err(GeomError::InvalidInput("k-ellipsoid axes must be symmetric positive definite".into()));
        }
        Ok(Self {
            center,
            basis: sub.basis().clone(),
            axes,
        })
    }

    pub fn with_semiaxes(center: Vector, basis: Matrix, semiaxes: &[f64]) -> Result<Self> {
        let axes = Matrix::from_diagonal(&Vector::from_column_slice(semiaxes));
        Self::new(center, basis, axes)
    }

    pub fn ball(center: Vector, basis: Matrix, radius: f64) -> Result<Self> {
        let k = basis.ncols();
        Self::new(center, basis, Matrix::identity(k, k) * radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn k(&self) -> usize {
        self.basis.ncols()
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn axes(&self) -> &Matrix {
        &self.axes
    }

    pub fn carrier(&self) -> Subspace {
        Subspace { basis: self.basis.clone() }
    }

    pub fn semiaxes(&self) -> Vec<f64> {
        let (mut vals, _) = linalg::sym_eigen(&self.axes);
        vals.reverse();
        vals
    }

    /// Radius if all semi-axes agree within `tol`.
    pub fn ball_radius(&self, tol: f64) -> Option<f64> {
        let ax = self.semiaxes();
        let (lo, hi) = (ax[ax.len() - 1], ax[0]);
        (hi - lo <= tol).then_some(0.5 * (hi + lo))
    }

    /// k-dimensional volume relative to the unit k-ball.
    pub fn volume_ratio(&self) -> f64 {
        self.axes.determinant().abs()
    }

    /// Point `center + basis·axes·y`.
    pub fn point(&self, y: &Vector) -> Vector {
        &self.center + &self.basis * (&self.axes * y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn new(basis: Matrix) -> Result<Self> {
        let k = basis.ncols();
        if k == 0 || k > basis.nrows() {
            return Err(GeomError::InvalidInput(format!("subspace basis has {k} columns in R^{}", basis.nrows())));
        }
        let gram = basis.transpose() * &basis;
        if (gram - Matrix::identity(k, k)).amax() > 1e-10 {
            return Err(GeomError::InvalidInput("subspace basis is not orthonormal".into()));
        }
        Ok(Self { basis })
    }

    /// Orthonormalized span of the given vectors.
    pub fn span(vectors: &[Vector]) -> Result<Self> {
        let q = linalg::orthonormal_basis(vectors, 1e-10);
        if q.is_empty() {
            return Err(GeomError::DegenerateInput("empty span".into()));
        }
        Self::new(linalg::columns(&q))
    }

    pub fn coordinate(n: usize, idx: &[usize]) -> Result<Self> {
        let cols: Vec<Vector> = idx.iter().map(|&i| linalg::unit(n, i)).collect();
        if idx.iter().any(|&i| i >= n) {
            return Err(GeomError::InvalidInput(format!("coordinate index out of range for R^{n}")));
        }
        Self::new(linalg::columns(&cols))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn k(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn coords(&self, x: &Vector) -> Vector {
        self.basis.transpose() * x
    }

    pub fn project(&self, x: &Vector) -> Vector {
        &self.basis * self.coords(x)
    }

    pub fn embed(&self, y: &Vector) -> Vector {
        &self.basis * y
    }

    pub fn complement(&self) -> Subspace {
        let cols: Vec<Vector> = self.basis.column_iter().map(|c| c.into_owned()).collect();
        let comp = linalg::orthogonal_complement(&cols, self.dim());
        Subspace {
            basis: linalg::columns(&comp),
        }
    }
}

/// `x ↦ linear·x + translation`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    linear: Matrix,
    translation: Vector,
}

impl AffineMap {
    pub fn new(linear: Matrix, translation: Vector) -> Result<Self> {
        if linear.nrows() != linear.ncols() || linear.nrows() != translation.len() {
            return Err(GeomError::WrongDimension {
                expected: translation.len(),
                got: linear.nrows(),
            });
        }
        if linear.determinant().abs() <= 1e-12 {
            return Err(GeomError::DegenerateInput("affine map is not invertible".into()));
        }
        Ok(Self { linear, translation })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            linear: Matrix::identity(n, n),
            translation: Vector::zeros(n),
        }
    }

    pub fn linear(&self) -> &Matrix {
        &self.linear
    }

    pub fn translation(&self) -> &Vector {
        &self.translation
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.linear * x + &self.translation
    }

    pub fn inverse(&self) -> Self {
        let inv = self.linear.clone().try_inverse().expect("checked invertible");
        let translation = -(&inv * &self.translation);
        Self { linear: inv, translation }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> Self {
        Self {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        }
    }

    pub fn is_similarity(&self, tol: f64) -> Option<f64> {
        let sv = linalg::singular_values(&self.linear);
        let (hi, lo) = (sv[0], sv[sv.len() - 1]);
        (hi - lo <= tol * hi).then_some(0.5 * (hi + lo))
    }
}
