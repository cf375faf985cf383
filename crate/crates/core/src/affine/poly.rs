//! Polytopes held in both representations, with the four radial
//! functionals relative to a polytope gauge or the Euclidean ball.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bodies::{self, ConvexBody, HPolytope, VPolytope};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{Cmp, LinearProgram, Sense};
use crate::optimize::nelder_mead;
use crate::radii::min_enclosing_ball;

const TIGHT: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) struct Poly {
    pub vertices: Vec<Vector>,
    /// Unit normals.
    pub h: HPolytope,
    /// Vertex index pairs; filled for `n = 3` only.
    pub edges: Vec<(usize, usize)>,
}

impl Poly {
    pub fn from_body(body: &ConvexBody) -> Result<Self> {
        let (vertices, h) = match body {
            ConvexBody::V(v) => {
                let h = bodies::facets_of(v)?;
                (bodies::vertices_of(&h)?, h)
            }
            ConvexBody::H(h) => (bodies::vertices_of(h)?, h.normalized()),
            ConvexBody::Ball(_) => {
                return Err(GeomError::RepresentationUnavailable(
                    "radial functionals need a polytope".into(),
                ))
            }
        };
        let mut p = Self { vertices, h, edges: Vec::new() };
        if p.dim() == 3 {
            p.edges = p.find_edges();
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    fn find_edges(&self) -> Vec<(usize, usize)> {
        let scale = self.vertices.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let tight: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .map(|v| {
                self.h
                    .halfspaces()
                    .enumerate()
                    .filter(|(_, (a, b))| (b - a.dot(v)).abs() <= TIGHT * scale)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let shared = tight[i].iter().filter(|f| tight[j].contains(f)).count();
                if shared >= 2 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Image under `x ↦ l·x`; `None` when `l` is singular.
    pub fn mapped(&self, l: &Matrix) -> Option<Self> {
        let inv_t = l.clone().try_inverse()?.transpose();
        let vertices = self.vertices.iter().map(|v| l * v).collect();
        let (normals, offsets): (Vec<Vector>, Vec<f64>) = self
            .h
            .halfspaces()
            .map(|(a, b)| {
                let m = &inv_t * a;
                let nrm = m.norm();
                (m / nrm, b / nrm)
            })
            .unzip();
        if offsets.iter().any(|b| !b.is_finite()) {
            return None;
        }
        Some(Self {
            vertices,
            h: HPolytope::new_unchecked(normals, offsets).ok()?,
            edges: self.edges.clone(),
        })
    }

    pub fn negated(&self) -> Self {
        self.mapped(&-Matrix::identity(self.dim(), self.dim())).expect("invertible")
    }

    pub fn support(&self, a: &Vector) -> f64 {
        bodies::vertex_support(&self.vertices, a)
    }

    /// `h(a) + h(-a)`.
    pub fn breadth(&self, a: &Vector) -> f64 {
        self.support(a) + self.support(&-a)
    }

    fn edge_directions(&self) -> Vec<Vector> {
        self.edges.iter().map(|&(i, j)| &self.vertices[j] - &self.vertices[i]).collect()
    }
}

/// The gauge `C` in `w, D, R, r`, or the Euclidean ball.
#[derive(Debug, Clone)]
pub(crate) enum Gauge {
    Euclidean,
    Poly(Box<PolyGauge>),
}

#[derive(Debug, Clone)]
pub(crate) struct PolyGauge {
    pub c: Poly,
    pub neg: Poly,
    /// Directions containing every facet normal of `(C - C)/2`, each with
    /// its support value.
    sym: Vec<(Vector, f64)>,
}

impl Gauge {
    pub fn of(c: Option<&ConvexBody>) -> Result<Self> {
        let Some(body) = c else { return Ok(Gauge::Euclidean) };
        let c = Poly::from_body(body)?;
        let dirs = match c.dim() {
            2 | 3 => fan_rays(&[&c]).into_iter().flat_map(|a| [-&a, a]).collect(),
            _ => {
                let diffs: Vec<Vector> = c
                    .vertices
                    .iter()
                    .flat_map(|p| c.vertices.iter().filter(move |q| *q != p).map(move |q| (p - q) / 2.0))
                    .collect();
                bodies::facets_of(&VPolytope::new(diffs)?)?.normals().to_vec()
            }
        };
        let sym = dirs
            .into_iter()
            .map(|a| {
                let hs = c.breadth(&a) / 2.0;
                (a, hs)
            })
            .collect();
        let neg = c.negated();
        Ok(Gauge::Poly(Box::new(PolyGauge { c, neg, sym })))
    }

    /// `h_C(a) + h_C(-a)`.
    fn breadth(&self, a: &Vector) -> f64 {
        match self {
            Gauge::Euclidean => 2.0 * a.norm(),
            Gauge::Poly(g) => g.c.breadth(a),
        }
    }

    /// Gauge of `(C - C)/2`.
    fn sym_gauge(&self, z: &Vector) -> f64 {
        match self {
            Gauge::Euclidean => z.norm(),
            Gauge::Poly(g) => g.sym.iter().map(|(a, h)| a.dot(z) / h).fold(0.0, f64::max),
        }
    }
}

/// Rays of the common refinement of the normal fans, for `n ∈ {2, 3}`.
/// Every local minimum of a ratio of two breadth functions sits on one.
fn fan_rays(polys: &[&Poly]) -> Vec<Vector> {
    let mut out: Vec<Vector> = polys.iter().flat_map(|p| p.h.normals().iter().cloned()).collect();
    if polys.first().is_some_and(|p| p.dim() == 3) {
        let edges: Vec<Vector> = polys.iter().flat_map(|p| p.edge_directions()).collect();
        for (i, e) in edges.iter().enumerate() {
            for f in &edges[i + 1..] {
                let x = e.cross(f);
                let nrm = x.norm();
                if nrm > 1e-9 * e.norm() * f.norm() {
                    out.push(x / nrm);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Width {
    /// Smallest ratio found; exact for `n <= 3`.
    pub upper: f64,
    /// Equals `upper` when exact, `2r` otherwise.
    pub lower: f64,
    pub direction: Vector,
}

fn width_ratio(k: &Poly, g: &Gauge, a: &Vector) -> f64 {
    2.0 * k.breadth(a) / g.breadth(a)
}

pub(crate) fn width(k: &Poly, g: &Gauge) -> Result<Width> {
    let n = k.dim();
    if n <= 3 {
        let mut polys = vec![k];
        if let Gauge::Poly(p) = g {
            polys.push(&p.c);
        }
        let (upper, direction) = fan_rays(&polys)
            .into_iter()
            .map(|a| (width_ratio(k, g, &a), a))
            .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
            .ok_or_else(|| GeomError::DegenerateInput("no facets".into()))?;
        return Ok(Width { upper, lower: upper, direction });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5717);
    let mut samples: Vec<(f64, Vector)> = (0..10_000)
        .map(|_| {
            let a = linalg::random_unit(&mut rng, n);
            (width_ratio(k, g, &a), a)
        })
        .collect();
    samples.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut best = samples[0].clone();
    for (_, a) in samples.iter().take(5) {
        let f = |x: &[f64]| width_ratio(k, g, &Vector::from_column_slice(x));
        let r = nelder_mead(f, a.as_slice(), 0.05, 1e-14, 4000);
        if r.value < best.0 {
            best = (r.value, Vector::from_vec(r.x).normalize());
        }
    }
    let (r, _) = inradius(k, g)?;
    Ok(Width {
        upper: best.0,
        lower: 2.0 * r,
        direction: best.1,
    })
}

/// `max_{x,y ∈ K}` of the gauge of `(C - C)/2` at `x - y`.
pub(crate) fn diameter(k: &Poly, g: &Gauge) -> (f64, usize, usize) {
    let v = &k.vertices;
    let mut best = (0.0, 0, 0);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d = g.sym_gauge(&(&v[i] - &v[j]));
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    best
}

/// Smallest `ρ` with `K ⊂ ρC + t`, and `t`.
pub(crate) fn circumradius(k: &Poly, g: &Gauge) -> Result<(f64, Vector)> {
    match g {
        Gauge::Euclidean => {
            let b = min_enclosing_ball(&k.vertices)?;
            Ok((b.radius, b.center))
        }
        Gauge::Poly(p) => circumradius_poly(k, &p.c),
    }
}

pub(crate) fn circumradius_poly(k: &Poly, c: &Poly) -> Result<(f64, Vector)> {
    let n = k.dim();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::new(Sense::Minimize, obj);
    for (a, b) in c.h.halfspaces() {
        let mut row: Vec<f64> = a.iter().map(|x| -x).collect();
        row.push(-b);
        lp.row(row, Cmp::Le, -k.support(a));
    }
    lp.nonneg(n);
    let sol = lp.solve()?;
    Ok((sol.x[n], Vector::from_column_slice(&sol.x[..n])))
}

/// Largest `ρ` with `ρC + t ⊂ K`, and `t`.
pub(crate) fn inradius(k: &Poly, g: &Gauge) -> Result<(f64, Vector)> {
    let n = k.dim();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for (a, b) in k.h.halfspaces() {
        let mut row: Vec<f64> = a.iter().copied().collect();
        row.push(match g {
            Gauge::Euclidean => a.norm(),
            Gauge::Poly(p) => p.c.support(a),
        });
        lp.row(row, Cmp::Le, b);
    }
    lp.nonneg(n);
    let sol = lp.solve()?;
    Ok((sol.x[n], Vector::from_column_slice(&sol.x[..n])))
}
