//! Multistart Nelder–Mead over linear maps for the affine extrema of
//! `D/2r` and `w/2R`, and an upper bound on the Grünbaum distance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::poly::{self, Gauge, Poly};
use crate::bodies::{AffineMap, ConvexBody};
use crate::ellipsoid::normalize_john;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::optimize::nelder_mead_restarted;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// No restart improved on the John-position start.
    JohnStart,
    MultistartLocal,
}

impl SearchMethod {
    pub fn name(self) -> &'static str {
        match self {
            SearchMethod::JohnStart => "john-start",
            SearchMethod::MultistartLocal => "multistart-local",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 50, seed: 0, max_iters: 3000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineSearchResult {
    /// Linear part of the best map; the translation moves the incenter of
    /// the image to the origin.
    pub best_map: AffineMap,
    pub best_ratio: f64,
    pub start_ratio: f64,
    pub method: SearchMethod,
    pub iterations: u64,
}

/// Linear maps as parameter vectors around a base map. Euclidean gauges
/// are rotation invariant, so an upper-triangular factor with positive
/// diagonal suffices there; a polytope gauge needs the full matrix.
#[derive(Clone, Copy)]
enum Chart {
    Triangular(usize),
    Full(usize),
}

impl Chart {
    fn len(self) -> usize {
        match self {
            Chart::Triangular(n) => n * (n + 1) / 2,
            Chart::Full(n) => n * n,
        }
    }

    fn matrix(self, x: &[f64], base: &Matrix) -> Matrix {
        match self {
            Chart::Triangular(n) => {
                let mut u = Matrix::zeros(n, n);
                let mut it = x.iter();
                for i in 0..n {
                    for j in i..n {
                        let v = *it.next().expect("parameter length");
                        u[(i, j)] = if i == j { v.exp() } else { v };
                    }
                }
                u * base
            }
            Chart::Full(n) => (Matrix::identity(n, n) + Matrix::from_column_slice(n, n, x)) * base,
        }
    }
}

type Objective<'a> = dyn Fn(&Matrix) -> f64 + Sync + 'a;

struct Outcome {
    map: Matrix,
    value: f64,
    start: f64,
    improved: bool,
    iterations: u64,
}

fn multistart(chart: Chart, bases: &[Matrix], f: &Objective<'_>, opts: SearchOptions) -> Outcome {
    let runs: Vec<(usize, Matrix, f64, u64)> = (0..opts.restarts.max(bases.len()))
        .into_par_iter()
        .map(|i| {
            let base = &bases[i % bases.len()];
            let x0: Vec<f64> = if i < bases.len() {
                vec![0.0; chart.len()]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9E37_79B9).wrapping_add(i as u64));
                let normal = Normal::new(0.0, 0.3).expect("valid sigma");
                (0..chart.len()).map(|_| normal.sample(&mut rng)).collect()
            };
            let g = |x: &[f64]| f(&chart.matrix(x, base));
            let r = nelder_mead_restarted(g, &x0, 0.1, 1e-13, opts.max_iters);
            (i, chart.matrix(&r.x, base), r.value, r.iterations)
        })
        .collect();
    let start = f(&bases[0]);
    let iterations = runs.iter().map(|r| r.3).sum();
    let (_, map, value, _) = runs
        .into_iter()
        .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(a.0.cmp(&b.0)))
        .expect("at least one run");
    if value < start {
        Outcome { map, value, start, improved: value < start - 1e-12, iterations }
    } else {
        Outcome { map: bases[0].clone(), value: start, start, improved: false, iterations }
    }
}

fn john_linear(body: &ConvexBody) -> Result<Matrix> {
    Ok(normalize_john(body)?.1.map.linear().clone())
}

fn centered(k: &Poly, g: &Gauge, l: Matrix) -> Result<AffineMap> {
    let image = k.mapped(&l).ok_or_else(|| crate::error::GeomError::DegenerateInput("singular map".into()))?;
    let (_, t) = poly::inradius(&image, g)?;
    AffineMap::new(l, -t)
}

fn dr_ratio(k: &Poly, g: &Gauge, l: &Matrix) -> f64 {
    let Some(image) = k.mapped(l) else { return f64::INFINITY };
    match poly::inradius(&image, g) {
        Ok((r, _)) if r > 0.0 => poly::diameter(&image, g).0 / (2.0 * r),
        _ => f64::INFINITY,
    }
}

fn setup(k: &ConvexBody, c: Option<&ConvexBody>) -> Result<(Poly, Gauge, Chart, Vec<Matrix>)> {
    let p = Poly::from_body(k)?;
    let g = Gauge::of(c)?;
    let n = p.dim();
    let jk = john_linear(k)?;
    let (chart, bases) = match c {
        None => (Chart::Triangular(n), vec![jk]),
        Some(cb) => {
            let jc = john_linear(cb)?;
            let to_c = jc.try_inverse().unwrap_or_else(|| Matrix::identity(n, n)) * jk;
            (Chart::Full(n), vec![to_c, Matrix::identity(n, n)])
        }
    };
    Ok((p, g, chart, bases))
}

/// Searches for a linear map `A` with small `D(AK,C)/2r(AK,C)`, Euclidean
/// when `c` is `None`. The result is an upper bound on the true minimum and
/// never exceeds the ratio at the start map, the John position of `K` (or
/// for a polytope gauge the map sending the John ellipsoid of `K` to that
/// of `C`).
pub fn minimize_dr_affine(k: &ConvexBody, c: Option<&ConvexBody>, opts: SearchOptions) -> Result<AffineSearchResult> {
    let (p, g, chart, bases) = setup(k, c)?;
    let f = |l: &Matrix| dr_ratio(&p, &g, l);
    let out = multistart(chart, &bases, &f, opts);
    Ok(AffineSearchResult {
        best_map: centered(&p, &g, out.map)?,
        best_ratio: out.value,
        start_ratio: out.start,
        method: if out.improved { SearchMethod::MultistartLocal } else { SearchMethod::JohnStart },
        iterations: out.iterations,
    })
}

/// Searches for a linear map `A` with large Euclidean `w(AK)/2R(AK)`; the
/// reported ratio is a lower bound on the true maximum.
pub fn maximize_wr_affine(k: &ConvexBody, opts: SearchOptions) -> Result<AffineSearchResult> {
    let (p, g, chart, bases) = setup(k, None)?;
    let f = |l: &Matrix| {
        let Some(image) = p.mapped(l) else { return f64::INFINITY };
        match (poly::width(&image, &g), poly::circumradius(&image, &g)) {
            (Ok(w), Ok((r, _))) if w.upper > 0.0 => 2.0 * r / w.upper,
            _ => f64::INFINITY,
        }
    };
    let out = multistart(chart, &bases, &f, opts);
    Ok(AffineSearchResult {
        best_map: centered(&p, &g, out.map)?,
        best_ratio: 1.0 / out.value,
        start_ratio: 1.0 / out.start,
        method: if out.improved { SearchMethod::MultistartLocal } else { SearchMethod::JohnStart },
        iterations: out.iterations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrunbaumBound {
    /// `C + t ⊂ A(K) ⊂ ρσC + t'`; an upper bound on the Grünbaum distance.
    pub rho: f64,
    /// `+1` or `-1`.
    pub sigma: f64,
    pub map: AffineMap,
    /// `R(AK, σC)` recomputed for the final map after scaling `r(AK, C)` to 1.
    pub outer_check: f64,
    pub inner_check: f64,
    pub dr_ratio: f64,
}

fn sandwich(k: &Poly, g: &Gauge, l: &Matrix) -> Option<(f64, f64)> {
    let image = k.mapped(l)?;
    let (r, _) = poly::inradius(&image, g).ok()?;
    if r <= 0.0 {
        return None;
    }
    Some(match g {
        Gauge::Euclidean => (poly::circumradius(&image, g).ok()?.0 / r, 1.0),
        Gauge::Poly(pg) => {
            let plus = poly::circumradius_poly(&image, &pg.c).ok()?.0;
            let minus = poly::circumradius_poly(&image, &pg.neg).ok()?.0;
            if plus <= minus { (plus / r, 1.0) } else { (minus / r, -1.0) }
        }
    })
}

/// Certified `ρ` with `C ⊂_t AK ⊂_t ρ(±C)`: the `D/2r` search result,
/// refined on `min(R(AK,C), R(AK,-C))/r(AK,C)`.
pub fn grunbaum_upper_bound(k: &ConvexBody, c: Option<&ConvexBody>, opts: SearchOptions) -> Result<GrunbaumBound> {
    let dr = minimize_dr_affine(k, c, opts)?;
    let (p, g, chart, mut bases) = setup(k, c)?;
    bases.insert(0, dr.best_map.linear().clone());
    let f = |l: &Matrix| sandwich(&p, &g, l).map_or(f64::INFINITY, |s| s.0);
    let out = multistart(chart, &bases, &f, opts);
    let image = p.mapped(&out.map).expect("finite objective");
    let (r, _) = poly::inradius(&image, &g)?;
    let l = out.map / r;
    let map = centered(&p, &g, l.clone())?;
    let (rho, sigma) = sandwich(&p, &g, &l).expect("finite objective");
    let image = p.mapped(&l).expect("invertible");
    let inner_check = poly::inradius(&image, &g)?.0;
    let outer_check = match &g {
        Gauge::Euclidean => poly::circumradius(&image, &g)?.0,
        Gauge::Poly(pg) => poly::circumradius_poly(&image, if sigma > 0.0 { &pg.c } else { &pg.neg })?.0,
    };
    Ok(GrunbaumBound {
        rho,
        sigma,
        map,
        outer_check,
        inner_check,
        dr_ratio: dr.best_ratio,
    })
}
