//! Path-following log-barrier solver for small second-order-cone programs,
//! optionally with a `-log det` term over a symmetric matrix block.
//!
//! minimize  f^T z - w·log det S(z)
//! s.t.      g_i^T z <= h_i
//!           ||A_j z + b_j|| <= c_j^T z + d_j
//!
//! Problems here have at most a few dozen variables and a few hundred cones,
//! so dense Newton steps are cheap.

use nalgebra::Cholesky;

use crate::error::{GeomError, Result};
use crate::linalg::{Matrix, Vector};

#[derive(Debug, Clone)]
pub struct Cone {
    pub a: Matrix,
    pub b: Vector,
    pub c: Vector,
    pub d: f64,
}

/// Symmetric `dim × dim` matrix read from the upper triangle of `z`, row by
/// row, starting at `offset`.
#[derive(Debug, Clone, Copy)]
pub struct SymBlock {
    pub offset: usize,
    pub dim: usize,
}

impl SymBlock {
    pub fn len(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.offset + i * self.dim - i * (i + 1) / 2 + j
    }

    pub fn read(&self, z: &Vector) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |i, j| z[self.index(i, j)])
    }

    pub fn write(&self, z: &mut Vector, m: &Matrix) {
        for i in 0..self.dim {
            for j in i..self.dim {
                z[self.index(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConeProgram {
    pub objective: Vector,
    pub linear: Vec<(Vector, f64)>,
    pub cones: Vec<Cone>,
    pub logdet: Option<(SymBlock, f64)>,
}

#[derive(Debug, Clone)]
pub struct ConeSolution {
    pub z: Vector,
    pub value: f64,
    /// Upper bound on the optimality gap from the barrier parameter.
    pub gap: f64,
    pub newton_steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct BarrierOptions {
    pub gap_tol: f64,
    pub growth: f64,
    pub max_newton: usize,
    /// Iterates with norm beyond this are taken as a sign of unboundedness.
    pub blowup: f64,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-12,
            growth: 12.0,
            max_newton: 40_000,
            blowup: 1e10,
        }
    }
}

impl ConeProgram {
    pub fn new(objective: Vector) -> Self {
        Self {
            objective,
            linear: Vec::new(),
            cones: Vec::new(),
            logdet: None,
        }
    }

    fn nvars(&self) -> usize {
        self.objective.len()
    }

    fn barrier_parameter(&self) -> f64 {
        let ld = self.logdet.map_or(0.0, |(b, w)| w * b.dim as f64);
        self.linear.len() as f64 + 2.0 * self.cones.len() as f64 + ld
    }

    fn strictly_feasible(&self, z: &Vector) -> bool {
        for (g, h) in &self.linear {
            if h - g.dot(z) <= 0.0 {
                return false;
            }
        }
        for cone in &self.cones {
            let s = cone.c.dot(z) + cone.d;
            let y = &cone.a * z + &cone.b;
            if s <= 0.0 || s * s - y.norm_squared() <= 0.0 {
                return false;
            }
        }
        if let Some((blk, _)) = self.logdet {
            if Cholesky::new(blk.read(z)).is_none() {
                return false;
            }
        }
        true
    }

    pub fn objective_value(&self, z: &Vector) -> f64 {
        let mut v = self.objective.dot(z);
        if let Some((blk, w)) = self.logdet {
            if let Some(ch) = Cholesky::new(blk.read(z)) {
                v -= w * ch.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum::<f64>();
            } else {
                v = f64::INFINITY;
            }
        }
        v
    }

    /// Value, gradient and Hessian of t·objective + barrier.
    fn derivatives(&self, z: &Vector, t: f64) -> (f64, Vector, Matrix) {
        let n = self.nvars();
        let mut val = t * self.objective.dot(z);
        let mut grad = &self.objective * t;
        let mut hess = Matrix::zeros(n, n);
        for (g, h) in &self.linear {
            let s = h - g.dot(z);
            val -= s.ln();
            grad += g / s;
            hess.ger(1.0 / (s * s), g, g, 1.0);
        }
        for cone in &self.cones {
            let s = cone.c.dot(z) + cone.d;
            let y = &cone.a * z + &cone.b;
            let q = s * s - y.norm_squared();
            val -= q.ln();
            let at_y = cone.a.transpose() * &y;
            let dq = &cone.c * (2.0 * s) - &at_y * 2.0;
            grad -= &dq / q;
            hess.ger(1.0 / (q * q), &dq, &dq, 1.0);
            hess.ger(-2.0 / q, &cone.c, &cone.c, 1.0);
            hess.gemm_tr(2.0 / q, &cone.a, &cone.a, 1.0);
        }
        if let Some((blk, w)) = self.logdet {
            let s = blk.read(z);
            let ch = Cholesky::new(s).expect("iterate keeps the block positive definite");
            let logdet: f64 = ch.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
            val -= t * w * logdet;
            let inv = ch.inverse();
            let d = blk.dim;
            let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
            for &(i, j) in &pairs {
                let p = blk.index(i, j);
                let mult = if i == j { 1.0 } else { 2.0 };
                grad[p] -= t * w * mult * inv[(i, j)];
            }
            // d²(-log det S)/dz_p dz_q = tr(W E_p W E_q), W = S^{-1}
            for &(i, j) in &pairs {
                let p = blk.index(i, j);
                for &(k, l) in &pairs {
                    let q = blk.index(k, l);
                    let term = |a: usize, b: usize, c: usize, e: usize| inv[(b, c)] * inv[(e, a)];
                    // E_p = e_i e_j^T (+ e_j e_i^T), likewise for E_q
                    let mut h = 0.0;
                    let ep: &[(usize, usize)] = if i == j { &[(i, i)] } else { &[(i, j), (j, i)] };
                    let eq: &[(usize, usize)] = if k == l { &[(k, k)] } else { &[(k, l), (l, k)] };
                    for &(a, b) in ep {
                        for &(c, e) in eq {
                            // tr(W e_a e_b^T W e_c e_e^T) = W_{e a} W_{b c}
                            h += term(a, b, c, e);
                        }
                    }
                    hess[(p, q)] += t * w * h;
                }
            }
        }
        (val, grad, hess)
    }

    fn merit(&self, z: &Vector, t: f64) -> f64 {
        if !self.strictly_feasible(z) {
            return f64::INFINITY;
        }
        let mut val = t * self.objective.dot(z);
        for (g, h) in &self.linear {
            val -= (h - g.dot(z)).ln();
        }
        for cone in &self.cones {
            let s = cone.c.dot(z) + cone.d;
            let y = &cone.a * z + &cone.b;
            val -= (s * s - y.norm_squared()).ln();
        }
        if let Some((blk, w)) = self.logdet {
            let ch = Cholesky::new(blk.read(z)).expect("feasibility checked");
            val -= t * w * ch.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum::<f64>();
        }
        val
    }

    /// Solve from a strictly feasible starting point.
    pub fn solve(&self, start: Vector, opts: BarrierOptions) -> Result<ConeSolution> {
        if !self.strictly_feasible(&start) {
            return Err(GeomError::InvalidInput("barrier start is not strictly feasible".into()));
        }
        let theta = self.barrier_parameter().max(1.0);
        let mut z = start;
        let mut t = 1.0;
        let mut steps = 0usize;
        loop {
            // centering; once near the central path a bounded number of
            // steps per stage keeps rounding noise at large t from stalling
            // the loop
            let mut inner = 0usize;
            loop {
                inner += 1;
                if steps >= opts.max_newton {
                    return Err(GeomError::NoConvergence {
                        iterations: steps,
                        residual: theta / t,
                    });
                }
                steps += 1;
                let (val, grad, hess) = self.derivatives(&z, t);
                let dir = match newton_direction(&hess, &grad) {
                    Some(d) => d,
                    None => break,
                };
                let decrement = -grad.dot(&dir);
                if decrement < 1e-14 {
                    break;
                }
                let mut step = 1.0;
                let mut accepted = false;
                let mut gain = 0.0;
                while step > 1e-16 {
                    let cand = &z + &dir * step;
                    let m = self.merit(&cand, t);
                    if m <= val - 0.25 * step * decrement {
                        z = cand;
                        accepted = true;
                        gain = val - m;
                        break;
                    }
                    step *= 0.5;
                }
                if z.amax() > opts.blowup {
                    return Err(GeomError::Unbounded);
                }
                let stalled = gain <= 1e-12 * val.abs().max(1.0);
                let centered = decrement < 1e-9 || stalled || (inner >= 60 && decrement < 1e-3);
                if !accepted || centered || inner >= 5000 {
                    break;
                }
            }
            if theta / t <= opts.gap_tol {
                break;
            }
            t *= opts.growth;
        }
        Ok(ConeSolution {
            value: self.objective_value(&z),
            gap: theta / t,
            z,
            newton_steps: steps,
        })
    }
}

fn newton_direction(hess: &Matrix, grad: &Vector) -> Option<Vector> {
    let n = grad.len();
    let scale = hess.diagonal().amax().max(1e-300);
    let mut reg = 0.0;
    for _ in 0..8 {
        let h = hess + Matrix::identity(n, n) * reg;
        if let Some(ch) = Cholesky::new(h) {
            let d = ch.solve(&(-grad));
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        reg = if reg == 0.0 { scale * 1e-14 } else { reg * 100.0 };
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_support() {
        // max x + 2y on the unit disc, as min -(x + 2y)
        let mut p = ConeProgram::new(Vector::from_vec(vec![-1.0, -2.0]));
        p.cones.push(Cone {
            a: Matrix::identity(2, 2),
            b: Vector::zeros(2),
            c: Vector::zeros(2),
            d: 1.0,
        });
        let sol = p.solve(Vector::zeros(2), BarrierOptions::default()).unwrap();
        assert!((sol.value + 5f64.sqrt()).abs() < 1e-10, "{}", sol.value);
    }

    #[test]
    fn logdet_of_box_inscribed() {
        // largest axis-aligned ellipse {diag(a,b) y} inside |x|<=2, |y|<=1
        let blk = SymBlock { offset: 0, dim: 2 };
        let mut p = ConeProgram::new(Vector::zeros(3));
        p.logdet = Some((blk, 1.0));
        for (row, bound) in [(0usize, 2.0), (1, 1.0)] {
            for sign in [1.0, -1.0] {
                // ||B e_row|| <= bound
                let mut a = Matrix::zeros(2, 3);
                for col in 0..2 {
                    a[(col, blk.index(col, row))] = sign;
                }
                p.cones.push(Cone {
                    a,
                    b: Vector::zeros(2),
                    c: Vector::zeros(3),
                    d: bound,
                });
            }
        }
        let mut z = Vector::zeros(3);
        blk.write(&mut z, &(Matrix::identity(2, 2) * 0.5));
        let sol = p.solve(z, BarrierOptions::default()).unwrap();
        let b = blk.read(&sol.z);
        assert!((b[(0, 0)] - 2.0).abs() < 1e-9, "{b}");
        assert!((b[(1, 1)] - 1.0).abs() < 1e-9);
        assert!(b[(0, 1)].abs() < 1e-9);
    }

    #[test]
    fn unbounded_is_detected() {
        let mut p = ConeProgram::new(Vector::from_vec(vec![-1.0]));
        p.linear.push((Vector::from_vec(vec![-1.0]), 1.0));
        assert_eq!(p.solve(Vector::zeros(1), BarrierOptions::default()).unwrap_err(), GeomError::Unbounded);
    }
}
