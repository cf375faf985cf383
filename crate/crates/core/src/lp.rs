//! Thin dense front end over `minilp`.
//!
//! Every LP in the crate is tiny (at most a few hundred rows, a few dozen
//! columns), so rows are passed as dense coefficient slices.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<(Vec<f64>, Cmp, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    /// All variables start free.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn bound(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.bounds[var] = (lo, hi);
        self
    }

    pub fn nonneg(&mut self, var: usize) -> &mut Self {
        self.bound(var, 0.0, f64::INFINITY)
    }

    pub fn row(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) -> &mut Self {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push((coeffs, cmp, rhs));
        self
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let dir = match self.sense {
            Sense::Minimize => OptimizationDirection::Minimize,
            Sense::Maximize => OptimizationDirection::Maximize,
        };
        let mut problem = Problem::new(dir);
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(&self.bounds)
            .map(|(&c, &b)| problem.add_var(c, b))
            .collect();
        for (coeffs, cmp, rhs) in &self.rows {
            let expr: Vec<_> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, &c)| (vars[i], c))
                .collect();
            let op = match cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            problem.add_constraint(expr.as_slice(), op, *rhs);
        }
        match problem.solve() {
            Ok(sol) => {
                let x: Vec<f64> = vars.iter().map(|v| sol[*v]).collect();
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(GeomError::Unbounded);
                }
                // recompute the objective from x; minilp accumulates it incrementally
                let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                Ok(LpSolution { value, x })
            }
            Err(minilp::Error::Unbounded) => Err(GeomError::Unbounded),
            Err(minilp::Error::Infeasible) => Err(GeomError::Infeasible),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_support() {
        // max x + y on [-1,1]^2
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0]);
        lp.row(vec![1.0, 0.0], Cmp::Le, 1.0)
            .row(vec![-1.0, 0.0], Cmp::Le, 1.0)
            .row(vec![0.0, 1.0], Cmp::Le, 1.0)
            .row(vec![0.0, -1.0], Cmp::Le, 1.0);
        let sol = lp.solve().unwrap();
        assert!((sol.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_and_infeasible() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        lp.row(vec![-1.0], Cmp::Le, 1.0);
        assert_eq!(lp.solve().unwrap_err(), GeomError::Unbounded);
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0]);
        lp.row(vec![1.0], Cmp::Le, -1.0).nonneg(0);
        assert_eq!(lp.solve().unwrap_err(), GeomError::Infeasible);
    }

    #[test]
    fn free_variables_go_negative() {
        // min x + y s.t. x >= -3, y >= -2 + x/2
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 1.0]);
        lp.row(vec![1.0, 0.0], Cmp::Ge, -3.0)
            .row(vec![-0.5, 1.0], Cmp::Ge, -2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.value + 6.5).abs() < 1e-12, "{sol:?}");
    }
}
