//! Derivative-free local minimization through `argmin`'s Nelder–Mead.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;

struct Objective<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, ArgminError> {
        let v = (self.0)(p);
        Ok(if v.is_finite() { v } else { f64::MAX })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMin {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: u64,
}

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of edge
/// `step`, stopping when the simplex values spread less than `tol`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: f64, tol: f64, max_iters: u64) -> LocalMin {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(tol).expect("nonnegative tolerance");
    let start = f(x0);
    let run = Executor::new(Objective(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run();
    match run {
        Ok(res) => {
            let st = res.state();
            let x = st.get_best_param().cloned().unwrap_or_else(|| x0.to_vec());
            let value = st.get_best_cost();
            if value <= start {
                LocalMin { x, value, iterations: st.get_iter() }
            } else {
                LocalMin { x: x0.to_vec(), value: start, iterations: st.get_iter() }
            }
        }
        Err(_) => LocalMin { x: x0.to_vec(), value: start, iterations: 0 },
    }
}

/// Repeats [`nelder_mead`] from its own optimum until the value stalls.
pub fn nelder_mead_restarted<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: f64, tol: f64, max_iters: u64) -> LocalMin {
    let mut best = nelder_mead(&f, x0, step, tol, max_iters);
    let mut step = step;
    for _ in 0..8 {
        step *= 0.5;
        let next = nelder_mead(&f, &best.x, step, tol, max_iters);
        let improved = best.value - next.value;
        let iterations = best.iterations + next.iterations;
        if next.value < best.value {
            best = LocalMin { iterations, ..next };
        }
        if improved <= tol {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead_restarted(f, &[-1.2, 1.0], 0.5, 1e-14, 5000);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x[0].abs();
        let r = nelder_mead(f, &[0.0], 1.0, 1e-12, 100);
        assert_eq!(r.value, 0.0);
    }
}
