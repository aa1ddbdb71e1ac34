//! Levenberg–Marquardt descent on the penalty of a flattened system.

use nalgebra::{DMatrix, DVector};

use crate::realc::{Constraint, ConstraintRel};

/// Margin for strict constraints (`a < b`, `a ≠ b`) in the penalty.
pub const STRICT_MARGIN: f64 = 1e-2;

pub struct Problem<'a> {
    pub constraints: &'a [Constraint],
    /// Columns of the unknowns among the system's variables.
    pub columns: &'a [usize],
    pub num_vars: usize,
}

pub struct Descent {
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: u64,
}

impl Problem<'_> {
    /// Residual of every constraint and its gradient sign convention:
    /// returns `(r, d)` where `∂r/∂x = d · ∂(lhs − rhs)/∂x`.
    fn residual(&self, c: &Constraint, x: &[f64]) -> (f64, f64) {
        let diff = c.lhs.eval_f64(x) - c.rhs.eval_f64(x);
        match c.rel {
            ConstraintRel::Eq => (diff, 1.0),
            ConstraintRel::Le => {
                if diff > 0.0 {
                    (diff, 1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            ConstraintRel::Lt => {
                if diff + STRICT_MARGIN > 0.0 {
                    (diff + STRICT_MARGIN, 1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            ConstraintRel::Ne => {
                let gap = STRICT_MARGIN - diff.abs();
                if gap > 0.0 {
                    (gap, if diff >= 0.0 { -1.0 } else { 1.0 })
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }

    fn full(&self, u: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.num_vars];
        for (j, &c) in self.columns.iter().enumerate() {
            x[c] = u[j];
        }
        x
    }

    pub fn cost(&self, u: &[f64]) -> f64 {
        let x = self.full(u);
        self.constraints
            .iter()
            .map(|c| self.residual(c, &x).0.powi(2))
            .sum()
    }

    fn linearize(&self, u: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let x = self.full(u);
        let m = self.constraints.len();
        let n = self.columns.len();
        let mut r = DVector::zeros(m);
        let mut jac = DMatrix::zeros(m, n);
        let mut grad = vec![0.0; self.num_vars];
        for (i, c) in self.constraints.iter().enumerate() {
            let (ri, d) = self.residual(c, &x);
            r[i] = ri;
            if d == 0.0 {
                continue;
            }
            grad.iter_mut().for_each(|g| *g = 0.0);
            c.lhs.backprop(&x, d, &mut grad);
            c.rhs.backprop(&x, -d, &mut grad);
            for (j, &col) in self.columns.iter().enumerate() {
                jac[(i, j)] = grad[col];
            }
        }
        (r, jac)
    }

    /// Minimizes the penalty from `u0` until it drops to `target` or the
    /// iteration cap is reached.
    pub fn descend(&self, u0: Vec<f64>, max_iters: u64, target: f64) -> Descent {
        let mut u = u0;
        let mut cost = self.cost(&u);
        let mut lambda = 1e-3;
        let mut iterations = 0;
        while iterations < max_iters && cost > target {
            iterations += 1;
            let (r, jac) = self.linearize(&u);
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let g = &jt * &r;
            let mut improved = false;
            while lambda < 1e12 {
                let mut a = jtj.clone();
                for i in 0..a.nrows() {
                    a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
                }
                let Some(chol) = a.cholesky() else {
                    lambda *= 10.0;
                    continue;
                };
                let step = chol.solve(&(-&g));
                let cand: Vec<f64> = u.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let c = self.cost(&cand);
                if c < cost {
                    u = cand;
                    cost = c;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        Descent {
            x: u,
            cost,
            iterations,
        }
    }
}
