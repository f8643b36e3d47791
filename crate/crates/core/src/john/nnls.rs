//! Nonnegative solutions of small dense linear systems.

use nalgebra::{DMatrix, DVector};

fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    a.clone()
        .svd(true, true)
        .solve(b, 1e-13)
        .expect("svd computed with both factors")
}

/// Lawson–Hanson active-set NNLS: `min |A x - b|` subject to `x >= 0`.
/// Returns the solution and its residual norm.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let ncols = a.ncols();
    let mut x = DVector::<f64>::zeros(ncols);
    let mut passive = vec![false; ncols];
    let tol = 1e-12 * (1.0 + a.amax() * b.amax());

    for _ in 0..3 * ncols.max(1) + 10 {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..ncols)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..ncols).filter(|&k| passive[k]).collect();
            let sub = a.select_columns(idx.iter());
            let sol = lstsq(&sub, b);
            let mut s = DVector::zeros(ncols);
            for (k, &i) in idx.iter().enumerate() {
                s[i] = sol[k];
            }
            if idx.iter().all(|&i| s[i] > 0.0) {
                x = s;
                break;
            }
            let mut alpha = f64::INFINITY;
            for &i in &idx {
                if s[i] <= 0.0 {
                    alpha = alpha.min(x[i] / (x[i] - s[i]));
                }
            }
            x += (&s - &x) * alpha;
            for &i in &idx {
                if x[i] <= 1e-15 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Minimum-Euclidean-norm solution of `A x = b, x >= 0`.
///
/// Semismooth Newton on the dual `max_v <b, v> - |(A^T v)_+|^2 / 2`, whose
/// maximizer yields `x = (A^T v)_+`. Returns `None` if the dual does not
/// settle within the iteration cap (e.g. the system is infeasible).
pub fn min_norm_nonnegative(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let rows = a.nrows();
    let mut v = DVector::<f64>::zeros(rows);
    let primal = |v: &DVector<f64>| (a.transpose() * v).map(|s| s.max(0.0));
    let dual = |v: &DVector<f64>| {
        let x = primal(v);
        b.dot(v) - 0.5 * x.norm_squared()
    };
    let tol = 1e-14 * (1.0 + b.norm());
    for _ in 0..500 {
        let x = primal(&v);
        let grad = b - a * &x;
        if grad.norm() <= tol {
            return Some(x);
        }
        let active: Vec<usize> = (0..a.ncols()).filter(|&j| x[j] > 0.0).collect();
        let a_s = a.select_columns(active.iter());
        let reg = if active.is_empty() {
            1.0
        } else {
            1e-12 * (1.0 + a_s.norm_squared())
        };
        let h = &a_s * a_s.transpose() + DMatrix::<f64>::identity(rows, rows) * reg;
        let step = h.cholesky()?.solve(&grad);
        let d0 = dual(&v);
        let slope = grad.dot(&step);
        let mut alpha = 1.0;
        loop {
            let trial = &v + &step * alpha;
            if dual(&trial) >= d0 + 1e-4 * alpha * slope {
                v = trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-16 {
                let x = primal(&v);
                return ((b - a * &x).norm() <= 1e-10 * (1.0 + b.norm())).then_some(x);
            }
        }
    }
    let x = primal(&v);
    ((b - a * &x).norm() <= 1e-10 * (1.0 + b.norm())).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnls_clamps_negative_component() {
        // unconstrained solution is (2, -1)
        let a = DMatrix::<f64>::identity(2, 2);
        let b = DVector::from_vec(vec![2.0, -1.0]);
        let (x, r) = nnls(&a, &b);
        assert!((x[0] - 2.0).abs() < 1e-14 && x[1] == 0.0);
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn min_norm_splits_evenly() {
        // x1 + x2 = 1 has min-norm nonnegative solution (1/2, 1/2)
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0]);
        let x = min_norm_nonnegative(&a, &b).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-14 && (x[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn min_norm_respects_sign() {
        // x1 - x2 = 1, x >= 0: minimum norm at (1, 0)
        let a = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let b = DVector::from_vec(vec![1.0]);
        let x = min_norm_nonnegative(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && x[1].abs() < 1e-14);
    }

    #[test]
    fn min_norm_detects_infeasible() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![-1.0]);
        assert!(min_norm_nonnegative(&a, &b).is_none());
    }
}
