//! Small dense linear-algebra helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

/// Volume of the Euclidean unit ball in `n` dimensions, `pi^(n/2) / Gamma(1 + n/2)`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let n = n as f64;
    (0.5 * n * std::f64::consts::PI.ln() - ln_gamma(1.0 + 0.5 * n)).exp()
}

/// `ln Gamma(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> f64 {
    ln_gamma(x)
}

/// Raises a symmetric positive semi-definite matrix to a real power via its eigen decomposition.
pub fn sym_pow(m: &DMatrix<f64>, exponent: f64) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| v.max(0.0).powf(exponent));
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Orthonormal basis (as columns) of the hyperplane perpendicular to `a`.
pub fn orthogonal_complement(a: &DVector<f64>) -> DMatrix<f64> {
    let n = a.len();
    let norm = a.norm();
    // Householder reflection sending e_1 to a/|a|; its remaining columns span a^perp.
    let mut v = a / norm;
    let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let vv = v.dot(&v);
    let h = DMatrix::<f64>::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
    h.columns(1, n - 1).into_owned()
}

/// Residuals of a weighted identity decomposition.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DecompositionResidual {
    /// `|| sum c_i u_i u_i^T - I ||_F`
    pub frobenius: f64,
    /// `| sum c_i - n |`
    pub trace_gap: f64,
    /// `| sum c_i u_i |`
    pub barycenter: f64,
}

pub fn decomposition_residual(vectors: &[DVector<f64>], weights: &[f64], dim: usize) -> DecompositionResidual {
    let mut frame = DMatrix::<f64>::zeros(dim, dim);
    let mut bary = DVector::<f64>::zeros(dim);
    let mut sum = 0.0;
    for (u, &c) in vectors.iter().zip(weights) {
        frame += u * u.transpose() * c;
        bary += u * c;
        sum += c;
    }
    frame -= DMatrix::<f64>::identity(dim, dim);
    DecompositionResidual {
        frobenius: frame.norm(),
        trace_gap: (sum - dim as f64).abs(),
        barycenter: bary.norm(),
    }
}

/// Volume of the simplex spanned by `points` (n+1 points in R^n).
pub fn simplex_volume(points: &[&DVector<f64>]) -> f64 {
    let n = points.len() - 1;
    let m = DMatrix::from_fn(n, n, |i, j| points[j + 1][i] - points[0][i]);
    m.determinant().abs() / factorial(n)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0, max_relative = 1e-13);
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-13);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn ball_volume_recursion() {
        for n in 3..=40 {
            let lhs = unit_ball_volume(n);
            let rhs = 2.0 * PI * unit_ball_volume(n - 2) / n as f64;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn complement_is_orthonormal() {
        let a = DVector::from_vec(vec![0.3, -1.2, 0.5, 2.0]);
        let q = orthogonal_complement(&a);
        let gram = q.transpose() * &q;
        assert!((gram - DMatrix::<f64>::identity(3, 3)).norm() < 1e-13);
        assert!((q.transpose() * &a).norm() < 1e-13);
    }

    #[test]
    fn sym_pow_inverse_sqrt() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let r = sym_pow(&m, -0.5);
        let id = &r * &m * &r;
        assert!((id - DMatrix::<f64>::identity(2, 2)).norm() < 1e-13);
    }
}
