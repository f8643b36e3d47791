//! Maximal-volume inscribed ellipsoid of an H-polytope.
//!
//! Maximizes `log det B` over symmetric `B` and centers `d` subject to
//! `|B a_i| <= b_i - <a_i, d>`, using the logarithmic barrier
//! `-log(s_i^2 - |B a_i|^2)` for each second-order-cone constraint and damped
//! Newton steps along the central path.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Ellipsoid, HPolytope};
use crate::lp::chebyshev_center;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Cap on the total number of Newton steps.
    pub max_iterations: usize,
    /// Stop centering once `lambda^2 / 2` drops below this.
    pub decrement_tol: f64,
    /// Target for the barrier duality gap `2m / t`.
    pub gap_tol: f64,
    /// Growth factor of `t` between centerings.
    pub t_growth: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            decrement_tol: 1e-10,
            gap_tol: 1e-9,
            t_growth: 20.0,
        }
    }
}

/// Solver output with the certificate data needed to audit it.
#[derive(Clone, Debug)]
pub struct EllipsoidSolution {
    pub ellipsoid: Ellipsoid,
    /// Dual estimates `lambda_i` for each half-space.
    pub multipliers: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
    /// `log det B` after each completed centering (and after the final polish).
    pub log_det_history: Vec<f64>,
}

/// Index pairs `(j, l)`, `j <= l`, of the symmetric coordinates of `B`.
fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|j| (j..n).map(move |l| (j, l))).collect()
}

struct Problem<'a> {
    n: usize,
    pairs: Vec<(usize, usize)>,
    normals: &'a [DVector<f64>],
    offsets: &'a [f64],
}

struct Point {
    b: DMatrix<f64>,
    d: DVector<f64>,
}

impl Problem<'_> {
    fn nvars(&self) -> usize {
        self.pairs.len() + self.n
    }

    fn unpack(&self, z: &DVector<f64>) -> Point {
        let n = self.n;
        let mut b = DMatrix::zeros(n, n);
        for (k, &(j, l)) in self.pairs.iter().enumerate() {
            b[(j, l)] = z[k];
            b[(l, j)] = z[k];
        }
        let d = DVector::from_fn(n, |i, _| z[self.pairs.len() + i]);
        Point { b, d }
    }

    fn pack(&self, p: &Point) -> DVector<f64> {
        let nb = self.pairs.len();
        DVector::from_fn(self.nvars(), |k, _| {
            if k < nb {
                let (j, l) = self.pairs[k];
                p.b[(j, l)]
            } else {
                p.d[k - nb]
            }
        })
    }

    /// `d q / d x_B` for `q = B a`.
    fn jacobian(&self, a: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.n, self.pairs.len());
        for (k, &(j, l)) in self.pairs.iter().enumerate() {
            if j == l {
                jac[(j, k)] = a[j];
            } else {
                jac[(j, k)] = a[l];
                jac[(l, k)] = a[j];
            }
        }
        jac
    }

    /// Barrier objective, or `None` outside the domain.
    fn value(&self, p: &Point, t: f64) -> Option<f64> {
        let chol = p.b.clone().cholesky()?;
        let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let mut f = -t * log_det;
        for (a, &b) in self.normals.iter().zip(self.offsets) {
            let s = b - a.dot(&p.d);
            let q = &p.b * a;
            let g = s * s - q.norm_squared();
            if s <= 0.0 || g <= 0.0 {
                return None;
            }
            f -= g.ln();
        }
        Some(f)
    }

    fn grad_hess(&self, p: &Point, t: f64) -> (DVector<f64>, DMatrix<f64>) {
        let nb = self.pairs.len();
        let nv = self.nvars();
        let mut grad = DVector::zeros(nv);
        let mut hess = DMatrix::zeros(nv, nv);

        let w = p.b.clone().try_inverse().expect("iterate stays positive definite");
        let trace_with = |m: &DMatrix<f64>, (j, l): (usize, usize)| {
            if j == l {
                m[(j, j)]
            } else {
                m[(j, l)] + m[(l, j)]
            }
        };
        for (k, &(j, l)) in self.pairs.iter().enumerate() {
            grad[k] = -t * trace_with(&w, (j, l));
            // W E_k W
            let mut wek = DMatrix::zeros(self.n, self.n);
            if j == l {
                wek += w.column(j) * w.row(j);
            } else {
                wek += w.column(j) * w.row(l) + w.column(l) * w.row(j);
            }
            for (k2, &pair) in self.pairs.iter().enumerate() {
                hess[(k, k2)] = t * trace_with(&wek, pair);
            }
        }

        for (a, &b) in self.normals.iter().zip(self.offsets) {
            let s = b - a.dot(&p.d);
            let q = &p.b * a;
            let g = s * s - q.norm_squared();
            let jac = self.jacobian(a);
            let mut dg = DVector::zeros(nv);
            dg.rows_mut(0, nb).copy_from(&(jac.transpose() * &q * -2.0));
            dg.rows_mut(nb, self.n).copy_from(&(a * (-2.0 * s)));
            grad -= &dg / g;
            hess += &dg * dg.transpose() / (g * g);
            // minus Hessian of g over g
            let jtj = jac.transpose() * &jac;
            let mut bb = hess.view_mut((0, 0), (nb, nb));
            bb += jtj * (2.0 / g);
            let mut dd = hess.view_mut((nb, nb), (self.n, self.n));
            dd -= a * a.transpose() * (2.0 / g);
        }
        (grad, hess)
    }

    /// Barrier estimates `2|q_i| / (t g_i)`.
    fn multipliers(&self, p: &Point, t: f64) -> Vec<f64> {
        self.normals
            .iter()
            .zip(self.offsets)
            .map(|(a, &b)| {
                let s = b - a.dot(&p.d);
                let q = &p.b * a;
                let g = s * s - q.norm_squared();
                2.0 * q.norm() / (t * g)
            })
            .collect()
    }

    /// Multipliers re-fitted to the stationarity equations at `p` by NNLS,
    /// over the constraints whose barrier estimate is not negligible. The
    /// barrier estimates lose digits to cancellation in `g_i` at large `t`.
    fn polish_multipliers(&self, p: &Point, estimate: &[f64]) -> Vec<f64> {
        let n = self.n;
        let top = estimate.iter().fold(0.0f64, |m, &l| m.max(l));
        let active: Vec<usize> = (0..estimate.len()).filter(|&i| estimate[i] > 1e-6 * top).collect();
        let Some(w) = p.b.clone().try_inverse() else {
            return estimate.to_vec();
        };
        let rows = self.pairs.len() + n;
        let mut a = DMatrix::zeros(rows, active.len());
        for (col, &i) in active.iter().enumerate() {
            let ai = &self.normals[i];
            let u = (&p.b * ai).normalize();
            for (k, &(j, l)) in self.pairs.iter().enumerate() {
                a[(k, col)] = if j == l {
                    u[j] * ai[j]
                } else {
                    (u[j] * ai[l] + u[l] * ai[j]) / std::f64::consts::SQRT_2
                };
            }
            for j in 0..n {
                a[(self.pairs.len() + j, col)] = ai[j];
            }
        }
        let rhs = DVector::from_fn(rows, |k, _| {
            if k < self.pairs.len() {
                let (j, l) = self.pairs[k];
                if j == l {
                    w[(j, j)]
                } else {
                    std::f64::consts::SQRT_2 * w[(j, l)]
                }
            } else {
                0.0
            }
        });
        let (sol, _) = super::nnls::nnls(&a, &rhs);
        let mut lambda = vec![0.0; estimate.len()];
        for (col, &i) in active.iter().enumerate() {
            lambda[i] = sol[col];
        }
        lambda
    }

    /// Residual of the active-set KKT equations in `(vech B, d, lambda_A)`:
    /// stationarity in `B` and `d`, then `|B a_i| + <a_i, d> - b_i` for `i ∈ A`.
    fn active_residual(&self, p: &Point, active: &[usize], lambda: &[f64]) -> Option<DVector<f64>> {
        let n = self.n;
        let nb = self.pairs.len();
        let w = p.b.clone().try_inverse()?;
        let mut stat = -w;
        let mut stat_d = DVector::zeros(n);
        let mut out = DVector::zeros(nb + n + active.len());
        for (k, &i) in active.iter().enumerate() {
            let a = &self.normals[i];
            let q = &p.b * a;
            let qn = q.norm();
            let u = &q / qn;
            stat += (&u * a.transpose() + a * u.transpose()) * (0.5 * lambda[k]);
            stat_d += a * lambda[k];
            out[nb + n + k] = qn + a.dot(&p.d) - self.offsets[i];
        }
        for (k, &(j, l)) in self.pairs.iter().enumerate() {
            out[k] = stat[(j, l)];
        }
        out.rows_mut(nb, n).copy_from(&stat_d);
        Some(out)
    }

    fn active_jacobian(&self, p: &Point, active: &[usize], lambda: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let nb = self.pairs.len();
        let cols = nb + n + active.len();
        let mut jac = DMatrix::zeros(cols, cols);
        let w = p.b.clone().try_inverse().expect("polish keeps B invertible");
        let basis: Vec<DMatrix<f64>> = self
            .pairs
            .iter()
            .map(|&(j, l)| {
                let mut e = DMatrix::zeros(n, n);
                e[(j, l)] = 1.0;
                e[(l, j)] = 1.0;
                e
            })
            .collect();
        for (k, e) in basis.iter().enumerate() {
            let mut col = &w * e * &w;
            for (r, &i) in active.iter().enumerate() {
                let a = &self.normals[i];
                let q = &p.b * a;
                let qn = q.norm();
                let u = &q / qn;
                let ea = e * a;
                let du = (&ea - &u * u.dot(&ea)) / qn;
                col += (&du * a.transpose() + a * du.transpose()) * (0.5 * lambda[r]);
                jac[(nb + n + r, k)] = u.dot(&ea);
            }
            for (row, &(j, l)) in self.pairs.iter().enumerate() {
                jac[(row, k)] = col[(j, l)];
            }
        }
        for (r, &i) in active.iter().enumerate() {
            let a = &self.normals[i];
            let u = (&p.b * a).normalize();
            let sym = (&u * a.transpose() + a * u.transpose()) * 0.5;
            for (row, &(j, l)) in self.pairs.iter().enumerate() {
                jac[(row, nb + n + r)] = sym[(j, l)];
            }
            for j in 0..n {
                jac[(nb + j, nb + n + r)] = a[j];
                jac[(nb + n + r, nb + j)] = a[j];
            }
        }
        jac
    }

    /// Gauss–Newton on the active-set KKT equations, starting from a point on
    /// the central path. Returns the polished point and multipliers, or `None`
    /// if the result is not a valid KKT point.
    fn polish(&self, p: &Point, estimate: &[f64]) -> Option<(Point, Vec<f64>)> {
        let n = self.n;
        let nb = self.pairs.len();
        let active: Vec<usize> = (0..self.normals.len())
            .filter(|&i| {
                let a = &self.normals[i];
                let slack = self.offsets[i] - a.dot(&p.d) - (&p.b * a).norm();
                estimate[i] > slack
            })
            .collect();
        if active.is_empty() {
            return None;
        }
        let mut z = self.pack(p);
        z = z.resize_vertically(nb + n + active.len(), 0.0);
        for (k, &i) in active.iter().enumerate() {
            z[nb + n + k] = estimate[i];
        }
        let split = |z: &DVector<f64>| {
            let point = self.unpack(&z.rows(0, nb + n).into_owned());
            let lambda: Vec<f64> = z.rows(nb + n, active.len()).iter().copied().collect();
            (point, lambda)
        };
        let mut norm = f64::INFINITY;
        for _ in 0..30 {
            let (point, lambda) = split(&z);
            let res = self.active_residual(&point, &active, &lambda)?;
            let r = res.amax();
            if !(r < norm) {
                break;
            }
            norm = r;
            if r < 1e-15 {
                break;
            }
            let jac = self.active_jacobian(&point, &active, &lambda);
            let step = jac.svd(true, true).solve(&(-res), 1e-13).ok()?;
            z += step;
        }
        let (point, lambda) = split(&z);
        let res = self.active_residual(&point, &active, &lambda)?;
        point.b.clone().cholesky()?;
        let feasible = self
            .normals
            .iter()
            .zip(self.offsets)
            .all(|(a, &b)| b - a.dot(&point.d) - (&point.b * a).norm() >= -1e-12);
        if res.amax() > 1e-12 || !feasible || lambda.iter().any(|&l| l < 0.0) {
            return None;
        }
        let mut full = vec![0.0; self.normals.len()];
        for (k, &i) in active.iter().enumerate() {
            full[i] = lambda[k];
        }
        Some((point, full))
    }

    /// Largest violation among stationarity, complementarity and feasibility
    /// for the Lagrangian `-log det B + sum lambda_i (|B a_i| + <a_i, d> - b_i)`.
    fn kkt_residual(&self, p: &Point, lambda: &[f64]) -> f64 {
        let n = self.n;
        let w =
            p.b.clone()
                .try_inverse()
                .unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN));
        let mut stat_b = -w;
        let mut stat_d = DVector::zeros(n);
        let mut comp = 0.0f64;
        let mut infeas = 0.0f64;
        for ((a, &b), &lam) in self.normals.iter().zip(self.offsets).zip(lambda) {
            let q = &p.b * a;
            let qn = q.norm();
            let u = &q / qn;
            stat_b += (&u * a.transpose() + a * u.transpose()) * (0.5 * lam);
            stat_d += a * lam;
            let slack = b - a.dot(&p.d) - qn;
            comp += lam * slack.max(0.0);
            infeas = infeas.max(-slack);
        }
        stat_b.norm().max(stat_d.norm()).max(comp).max(infeas)
    }
}

fn log_det(b: &DMatrix<f64>) -> f64 {
    b.clone()
        .cholesky()
        .map(|c| 2.0 * c.l().diagonal().iter().map(|v| v.ln()).sum::<f64>())
        .unwrap_or(f64::NEG_INFINITY)
}

pub fn solve_max_inscribed_ellipsoid(poly: &HPolytope, opts: &SolverOptions) -> Result<EllipsoidSolution> {
    let n = poly.dim();
    let m = poly.len();
    let (center, radius) =
        chebyshev_center(poly.normals(), poly.offsets()).ok_or(Error::Degenerate("no interior point".into()))?;
    if !(radius > 0.0) {
        return Err(Error::Degenerate("empty interior".into()));
    }
    let prob = Problem {
        n,
        pairs: sym_pairs(n),
        normals: poly.normals(),
        offsets: poly.offsets(),
    };
    // shrink the Chebyshev ball slightly so every cone constraint is strict
    let mut z = prob.pack(&Point {
        b: DMatrix::identity(n, n) * (0.9 * radius),
        d: center,
    });

    let nu = 2.0 * m as f64;
    let mut t = 1.0;
    let mut iterations = 0;
    let mut history = Vec::new();
    loop {
        let mut previous = f64::INFINITY;
        loop {
            let p = prob.unpack(&z);
            let (grad, hess) = prob.grad_hess(&p, t);
            let step = match hess.clone().cholesky() {
                Some(c) => c.solve(&(-&grad)),
                None => hess.clone().lu().solve(&(-&grad)).ok_or(Error::NonConvergence {
                    iterations,
                    residual: grad.norm(),
                })?,
            };
            let decrement = -grad.dot(&step);
            // stop at the tolerance, or once round-off keeps the decrement from shrinking
            if decrement / 2.0 <= opts.decrement_tol || (decrement < 1e-6 && decrement > 0.5 * previous) {
                break;
            }
            if iterations >= opts.max_iterations {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: decrement.sqrt(),
                });
            }
            iterations += 1;
            previous = decrement;
            let full = &z + &step;
            if decrement < 0.0625 && prob.value(&prob.unpack(&full), t).is_some() {
                // quadratic convergence region of a self-concordant function
                z = full;
                continue;
            }
            let f0 = prob.value(&p, t).expect("iterate is interior");
            let mut alpha = 1.0;
            loop {
                let trial = &z + &step * alpha;
                if let Some(f) = prob.value(&prob.unpack(&trial), t) {
                    if f <= f0 - 0.01 * alpha * decrement {
                        z = trial;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    return Err(Error::NonConvergence {
                        iterations,
                        residual: decrement.sqrt(),
                    });
                }
            }
        }
        history.push(log_det(&prob.unpack(&z).b));
        if nu / t <= opts.gap_tol {
            break;
        }
        t = (t * opts.t_growth).min(nu / opts.gap_tol);
    }

    let p = prob.unpack(&z);
    let estimate = prob.multipliers(&p, t);
    let (p, lambda) = match prob.polish(&p, &estimate) {
        Some((q, lambda)) => {
            history.push(log_det(&q.b));
            (q, lambda)
        }
        None => {
            let lambda = prob.polish_multipliers(&p, &estimate);
            (p, lambda)
        }
    };
    let kkt_residual = prob.kkt_residual(&p, &lambda);
    let b = (&p.b + p.b.transpose()) * 0.5;
    Ok(EllipsoidSolution {
        ellipsoid: Ellipsoid::new(p.d, b)?,
        multipliers: lambda,
        kkt_residual,
        iterations,
        log_det_history: history,
    })
}
