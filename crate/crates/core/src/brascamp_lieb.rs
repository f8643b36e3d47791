//! The normalized Brascamp–Lieb inequality for rank-one data, the lift of a
//! centered decomposition to a cone one dimension up, and the extremal
//! constants for volume and surface area in John position.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HPolytope;
use crate::john::{JohnDecomposition, DECOMPOSITION_TOL};
use crate::linalg::{decomposition_residual, log_gamma, DecompositionResidual};
use crate::measures::mc::{self, MixtureProposal};
use crate::measures::{Estimate, McParams};

/// Unit vectors `u_i` in `R^d` with weights `c_i` meant to satisfy `sum c_i u_i u_i^T = I_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BLSystem {
    pub dim: usize,
    #[serde(with = "crate::serde_vectors")]
    pub vectors: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
}

impl BLSystem {
    /// Checks shapes, unit lengths and positivity; the identity itself is
    /// checked by [`BLSystem::validate`].
    pub fn new(dim: usize, vectors: Vec<DVector<f64>>, weights: Vec<f64>) -> Result<Self> {
        let s = Self { dim, vectors, weights };
        s.check_shape()?;
        Ok(s)
    }

    fn check_shape(&self) -> Result<()> {
        if self.vectors.is_empty() || self.vectors.len() != self.weights.len() {
            return Err(Error::InvalidInput(
                "vectors and weights must be non-empty and equal length".into(),
            ));
        }
        if let Some(u) = self.vectors.iter().find(|u| u.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        if self.vectors.iter().any(|u| (u.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidInput("vectors must have unit length".into()));
        }
        if self.weights.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        Ok(())
    }

    pub fn from_decomposition(dec: &JohnDecomposition) -> Self {
        Self {
            dim: dec.dim(),
            vectors: dec.contacts.clone(),
            weights: dec.weights.clone(),
        }
    }

    /// The orthonormal basis with unit weights.
    pub fn orthonormal(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        Self {
            dim,
            vectors,
            weights: vec![1.0; dim],
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn residual(&self) -> DecompositionResidual {
        verify_decomposition(self)
    }

    /// Shape checks plus the identity and trace at [`DECOMPOSITION_TOL`].
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        let r = self.residual();
        if r.frobenius > DECOMPOSITION_TOL {
            return Err(Error::Infeasible { residual: r.frobenius });
        }
        if r.trace_gap > DECOMPOSITION_TOL {
            return Err(Error::TraceViolation {
                sum: self.weights.iter().sum(),
                expected: self.dim as f64,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.check_shape()?;
        Ok(s)
    }
}

pub fn verify_decomposition(s: &BLSystem) -> DecompositionResidual {
    decomposition_residual(&s.vectors, &s.weights, s.dim)
}

/// A nonnegative integrable function on the line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density1D {
    /// `e^{-t}` for `t >= 0`, zero otherwise.
    Exponential,
    /// `exp(-t^2 / (2 sigma^2))`.
    Gaussian { sigma: f64 },
    /// Indicator of `[a, b]`.
    Indicator { a: f64, b: f64 },
    /// Piecewise-linear interpolation of `values` on a strictly increasing
    /// `grid`, zero outside it.
    Table { grid: Vec<f64>, values: Vec<f64> },
}

impl Density1D {
    pub fn validate(&self) -> Result<()> {
        match self {
            Density1D::Exponential => Ok(()),
            Density1D::Gaussian { sigma } => {
                if *sigma > 0.0 && sigma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::NonIntegrableDensity(format!("gaussian sigma {sigma}")))
                }
            }
            Density1D::Indicator { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    Err(Error::NonIntegrableDensity(format!("indicator of [{a}, {b}]")))
                } else if a >= b {
                    Err(Error::ZeroIntegral)
                } else {
                    Ok(())
                }
            }
            Density1D::Table { grid, values } => {
                if grid.len() < 2 || grid.len() != values.len() {
                    return Err(Error::InvalidInput(
                        "table needs matching grid and values of length >= 2".into(),
                    ));
                }
                if grid.iter().any(|g| !g.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::NonIntegrableDensity(
                        "table grid must be finite and increasing".into(),
                    ));
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::NonIntegrableDensity(
                        "table values must be finite and nonnegative".into(),
                    ));
                }
                if self.integral() <= 0.0 {
                    return Err(Error::ZeroIntegral);
                }
                Ok(())
            }
        }
    }

    /// `ln f(t)`, with `-inf` where `f` vanishes.
    pub fn ln_value(&self, t: f64) -> f64 {
        match self {
            Density1D::Exponential => {
                if t >= 0.0 {
                    -t
                } else {
                    f64::NEG_INFINITY
                }
            }
            Density1D::Gaussian { sigma } => -0.5 * (t / sigma) * (t / sigma),
            Density1D::Indicator { a, b } => {
                if (*a..=*b).contains(&t) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Density1D::Table { grid, values } => {
                if t < grid[0] || t > grid[grid.len() - 1] {
                    return f64::NEG_INFINITY;
                }
                let k = grid.partition_point(|&g| g <= t).clamp(1, grid.len() - 1);
                let s = (t - grid[k - 1]) / (grid[k] - grid[k - 1]);
                (values[k - 1] + s * (values[k] - values[k - 1])).ln()
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.ln_value(t).exp()
    }

    /// Exact `∫ f`.
    pub fn integral(&self) -> f64 {
        match self {
            Density1D::Exponential => 1.0,
            Density1D::Gaussian { sigma } => sigma * (2.0 * std::f64::consts::PI).sqrt(),
            Density1D::Indicator { a, b } => (b - a).max(0.0),
            Density1D::Table { grid, values } => grid
                .windows(2)
                .zip(values.windows(2))
                .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
                .sum(),
        }
    }
}

/// `sum c_i ln f_i(<u_i, x>)`, treating `0^c` as `0`.
fn ln_product(s: &BLSystem, densities: &[Density1D], x: &[f64]) -> f64 {
    let mut total = 0.0;
    for ((u, &c), f) in s.vectors.iter().zip(&s.weights).zip(densities) {
        let t: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
        let l = f.ln_value(t);
        if l == f64::NEG_INFINITY {
            return l;
        }
        total += c * l;
    }
    total
}

/// `∫ prod f_i(<u_i,x>)^{c_i} dx / prod (∫ f_i)^{c_i}`.
///
/// The right side is exact; the left side is importance sampled from a
/// Gaussian / Student t mixture, and the estimate is reported on the ratio scale.
pub fn bl_ratio(s: &BLSystem, densities: &[Density1D], mc: &McParams) -> Result<Estimate> {
    s.validate()?;
    if densities.len() != s.len() {
        return Err(Error::InvalidInput(format!(
            "{} densities for {} vectors",
            densities.len(),
            s.len()
        )));
    }
    let mut ln_rhs = 0.0;
    for (f, &c) in densities.iter().zip(&s.weights) {
        f.validate()?;
        let integral = f.integral();
        if integral <= 0.0 {
            return Err(Error::ZeroIntegral);
        }
        ln_rhs += c * integral.ln();
    }
    let q = MixtureProposal::new(s.dim, 1.0);
    let moments = mc::sample_mean(mc, |rng| {
        let mut x = vec![0.0; s.dim];
        let ln_q = q.draw(rng, &mut x);
        (ln_product(s, densities, &x) - ln_q - ln_rhs).exp()
    })?;
    Ok(moments.estimate())
}

/// Lifts a centered decomposition in `R^n` to `R^{n+1}`:
/// `v_i = sqrt(n/(n+1)) (-u_i, 1/sqrt(n))`, `d_i = (n+1) c_i / n`.
pub fn lift_to_cone(s: &BLSystem) -> Result<BLSystem> {
    s.check_shape()?;
    let bary = s.residual().barycenter;
    if bary > DECOMPOSITION_TOL {
        return Err(Error::NonzeroBarycenter(bary));
    }
    let n = s.dim as f64;
    let scale = (n / (n + 1.0)).sqrt();
    let vectors = s
        .vectors
        .iter()
        .map(|u| {
            DVector::from_fn(
                s.dim + 1,
                |i, _| {
                    if i < s.dim {
                        -scale * u[i]
                    } else {
                        scale / n.sqrt()
                    }
                },
            )
        })
        .collect();
    let weights = s.weights.iter().map(|c| (n + 1.0) * c / n).collect();
    Ok(BLSystem {
        dim: s.dim + 1,
        vectors,
        weights,
    })
}

/// The body `K = {x : <u_i, x> <= 1}` cut out by a system's vectors.
pub fn circumscribed_body(s: &BLSystem) -> Result<HPolytope> {
    HPolytope::new(s.vectors.clone(), vec![1.0; s.len()])
}

/// `e^{-sqrt(n+1) r} (r / sqrt(n))^n |K|`.
pub fn cone_section_formula(n: usize, r: f64, volume_k: f64) -> f64 {
    let nf = n as f64;
    (-(nf + 1.0).sqrt() * r).exp() * (r / nf.sqrt()).powi(n as i32) * volume_k
}

/// Monte Carlo integral over the hyperplane `x_{n+1} = r` of the lifted
/// product `prod f(<v_i, y>)^{d_i}` with `f(t) = e^{-t} 1_{t >= 0}`.
pub fn cone_section_integral(s: &BLSystem, r: f64, mc: &McParams) -> Result<Estimate> {
    let lifted = lift_to_cone(s)?;
    let n = s.dim;
    let section = circumscribed_body(s)?.to_vrep()?;
    let shrink = r / (n as f64).sqrt();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for v in section.vertices() {
        for i in 0..n {
            lo[i] = lo[i].min(shrink * v[i]);
            hi[i] = hi[i].max(shrink * v[i]);
        }
    }
    let densities = vec![Density1D::Exponential; lifted.len()];
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let moments = mc::sample_mean(mc, |rng| {
        let mut y = vec![r; n + 1];
        for i in 0..n {
            y[i] = rng.random_range(lo[i]..=hi[i]);
        }
        ln_product(&lifted, &densities, &y).exp()
    })?;
    Ok(moments.estimate().scaled(box_volume))
}

/// `n!/(n^{n/2}(n+1)^{(n+1)/2})`, the radial integral `∫_0^∞ e^{-sqrt(n+1) r} (r/sqrt(n))^n dr`.
pub fn cone_radial_integral(n: usize) -> f64 {
    1.0 / simplex_volume_bound(n)
}

/// Volume `n^{n/2}(n+1)^{(n+1)/2}/n!` of the regular simplex circumscribing the unit ball.
pub fn simplex_volume_bound(n: usize) -> f64 {
    let nf = n as f64;
    (0.5 * nf * nf.ln() + 0.5 * (nf + 1.0) * (nf + 1.0).ln() - log_gamma(nf + 1.0)).exp()
}

/// `2^n`, the volume of the cube circumscribing the unit ball.
pub fn cube_volume_bound(n: usize) -> f64 {
    2f64.powi(n as i32)
}

/// Largest isoperimetric quotient in John position: `2n` for symmetric
/// bodies, `n (simplex volume)^{1/n}` in general.
pub fn reverse_isoperimetric_constant(n: usize, symmetric: bool) -> f64 {
    let nf = n as f64;
    if symmetric {
        2.0 * nf
    } else {
        nf * simplex_volume_bound(n).powf(1.0 / nf)
    }
}

/// Volume bound matching [`reverse_isoperimetric_constant`].
pub fn volume_bound(n: usize, symmetric: bool) -> f64 {
    if symmetric {
        cube_volume_bound(n)
    } else {
        simplex_volume_bound(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;
    use crate::john::{contact_points, john_decomposition};
    use crate::measures::polytope_volume;
    use std::f64::consts::PI;

    fn square() -> BLSystem {
        let dec = john_decomposition(&contact_points(&bodies::cube(2)).unwrap(), true).unwrap();
        BLSystem::from_decomposition(&dec)
    }

    fn triangle() -> BLSystem {
        let dec = john_decomposition(&contact_points(&bodies::regular_simplex(2)).unwrap(), false).unwrap();
        BLSystem::from_decomposition(&dec)
    }

    #[test]
    fn residual_reports() {
        let r = verify_decomposition(&BLSystem::orthonormal(3));
        assert_eq!((r.frobenius, r.trace_gap, r.barycenter), (0.0, 0.0, 3f64.sqrt()));
        assert!(square().residual().frobenius < 1e-15);
        let mut s = square();
        s.weights.iter_mut().for_each(|c| *c += 0.01);
        assert!((s.residual().trace_gap - 0.04).abs() < 1e-12);
        assert!(matches!(s.validate(), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn density_integrals() {
        let t = Density1D::Table {
            grid: vec![0.0, 1.0, 3.0],
            values: vec![0.0, 2.0, 0.0],
        };
        assert!((t.integral() - 3.0).abs() < 1e-15);
        assert!((t.value(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(t.value(3.5), 0.0);
        assert_eq!(Density1D::Exponential.value(-1e-9), 0.0);
        assert!((Density1D::Gaussian { sigma: 2.0 }.integral() - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-14);
        assert!(matches!(
            Density1D::Indicator { a: 1.0, b: 1.0 }.validate(),
            Err(Error::ZeroIntegral)
        ));
        assert!(matches!(
            Density1D::Gaussian { sigma: f64::INFINITY }.validate(),
            Err(Error::NonIntegrableDensity(_))
        ));
    }

    #[test]
    fn density_json_is_tagged() {
        let d = Density1D::Gaussian { sigma: 1.5 };
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"kind":"gaussian","sigma":1.5}"#);
        let e: Density1D = serde_json::from_str(r#"{"kind":"exponential"}"#).unwrap();
        assert_eq!(e, Density1D::Exponential);
    }

    #[test]
    fn gaussian_equality() {
        let g = vec![Density1D::Gaussian { sigma: 1.0 }; 3];
        let e = bl_ratio(&triangle(), &g, &McParams::new(100_000, 4)).unwrap();
        // the integrand is exactly the standard Gaussian shape
        assert!(e.within(1.0, 3.0), "{e}");
    }

    #[test]
    fn hexagon_indicator_is_strict() {
        // |{x : |<u_i,x>| <= 1}| = 2 sqrt 3 against prod 2^{c_i} = 4
        let ind = vec![Density1D::Indicator { a: -1.0, b: 1.0 }; 3];
        let e = bl_ratio(&triangle(), &ind, &McParams::new(200_000, 1)).unwrap();
        assert!(e.within(3f64.sqrt() / 2.0, 3.0), "{e}");
    }

    #[test]
    fn lift_small_cases() {
        let line = BLSystem::new(
            1,
            vec![DVector::from_vec(vec![1.0]), DVector::from_vec(vec![-1.0])],
            vec![0.5, 0.5],
        )
        .unwrap();
        let l = lift_to_cone(&line).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((l.vectors[0][0] + h).abs() < 1e-15 && (l.vectors[0][1] - h).abs() < 1e-15);
        assert_eq!(l.weights, vec![1.0, 1.0]);
        assert!(l.residual().frobenius < 1e-15);

        let t = lift_to_cone(&triangle()).unwrap();
        assert!(t.weights.iter().all(|d| (d - 1.0).abs() < 1e-12));
        assert!(t.residual().frobenius <= 1e-12);

        let shifted = BLSystem::new(1, vec![DVector::from_vec(vec![1.0])], vec![1.0]).unwrap();
        assert!(matches!(lift_to_cone(&shifted), Err(Error::NonzeroBarycenter(_))));
    }

    #[test]
    fn constants() {
        assert!((simplex_volume_bound(1) - 2.0).abs() < 1e-13);
        assert!((simplex_volume_bound(2) - 3.0 * 3f64.sqrt()).abs() < 1e-13);
        assert!((simplex_volume_bound(3) - 8.0 * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(reverse_isoperimetric_constant(2, true), 4.0);
        assert_eq!(reverse_isoperimetric_constant(3, true), 6.0);
        assert!((reverse_isoperimetric_constant(2, false) - 2.0 * (3.0 * 3f64.sqrt()).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn cone_section_on_triangle() {
        let s = triangle();
        let k = polytope_volume(&circumscribed_body(&s).unwrap().to_vrep().unwrap()).unwrap();
        let r = 0.8;
        let e = cone_section_integral(&s, r, &McParams::new(100_000, 6)).unwrap();
        assert!(e.within(cone_section_formula(2, r, k), 3.0), "{e}");
    }
}
