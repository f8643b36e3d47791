//! Volumes of `l_p` balls and of unit balls of weighted `l_p` gauges, Lewis
//! position of subspaces of `l_p^m`, and volume-ratio checks against `l_p^n`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::brascamp_lieb::BLSystem;
use crate::error::{Error, Result};
use crate::geometry::{BodyOracle, HPolytope};
use crate::john::volume_ratio;
use crate::linalg::{decomposition_residual, log_gamma, sym_pow, unit_ball_volume};
use crate::measures::mc::{self, MixtureProposal};
use crate::measures::{Estimate, McParams};
use crate::random;

/// Lewis iteration cap.
pub const LEWIS_MAX_ITERATIONS: usize = 500;
/// Lewis stopping tolerance on `|sum c_i u_i u_i^T - I|_F`.
pub const LEWIS_TOL: f64 = 1e-10;
/// Directions sampled by [`inscribed_radius_check`].
pub const RADIUS_CHECK_SAMPLES: usize = 1000;
const RADIUS_CHECK_SEED: u64 = 0x5eed;

/// `2^n Γ(1+1/p)^n / Γ(1+n/p)`; `2^n` for `p = ∞`.
pub fn lp_ball_volume(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    if p.is_infinite() {
        return 2f64.powi(n as i32);
    }
    (nf * 2f64.ln() + nf * log_gamma(1.0 + 1.0 / p) - log_gamma(1.0 + nf / p)).exp()
}

/// Radius of the Euclidean ball inscribed in the `l_p^n` ball (and guaranteed
/// inside the unit ball of a Lewis-position norm): `n^{1/2-1/p}` for `p <= 2`, else 1.
pub fn inscribed_radius(n: usize, p: f64) -> f64 {
    if p <= 2.0 {
        (n as f64).powf(0.5 - 1.0 / p)
    } else {
        1.0
    }
}

/// `vr(l_p^n)`, with the John ellipsoid of the `l_p^n` ball being its inscribed Euclidean ball.
pub fn lp_volume_ratio(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let ln_lp = if p.is_infinite() {
        nf * 2f64.ln()
    } else {
        nf * 2f64.ln() + nf * log_gamma(1.0 + 1.0 / p) - log_gamma(1.0 + nf / p)
    };
    let ln_ball = 0.5 * nf * std::f64::consts::PI.ln() - log_gamma(1.0 + 0.5 * nf);
    ((ln_lp - ln_ball) / nf - inscribed_radius(n, p).ln()).exp()
}

/// `x ↦ (sum alpha_i |<u_i, x>|^p)^{1/p}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedLpGauge {
    #[serde(with = "crate::serde_vectors")]
    pub vectors: Vec<DVector<f64>>,
    pub alphas: Vec<f64>,
    pub p: f64,
}

impl WeightedLpGauge {
    pub fn new(vectors: Vec<DVector<f64>>, alphas: Vec<f64>, p: f64) -> Result<Self> {
        if vectors.is_empty() || vectors.len() != alphas.len() {
            return Err(Error::InvalidInput(
                "vectors and alphas must be non-empty and equal length".into(),
            ));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidInput(format!("exponent {p} outside [1, ∞)")));
        }
        let n = vectors[0].len();
        if let Some(u) = vectors.iter().find(|u| u.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.len(),
            });
        }
        if vectors.iter().any(|u| (u.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidInput("vectors must have unit length".into()));
        }
        if alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidInput("alphas must be positive".into()));
        }
        Ok(Self { vectors, alphas, p })
    }

    /// The `l_p^n` norm itself.
    pub fn canonical(n: usize, p: f64) -> Self {
        let s = BLSystem::orthonormal(n);
        Self {
            vectors: s.vectors,
            alphas: vec![1.0; n],
            p,
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.vectors
            .iter()
            .zip(&self.alphas)
            .map(|(u, a)| {
                let t: f64 = u.iter().zip(x).map(|(p, q)| p * q).sum();
                a * t.abs().powf(self.p)
            })
            .sum::<f64>()
            .powf(1.0 / self.p)
    }

    /// Radius `R` with unit ball `⊆ R · B_2^n`, from `gauge(x) >= γ |x|` where
    /// `γ^2 = λ_min(sum alpha_i^{2/p} u_i u_i^T) · min(1, m^{2/p - 1})`.
    pub fn outer_radius(&self) -> Result<f64> {
        let n = self.dim();
        let mut frame = DMatrix::<f64>::zeros(n, n);
        for (u, a) in self.vectors.iter().zip(&self.alphas) {
            frame += u * u.transpose() * a.powf(2.0 / self.p);
        }
        let lam = frame.symmetric_eigenvalues().min();
        if !(lam > 1e-14 * frame.trace()) {
            return Err(Error::NonCoercive);
        }
        let m = self.vectors.len() as f64;
        let gamma = (lam * m.powf(2.0 / self.p - 1.0).min(1.0)).sqrt();
        Ok(1.0 / gamma)
    }

    pub fn to_oracle(&self) -> Result<BodyOracle> {
        let radius = self.outer_radius()?;
        let g = self.clone();
        Ok(BodyOracle::from_gauge(self.dim(), radius, move |x| g.eval(x)))
    }

    /// For `p = 1` the unit ball is the polytope
    /// `{x : <sum ε_i alpha_i u_i, x> <= 1 for all signs ε}`.
    pub fn unit_ball_polytope(&self) -> Result<HPolytope> {
        if self.p != 1.0 {
            return Err(Error::InvalidInput("unit ball is polyhedral only for p = 1".into()));
        }
        let m = self.vectors.len();
        if m > 20 {
            return Err(Error::InvalidInput(format!("{m} terms give too many sign patterns")));
        }
        let n = self.dim();
        let mut normals = Vec::new();
        for mask in 0u32..(1 << m) {
            let mut a = DVector::zeros(n);
            for (i, (u, alpha)) in self.vectors.iter().zip(&self.alphas).enumerate() {
                let s = if mask & (1 << i) != 0 { -1.0 } else { 1.0 };
                a += u * (s * alpha);
            }
            if a.norm() > 1e-12 {
                normals.push(a);
            }
        }
        let offsets = vec![1.0; normals.len()];
        HPolytope::new(normals, offsets)
    }
}

/// `|K| = Γ(1+n/p)^{-1} ∫ e^{-|x|_K^p} dx`, the integral importance sampled.
///
/// Any sample with `|x| > R · gauge(x)` contradicts the oracle's bounding
/// radius `R` and is reported as a non-coercive gauge.
pub fn gauge_volume_via_lemma7(body: &BodyOracle, p: f64, mc: &McParams) -> Result<Estimate> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("exponent {p} must be positive and finite")));
    }
    if !body.has_gauge() {
        return Err(Error::InvalidInput("body has no gauge evaluator".into()));
    }
    let n = body.dim();
    let r = body.radius();
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::NonCoercive);
    }
    let coercive = |x: &[f64], g: f64| {
        let len = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.is_finite() && g > 0.0 && len <= r * g * (1.0 + 1e-9)
    };
    for i in 0..n {
        for s in [1.0, -1.0] {
            let e: Vec<f64> = (0..n).map(|j| if i == j { s } else { 0.0 }).collect();
            if !coercive(&e, body.gauge(&e).expect("gauge checked")) {
                return Err(Error::NonCoercive);
            }
        }
    }
    let q = MixtureProposal::new(n, r);
    let moments = mc::sample_mean(mc, |rng| {
        let mut x = vec![0.0; n];
        let ln_q = q.draw(rng, &mut x);
        let g = body.gauge(&x).expect("gauge checked");
        if !coercive(&x, g) {
            return f64::NAN;
        }
        (-g.powf(p) - ln_q).exp()
    })?;
    if moments.mean.is_nan() {
        return Err(Error::NonCoercive);
    }
    Ok(moments.estimate().scaled((-log_gamma(1.0 + n as f64 / p)).exp()))
}

/// `2^n Γ(1+1/p)^n / Γ(1+n/p) · prod (c_i/alpha_i)^{c_i/p}`, evaluated in log space.
pub fn prop8_bound(weights: &[f64], alphas: &[f64], p: f64, n: usize) -> Result<f64> {
    if weights.len() != alphas.len() {
        return Err(Error::InvalidInput("weights and alphas differ in length".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - n as f64).abs() > 1e-8 {
        return Err(Error::TraceViolation {
            sum,
            expected: n as f64,
        });
    }
    if weights.iter().chain(alphas).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidInput("weights and alphas must be positive".into()));
    }
    let ln_product: f64 = weights.iter().zip(alphas).map(|(c, a)| c / p * (c / a).ln()).sum();
    Ok(lp_ball_volume(n, p) * ln_product.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeVolumeReport {
    pub volume: Estimate,
    pub bound: f64,
    /// `volume <= bound + 3 std_error`
    pub holds: bool,
}

/// Estimates the volume of the gauge's unit ball and compares it with
/// [`prop8_bound`] for the decomposition `(u_i, c_i)`.
pub fn verify_prop8(gauge: &WeightedLpGauge, weights: &[f64], mc: &McParams) -> Result<GaugeVolumeReport> {
    let system = BLSystem::new(gauge.dim(), gauge.vectors.clone(), weights.to_vec())?;
    system.validate()?;
    let bound = prop8_bound(weights, &gauge.alphas, gauge.p, gauge.dim())?;
    let volume = gauge_volume_via_lemma7(&gauge.to_oracle()?, gauge.p, mc)?;
    Ok(GaugeVolumeReport {
        volume,
        bound,
        holds: volume.value <= bound + 3.0 * volume.std_error,
    })
}

/// An `n`-dimensional subspace of `l_p^m`, spanned by the columns of the
/// `m × n` matrix whose rows are `basis`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSpec {
    pub m: usize,
    pub n: usize,
    pub p: f64,
    pub basis: Vec<Vec<f64>>,
}

impl SubspaceSpec {
    /// `l_p^n` embedded as itself.
    pub fn canonical(n: usize, p: f64) -> Self {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { m: n, n, p, basis }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidInput(format!("exponent {} outside [1, ∞)", self.p)));
        }
        if self.n == 0 || self.m < self.n {
            return Err(Error::InvalidInput(format!(
                "need m >= n >= 1, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if self.basis.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: self.basis.len(),
            });
        }
        if let Some(row) = self.basis.iter().find(|r| r.len() != self.n) {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: row.len(),
            });
        }
        if self.basis.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("basis entries must be finite".into()));
        }
        let sv = self.matrix().singular_values();
        if sv.min() <= 1e-10 * sv.max() {
            return Err(Error::RankDeficient);
        }
        Ok(())
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.n, |i, j| self.basis[i][j])
    }

    /// `|M y|_p`.
    pub fn norm(&self, y: &DVector<f64>) -> f64 {
        (self.matrix() * y)
            .iter()
            .map(|v| v.abs().powf(self.p))
            .sum::<f64>()
            .powf(1.0 / self.p)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Lewis position of a subspace: with `r_i` the rows of `M L`,
/// `u_i = r_i / |r_i|` and `c_i = |r_i|^p`, so `|M L x|_p^p = sum c_i |<u_i, x>|^p`
/// and `sum c_i u_i u_i^T = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct LewisPosition {
    pub vectors: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
    /// Change of basis `L`: Lewis coordinates `x` ↦ subspace coordinates `L x`.
    pub map: DMatrix<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl LewisPosition {
    /// The represented norm, a weighted gauge with `alpha_i = c_i`.
    pub fn gauge(&self, p: f64) -> WeightedLpGauge {
        WeightedLpGauge {
            vectors: self.vectors.clone(),
            alphas: self.weights.clone(),
            p,
        }
    }

    pub fn system(&self) -> BLSystem {
        BLSystem {
            dim: self.map.nrows(),
            vectors: self.vectors.clone(),
            weights: self.weights.clone(),
        }
    }
}

fn lewis_frame(rows: &DMatrix<f64>, p: f64) -> DMatrix<f64> {
    let n = rows.ncols();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for r in rows.row_iter() {
        let len = r.norm();
        if len > 0.0 {
            g += r.transpose() * r * len.powf(p - 2.0);
        }
    }
    g
}

/// Fixed point `L ← L G^{-2/(p+2)}` with `G = sum |r_i|^{p-2} r_i r_i^T`,
/// started from the orthonormalizing `L = (M^T M)^{-1/2}`. At `p = 2` the start
/// is already the answer; the exponent makes the linearized error contract by
/// `|p - 2| / (p + 2)` per step.
pub fn lewis_position(spec: &SubspaceSpec) -> Result<LewisPosition> {
    spec.validate()?;
    let mat = spec.matrix();
    let p = spec.p;
    let n = spec.n;
    let mut map = sym_pow(&(mat.transpose() * &mat), -0.5);
    let identity = DMatrix::<f64>::identity(n, n);
    let mut iterations = 0;
    let mut residual;
    loop {
        let g = lewis_frame(&(&mat * &map), p);
        residual = (&g - &identity).norm();
        if residual < LEWIS_TOL {
            break;
        }
        if iterations >= LEWIS_MAX_ITERATIONS || !residual.is_finite() {
            return Err(Error::NonConvergence { iterations, residual });
        }
        map = &map * sym_pow(&g, -2.0 / (p + 2.0));
        iterations += 1;
    }
    let rows = &mat * &map;
    let mut vectors = Vec::new();
    let mut weights = Vec::new();
    for r in rows.row_iter() {
        let len = r.norm();
        if len > 0.0 {
            vectors.push(r.transpose() / len);
            weights.push(len.powf(p));
        }
    }
    let residual = decomposition_residual(&vectors, &weights, n).frobenius;
    Ok(LewisPosition {
        vectors,
        weights,
        map,
        iterations,
        residual,
    })
}

/// Checks `|x|_K <= |x| / ρ` for the weighted norm with `alpha_i = c_i`,
/// `ρ = inscribed_radius(n, p)`, over [`RADIUS_CHECK_SAMPLES`] seeded unit
/// vectors. Returns `ρ`.
pub fn inscribed_radius_check(vectors: &[DVector<f64>], weights: &[f64], p: f64) -> Result<f64> {
    let gauge = WeightedLpGauge::new(vectors.to_vec(), weights.to_vec(), p)?;
    let n = gauge.dim();
    let rho = inscribed_radius(n, p);
    let mut rng = random::rng(RADIUS_CHECK_SEED);
    for _ in 0..RADIUS_CHECK_SAMPLES {
        let x = random::unit_vector(&mut rng, n);
        let g = gauge.eval(x.as_slice());
        if g > 1.0 / rho + 1e-9 {
            return Err(Error::RadiusViolation {
                gauge: g,
                limit: 1.0 / rho,
            });
        }
    }
    Ok(rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VrMethod {
    /// Exact polytope volume over the solved maximal ellipsoid.
    ExactJohn,
    /// Monte Carlo volume over the guaranteed inscribed ball; an upper bound on vr.
    InscribedRadius,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceVr {
    pub vr: Estimate,
    pub method: VrMethod,
    /// `vr(l_p^n)`
    pub reference: f64,
    pub lewis_residual: f64,
    pub lewis_iterations: usize,
    /// `vr <= reference + 3 std_error`
    pub holds: bool,
}

/// Volume ratio of the subspace's unit ball in Lewis position, compared
/// against `vr(l_p^n)`. Exact for `p = 1`; otherwise an upper estimate.
pub fn subspace_volume_ratio(spec: &SubspaceSpec, mc: &McParams) -> Result<SubspaceVr> {
    let lewis = lewis_position(spec)?;
    let n = spec.n;
    let nf = n as f64;
    let gauge = lewis.gauge(spec.p);
    let (vr, method) = if spec.p == 1.0 {
        (
            Estimate::exact(volume_ratio(&gauge.unit_ball_polytope()?)?),
            VrMethod::ExactJohn,
        )
    } else {
        let rho = inscribed_radius_check(&lewis.vectors, &lewis.weights, spec.p)?;
        let vol = gauge_volume_via_lemma7(&gauge.to_oracle()?, spec.p, mc)?;
        let value = (vol.value.max(0.0) / (unit_ball_volume(n) * rho.powi(n as i32))).powf(1.0 / nf);
        let std_error = if vol.value > 0.0 {
            value * vol.std_error / (nf * vol.value)
        } else {
            0.0
        };
        (
            Estimate {
                value,
                std_error,
                samples: vol.samples,
            },
            VrMethod::InscribedRadius,
        )
    };
    let reference = lp_volume_ratio(n, spec.p);
    Ok(SubspaceVr {
        vr,
        method,
        reference,
        lewis_residual: lewis.residual,
        lewis_iterations: lewis.iterations,
        holds: vr.value <= reference + 3.0 * vr.std_error + 1e-9 * reference,
    })
}

/// The `L_1` volume-ratio bound in three forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1VrBound {
    pub n: usize,
    /// `(2^n Γ(1+n/2) / (Γ(1+n) π^{n/2}))^{1/n}`, taken literally.
    pub displayed: f64,
    /// `vr(l_1^n) = sqrt(n) · displayed`, the actual volume ratio of `l_1^n`.
    pub corrected: f64,
    /// `sqrt(2e/π)`
    pub limit: f64,
}

pub fn l1_vr_bound(n: usize) -> L1VrBound {
    let nf = n as f64;
    let ln = nf * 2f64.ln() + log_gamma(1.0 + 0.5 * nf) - log_gamma(1.0 + nf) - 0.5 * nf * std::f64::consts::PI.ln();
    let displayed = (ln / nf).exp();
    L1VrBound {
        n,
        displayed,
        corrected: nf.sqrt() * displayed,
        limit: (2.0 * std::f64::consts::E / std::f64::consts::PI).sqrt(),
    }
}
