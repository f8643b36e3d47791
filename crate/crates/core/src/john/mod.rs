//! John's ellipsoid: the maximal inscribed ellipsoid, John position, contact
//! points, and the weights of the identity decomposition certifying maximality.

mod ellipsoid;
pub mod nnls;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use ellipsoid::{solve_max_inscribed_ellipsoid, EllipsoidSolution, SolverOptions};

use crate::error::{Error, Result};
use crate::geometry::{AffineImage, AffineMap, Ellipsoid, HPolytope};
use crate::linalg::{decomposition_residual, unit_ball_volume, DecompositionResidual};
use crate::measures::{polytope_volume, surface_area};

/// Tolerance on `|sum c_i u_i u_i^T - I|_F`, the trace gap and `|sum c_i u_i|`.
pub const DECOMPOSITION_TOL: f64 = 1e-8;

/// Contact unit vectors `u_i` and weights `c_i > 0` with `sum c_i u_i u_i^T = I`
/// (and `sum c_i u_i = 0` unless the body was declared symmetric).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JohnDecomposition {
    #[serde(with = "crate::serde_vectors")]
    pub contacts: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
    pub symmetric: bool,
}

impl JohnDecomposition {
    pub fn dim(&self) -> usize {
        self.contacts.first().map_or(0, |u| u.len())
    }

    pub fn residual(&self) -> DecompositionResidual {
        decomposition_residual(&self.contacts, &self.weights, self.dim())
    }

    /// Checks every invariant of the decomposition at [`DECOMPOSITION_TOL`].
    pub fn validate(&self) -> Result<()> {
        if self.contacts.len() != self.weights.len() || self.contacts.is_empty() {
            return Err(Error::InvalidInput(
                "contacts and weights must be non-empty and equal length".into(),
            ));
        }
        if self.weights.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        if self.contacts.iter().any(|u| (u.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidInput("contacts must be unit vectors".into()));
        }
        let r = self.residual();
        if r.frobenius > DECOMPOSITION_TOL {
            return Err(Error::Infeasible { residual: r.frobenius });
        }
        if r.trace_gap > DECOMPOSITION_TOL {
            return Err(Error::TraceViolation {
                sum: self.weights.iter().sum(),
                expected: self.dim() as f64,
            });
        }
        if !self.symmetric && r.barycenter > DECOMPOSITION_TOL {
            return Err(Error::NonzeroBarycenter(r.barycenter));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn max_inscribed_ellipsoid(p: &HPolytope) -> Result<Ellipsoid> {
    Ok(solve_max_inscribed_ellipsoid(p, &SolverOptions::default())?.ellipsoid)
}

/// Affine image of `p` whose maximal inscribed ellipsoid is the unit ball,
/// together with the map `T(x) = B^{-1}(x - d)` that produced it.
pub fn john_position(p: &HPolytope) -> Result<(HPolytope, AffineMap)> {
    let e = max_inscribed_ellipsoid(p)?;
    let map = e.as_map().inverse()?;
    let image = p.apply_affine(&map)?;
    Ok((image, map))
}

/// `ε_contact = 1e-6 · max_i b_i`.
pub fn contact_tolerance(p: &HPolytope) -> f64 {
    1e-6 * p.offsets().iter().fold(0.0f64, |m, &b| m.max(b))
}

/// Unit normals of the facets touching the unit ball of a John-position body.
pub fn contact_points(p: &HPolytope) -> Result<Vec<DVector<f64>>> {
    let eps = contact_tolerance(p);
    if let Some(&b) = p.offsets().iter().find(|&&b| b < 1.0 - eps) {
        return Err(Error::NotJohnPosition {
            offset: b,
            tolerance: eps,
        });
    }
    Ok(p.normals()
        .iter()
        .zip(p.offsets())
        .filter(|(_, &b)| b - 1.0 <= eps)
        .map(|(a, _)| a.clone())
        .collect())
}

/// Stacked linear system for the weights: the `n(n+1)/2` independent entries
/// of `sum c_i u_i u_i^T = I` (off-diagonal rows scaled by `√2` so the
/// residual is the Frobenius norm), plus `sum c_i u_i = 0` when not symmetric.
fn decomposition_system(contacts: &[DVector<f64>], symmetric: bool) -> (DMatrix<f64>, DVector<f64>) {
    let n = contacts[0].len();
    let m = contacts.len();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        for l in j..n {
            let scale = if j == l { 1.0 } else { std::f64::consts::SQRT_2 };
            let row = contacts.iter().map(|u| scale * u[j] * u[l]).collect();
            rows.push((row, if j == l { 1.0 } else { 0.0 }));
        }
    }
    if !symmetric {
        for j in 0..n {
            rows.push((contacts.iter().map(|u| u[j]).collect(), 0.0));
        }
    }
    let a = DMatrix::from_fn(rows.len(), m, |i, k| rows[i].0[k]);
    let b = DVector::from_fn(rows.len(), |i, _| rows[i].1);
    (a, b)
}

/// Nonnegative weights realizing the identity decomposition over `contacts`.
///
/// Feasibility is decided by NNLS; among all feasible weightings the one of
/// minimum Euclidean norm is returned, and zero-weight contacts are dropped.
pub fn john_decomposition(contacts: &[DVector<f64>], symmetric: bool) -> Result<JohnDecomposition> {
    if contacts.is_empty() {
        return Err(Error::Infeasible {
            residual: f64::INFINITY,
        });
    }
    let n = contacts[0].len();
    if let Some(u) = contacts.iter().find(|u| u.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: u.len(),
        });
    }
    let contacts: Vec<DVector<f64>> = contacts.iter().map(|u| u.normalize()).collect();
    let (a, b) = decomposition_system(&contacts, symmetric);
    let (feasible, residual) = nnls::nnls(&a, &b);
    if residual > DECOMPOSITION_TOL {
        return Err(Error::Infeasible { residual });
    }
    let weights = nnls::min_norm_nonnegative(&a, &b)
        .filter(|w| (&a * w - &b).norm() <= residual.max(1e-12))
        .unwrap_or(feasible);
    let top = weights.amax();
    let (contacts, weights): (Vec<_>, Vec<_>) = contacts
        .into_iter()
        .zip(weights.iter().copied())
        .filter(|&(_, c)| c > 1e-13 * top)
        .unzip();
    let dec = JohnDecomposition {
        contacts,
        weights,
        symmetric,
    };
    dec.validate()?;
    Ok(dec)
}

/// `vr(P) = (|P| / |E|)^(1/n)` with `E` the maximal inscribed ellipsoid.
pub fn volume_ratio(p: &HPolytope) -> Result<f64> {
    let n = p.dim();
    let e = max_inscribed_ellipsoid(p)?;
    let vol = polytope_volume(&p.to_vrep()?)?;
    Ok((vol / (unit_ball_volume(n) * e.shape().determinant())).powf(1.0 / n as f64))
}

/// Everything the John pipeline produces for one body.
#[derive(Clone, Debug)]
pub struct JohnAnalysis {
    pub ellipsoid: Ellipsoid,
    pub kkt_residual: f64,
    /// Map into John position.
    pub map: AffineMap,
    pub image: HPolytope,
    pub decomposition: JohnDecomposition,
    /// Volume, surface area and isoperimetric quotient of the image.
    pub volume: f64,
    pub surface_area: f64,
    pub quotient: f64,
}

/// Solves for the maximal ellipsoid, moves `p` to John position, and
/// certifies the contact decomposition (`symmetric` as declared by the caller).
pub fn analyze(p: &HPolytope, symmetric: bool) -> Result<JohnAnalysis> {
    let sol = solve_max_inscribed_ellipsoid(p, &SolverOptions::default())?;
    let map = sol.ellipsoid.as_map().inverse()?;
    let image = p.apply_affine(&map)?;
    let decomposition = john_decomposition(&contact_points(&image)?, symmetric)?;
    let v = image.to_vrep()?;
    let volume = polytope_volume(&v)?;
    let surface_area = surface_area(&v)?;
    let n = p.dim() as f64;
    Ok(JohnAnalysis {
        ellipsoid: sol.ellipsoid,
        kkt_residual: sol.kkt_residual,
        map,
        image,
        decomposition,
        volume,
        surface_area,
        quotient: surface_area / volume.powf((n - 1.0) / n),
    })
}
