//! Seeded generators for random polytopes, affine maps and identity decompositions.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::brascamp_lieb::Density1D;
use crate::error::{Error, Result};
use crate::geometry::{AffineMap, HPolytope};
use crate::linalg::sym_pow;
use crate::lp_spaces::SubspaceSpec;
use crate::measures::sphere_point;

/// Fresh draws allowed per body before giving up.
pub const MAX_DRAWS: usize = 10;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for item `k` of a seeded batch, independent of the other items.
pub fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k);
    r
}

pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    let mut v = vec![0.0; n];
    sphere_point(rng, &mut v);
    DVector::from_vec(v)
}

/// Intersection of `3n..=6n` half-spaces, each tangent to a sphere of its own
/// radius in `[0.5, 1.5]`. The symmetric variant adds the mirror of every half-space.
/// Unbounded draws are rejected and redrawn up to [`MAX_DRAWS`] times.
pub fn random_polytope<R: Rng>(rng: &mut R, n: usize, symmetric: bool) -> Result<HPolytope> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    for _ in 0..MAX_DRAWS {
        let m = rng.random_range(3 * n..=6 * n);
        let mut normals = Vec::with_capacity(2 * m);
        let mut offsets = Vec::with_capacity(2 * m);
        for _ in 0..m {
            let a = unit_vector(rng, n);
            let b = rng.random_range(0.5..1.5);
            if symmetric {
                normals.push(-&a);
                offsets.push(b);
            }
            normals.push(a);
            offsets.push(b);
        }
        match HPolytope::new(normals, offsets) {
            Ok(p) => return Ok(p),
            Err(Error::Unbounded) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Degenerate(format!("no bounded polytope in {MAX_DRAWS} draws")))
}

fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    g.qr().q()
}

/// `x ↦ U diag(s) V x + t` with Haar-ish orthogonal `U, V`, singular values
/// `s_i = e^{u_i}`, `u_i ∈ [-1, 1]`, and a standard Gaussian shift scaled by 1/2.
pub fn random_affine<R: Rng>(rng: &mut R, n: usize) -> AffineMap {
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let s = DVector::from_fn(n, |_, _| rng.random_range(-1.0f64..1.0).exp());
    let shift = DVector::from_fn(n, |_, _| 0.5 * rng.sample::<f64, _>(rand_distr::StandardNormal));
    AffineMap::new(u * DMatrix::from_diagonal(&s) * v, shift).expect("singular values are positive")
}

/// Unit vectors `u_i` and weights `c_i` with `sum c_i u_i u_i^T = I`, built by
/// whitening `m` random Gaussian vectors. With `centered`, the vectors come in
/// antipodal pairs so `sum c_i u_i = 0` too.
pub fn random_decomposition<R: Rng>(rng: &mut R, n: usize, m: usize, centered: bool) -> (Vec<DVector<f64>>, Vec<f64>) {
    let raw: Vec<DVector<f64>> = (0..m)
        .map(|_| DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal)))
        .collect();
    let raw: Vec<DVector<f64>> = if centered {
        raw.iter().flat_map(|v| [v.clone(), -v]).collect()
    } else {
        raw
    };
    let mut g = DMatrix::<f64>::zeros(n, n);
    for v in &raw {
        g += v * v.transpose();
    }
    let w = sym_pow(&g, -0.5);
    let mut vectors = Vec::with_capacity(raw.len());
    let mut weights = Vec::with_capacity(raw.len());
    for v in &raw {
        let r = &w * v;
        let norm2 = r.norm_squared();
        weights.push(norm2);
        vectors.push(r / norm2.sqrt());
    }
    (vectors, weights)
}

/// `m × n` standard Gaussian basis of a subspace of `l_p^m`.
pub fn random_subspace<R: Rng>(rng: &mut R, m: usize, n: usize, p: f64) -> SubspaceSpec {
    let basis = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect()
        })
        .collect();
    SubspaceSpec { m, n, p, basis }
}

/// Positive weights `e^{u_i}`, `u_i ∈ [-1, 1]`.
pub fn random_alphas<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-1.0f64..1.0).exp()).collect()
}

/// A density from one of the tagged families with random parameters.
pub fn random_density<R: Rng>(rng: &mut R) -> Density1D {
    match rng.random_range(0..4) {
        0 => Density1D::Exponential,
        1 => Density1D::Gaussian {
            sigma: rng.random_range(0.3..2.0),
        },
        2 => {
            let a = rng.random_range(-2.0..0.5);
            Density1D::Indicator {
                a,
                b: a + rng.random_range(0.2..3.0),
            }
        }
        _ => {
            let k = rng.random_range(3..8);
            let mut t = rng.random_range(-2.5..-0.5);
            let mut grid = Vec::with_capacity(k);
            for _ in 0..k {
                grid.push(t);
                t += rng.random_range(0.2..1.0);
            }
            let values = (0..k).map(|_| rng.random_range(0.0..2.0)).collect();
            Density1D::Table { grid, values }
        }
    }
}
