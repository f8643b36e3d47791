//! Standard test bodies.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::geometry::{HPolytope, VPolytope};
use crate::linalg::orthogonal_complement;

fn axis(n: usize, i: usize, s: f64) -> DVector<f64> {
    DVector::from_fn(n, |j, _| if i == j { s } else { 0.0 })
}

/// The cube `[-1, 1]^n`.
pub fn cube(n: usize) -> HPolytope {
    rect(&vec![1.0; n])
}

/// The box `prod [-h_i, h_i]`.
pub fn rect(half_widths: &[f64]) -> HPolytope {
    let n = half_widths.len();
    let mut normals = Vec::with_capacity(2 * n);
    let mut offsets = Vec::with_capacity(2 * n);
    for (i, &h) in half_widths.iter().enumerate() {
        for s in [1.0, -1.0] {
            normals.push(axis(n, i, s));
            offsets.push(h);
        }
    }
    HPolytope::new(normals, offsets).expect("box is a valid polytope")
}

/// `n + 1` unit vectors with pairwise inner product `-1/n`.
pub fn simplex_directions(n: usize) -> Vec<DVector<f64>> {
    let ones = DVector::from_element(n + 1, 1.0);
    let q = orthogonal_complement(&ones);
    (0..=n)
        .map(|i| {
            let r = q.row(i).transpose();
            &r / r.norm()
        })
        .collect()
}

/// Regular simplex circumscribing the unit ball, centered at the origin.
pub fn regular_simplex(n: usize) -> HPolytope {
    HPolytope::new(simplex_directions(n), vec![1.0; n + 1]).expect("simplex is a valid polytope")
}

/// `conv{±e_i}`.
pub fn cross_polytope(n: usize) -> VPolytope {
    let verts = (0..n).flat_map(|i| [axis(n, i, 1.0), axis(n, i, -1.0)]).collect();
    VPolytope::new(verts).expect("cross-polytope is full-dimensional")
}

/// Regular `k`-gon with unit inradius, one facet normal along `e_1`.
pub fn regular_polygon(k: usize) -> HPolytope {
    let normals = (0..k)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / k as f64;
            DVector::from_vec(vec![t.cos(), t.sin()])
        })
        .collect();
    HPolytope::new(normals, vec![1.0; k]).expect("polygon is a valid polytope")
}

/// Inscribed `k`-gon approximation of the unit disc.
pub fn disc_polygon(k: usize) -> VPolytope {
    lp_disc_polygon(2.0, k)
}

/// Polygon with `k` vertices on the unit circle of the `l_p` norm in the plane.
pub fn lp_disc_polygon(p: f64, k: usize) -> VPolytope {
    let verts = (0..k)
        .map(|j| {
            let t = 2.0 * PI * (j as f64 + 0.5) / k as f64;
            let d = DVector::from_vec(vec![t.cos(), t.sin()]);
            let norm = if p.is_infinite() {
                d.amax()
            } else {
                d.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
            };
            d / norm
        })
        .collect();
    VPolytope::new(verts).expect("polygon is full-dimensional")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_directions_are_equiangular() {
        for n in 1..=6 {
            let u = simplex_directions(n);
            for i in 0..=n {
                assert!((u[i].norm() - 1.0).abs() < 1e-14);
                for j in 0..i {
                    assert!((u[i].dot(&u[j]) + 1.0 / n as f64).abs() < 1e-13);
                }
            }
        }
    }
}
